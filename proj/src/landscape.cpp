#include "webscape/landscape.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "webscape/csv.hpp"
#include "webscape/errors.hpp"
#include "webscape/table.hpp"

namespace webscape {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string squash(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

void require_same_geometry(const RasterGrid& a, const RasterGrid& b) {
    if (!(a.spec() == b.spec()))
        throw ValidationError("rasters have different extents or dimensions");
}

// Great-circle distance in metres, using precomputed cosines of the latitudes.
double distance_m(double lat1, double cos_lat1, double lon1, double lat2, double cos_lat2,
                  double lon2) {
    const double s1 = std::sin((lat2 - lat1) * kDeg / 2);
    const double s2 = std::sin((lon2 - lon1) * kDeg / 2);
    const double h = s1 * s1 + cos_lat1 * cos_lat2 * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

struct CellWindow {
    std::size_t row_begin = 0, row_end = 0;  // [begin, end)
    std::size_t col_begin = 0, col_end = 0;
};

// Rows and columns whose centres can be within `radius_m` of the point.
CellWindow window_for(const WeightedPoint& p, const GridSpec& grid, double radius_m) {
    const double angular = radius_m / kEarthRadiusM;            // radians
    const double dlat = angular / kDeg;                          // degrees
    const double margin = 1e-9;
    const double north = p.latitude + dlat + margin;
    const double south = p.latitude - dlat - margin;

    CellWindow w;
    const double dy = grid.cell_height();
    const auto row_of = [&](double lat) { return (grid.max_lat - lat) / dy - 0.5; };
    const double r0 = std::ceil(row_of(north));
    const double r1 = std::floor(row_of(south));
    const double n_rows = static_cast<double>(grid.n_rows);
    w.row_begin = static_cast<std::size_t>(std::clamp(r0, 0.0, n_rows));
    w.row_end = static_cast<std::size_t>(std::clamp(r1 + 1, 0.0, n_rows));

    const double n_cols = static_cast<double>(grid.n_cols);
    const double cos_lat = std::cos(p.latitude * kDeg);
    double dlon = 360.0;
    if (north < 90.0 && south > -90.0 && std::sin(angular) < cos_lat)
        dlon = std::asin(std::sin(angular) / cos_lat) / kDeg + margin;
    const double west = p.longitude - dlon;
    const double east = p.longitude + dlon;
    if (dlon >= 180.0 || west < -180.0 || east > 180.0) {
        // Touches a pole or the antimeridian: scan every column.
        w.col_begin = 0;
        w.col_end = grid.n_cols;
    } else {
        const double dx = grid.cell_width();
        const double c0 = std::ceil((west - grid.min_lon) / dx - 0.5);
        const double c1 = std::floor((east - grid.min_lon) / dx - 0.5);
        w.col_begin = static_cast<std::size_t>(std::clamp(c0, 0.0, n_cols));
        w.col_end = static_cast<std::size_t>(std::clamp(c1 + 1, 0.0, n_cols));
    }
    return w;
}

}  // namespace

std::string_view to_string(PopulationMethod method) {
    switch (method) {
        case PopulationMethod::None: return "none";
        case PopulationMethod::InverseRank: return "inverserank";
        case PopulationMethod::LogRank: return "logrank";
        case PopulationMethod::Fuzzy: return "fuzzy";
    }
    return "none";
}

std::string_view to_string(Normalization normalization) {
    switch (normalization) {
        case Normalization::MaxScore: return "maxscore";
        case Normalization::ScoreRange: return "scorerange";
    }
    return "maxscore";
}

PopulationMethod parse_population_method(std::string_view text) {
    const auto key = squash(text);
    if (key == "none" || key == "zero" || key == "unweighted") return PopulationMethod::None;
    if (key == "inverserank" || key == "inverse") return PopulationMethod::InverseRank;
    if (key == "logrank" || key == "log" || key == "logarithmic") return PopulationMethod::LogRank;
    if (key == "fuzzy") return PopulationMethod::Fuzzy;
    throw ValidationError("unknown population method '" + std::string(text) +
                          "' (none, inverse-rank, log-rank, fuzzy)");
}

Normalization parse_normalization(std::string_view text) {
    const auto key = squash(text);
    if (key == "maxscore" || key == "max") return Normalization::MaxScore;
    if (key == "scorerange" || key == "range") return Normalization::ScoreRange;
    throw ValidationError("unknown normalization '" + std::string(text) +
                          "' (max-score, score-range)");
}

void KernelParams::validate() const {
    if (!(radius_m > 0) || !std::isfinite(radius_m))
        throw ValidationError("kernel radius must be > 0 m");
}

double population_weight(int rank, int total, PopulationMethod method) {
    if (total < 1 || rank < 1 || rank > total)
        throw ValidationError("rank " + std::to_string(rank) + " outside 1.." +
                              std::to_string(total));
    const double p = static_cast<double>(total + 1 - rank);
    switch (method) {
        case PopulationMethod::None: return 1.0;
        case PopulationMethod::InverseRank: return p;
        case PopulationMethod::LogRank: return std::log(p) + 1.0;
        case PopulationMethod::Fuzzy: return p / static_cast<double>(total);
    }
    return 1.0;
}

WeightedPoint WeightedPoint::make(const GeoLocation& location, double weight) {
    if (!(weight > 0) || !std::isfinite(weight)) throw ValidationError("point weight must be > 0");
    return WeightedPoint{location.latitude(), location.longitude(), weight};
}

double quartic_kernel(double distance_m, double radius_m) {
    if (distance_m > radius_m) return 0.0;
    const double u = distance_m / radius_m;
    const double t = 1.0 - u * u;
    return 3.0 / (std::numbers::pi * radius_m * radius_m) * t * t;
}

RasterGrid kernel_density(std::span<const WeightedPoint> points, const GridSpec& grid,
                          double radius_m, unsigned threads) {
    grid.validate();
    if (!(radius_m > 0)) throw ValidationError("kernel radius must be > 0 m");

    // Canonical order makes every cell's summation order independent of input order.
    std::vector<WeightedPoint> sorted(points.begin(), points.end());
    for (const auto& p : sorted) {
        if (!(p.weight > 0)) throw ValidationError("point weight must be > 0");
    }
    std::sort(sorted.begin(), sorted.end(), [](const WeightedPoint& a, const WeightedPoint& b) {
        return std::tie(a.latitude, a.longitude, a.weight) <
               std::tie(b.latitude, b.longitude, b.weight);
    });

    std::vector<CellWindow> windows;
    std::vector<double> cos_lat;
    windows.reserve(sorted.size());
    for (const auto& p : sorted) {
        windows.push_back(window_for(p, grid, radius_m));
        cos_lat.push_back(std::cos(p.latitude * kDeg));
    }

    std::vector<double> col_lon(grid.n_cols);
    for (std::size_t c = 0; c < grid.n_cols; ++c) col_lon[c] = grid.cell_center_lon(c);

    RasterGrid out(grid);
    auto values = out.values();
    const auto fill_rows = [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const auto& p = sorted[i];
            const auto& w = windows[i];
            const std::size_t r0 = std::max(w.row_begin, row_begin);
            const std::size_t r1 = std::min(w.row_end, row_end);
            for (std::size_t r = r0; r < r1; ++r) {
                const double lat = grid.cell_center_lat(r);
                const double cos_cell = std::cos(lat * kDeg);
                double* row = values.data() + r * grid.n_cols;
                for (std::size_t c = w.col_begin; c < w.col_end; ++c) {
                    const double d =
                        distance_m(p.latitude, cos_lat[i], p.longitude, lat, cos_cell, col_lon[c]);
                    if (d <= radius_m) row[c] += p.weight * quartic_kernel(d, radius_m);
                }
            }
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, grid.n_rows));
    if (workers <= 1) {
        fill_rows(0, grid.n_rows);
    } else {
        std::vector<std::thread> pool;
        const std::size_t band = (grid.n_rows + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t) {
            const std::size_t begin = t * band;
            const std::size_t end = std::min(grid.n_rows, begin + band);
            if (begin >= end) break;
            pool.emplace_back(fill_rows, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

RasterGrid normalize(const RasterGrid& raster, Normalization method) {
    const double lo = raster.min();
    const double hi = raster.max();
    std::vector<double> values(raster.values().begin(), raster.values().end());
    if (method == Normalization::MaxScore) {
        if (!(hi > 0))
            throw ValidationError("max-score normalization needs a positive maximum");
        for (double& v : values) v /= hi;
    } else {
        if (!(hi > lo)) throw ValidationError("score-range normalization needs a non-constant raster");
        const double span = hi - lo;
        for (double& v : values) v = (v - lo) / span;
    }
    return RasterGrid(raster.spec(), std::move(values));
}

RasterGrid differential(const RasterGrid& keyword, const RasterGrid& background,
                        Normalization method) {
    require_same_geometry(keyword, background);
    if (keyword.max() == 0.0 || background.max() == 0.0)
        throw ValidationError("differential needs rasters with a non-zero maximum");
    const auto k = normalize(keyword, method);
    const auto b = normalize(background, method);
    std::vector<double> values(k.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = k.values()[i] - b.values()[i];
    return RasterGrid(keyword.spec(), std::move(values));
}

std::string PointSelection::describe() const {
    std::ostringstream out;
    out << records << " records: " << points.size() << " usable, " << without_location
        << " without location, " << sentinel << " at placeholder locations";
    if (not_accurate) out << ", " << not_accurate << " not coded spatially accurate";
    return out.str();
}

PointSelection select_points(std::span<const ResultSet> sets, const PointFilter& filter) {
    PointSelection sel;
    for (const auto& set : sets) {
        const int total = static_cast<int>(set.total());
        for (const auto& r : set.records()) {
            ++sel.records;
            if (!r.location) {
                ++sel.without_location;
                continue;
            }
            if (classify_sentinel(*r.location, filter.policy) == SentinelStatus::Sentinel) {
                ++sel.sentinel;
                continue;
            }
            if (filter.accurate_only && r.accuracy && !is_spatially_accurate(*r.accuracy)) {
                ++sel.not_accurate;
                continue;
            }
            // Ranks need not be contiguous in hand-assembled files; N is the
            // larger of the record count and the highest rank.
            const int n = std::max(total, set.records().back().rank);
            sel.points.push_back(RankedPoint{*r.location, r.rank, n});
        }
    }
    return sel;
}

std::vector<WeightedPoint> weight_points(std::span<const RankedPoint> points,
                                         PopulationMethod method) {
    std::vector<WeightedPoint> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back(WeightedPoint::make(p.location, population_weight(p.rank, p.total, method)));
    return out;
}

RasterGrid build_background(std::span<const ResultSet> sets, const KernelParams& params,
                            const GridSpec& grid, const SentinelPolicy& policy) {
    params.validate();
    PointFilter filter;
    filter.policy = policy;
    const auto sel = select_points(sets, filter);
    if (sel.points.empty())
        throw ValidationError("background has no geolocated records (" + sel.describe() + ")");
    const auto weighted = weight_points(sel.points, params.population_method);
    return kernel_density(weighted, grid, params.radius_m);
}

std::vector<double> default_sweep_radii() {
    std::vector<double> radii;
    for (int r = 50'000; r <= 300'000; r += 50'000) radii.push_back(r);
    return radii;
}

std::string sweep_name(double radius_m, PopulationMethod method, Normalization normalization) {
    return csv::format_double(radius_m) + "_" + std::string(to_string(method)) + "_" +
           std::string(to_string(normalization));
}

std::size_t SweepResult::failures() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [](const SweepEntry& e) { return !e.error.empty(); }));
}

const SweepEntry* SweepResult::find(std::string_view name) const {
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const SweepEntry& e) { return e.name == name; });
    return it == entries.end() ? nullptr : &*it;
}

SweepResult parameter_sweep(std::span<const RankedPoint> points, const GridSpec& grid,
                            std::vector<double> radii, std::vector<PopulationMethod> methods,
                            std::vector<Normalization> normalizations) {
    if (radii.empty() || methods.empty() || normalizations.empty())
        throw ValidationError("sweep needs at least one radius, method and normalization");
    const auto dedupe = [](auto& v) {
        std::vector<std::decay_t<decltype(v[0])>> seen;
        for (const auto& x : v) {
            if (std::find(seen.begin(), seen.end(), x) == seen.end()) seen.push_back(x);
        }
        v = std::move(seen);
    };
    dedupe(radii);
    dedupe(methods);
    dedupe(normalizations);

    SweepResult result;
    for (const double radius : radii) {
        for (const auto method : methods) {
            std::optional<RasterGrid> density;
            std::string density_error;
            try {
                if (!(radius > 0)) throw ValidationError("kernel radius must be > 0 m");
                if (points.empty()) throw ValidationError("no points to map");
                density = kernel_density(weight_points(points, method), grid, radius);
            } catch (const Error& e) {
                density_error = e.what();
            }
            for (const auto norm : normalizations) {
                SweepEntry entry;
                entry.name = sweep_name(radius, method, norm);
                entry.radius_m = radius;
                entry.method = method;
                entry.normalization = norm;
                if (density) {
                    try {
                        entry.raster = normalize(*density, norm);
                    } catch (const Error& e) {
                        entry.error = e.what();
                    }
                } else {
                    entry.error = density_error;
                }
                result.entries.push_back(std::move(entry));
            }
        }
    }
    return result;
}

void write_sweep(const SweepResult& sweep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string manifest = csv::format_row(
        {"name", "radius_m", "population_method", "normalization", "file", "status", "message"});
    for (const auto& e : sweep.entries) {
        std::string file;
        if (e.raster) {
            file = e.name + ".asc";
            write_ascii_grid_file(dir / file, *e.raster);
        }
        manifest += csv::format_row({e.name, csv::format_double(e.radius_m),
                                     std::string(to_string(e.method)),
                                     std::string(to_string(e.normalization)), file,
                                     e.error.empty() ? "ok" : "failed", e.error});
    }
    write_text_file(dir / "manifest.csv", manifest);
}

}  // namespace webscape
