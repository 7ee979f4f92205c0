#include "webscape/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "webscape/csv.hpp"
#include "webscape/errors.hpp"
#include "webscape/geolocate.hpp"
#include "webscape/table.hpp"

namespace webscape {

void GridSpec::validate() const {
    if (!(min_lon < max_lon) || !(min_lat < max_lat))
        throw ValidationError("grid extent must satisfy min < max on both axes");
    if (min_lon < -180 || max_lon > 180 || min_lat < -90 || max_lat > 90)
        throw ValidationError("grid extent exceeds the globe");
    if (n_cols == 0 || n_rows == 0) throw ValidationError("grid needs at least one row and column");
}

GridSpec GridSpec::from_cell_size(double min_lon, double min_lat, double max_lon, double max_lat,
                                  double cell_deg) {
    if (!(cell_deg > 0)) throw ValidationError("cell size must be > 0");
    GridSpec spec;
    spec.min_lon = min_lon;
    spec.min_lat = min_lat;
    spec.n_cols = static_cast<std::size_t>(std::llround((max_lon - min_lon) / cell_deg));
    spec.n_rows = static_cast<std::size_t>(std::llround((max_lat - min_lat) / cell_deg));
    spec.max_lon = min_lon + static_cast<double>(spec.n_cols) * cell_deg;
    spec.max_lat = min_lat + static_cast<double>(spec.n_rows) * cell_deg;
    spec.validate();
    return spec;
}

double GridSpec::cell_area_m2(std::size_t row) const {
    constexpr double deg = std::numbers::pi / 180.0;
    const double north = (max_lat - static_cast<double>(row) * cell_height()) * deg;
    const double south = (max_lat - static_cast<double>(row + 1) * cell_height()) * deg;
    return kEarthRadiusM * kEarthRadiusM * cell_width() * deg * (std::sin(north) - std::sin(south));
}

RasterGrid::RasterGrid(GridSpec spec) : spec_(spec) {
    spec_.validate();
    values_.assign(spec_.n_cols * spec_.n_rows, 0.0);
}

RasterGrid::RasterGrid(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.n_cols * spec_.n_rows)
        throw ValidationError("raster needs " + std::to_string(spec_.n_cols * spec_.n_rows) +
                              " values, got " + std::to_string(values_.size()));
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
        throw ValidationError("raster values must be finite");
}

double RasterGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RasterGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::string write_ascii_grid(const RasterGrid& raster) {
    const auto& spec = raster.spec();
    std::ostringstream out;
    out << "ncols " << spec.n_cols << "\n";
    out << "nrows " << spec.n_rows << "\n";
    out << "xllcorner " << csv::format_double(spec.min_lon) << "\n";
    out << "yllcorner " << csv::format_double(spec.min_lat) << "\n";
    const double dx = spec.cell_width();
    const double dy = spec.cell_height();
    if (std::abs(dx - dy) <= 1e-12 * std::max(std::abs(dx), std::abs(dy))) {
        out << "cellsize " << csv::format_double(dx) << "\n";
    } else {
        out << "dx " << csv::format_double(dx) << "\n";
        out << "dy " << csv::format_double(dy) << "\n";
    }
    out << "NODATA_value " << csv::format_double(kAsciiNoData) << "\n";
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        for (std::size_t c = 0; c < spec.n_cols; ++c) {
            if (c) out << ' ';
            out << csv::format_double(raster.at(r, c));
        }
        out << '\n';
    }
    return out.str();
}

RasterGrid read_ascii_grid(std::string_view text) {
    std::istringstream in{std::string(text)};
    GridSpec spec;
    double xll = 0, yll = 0, dx = 0, dy = 0, nodata = kAsciiNoData;
    bool have_cols = false, have_rows = false, have_x = false, have_y = false;
    std::string key;
    // Header keys until the first numeric token.
    for (;;) {
        const auto pos = in.tellg();
        if (!(in >> key)) throw ParseError(0, "truncated ASCII grid header");
        double probe = 0;
        if (csv::parse_double(key, probe)) {
            in.seekg(pos);
            break;
        }
        std::string lowered = key;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        std::string value_text;
        double value = 0;
        if (!(in >> value_text) || !csv::parse_double(value_text, value))
            throw ParseError(0, "bad value for header key '" + key + "'");
        if (lowered == "ncols") {
            spec.n_cols = static_cast<std::size_t>(value);
            have_cols = true;
        } else if (lowered == "nrows") {
            spec.n_rows = static_cast<std::size_t>(value);
            have_rows = true;
        } else if (lowered == "xllcorner") {
            xll = value;
            have_x = true;
        } else if (lowered == "yllcorner") {
            yll = value;
            have_y = true;
        } else if (lowered == "cellsize") {
            dx = dy = value;
        } else if (lowered == "dx") {
            dx = value;
        } else if (lowered == "dy") {
            dy = value;
        } else if (lowered == "nodata_value") {
            nodata = value;
        } else {
            throw ParseError(0, "unknown ASCII grid header key '" + key + "'");
        }
    }
    if (!have_cols || !have_rows || !have_x || !have_y || !(dx > 0) || !(dy > 0))
        throw ParseError(0, "ASCII grid header is incomplete");
    spec.min_lon = xll;
    spec.min_lat = yll;
    spec.max_lon = xll + dx * static_cast<double>(spec.n_cols);
    spec.max_lat = yll + dy * static_cast<double>(spec.n_rows);

    std::vector<double> values;
    values.reserve(spec.n_cols * spec.n_rows);
    std::string token;
    while (in >> token) {
        double v = 0;
        if (!csv::parse_double(token, v)) throw ParseError(0, "bad cell value '" + token + "'");
        values.push_back(v == nodata ? 0.0 : v);
    }
    return RasterGrid(spec, std::move(values));
}

void write_ascii_grid_file(const std::filesystem::path& path, const RasterGrid& raster) {
    write_text_file(path, write_ascii_grid(raster));
}

}  // namespace webscape
