#pragma once

// Web information landscapes: rank-weighted kernel density of geolocated
// results, normalisation, differencing against a background landscape, and
// the parameter sweep over radius, weighting and normalisation.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webscape/geolocate.hpp"
#include "webscape/model.hpp"
#include "webscape/raster.hpp"

namespace webscape {

enum class PopulationMethod { None, InverseRank, LogRank, Fuzzy };
enum class Normalization { MaxScore, ScoreRange };

/// Compact tokens used in sweep names: none, inverserank, logrank, fuzzy.
std::string_view to_string(PopulationMethod method);
/// maxscore, scorerange.
std::string_view to_string(Normalization normalization);
/// Accepts the compact tokens and hyphenated/underscored spellings.
PopulationMethod parse_population_method(std::string_view text);
Normalization parse_normalization(std::string_view text);

inline constexpr double kDefaultRadiusM = 200'000.0;

struct KernelParams {
    double radius_m = kDefaultRadiusM;
    PopulationMethod population_method = PopulationMethod::LogRank;
    Normalization normalization = Normalization::MaxScore;

    void validate() const;
};

/// With p = (total + 1) - rank:
///   None        -> 1
///   InverseRank -> p
///   LogRank     -> ln(p) + 1
///   Fuzzy       -> p / total
/// Throws ValidationError unless 1 <= rank <= total.
double population_weight(int rank, int total, PopulationMethod method);

struct WeightedPoint {
    double latitude = 0;
    double longitude = 0;
    double weight = 1;

    /// Throws ValidationError when weight <= 0.
    static WeightedPoint make(const GeoLocation& location, double weight);
};

/// Quartic kernel normalised to unit volume over its disk, per m².
double quartic_kernel(double distance_m, double radius_m);

/// Sum over points of weight · K(d), d the great-circle distance from the cell
/// centre in metres. Input order does not affect the result; `threads` = 0
/// picks the hardware concurrency and any thread count gives bit-identical output.
RasterGrid kernel_density(std::span<const WeightedPoint> points, const GridSpec& grid,
                          double radius_m, unsigned threads = 0);

/// MaxScore: v / max. ScoreRange: (v - min) / (max - min). Throws
/// ValidationError for a non-positive maximum (MaxScore) or a constant raster
/// (ScoreRange).
RasterGrid normalize(const RasterGrid& raster, Normalization method);

/// normalize(keyword) - normalize(background) cell by cell; MaxScore gives
/// (k / max k) - (b / max b). Throws on mismatched geometry or a zero maximum.
RasterGrid differential(const RasterGrid& keyword, const RasterGrid& background,
                        Normalization method = Normalization::MaxScore);

/// A geolocated record with the rank context needed for weighting.
struct RankedPoint {
    GeoLocation location;
    int rank = 1;
    int total = 1;
};

struct PointFilter {
    SentinelPolicy policy = SentinelPolicy::us_default();
    /// Drop records coded E3, I3 or NA. Uncoded records are kept.
    bool accurate_only = false;
};

struct PointSelection {
    std::vector<RankedPoint> points;
    std::size_t records = 0;
    std::size_t without_location = 0;
    std::size_t sentinel = 0;
    std::size_t not_accurate = 0;

    std::string describe() const;
};

/// Every record contributes with its set's own total as N.
PointSelection select_points(std::span<const ResultSet> sets, const PointFilter& filter = {});

std::vector<WeightedPoint> weight_points(std::span<const RankedPoint> points,
                                         PopulationMethod method);

/// Pools the geolocated, non-sentinel records of all sets and runs
/// kernel_density with the configured weights. Throws ValidationError when no
/// usable record remains.
RasterGrid build_background(std::span<const ResultSet> sets, const KernelParams& params,
                            const GridSpec& grid,
                            const SentinelPolicy& policy = SentinelPolicy::us_default());

std::vector<double> default_sweep_radii();

/// `<radius>_<method>_<normalization>`, e.g. "200000_logrank_maxscore".
std::string sweep_name(double radius_m, PopulationMethod method, Normalization normalization);

struct SweepEntry {
    std::string name;
    double radius_m = 0;
    PopulationMethod method = PopulationMethod::None;
    Normalization normalization = Normalization::MaxScore;
    std::optional<RasterGrid> raster;
    std::string error;  // non-empty when this combination failed
};

struct SweepResult {
    std::vector<SweepEntry> entries;

    std::size_t failures() const;
    const SweepEntry* find(std::string_view name) const;
};

/// One normalised density raster per distinct (radius, method, normalization).
/// Duplicate list entries collapse; a failing combination is recorded and the
/// sweep continues. Throws ValidationError when a list is empty.
SweepResult parameter_sweep(std::span<const RankedPoint> points, const GridSpec& grid,
                            std::vector<double> radii, std::vector<PopulationMethod> methods,
                            std::vector<Normalization> normalizations);

/// Writes `<name>.asc` for each successful entry plus `manifest.csv`
/// (name, radius_m, population_method, normalization, file, status, message).
void write_sweep(const SweepResult& sweep, const std::filesystem::path& dir);

}  // namespace webscape
