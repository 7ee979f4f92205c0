#pragma once

// Week-over-week persistence of a keyword's results: how many week-1 URLs
// (and week-1 rank/URL pairs) are still present in later snapshots, and the
// plateau those counts settle at.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "webscape/model.hpp"

namespace webscape {

/// Snapshots of one (keyword, engine), strictly increasing by date.
class WeeklySeries {
public:
    /// Sorts by date; throws ValidationError when the series is empty, dates
    /// repeat, or snapshots disagree on keyword or engine.
    explicit WeeklySeries(std::vector<ResultSet> snapshots);

    const std::string& keyword() const noexcept { return snapshots_.front().keyword(); }
    Engine engine() const noexcept { return snapshots_.front().engine(); }
    const std::vector<ResultSet>& snapshots() const noexcept { return snapshots_; }
    std::size_t weeks() const noexcept { return snapshots_.size(); }

private:
    std::vector<ResultSet> snapshots_;
};

/// Index k (0-based here, week k+1 in reports) holds the matches between
/// week k+1 and week 1. `counts[0]` is the week-1 baseline.
struct DecayCurve {
    std::string label;
    std::vector<Date> dates;
    std::vector<std::size_t> counts;
    std::vector<double> fractions;

    std::size_t weeks() const noexcept { return counts.size(); }
    std::size_t baseline() const noexcept { return counts.empty() ? 0 : counts.front(); }
};

/// Distinct normalized URLs of week k shared with week 1.
DecayCurve same_url_counts(const WeeklySeries& series);
/// Ranks present in both weeks whose normalized URLs agree.
DecayCurve same_rank_counts(const WeeklySeries& series);

inline constexpr std::size_t kDefaultEquilibriumWindow = 4;
inline constexpr double kDefaultSlopeTolerance = 0.005;

struct Equilibrium {
    double level = 0;        // mean count over the qualifying window
    int onset_week = 0;      // 1-based midpoint week of that window
    int window_start = 0;    // 1-based first week of the window
    double slope = 0;        // least-squares slope of the window, counts per week
};

/// First trailing window of `window` weeks whose least-squares slope and
/// every week-to-week change lie within ±slope_tol·counts[week 1]. Returns
/// nullopt ("not reached") when no window qualifies. Throws ValidationError
/// for window < 2 or a curve shorter than the window.
std::optional<Equilibrium> equilibrium_level(const std::vector<double>& counts, std::size_t window,
                                             double slope_tol);
std::optional<Equilibrium> equilibrium_level(const DecayCurve& curve, std::size_t window,
                                             double slope_tol);

/// Least-squares slope of `values` against 0, 1, 2, ...
double least_squares_slope(const std::vector<double>& values);

struct SeriesComparison {
    std::vector<std::string> labels;
    /// rows[w][c]: fraction of curve c in week w+1, nullopt past a curve's end.
    std::vector<std::vector<std::optional<double>>> rows;
    std::vector<std::optional<Equilibrium>> equilibria;
    /// Equilibrium level divided by the curve's week-1 count.
    std::vector<std::optional<double>> equilibrium_fractions;
    /// Curve indices by ascending equilibrium fraction; curves that never
    /// settle come last, in input order.
    std::vector<std::size_t> equilibrium_order;
};

/// Throws ValidationError for fewer than two curves. Curves too short for
/// `window` are reported as not reaching equilibrium.
SeriesComparison compare_series(const std::vector<DecayCurve>& curves,
                                std::size_t window = kDefaultEquilibriumWindow,
                                double slope_tol = kDefaultSlopeTolerance);

}  // namespace webscape
