#include "webscape/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "webscape/errors.hpp"
#include "webscape/url.hpp"

namespace webscape {

namespace {

std::unordered_set<std::string> url_set(const ResultSet& set) {
    std::unordered_set<std::string> urls;
    urls.reserve(set.total());
    for (const auto& r : set.records()) urls.insert(normalize_url(r.url));
    return urls;
}

DecayCurve make_curve(const WeeklySeries& series) {
    DecayCurve curve;
    curve.label = series.keyword();
    for (const auto& s : series.snapshots()) curve.dates.push_back(s.search_date());
    return curve;
}

void fill_fractions(DecayCurve& curve) {
    const double base = static_cast<double>(curve.baseline());
    curve.fractions.clear();
    for (const auto c : curve.counts)
        curve.fractions.push_back(base > 0 ? static_cast<double>(c) / base : 0.0);
}

}  // namespace

WeeklySeries::WeeklySeries(std::vector<ResultSet> snapshots) : snapshots_(std::move(snapshots)) {
    if (snapshots_.empty()) throw ValidationError("a weekly series needs at least one snapshot");
    std::stable_sort(snapshots_.begin(), snapshots_.end(), [](const auto& a, const auto& b) {
        return a.search_date() < b.search_date();
    });
    const auto& first = snapshots_.front();
    for (std::size_t i = 0; i < snapshots_.size(); ++i) {
        const auto& s = snapshots_[i];
        if (s.keyword() != first.keyword() || s.engine() != first.engine())
            throw ValidationError("snapshot dated " + format_date(s.search_date()) +
                                  " is for a different keyword or engine");
        if (i > 0 && snapshots_[i - 1].search_date() == s.search_date())
            throw ValidationError("two snapshots share the date " + format_date(s.search_date()));
    }
}

DecayCurve same_url_counts(const WeeklySeries& series) {
    auto curve = make_curve(series);
    const auto week1 = url_set(series.snapshots().front());
    for (const auto& snapshot : series.snapshots()) {
        std::size_t shared = 0;
        for (const auto& url : url_set(snapshot)) shared += week1.count(url);
        curve.counts.push_back(shared);
    }
    fill_fractions(curve);
    return curve;
}

DecayCurve same_rank_counts(const WeeklySeries& series) {
    auto curve = make_curve(series);
    const auto& week1 = series.snapshots().front();
    for (const auto& snapshot : series.snapshots()) {
        std::size_t same = 0;
        for (const auto& r : snapshot.records()) {
            const auto* original = week1.find_rank(r.rank);
            if (original && normalize_url(original->url) == normalize_url(r.url)) ++same;
        }
        curve.counts.push_back(same);
    }
    fill_fractions(curve);
    return curve;
}

double least_squares_slope(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double x_mean = static_cast<double>(n - 1) / 2.0;
    const double y_mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        sxy += dx * (values[i] - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

std::optional<Equilibrium> equilibrium_level(const std::vector<double>& counts, std::size_t window,
                                             double slope_tol) {
    if (window < 2) throw ValidationError("equilibrium window must be >= 2");
    if (counts.size() < window)
        throw ValidationError("curve has " + std::to_string(counts.size()) +
                              " weeks, fewer than the window of " + std::to_string(window));
    if (!(slope_tol >= 0)) throw ValidationError("slope tolerance must be >= 0");

    const double tolerance = slope_tol * counts.front();
    for (std::size_t start = 0; start + window <= counts.size(); ++start) {
        const std::vector<double> w(counts.begin() + static_cast<std::ptrdiff_t>(start),
                                    counts.begin() + static_cast<std::ptrdiff_t>(start + window));
        const double slope = least_squares_slope(w);
        if (std::abs(slope) > tolerance) continue;
        bool steady = true;
        for (std::size_t i = 1; i < w.size() && steady; ++i)
            steady = std::abs(w[i] - w[i - 1]) <= tolerance;
        if (!steady) continue;

        Equilibrium eq;
        eq.level = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(window);
        eq.window_start = static_cast<int>(start) + 1;
        eq.onset_week = eq.window_start + static_cast<int>((window - 1) / 2);
        eq.slope = slope;
        return eq;
    }
    return std::nullopt;
}

std::optional<Equilibrium> equilibrium_level(const DecayCurve& curve, std::size_t window,
                                             double slope_tol) {
    std::vector<double> counts(curve.counts.begin(), curve.counts.end());
    return equilibrium_level(counts, window, slope_tol);
}

SeriesComparison compare_series(const std::vector<DecayCurve>& curves, std::size_t window,
                                double slope_tol) {
    if (curves.size() < 2) throw ValidationError("comparison needs at least two curves");
    SeriesComparison cmp;
    std::size_t longest = 0;
    for (const auto& c : curves) {
        cmp.labels.push_back(c.label);
        longest = std::max(longest, c.weeks());
        std::optional<Equilibrium> eq;
        if (c.weeks() >= window) eq = equilibrium_level(c, window, slope_tol);
        cmp.equilibria.push_back(eq);
        if (eq && c.baseline() > 0)
            cmp.equilibrium_fractions.push_back(eq->level / static_cast<double>(c.baseline()));
        else
            cmp.equilibrium_fractions.push_back(std::nullopt);
    }
    for (std::size_t w = 0; w < longest; ++w) {
        std::vector<std::optional<double>> row;
        for (const auto& c : curves)
            row.push_back(w < c.fractions.size() ? std::optional<double>(c.fractions[w])
                                                 : std::nullopt);
        cmp.rows.push_back(std::move(row));
    }
    cmp.equilibrium_order.resize(curves.size());
    std::iota(cmp.equilibrium_order.begin(), cmp.equilibrium_order.end(), std::size_t{0});
    std::stable_sort(cmp.equilibrium_order.begin(), cmp.equilibrium_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         const auto& fa = cmp.equilibrium_fractions[a];
                         const auto& fb = cmp.equilibrium_fractions[b];
                         if (fa && fb) return *fa < *fb;
                         return fa.has_value() && !fb.has_value();
                     });
    return cmp;
}

}  // namespace webscape
