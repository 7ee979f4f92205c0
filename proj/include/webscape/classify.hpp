#pragma once

// Geolocation-accuracy coding and the aggregate statistics computed over
// hand-labelled result sets.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "webscape/geolocate.hpp"
#include "webscape/model.hpp"

namespace webscape {

/// Letter from the evidence source (E on-site, I off-site). Digit 1 when
/// creator, company and server are pairwise within fifty miles; 2 when the
/// server is within fifty miles of the company or of the creator; 3
/// otherwise. NA for offline pages, missing or placeholder server locations,
/// and evidence with no location at all.
AccuracyCode derive_accuracy_code(const LocationEvidence& evidence,
                                  const std::optional<GeoLocation>& server_location,
                                  const SentinelPolicy& policy = SentinelPolicy::us_default());

/// `nullopt` is the Unlabeled bucket.
using CategoryKey = std::optional<Category>;

std::string_view category_label(const CategoryKey& key);

struct CategoryShare {
    CategoryKey category;
    std::size_t count = 0;
    double percent = 0;
};

/// One entry per category in taxonomy order (zero counts included), then an
/// Unlabeled entry when any record lacks a label. Empty input gives an empty
/// breakdown.
std::vector<CategoryShare> category_breakdown(std::span<const ResultSet> sets);

struct AccuracyTally {
    std::size_t n = 0;
    double accurate_pct = 0;
    double inaccurate_pct = 0;
    double unknown_pct = 0;
    /// Indexed like kAllAccuracyCodes; uncoded records are counted under NA.
    std::array<std::size_t, 7> histogram{};
    std::size_t uncoded = 0;
};

AccuracyTally accuracy_summary(std::span<const ResultSet> sets);

struct CategoryAccuracy {
    CategoryKey category;
    std::size_t count = 0;
    std::size_t accurate = 0;
    double accurate_pct = 0;
};

/// Categories with no records are omitted.
std::vector<CategoryAccuracy> category_accuracy(std::span<const ResultSet> sets);

/// True when the record carries a category or an accuracy code.
bool is_annotated(const WebPageRecord& record);

}  // namespace webscape
