#include "webscape/classify.hpp"

#include <algorithm>

namespace webscape {

namespace {

std::size_t code_index(AccuracyCode code) { return static_cast<std::size_t>(code); }

double percent(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::size_t bucket(const CategoryKey& key) {
    return key ? static_cast<std::size_t>(*key) : kAllCategories.size();
}

}  // namespace

AccuracyCode derive_accuracy_code(const LocationEvidence& evidence,
                                  const std::optional<GeoLocation>& server_location,
                                  const SentinelPolicy& policy) {
    if (evidence.page_offline || evidence.evidence_source == EvidenceSource::None)
        return AccuracyCode::NA;
    if (!server_location || classify_sentinel(*server_location, policy) == SentinelStatus::Sentinel)
        return AccuracyCode::NA;
    const auto& creator = evidence.creator_location;
    const auto& company = evidence.company_location;
    if (!creator && !company) return AccuracyCode::NA;

    const bool creator_near = creator && within_fifty_miles(*creator, *server_location);
    const bool company_near = company && within_fifty_miles(*company, *server_location);
    const bool pair_near = creator && company && within_fifty_miles(*creator, *company);

    int digit = 3;
    if (creator_near && company_near && pair_near)
        digit = 1;
    else if (creator_near || company_near)
        digit = 2;

    const bool explicit_source = evidence.evidence_source == EvidenceSource::OnSite;
    switch (digit) {
        case 1: return explicit_source ? AccuracyCode::E1 : AccuracyCode::I1;
        case 2: return explicit_source ? AccuracyCode::E2 : AccuracyCode::I2;
        default: return explicit_source ? AccuracyCode::E3 : AccuracyCode::I3;
    }
}

std::string_view category_label(const CategoryKey& key) {
    return key ? to_string(*key) : std::string_view("Unlabeled");
}

bool is_annotated(const WebPageRecord& record) {
    return record.category.has_value() || record.accuracy.has_value();
}

std::vector<CategoryShare> category_breakdown(std::span<const ResultSet> sets) {
    std::array<std::size_t, kAllCategories.size() + 1> counts{};
    std::size_t total = 0;
    for (const auto& set : sets) {
        for (const auto& r : set.records()) {
            ++counts[bucket(r.category)];
            ++total;
        }
    }
    std::vector<CategoryShare> out;
    if (total == 0) return out;
    for (Category c : kAllCategories)
        out.push_back({c, counts[bucket(c)], percent(counts[bucket(c)], total)});
    if (const auto unlabeled = counts.back(); unlabeled > 0)
        out.push_back({std::nullopt, unlabeled, percent(unlabeled, total)});
    return out;
}

AccuracyTally accuracy_summary(std::span<const ResultSet> sets) {
    AccuracyTally tally;
    for (const auto& set : sets) {
        for (const auto& r : set.records()) {
            ++tally.n;
            if (!r.accuracy) ++tally.uncoded;
            ++tally.histogram[code_index(r.accuracy.value_or(AccuracyCode::NA))];
        }
    }
    std::size_t accurate = 0, inaccurate = 0;
    for (AccuracyCode c : kAllAccuracyCodes) {
        if (is_spatially_accurate(c)) accurate += tally.histogram[code_index(c)];
        if (is_spatially_inaccurate(c)) inaccurate += tally.histogram[code_index(c)];
    }
    const std::size_t unknown = tally.histogram[code_index(AccuracyCode::NA)];
    tally.accurate_pct = percent(accurate, tally.n);
    tally.inaccurate_pct = percent(inaccurate, tally.n);
    tally.unknown_pct = percent(unknown, tally.n);
    return tally;
}

std::vector<CategoryAccuracy> category_accuracy(std::span<const ResultSet> sets) {
    std::array<CategoryAccuracy, kAllCategories.size() + 1> rows{};
    for (std::size_t i = 0; i < kAllCategories.size(); ++i) rows[i].category = kAllCategories[i];
    for (const auto& set : sets) {
        for (const auto& r : set.records()) {
            auto& row = rows[bucket(r.category)];
            ++row.count;
            if (r.accuracy && is_spatially_accurate(*r.accuracy)) ++row.accurate;
        }
    }
    std::vector<CategoryAccuracy> out;
    for (auto& row : rows) {
        if (row.count == 0) continue;
        row.accurate_pct = percent(row.accurate, row.count);
        out.push_back(row);
    }
    return out;
}

}  // namespace webscape
