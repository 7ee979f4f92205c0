#pragma once

// Core domain types shared by every stage of the pipeline: ranked search
// results, their geolocation, category label, and accuracy code.

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webscape {

using Date = std::chrono::year_month_day;

/// Accepts ISO `YYYY-MM-DD` and US `MM/DD/YYYY`.
Date parse_date(std::string_view text);
std::string format_date(Date date);
Date today();

enum class Engine { Yahoo, Bing, Other };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view text);

enum class Category {
    Blog,
    Commercial,
    Educational,
    Entertainment,
    Forum,
    Governmental,
    Informational,
    News,
    NGO,
    SocialMedia,
    SpecialInterest,
    Offline,
};

inline constexpr std::array<Category, 12> kAllCategories = {
    Category::Blog,          Category::Commercial,  Category::Educational,
    Category::Entertainment, Category::Forum,       Category::Governmental,
    Category::Informational, Category::News,        Category::NGO,
    Category::SocialMedia,   Category::SpecialInterest, Category::Offline,
};

std::string_view to_string(Category category);
/// Case-insensitive; also accepts the short forms used in hand-coded sheets
/// ("blog", "Special Interest Group", "Social Media website", ...).
std::optional<Category> parse_category(std::string_view text);
/// 1-based position in the classification taxonomy (Blog = 1 ... Offline = 12).
int category_number(Category category);
std::optional<Category> category_from_number(int number);

enum class AccuracyCode { E1, E2, E3, I1, I2, I3, NA };

inline constexpr std::array<AccuracyCode, 7> kAllAccuracyCodes = {
    AccuracyCode::E1, AccuracyCode::E2, AccuracyCode::E3, AccuracyCode::I1,
    AccuracyCode::I2, AccuracyCode::I3, AccuracyCode::NA,
};

std::string_view to_string(AccuracyCode code);
/// Accepts "E1" and "E-1" spellings, and "NA" / "N/A".
std::optional<AccuracyCode> parse_accuracy_code(std::string_view text);

/// Codes whose digit is 1 or 2.
constexpr bool is_spatially_accurate(AccuracyCode code) {
    return code == AccuracyCode::E1 || code == AccuracyCode::E2 || code == AccuracyCode::I1 ||
           code == AccuracyCode::I2;
}

constexpr bool is_spatially_inaccurate(AccuracyCode code) {
    return code == AccuracyCode::E3 || code == AccuracyCode::I3;
}

/// IPv4 address in host byte order.
struct Ipv4Address {
    std::uint32_t value = 0;

    static Ipv4Address parse(std::string_view dotted_quad);
    static std::optional<Ipv4Address> try_parse(std::string_view dotted_quad);
    std::string to_string() const;

    auto operator<=>(const Ipv4Address&) const = default;
};

enum class LocationSource { Database, Manual, Unknown };

std::string_view to_string(LocationSource source);

/// A validated point on the globe. Construction goes through `make`, which
/// rejects out-of-range coordinates and maps the (0, 0) placeholder to
/// "no location".
class GeoLocation {
public:
    static std::optional<GeoLocation> make(double latitude, double longitude,
                                           std::optional<std::string> zip = std::nullopt,
                                           std::optional<std::string> area = std::nullopt,
                                           LocationSource source = LocationSource::Database);

    double latitude() const noexcept { return latitude_; }
    double longitude() const noexcept { return longitude_; }
    const std::optional<std::string>& zip() const noexcept { return zip_; }
    const std::optional<std::string>& area() const noexcept { return area_; }
    LocationSource source() const noexcept { return source_; }

    bool operator==(const GeoLocation&) const = default;

private:
    GeoLocation(double latitude, double longitude, std::optional<std::string> zip,
                std::optional<std::string> area, LocationSource source);

    double latitude_;
    double longitude_;
    std::optional<std::string> zip_;
    std::optional<std::string> area_;
    LocationSource source_;
};

enum class EvidenceSource { OnSite, OffSite, None };

std::string_view to_string(EvidenceSource source);
std::optional<EvidenceSource> parse_evidence_source(std::string_view text);

/// What the annotator found about who is behind a page.
struct LocationEvidence {
    std::optional<GeoLocation> creator_location;
    std::optional<GeoLocation> company_location;
    EvidenceSource evidence_source = EvidenceSource::None;
    bool page_offline = false;

    /// Throws ValidationError when evidence_source is None but a location is set.
    void validate() const;

    bool operator==(const LocationEvidence&) const = default;
};

struct WebPageRecord {
    int rank = 0;
    Engine engine = Engine::Other;
    std::string keyword;
    Date search_date{};
    std::string url;
    std::string host;
    std::optional<Ipv4Address> ip;
    std::optional<GeoLocation> location;
    std::optional<Category> category;
    std::optional<AccuracyCode> accuracy;
    std::optional<LocationEvidence> evidence;

    /// Throws ValidationError describing the first violated invariant.
    void validate() const;

    bool operator==(const WebPageRecord&) const = default;
};

/// All records of one (keyword, engine, date) snapshot, in rank order.
class ResultSet {
public:
    ResultSet(std::string keyword, Engine engine, Date search_date);
    /// Sorts by rank and validates every record against the set's metadata.
    ResultSet(std::string keyword, Engine engine, Date search_date,
              std::vector<WebPageRecord> records);

    const std::string& keyword() const noexcept { return keyword_; }
    Engine engine() const noexcept { return engine_; }
    Date search_date() const noexcept { return search_date_; }
    std::span<const WebPageRecord> records() const noexcept { return records_; }
    std::size_t total() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    const WebPageRecord* find_rank(int rank) const;

    /// Returns a copy with `record` replacing the record of the same rank.
    ResultSet with_record(const WebPageRecord& record) const;

    bool operator==(const ResultSet&) const = default;

private:
    std::string keyword_;
    Engine engine_;
    Date search_date_;
    std::vector<WebPageRecord> records_;
};

/// Lowercase, `-`-separated slug used in snapshot file names ("jerry-sanders").
std::string keyword_slug(std::string_view keyword);

}  // namespace webscape
