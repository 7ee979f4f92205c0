#include "webscape/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "webscape/errors.hpp"
#include "webscape/url.hpp"

namespace webscape {

namespace {

std::string squash(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool parse_uint(std::string_view text, unsigned& out) {
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

// ---------------------------------------------------------------------------
// Dates

Date parse_date(std::string_view text) {
    unsigned y = 0, m = 0, d = 0;
    bool parsed = false;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        parsed = parse_uint(text.substr(0, 4), y) && parse_uint(text.substr(5, 2), m) &&
                 parse_uint(text.substr(8, 2), d);
    } else if (const auto s1 = text.find('/'); s1 != std::string_view::npos) {
        const auto s2 = text.find('/', s1 + 1);
        if (s2 != std::string_view::npos && text.size() - s2 - 1 == 4) {
            parsed = parse_uint(text.substr(0, s1), m) &&
                     parse_uint(text.substr(s1 + 1, s2 - s1 - 1), d) &&
                     parse_uint(text.substr(s2 + 1), y);
        }
    }
    const Date date{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                    std::chrono::day{d}};
    if (!parsed || !date.ok()) throw ValidationError("invalid date '" + std::string(text) + "'");
    return date;
}

std::string format_date(Date date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Date today() {
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

// ---------------------------------------------------------------------------
// Enumerations

std::string_view to_string(Engine engine) {
    switch (engine) {
        case Engine::Yahoo: return "Yahoo";
        case Engine::Bing: return "Bing";
        case Engine::Other: return "Other";
    }
    return "Other";
}

Engine parse_engine(std::string_view text) {
    const auto key = squash(text);
    if (key == "yahoo") return Engine::Yahoo;
    if (key == "bing") return Engine::Bing;
    if (key == "other") return Engine::Other;
    throw ValidationError("unknown search engine '" + std::string(text) + "'");
}

std::string_view to_string(Category category) {
    switch (category) {
        case Category::Blog: return "Blog";
        case Category::Commercial: return "Commercial";
        case Category::Educational: return "Educational";
        case Category::Entertainment: return "Entertainment";
        case Category::Forum: return "Forum";
        case Category::Governmental: return "Governmental";
        case Category::Informational: return "Informational";
        case Category::News: return "News";
        case Category::NGO: return "NGO";
        case Category::SocialMedia: return "Social Media";
        case Category::SpecialInterest: return "Special Interest";
        case Category::Offline: return "Offline";
    }
    return "";
}

std::optional<Category> parse_category(std::string_view text) {
    const auto key = squash(text);
    for (Category c : kAllCategories) {
        if (key == squash(to_string(c))) return c;
    }
    static constexpr std::pair<std::string_view, Category> aliases[] = {
        {"commercialwebsite", Category::Commercial},
        {"commercialwebsites", Category::Commercial},
        {"education", Category::Educational},
        {"entertainmentvideo", Category::Entertainment},
        {"government", Category::Governmental},
        {"governmentalwebsite", Category::Governmental},
        {"governmentalwebsites", Category::Governmental},
        {"information", Category::Informational},
        {"socialmediawebsite", Category::SocialMedia},
        {"specialinterestgroup", Category::SpecialInterest},
        {"specialinterestgroups", Category::SpecialInterest},
    };
    for (const auto& [alias, c] : aliases) {
        if (key == alias) return c;
    }
    return std::nullopt;
}

int category_number(Category category) { return static_cast<int>(category) + 1; }

std::optional<Category> category_from_number(int number) {
    if (number < 1 || number > static_cast<int>(kAllCategories.size())) return std::nullopt;
    return kAllCategories[static_cast<std::size_t>(number - 1)];
}

std::string_view to_string(AccuracyCode code) {
    switch (code) {
        case AccuracyCode::E1: return "E1";
        case AccuracyCode::E2: return "E2";
        case AccuracyCode::E3: return "E3";
        case AccuracyCode::I1: return "I1";
        case AccuracyCode::I2: return "I2";
        case AccuracyCode::I3: return "I3";
        case AccuracyCode::NA: return "NA";
    }
    return "NA";
}

std::optional<AccuracyCode> parse_accuracy_code(std::string_view text) {
    const auto key = squash(text);
    for (AccuracyCode c : kAllAccuracyCodes) {
        if (key == squash(to_string(c))) return c;
    }
    return std::nullopt;
}

std::string_view to_string(LocationSource source) {
    switch (source) {
        case LocationSource::Database: return "database";
        case LocationSource::Manual: return "manual";
        case LocationSource::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(EvidenceSource source) {
    switch (source) {
        case EvidenceSource::OnSite: return "onsite";
        case EvidenceSource::OffSite: return "offsite";
        case EvidenceSource::None: return "none";
    }
    return "none";
}

std::optional<EvidenceSource> parse_evidence_source(std::string_view text) {
    const auto key = squash(text);
    if (key == "onsite" || key == "e" || key == "explicit") return EvidenceSource::OnSite;
    if (key == "offsite" || key == "i" || key == "implicit") return EvidenceSource::OffSite;
    if (key == "none" || key == "n") return EvidenceSource::None;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ipv4Address

std::optional<Ipv4Address> Ipv4Address::try_parse(std::string_view text) {
    std::uint32_t value = 0;
    for (int octet = 0; octet < 4; ++octet) {
        const auto dot = text.find('.');
        const bool last = octet == 3;
        if (last != (dot == std::string_view::npos)) return std::nullopt;
        const auto part = text.substr(0, dot);
        if (part.empty() || part.size() > 3) return std::nullopt;
        unsigned n = 0;
        if (!parse_uint(part, n) || n > 255) return std::nullopt;
        value = (value << 8) | n;
        if (!last) text.remove_prefix(dot + 1);
    }
    return Ipv4Address{value};
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
    auto ip = try_parse(text);
    if (!ip) throw ValidationError("invalid IPv4 address '" + std::string(text) + "'");
    return *ip;
}

std::string Ipv4Address::to_string() const {
    return std::to_string(value >> 24) + "." + std::to_string((value >> 16) & 0xff) + "." +
           std::to_string((value >> 8) & 0xff) + "." + std::to_string(value & 0xff);
}

// ---------------------------------------------------------------------------
// GeoLocation

GeoLocation::GeoLocation(double latitude, double longitude, std::optional<std::string> zip,
                         std::optional<std::string> area, LocationSource source)
    : latitude_(latitude),
      longitude_(longitude),
      zip_(std::move(zip)),
      area_(std::move(area)),
      source_(source) {}

std::optional<GeoLocation> GeoLocation::make(double latitude, double longitude,
                                             std::optional<std::string> zip,
                                             std::optional<std::string> area,
                                             LocationSource source) {
    if (!std::isfinite(latitude) || latitude < -90.0 || latitude > 90.0)
        throw ValidationError("latitude out of range: " + std::to_string(latitude));
    if (!std::isfinite(longitude) || longitude < -180.0 || longitude > 180.0)
        throw ValidationError("longitude out of range: " + std::to_string(longitude));
    if (latitude == 0.0 && longitude == 0.0) return std::nullopt;
    if (zip && zip->empty()) zip.reset();
    if (area && area->empty()) area.reset();
    return GeoLocation(latitude, longitude, std::move(zip), std::move(area), source);
}

// ---------------------------------------------------------------------------
// Records

void LocationEvidence::validate() const {
    if (evidence_source == EvidenceSource::None && (creator_location || company_location))
        throw ValidationError("evidence source 'none' cannot carry creator/company locations");
}

void WebPageRecord::validate() const {
    const auto where = [this](const std::string& what) {
        return ValidationError("rank " + std::to_string(rank) + ": " + what);
    };
    if (rank < 1) throw where("rank must be >= 1");
    if (keyword.empty()) throw where("keyword is empty");
    if (!search_date.ok()) throw where("invalid search date");
    const auto parsed = try_parse_url(url);
    if (!parsed) throw where("not an absolute URL: '" + url + "'");
    std::string lowered = host;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered != parsed->host && lowered != strip_www(parsed->host))
        throw where("host '" + host + "' does not match URL host '" + parsed->host + "'");
    if (accuracy && *accuracy != AccuracyCode::NA && !location)
        throw where("numbered accuracy code without a server location");
    if (evidence) evidence->validate();
}

ResultSet::ResultSet(std::string keyword, Engine engine, Date search_date)
    : keyword_(std::move(keyword)), engine_(engine), search_date_(search_date) {}

ResultSet::ResultSet(std::string keyword, Engine engine, Date search_date,
                     std::vector<WebPageRecord> records)
    : keyword_(std::move(keyword)),
      engine_(engine),
      search_date_(search_date),
      records_(std::move(records)) {
    std::stable_sort(records_.begin(), records_.end(),
                     [](const auto& a, const auto& b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        r.validate();
        if (i > 0 && records_[i - 1].rank == r.rank)
            throw ValidationError("duplicate rank " + std::to_string(r.rank));
        if (r.keyword != keyword_ || r.engine != engine_ || r.search_date != search_date_)
            throw ValidationError("rank " + std::to_string(r.rank) +
                                  ": keyword/engine/date differ from the result set");
    }
}

const WebPageRecord* ResultSet::find_rank(int rank) const {
    const auto it = std::lower_bound(records_.begin(), records_.end(), rank,
                                     [](const auto& r, int value) { return r.rank < value; });
    return it != records_.end() && it->rank == rank ? &*it : nullptr;
}

ResultSet ResultSet::with_record(const WebPageRecord& record) const {
    auto records = records_;
    const auto it = std::find_if(records.begin(), records.end(),
                                 [&](const auto& r) { return r.rank == record.rank; });
    if (it == records.end())
        throw ValidationError("no record with rank " + std::to_string(record.rank));
    *it = record;
    return ResultSet(keyword_, engine_, search_date_, std::move(records));
}

std::string keyword_slug(std::string_view keyword) {
    std::string out;
    bool pending_dash = false;
    for (char c : keyword) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_dash && !out.empty()) out.push_back('-');
            pending_dash = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_dash = true;
        }
    }
    return out;
}

}  // namespace webscape
