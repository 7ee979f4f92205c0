#include "webscape/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

#include "webscape/classify.hpp"
#include "webscape/csv.hpp"
#include "webscape/errors.hpp"

namespace webscape {

namespace {

std::string trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string folded(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '.')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string describe(const std::optional<GeoLocation>& loc) {
    if (!loc) return "unknown";
    return csv::format_double(loc->latitude()) + "," + csv::format_double(loc->longitude());
}

// Returns nullopt at end of input.
std::optional<std::string> ask(std::istream& in, std::ostream& out, std::string_view prompt) {
    out << prompt << std::flush;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    return trimmed(line);
}

}  // namespace

CityTable::CityTable(std::vector<City> cities) : cities_(std::move(cities)) {}

CityTable CityTable::parse(std::string_view text) {
    std::vector<City> cities;
    const auto rows = csv::parse(text);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        if (i == 0 && csv::header_matches(f, {"city", "admin", "latitude", "longitude"})) continue;
        City c;
        if (f.size() != 4 || f[0].empty() || !csv::parse_double(f[2], c.latitude) ||
            !csv::parse_double(f[3], c.longitude))
            throw ParseError(i + 1, "expected city,admin,latitude,longitude");
        c.name = f[0];
        c.admin = f[1];
        if (!GeoLocation::make(c.latitude, c.longitude))
            throw ParseError(i + 1, "city '" + c.name + "' has placeholder coordinates");
        cities.push_back(std::move(c));
    }
    return CityTable(std::move(cities));
}

std::optional<GeoLocation> CityTable::find(std::string_view query) const {
    std::string name(query), admin;
    if (const auto comma = query.find(','); comma != std::string_view::npos) {
        name = std::string(query.substr(0, comma));
        admin = std::string(query.substr(comma + 1));
    }
    const auto want_name = folded(name);
    const auto want_admin = folded(admin);
    for (const auto& c : cities_) {
        if (folded(c.name) != want_name) continue;
        if (!want_admin.empty() && folded(c.admin) != want_admin) continue;
        return GeoLocation::make(c.latitude, c.longitude, std::nullopt, std::nullopt,
                                 LocationSource::Manual);
    }
    return std::nullopt;
}

std::optional<std::optional<GeoLocation>> parse_location_entry(std::string_view text,
                                                               const CityTable& cities) {
    const auto entry = trimmed(text);
    if (entry.empty()) return std::optional<GeoLocation>{};
    if (const auto comma = entry.find(','); comma != std::string::npos) {
        double lat = 0, lon = 0;
        if (csv::parse_double(entry.substr(0, comma), lat) &&
            csv::parse_double(entry.substr(comma + 1), lon)) {
            if (lat < -90 || lat > 90 || lon < -180 || lon > 180) return std::nullopt;
            return GeoLocation::make(lat, lon, std::nullopt, std::nullopt, LocationSource::Manual);
        }
    }
    if (auto city = cities.find(entry)) return std::optional<GeoLocation>(std::move(city));
    return std::nullopt;
}

AnnotationSession::AnnotationSession(ResultSet set, CityTable cities, Persist persist,
                                     SentinelPolicy policy)
    : set_(std::move(set)),
      cities_(std::move(cities)),
      persist_(std::move(persist)),
      policy_(std::move(policy)) {}

AnnotationSummary AnnotationSession::run(std::istream& in, std::ostream& out) {
    AnnotationSummary summary;
    const auto total = set_.total();
    std::size_t position = 0;
    // Copy the ranks up front: set_ is replaced after every record.
    std::vector<int> ranks;
    for (const auto& r : set_.records()) ranks.push_back(r.rank);

    for (const int rank : ranks) {
        ++position;
        const WebPageRecord record = *set_.find_rank(rank);
        if (is_annotated(record)) {
            ++summary.already_done;
            continue;
        }
        out << "\n[" << position << "/" << total << "] rank " << record.rank << "  " << record.url
            << "\n    host " << record.host << ", server " << describe(record.location) << "\n";
        const Step step = annotate_one(record, in, out);
        if (step == Step::Quit) {
            summary.interrupted = true;
            break;
        }
        if (step == Step::Skipped)
            ++summary.skipped;
        else
            ++summary.annotated;
    }
    out << "\nannotated " << summary.annotated << ", skipped " << summary.skipped
        << ", previously done " << summary.already_done
        << (summary.interrupted ? " (stopped early; progress saved)" : "") << "\n";
    return summary;
}

AnnotationSession::Step AnnotationSession::annotate_one(const WebPageRecord& record,
                                                        std::istream& in, std::ostream& out) {
    std::optional<Category> category;
    for (;;) {
        const auto answer = ask(in, out, "Category (1-12 or name, s = skip, q = quit): ");
        if (!answer || *answer == "q") return Step::Quit;
        if (*answer == "s") return Step::Skipped;
        if (answer->empty()) continue;
        long long number = 0;
        if (csv::parse_int(*answer, number))
            category = category_from_number(static_cast<int>(number));
        else
            category = parse_category(*answer);
        if (category) break;
        out << "  not a category; choose one of:";
        for (Category c : kAllCategories) out << " " << category_number(c) << "=" << to_string(c);
        out << "\n";
    }

    LocationEvidence evidence;
    evidence.page_offline = category == Category::Offline;
    if (!evidence.page_offline) {
        for (;;) {
            const auto answer = ask(in, out, "Address found (e = on site, i = off site, n = none): ");
            if (!answer || *answer == "q") return Step::Quit;
            if (const auto source = parse_evidence_source(*answer)) {
                evidence.evidence_source = *source;
                break;
            }
            out << "  answer e, i or n\n";
        }
    }
    if (evidence.evidence_source != EvidenceSource::None) {
        const auto ask_location = [&](std::string_view who)
            -> std::optional<std::optional<GeoLocation>> {
            const std::string prompt =
                std::string(who) + " location (lat,lon or city; blank = unknown): ";
            for (;;) {
                const auto answer = ask(in, out, prompt);
                // Outer nullopt signals quit to the caller.
                if (!answer || *answer == "q") return std::nullopt;
                if (auto loc = parse_location_entry(*answer, cities_)) return loc;
                out << "  not a coordinate pair or known city\n";
            }
        };
        auto creator = ask_location("Content creator");
        if (!creator) return Step::Quit;
        auto company = ask_location("Website company");
        if (!company) return Step::Quit;
        evidence.creator_location = std::move(*creator);
        evidence.company_location = std::move(*company);
    }

    WebPageRecord updated = record;
    updated.category = category;
    updated.accuracy = derive_accuracy_code(evidence, record.location, policy_);
    updated.evidence = std::move(evidence);
    set_ = set_.with_record(updated);
    persist_(set_);
    out << "  -> " << to_string(*updated.category) << ", " << to_string(*updated.accuracy) << "\n";
    return Step::Done;
}

}  // namespace webscape
