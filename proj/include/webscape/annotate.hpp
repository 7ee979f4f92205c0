#pragma once

// Terminal workflow for the manual classification pass: one record at a
// time, category then location evidence, with the accuracy code derived
// automatically and the table re-written after every record.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webscape/geolocate.hpp"
#include "webscape/model.hpp"

namespace webscape {

struct City {
    std::string name;
    std::string admin;
    double latitude = 0;
    double longitude = 0;
};

/// City-name gazetteer: columns city, admin, latitude, longitude.
class CityTable {
public:
    CityTable() = default;
    explicit CityTable(std::vector<City> cities);

    static CityTable parse(std::string_view text);

    /// Matches "San Diego" or "San Diego, CA" case-insensitively. A bare
    /// name shared by several admin areas resolves to the first listed.
    std::optional<GeoLocation> find(std::string_view query) const;

    std::size_t size() const noexcept { return cities_.size(); }

private:
    std::vector<City> cities_;
};

/// "lat,lon" or a city name. Blank input means unknown, returned as
/// `std::optional<GeoLocation>{}` inside an engaged outer optional; an
/// unresolvable entry returns nullopt.
std::optional<std::optional<GeoLocation>> parse_location_entry(std::string_view text,
                                                               const CityTable& cities);

struct AnnotationSummary {
    std::size_t annotated = 0;
    std::size_t skipped = 0;
    std::size_t already_done = 0;
    bool interrupted = false;
};

class AnnotationSession {
public:
    using Persist = std::function<void(const ResultSet&)>;

    AnnotationSession(ResultSet set, CityTable cities, Persist persist,
                      SentinelPolicy policy = SentinelPolicy::us_default());

    /// Walks unannotated records in rank order. End of input or `q` stops
    /// the session; everything finished so far has already been persisted.
    AnnotationSummary run(std::istream& in, std::ostream& out);

    const ResultSet& result() const noexcept { return set_; }

private:
    enum class Step { Done, Skipped, Quit };

    Step annotate_one(const WebPageRecord& record, std::istream& in, std::ostream& out);

    ResultSet set_;
    CityTable cities_;
    Persist persist_;
    SentinelPolicy policy_;
};

}  // namespace webscape
