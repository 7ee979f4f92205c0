#include "webscape/geolocate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "webscape/csv.hpp"
#include "webscape/errors.hpp"

namespace webscape {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string ip_text(std::uint32_t v) { return Ipv4Address{v}.to_string(); }

std::string range_text(const IpRange& r) { return ip_text(r.start) + "-" + ip_text(r.end); }

std::optional<std::uint32_t> parse_address(std::string_view text) {
    if (auto ip = Ipv4Address::try_parse(text)) return ip->value;
    long long n = 0;
    if (csv::parse_int(text, n) && n >= 0 && n <= 0xffffffffLL) return static_cast<std::uint32_t>(n);
    return std::nullopt;
}

bool looks_like_header(const std::vector<std::string>& fields) {
    double ignored = 0;
    return !fields.empty() && !parse_address(fields.front()) &&
           !csv::parse_double(fields.front(), ignored);
}

}  // namespace

double geodesic_distance_km(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double s1 = std::sin(dphi / 2);
    const double s2 = std::sin(dlambda / 2);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double geodesic_distance_km(const GeoLocation& a, const GeoLocation& b) {
    return geodesic_distance_km(a.latitude(), a.longitude(), b.latitude(), b.longitude());
}

bool within_fifty_miles(const GeoLocation& a, const GeoLocation& b) {
    return geodesic_distance_km(a, b) <= kFiftyMilesKm;
}

// ---------------------------------------------------------------------------

SentinelPolicy::SentinelPolicy() : points_{SentinelPoint{0.0, 0.0, kDefaultSentinelRadiusKm}} {}

SentinelPolicy::SentinelPolicy(std::vector<SentinelPoint> points) : points_(std::move(points)) {
    for (const auto& p : points_) {
        if (!(p.radius_km > 0) || !std::isfinite(p.radius_km))
            throw ValidationError("sentinel radius must be > 0 km");
        if (p.latitude < -90 || p.latitude > 90 || p.longitude < -180 || p.longitude > 180)
            throw ValidationError("sentinel point out of range");
    }
    const bool has_origin = std::any_of(points_.begin(), points_.end(), [](const auto& p) {
        return p.latitude == 0.0 && p.longitude == 0.0;
    });
    if (!has_origin) points_.insert(points_.begin(), SentinelPoint{0.0, 0.0, kDefaultSentinelRadiusKm});
}

SentinelPolicy SentinelPolicy::us_default() {
    return SentinelPolicy({SentinelPoint{39.8283, -98.5795, kDefaultSentinelRadiusKm}});
}

bool SentinelPolicy::is_sentinel(double latitude, double longitude) const {
    if (latitude == 0.0 && longitude == 0.0) return true;
    return std::any_of(points_.begin(), points_.end(), [&](const SentinelPoint& p) {
        return geodesic_distance_km(latitude, longitude, p.latitude, p.longitude) <= p.radius_km;
    });
}

SentinelStatus classify_sentinel(const GeoLocation& loc, const SentinelPolicy& policy) {
    return policy.is_sentinel(loc.latitude(), loc.longitude()) ? SentinelStatus::Sentinel
                                                               : SentinelStatus::Valid;
}

SentinelPolicy parse_sentinel_policy(std::string_view text) {
    auto rows = csv::parse(text);
    std::vector<SentinelPoint> points;
    bool has_header = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        const std::size_t row_no = has_header ? i : i + 1;
        if (i == 0 && looks_like_header(f)) {
            if (!csv::header_matches(f, {"latitude", "longitude", "radius_km"}))
                throw ParseError(0, "sentinel policy header must be: latitude,longitude,radius_km");
            has_header = true;
            continue;
        }
        SentinelPoint p;
        if (f.size() != 3 || !csv::parse_double(f[0], p.latitude) ||
            !csv::parse_double(f[1], p.longitude) || !csv::parse_double(f[2], p.radius_km))
            throw ParseError(row_no, "expected latitude,longitude,radius_km");
        if (!(p.radius_km > 0)) throw ParseError(row_no, "radius_km must be > 0");
        points.push_back(p);
    }
    return SentinelPolicy(std::move(points));
}

// ---------------------------------------------------------------------------

IpRangeTable::IpRangeTable(std::vector<IpRange> ranges) : ranges_(std::move(ranges)) {
    for (const auto& r : ranges_) {
        if (r.start > r.end)
            throw ValidationError("range " + range_text(r) + " has start > end");
        if (!std::isfinite(r.latitude) || !std::isfinite(r.longitude) || r.latitude < -90 ||
            r.latitude > 90 || r.longitude < -180 || r.longitude > 180)
            throw ValidationError("range " + range_text(r) + " has coordinates out of range");
    }
    std::sort(ranges_.begin(), ranges_.end(), [](const IpRange& a, const IpRange& b) {
        return a.start != b.start ? a.start < b.start : a.end < b.end;
    });
    for (std::size_t i = 1; i < ranges_.size(); ++i) {
        if (ranges_[i].start <= ranges_[i - 1].end)
            throw ValidationError("overlapping ranges " + range_text(ranges_[i - 1]) + " and " +
                                  range_text(ranges_[i]));
    }
}

const IpRange* IpRangeTable::find(Ipv4Address ip) const {
    // First range whose start is greater than ip; its predecessor is the only candidate.
    const auto it = std::upper_bound(ranges_.begin(), ranges_.end(), ip.value,
                                     [](std::uint32_t v, const IpRange& r) { return v < r.start; });
    if (it == ranges_.begin()) return nullptr;
    const IpRange& candidate = *std::prev(it);
    return ip.value <= candidate.end ? &candidate : nullptr;
}

LookupResult IpRangeTable::lookup_detailed(Ipv4Address ip, const SentinelPolicy& policy) const {
    LookupResult result;
    result.range = find(ip);
    if (!result.range) return result;
    if (policy.is_sentinel(result.range->latitude, result.range->longitude)) {
        result.status = LookupStatus::Sentinel;
        return result;
    }
    result.status = LookupStatus::Hit;
    result.location = GeoLocation::make(result.range->latitude, result.range->longitude,
                                        result.range->zip, result.range->area,
                                        LocationSource::Database);
    return result;
}

std::optional<GeoLocation> IpRangeTable::lookup(Ipv4Address ip, const SentinelPolicy& policy) const {
    return lookup_detailed(ip, policy).location;
}

std::optional<GeoLocation> IpRangeTable::lookup(Ipv4Address ip) const {
    return lookup(ip, SentinelPolicy::us_default());
}

IpRangeTable load_range_table(std::string_view text) {
    const auto rows = csv::parse(text);
    std::vector<IpRange> ranges;
    bool has_header = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        const std::size_t row_no = has_header ? i : i + 1;
        if (i == 0 && looks_like_header(f)) {
            const std::vector<std::string_view> names = {"start_ip", "end_ip", "latitude",
                                                         "longitude", "zip", "area"};
            if (f.size() < 4 || f.size() > names.size() ||
                !csv::header_matches(f, {names.begin(), names.begin() + f.size()}))
                throw ParseError(0, "range table header must be: start_ip,end_ip,latitude,"
                                    "longitude,zip,area");
            has_header = true;
            continue;
        }
        if (f.size() < 4 || f.size() > 6)
            throw ParseError(row_no, "expected start_ip,end_ip,latitude,longitude[,zip[,area]]");
        IpRange r;
        const auto start = parse_address(f[0]);
        const auto end = parse_address(f[1]);
        if (!start || !end) throw ParseError(row_no, "invalid IP address");
        r.start = *start;
        r.end = *end;
        if (!csv::parse_double(f[2], r.latitude) || !csv::parse_double(f[3], r.longitude))
            throw ParseError(row_no, "invalid coordinates");
        if (f.size() > 4 && !f[4].empty()) r.zip = f[4];
        if (f.size() > 5 && !f[5].empty()) r.area = f[5];
        if (r.start > r.end)
            throw ParseError(row_no, "range " + range_text(r) + " has start > end");
        ranges.push_back(std::move(r));
    }
    return IpRangeTable(std::move(ranges));
}

}  // namespace webscape
