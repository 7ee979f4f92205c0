#pragma once

// Passive IP geolocation: an inclusive, non-overlapping IPv4 range table
// searched by binary search, plus the distance helpers behind the fifty-mile
// rule and screening of placeholder "country centre" coordinates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webscape/model.hpp"

namespace webscape {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kEarthRadiusM = kEarthRadiusKm * 1000.0;
/// 50 statute miles.
inline constexpr double kFiftyMilesKm = 80.4672;
inline constexpr double kDefaultSentinelRadiusKm = 25.0;

/// Haversine distance on the mean-radius sphere, in kilometres.
double geodesic_distance_km(double lat1, double lon1, double lat2, double lon2);
double geodesic_distance_km(const GeoLocation& a, const GeoLocation& b);

/// Inclusive: exactly 80.4672 km counts as within.
bool within_fifty_miles(const GeoLocation& a, const GeoLocation& b);

struct SentinelPoint {
    double latitude = 0;
    double longitude = 0;
    double radius_km = kDefaultSentinelRadiusKm;
};

/// Placeholder coordinates a geolocation database hands out when it only
/// knows the country. The origin (0, 0) is always part of the policy.
class SentinelPolicy {
public:
    /// Origin only.
    SentinelPolicy();
    /// Throws ValidationError when a radius is not positive.
    explicit SentinelPolicy(std::vector<SentinelPoint> points);

    /// Origin plus the geographic centre of the conterminous United States
    /// (39.8283 N, 98.5795 W), 25 km each.
    static SentinelPolicy us_default();

    std::span<const SentinelPoint> points() const noexcept { return points_; }

    /// Boundary inclusive.
    bool is_sentinel(double latitude, double longitude) const;

private:
    std::vector<SentinelPoint> points_;
};

/// Columns: latitude, longitude, radius_km (header row optional).
SentinelPolicy parse_sentinel_policy(std::string_view text);

enum class SentinelStatus { Valid, Sentinel };

SentinelStatus classify_sentinel(const GeoLocation& loc, const SentinelPolicy& policy);

struct IpRange {
    std::uint32_t start = 0;
    std::uint32_t end = 0;
    double latitude = 0;
    double longitude = 0;
    std::optional<std::string> zip;
    std::optional<std::string> area;
};

enum class LookupStatus { Hit, Miss, Sentinel };

struct LookupResult {
    LookupStatus status = LookupStatus::Miss;
    std::optional<GeoLocation> location;  // set only for Hit
    const IpRange* range = nullptr;       // covering range for Hit and Sentinel
};

class IpRangeTable {
public:
    IpRangeTable() = default;
    /// Sorts by start; throws ValidationError on start > end, overlapping
    /// ranges, or coordinates out of range.
    explicit IpRangeTable(std::vector<IpRange> ranges);

    std::span<const IpRange> ranges() const noexcept { return ranges_; }
    std::size_t size() const noexcept { return ranges_.size(); }

    /// The unique covering range, or nullptr.
    const IpRange* find(Ipv4Address ip) const;

    LookupResult lookup_detailed(Ipv4Address ip, const SentinelPolicy& policy) const;
    std::optional<GeoLocation> lookup(Ipv4Address ip, const SentinelPolicy& policy) const;
    std::optional<GeoLocation> lookup(Ipv4Address ip) const;

private:
    std::vector<IpRange> ranges_;
};

/// Columns: start_ip, end_ip, latitude, longitude[, zip[, area]]. Addresses
/// may be dotted quads or unsigned integers. Header row optional.
IpRangeTable load_range_table(std::string_view text);

}  // namespace webscape
