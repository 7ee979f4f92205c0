#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "webscape/errors.hpp"
#include "webscape/geolocate.hpp"
#include "webscape/table.hpp"

using namespace webscape;
using namespace webscape::testing;

namespace {

constexpr double kDegreeKm = 2 * std::numbers::pi * kEarthRadiusKm / 360.0;

const IpRange* linear_find(const std::vector<IpRange>& ranges, std::uint32_t ip) {
    for (const auto& r : ranges)
        if (r.start <= ip && ip <= r.end) return &r;
    return nullptr;
}

bool overlaps(const IpRange& a, const IpRange& b) { return a.start <= b.end && b.start <= a.end; }

// Disjoint ranges with random gaps, shuffled.
std::vector<IpRange> random_disjoint(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint32_t> cuts;
    while (cuts.size() < 2 * n) cuts.push_back(static_cast<std::uint32_t>(rng()));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<IpRange> out;
    std::uniform_real_distribution<double> lat(-80, 80), lon(-170, 170);
    for (std::size_t i = 0; i + 1 < cuts.size(); i += 2)
        out.push_back(IpRange{cuts[i], cuts[i + 1], lat(rng), lon(rng), std::nullopt, std::nullopt});
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

}  // namespace

TEST(Distance, Examples) {
    const auto a = loc(32.7977, -117.23);
    EXPECT_EQ(geodesic_distance_km(a, a), 0.0);
    EXPECT_NEAR(geodesic_distance_km(0, 0, 0, 1), 111.195, 0.01);
    EXPECT_NEAR(geodesic_distance_km(0, 0, 0, 1), kDegreeKm, 1e-9);
    EXPECT_NEAR(geodesic_distance_km(90, 0, -90, 0), std::numbers::pi * kEarthRadiusKm, 1e-6);
}

TEST(Distance, SymmetricNonNegativeTriangle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int i = 0; i < 5000; ++i) {
        const double p[6] = {lat(rng), lon(rng), lat(rng), lon(rng), lat(rng), lon(rng)};
        const double ab = geodesic_distance_km(p[0], p[1], p[2], p[3]);
        const double ba = geodesic_distance_km(p[2], p[3], p[0], p[1]);
        const double bc = geodesic_distance_km(p[2], p[3], p[4], p[5]);
        const double ac = geodesic_distance_km(p[0], p[1], p[4], p[5]);
        EXPECT_GE(ab, 0.0);
        EXPECT_NEAR(ab, ba, 1e-9 * std::max(1.0, ab));
        EXPECT_LE(ac, (ab + bc) * (1 + 1e-9) + 1e-9);
    }
}

TEST(FiftyMiles, EquatorialPairs) {
    EXPECT_TRUE(within_fifty_miles(loc(0, 10), loc(0, 10)));
    EXPECT_NEAR(geodesic_distance_km(0, 0, 0, 0.7), 77.8, 0.1);
    EXPECT_NEAR(geodesic_distance_km(0, 0, 0, 0.73), 81.2, 0.1);
    EXPECT_TRUE(within_fifty_miles(loc(0, 10), loc(0, 10.7)));
    EXPECT_FALSE(within_fifty_miles(loc(0, 10), loc(0, 10.73)));
}

TEST(FiftyMiles, InclusiveBoundaryAgreesWithDistance) {
    // Points straddling the threshold along a meridian.
    const double deg = kFiftyMilesKm / kDegreeKm;
    for (double f : {0.999999, 1.0, 1.000001}) {
        const auto a = loc(30, -100), b = loc(30 + deg * f, -100);
        EXPECT_EQ(within_fifty_miles(a, b), geodesic_distance_km(a, b) <= kFiftyMilesKm);
    }
    EXPECT_TRUE(within_fifty_miles(loc(30, -100), loc(30 + deg * 0.999999, -100)));
    EXPECT_FALSE(within_fifty_miles(loc(30, -100), loc(30 + deg * 1.000001, -100)));
}

TEST(Sentinels, UsCentroidAndOrigin) {
    const auto policy = SentinelPolicy::us_default();
    EXPECT_EQ(classify_sentinel(loc(39.8283, -98.5795), policy), SentinelStatus::Sentinel);
    EXPECT_EQ(classify_sentinel(loc(32.7977, -117.23), policy), SentinelStatus::Valid);
    EXPECT_TRUE(policy.is_sentinel(0, 0));
    EXPECT_TRUE(policy.is_sentinel(0.1, 0.1));  // within 25 km of the origin
    EXPECT_TRUE(SentinelPolicy().is_sentinel(0, 0));
    EXPECT_FALSE(SentinelPolicy().is_sentinel(39.8283, -98.5795));
}

TEST(Sentinels, RadiusBoundaryIsInclusive) {
    const SentinelPolicy policy({{40, -100, 25}});
    const double deg = 25.0 / kDegreeKm;
    EXPECT_TRUE(policy.is_sentinel(40 + deg * 0.99999, -100));
    EXPECT_FALSE(policy.is_sentinel(40 + deg * 1.00001, -100));
    // Whatever rounding does at exactly r, the answer agrees with d <= r.
    const double lat = 40 + deg;
    EXPECT_EQ(policy.is_sentinel(lat, -100), geodesic_distance_km(40, -100, lat, -100) <= 25.0);
}

TEST(Sentinels, PolicyValidationAndParsing) {
    EXPECT_THROW(SentinelPolicy({{40, -100, 0}}), ValidationError);
    EXPECT_THROW(SentinelPolicy({{40, -100, -1}}), ValidationError);
    const auto p = parse_sentinel_policy("latitude,longitude,radius_km\n39.8283,-98.5795,25\n");
    ASSERT_EQ(p.points().size(), 2u);  // plus the origin
    EXPECT_TRUE(p.is_sentinel(39.8283, -98.5795));
    const auto headerless = parse_sentinel_policy("10,10,5\n");
    EXPECT_TRUE(headerless.is_sentinel(10, 10));
    EXPECT_THROW(parse_sentinel_policy("10,10\n"), ParseError);
    EXPECT_THROW(parse_sentinel_policy("10,10,0\n"), Error);
    const auto bundled = parse_sentinel_policy(read_text_file(data_dir() / "sentinels.csv"));
    EXPECT_TRUE(bundled.is_sentinel(39.8283, -98.5795));
}

TEST(RangeTable, BundledZipExample) {
    const auto table = load_range_table(read_text_file(data_dir() / "ranges.csv"));
    const auto hit = table.lookup(Ipv4Address::parse("130.191.118.3"));
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->zip(), "92182");
    EXPECT_EQ(hit->source(), LocationSource::Database);
}

TEST(RangeTable, SingleRowLoad) {
    const auto table = load_range_table("130.191.0.0, 130.191.255.255, 32.7977, -117.23, 92182\n");
    ASSERT_EQ(table.size(), 1u);
    EXPECT_EQ(table.lookup(Ipv4Address::parse("130.191.118.3"))->zip(), "92182");
}

TEST(RangeTable, IntegerAddressesAndBoundaries) {
    const auto table = load_range_table("start_ip,end_ip,latitude,longitude,zip,area\n"
                                        "167772160,167772415,10,20,,\n"  // 10.0.0.0-10.0.0.255
                                        "10.0.2.0,10.0.2.10,11,21,z,a\n");
    EXPECT_FALSE(table.lookup(Ipv4Address::parse("9.255.255.255")));
    EXPECT_TRUE(table.lookup(Ipv4Address::parse("10.0.0.0")));
    EXPECT_DOUBLE_EQ(table.lookup(Ipv4Address::parse("10.0.0.255"))->latitude(), 10);
    EXPECT_FALSE(table.lookup(Ipv4Address::parse("10.0.1.0")));
    EXPECT_EQ(table.lookup(Ipv4Address::parse("10.0.2.10"))->area(), "a");
    EXPECT_FALSE(table.lookup(Ipv4Address::parse("10.0.2.11")));
    EXPECT_FALSE(table.lookup(Ipv4Address{0xffffffffu}));
}

TEST(RangeTable, OverlapErrorNamesBothRanges) {
    try {
        load_range_table("10.0.0.0,10.0.0.255,1,1\n10.0.0.128,10.0.1.0,2,2\n");
        FAIL() << "overlap accepted";
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("10.0.0.0"), std::string::npos) << msg;
        EXPECT_NE(msg.find("10.0.0.255"), std::string::npos) << msg;
        EXPECT_NE(msg.find("10.0.0.128"), std::string::npos) << msg;
        EXPECT_NE(msg.find("10.0.1.0"), std::string::npos) << msg;
    }
}

TEST(RangeTable, LoadErrors) {
    EXPECT_THROW(load_range_table("10.0.0.9,10.0.0.1,1,1\n"), Error);       // start > end
    EXPECT_THROW(load_range_table("10.0.0.0,10.0.0.1,91,1\n"), Error);      // latitude
    EXPECT_THROW(load_range_table("10.0.0.0,10.0.0.1,1\n"), ParseError);    // width
    EXPECT_THROW(load_range_table("10.0.0.0,x,1,1\n"), ParseError);
    EXPECT_THROW(load_range_table("10.0.0.0,4294967296,1,1\n"), ParseError);
    try {
        load_range_table("start_ip,end_ip,latitude,longitude\n1,2,3,4\n5,x,3,4\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
    }
}

TEST(RangeTable, EmptyTableAlwaysMisses) {
    const auto table = load_range_table("");
    EXPECT_EQ(table.size(), 0u);
    EXPECT_FALSE(table.lookup(Ipv4Address::parse("130.191.118.3")));
    EXPECT_EQ(load_range_table("start_ip,end_ip,latitude,longitude,zip,area\n").size(), 0u);
}

TEST(RangeTable, SentinelScreening) {
    const auto table = load_range_table("1.0.0.0,1.0.0.255,39.8283,-98.5795\n"
                                        "2.0.0.0,2.0.0.255,0,0\n"
                                        "3.0.0.0,3.0.0.255,32.7977,-117.23\n");
    const auto policy = SentinelPolicy::us_default();
    EXPECT_EQ(table.lookup_detailed(Ipv4Address::parse("1.0.0.5"), policy).status, LookupStatus::Sentinel);
    EXPECT_EQ(table.lookup_detailed(Ipv4Address::parse("2.0.0.5"), policy).status, LookupStatus::Sentinel);
    EXPECT_EQ(table.lookup_detailed(Ipv4Address::parse("3.0.0.5"), policy).status, LookupStatus::Hit);
    EXPECT_EQ(table.lookup_detailed(Ipv4Address::parse("4.0.0.5"), policy).status, LookupStatus::Miss);
    EXPECT_FALSE(table.lookup(Ipv4Address::parse("1.0.0.5")));
}

TEST(RangeTable, AgreesWithLinearScan) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto ranges = random_disjoint(rng, 300);
        const IpRangeTable table(ranges);
        const SentinelPolicy none;
        for (int k = 0; k < 2000; ++k) {
            // Mix uniform probes with probes on range boundaries.
            std::uint32_t ip = static_cast<std::uint32_t>(rng());
            const auto& r = ranges[rng() % ranges.size()];
            switch (k % 4) {
                case 1: ip = r.start; break;
                case 2: ip = r.end; break;
                case 3: ip = r.end + 1; break;
                default: break;
            }
            const auto* expected = linear_find(ranges, ip);
            const auto* found = table.find(Ipv4Address{ip});
            ASSERT_EQ(found == nullptr, expected == nullptr) << ip;
            if (found) {
                EXPECT_EQ(found->start, expected->start);
                EXPECT_EQ(found->end, expected->end);
            }
        }
    }
}

TEST(RangeTable, ValidatorRejectsExactlyTheOverlappingTables) {
    std::mt19937_64 rng(23);
    int accepted = 0, rejected = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        // Adversarial: small address space so collisions, shared endpoints and
        // nesting are common.
        std::vector<IpRange> ranges;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            const std::uint32_t a = static_cast<std::uint32_t>(rng() % 64);
            const std::uint32_t len = static_cast<std::uint32_t>(rng() % 8);
            ranges.push_back(IpRange{a, a + len, 1, 1, std::nullopt, std::nullopt});
        }
        bool clean = true;
        for (std::size_t i = 0; i < ranges.size(); ++i)
            for (std::size_t j = i + 1; j < ranges.size(); ++j) clean = clean && !overlaps(ranges[i], ranges[j]);
        try {
            const IpRangeTable table(ranges);
            EXPECT_TRUE(clean);
            ++accepted;
            const auto loaded = table.ranges();
            for (std::size_t i = 1; i < loaded.size(); ++i) EXPECT_LT(loaded[i - 1].end, loaded[i].start);
        } catch (const ValidationError&) {
            EXPECT_FALSE(clean);
            ++rejected;
        }
    }
    EXPECT_GT(accepted, 100);
    EXPECT_GT(rejected, 100);
}
