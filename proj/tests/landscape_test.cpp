#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "webscape/errors.hpp"
#include "webscape/landscape.hpp"
#include "webscape/table.hpp"

using namespace webscape;
using namespace webscape::testing;

namespace {

GridSpec small_grid() { return GridSpec{-120, 30, -110, 38, 50, 40}; }

RasterGrid row_raster(std::vector<double> v) {
    const GridSpec g{0, 0, static_cast<double>(v.size()), 1, v.size(), 1};
    return RasterGrid(g, std::move(v));
}

std::vector<WeightedPoint> random_points(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> lat(30.5, 37.5), lon(-119.5, -110.5), w(0.5, 5.0);
    std::vector<WeightedPoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({lat(rng), lon(rng), w(rng)});
    return pts;
}

RasterGrid oracle_density(const std::vector<WeightedPoint>& pts, const GridSpec& g, double radius) {
    RasterGrid out(g);
    for (std::size_t r = 0; r < g.n_rows; ++r)
        for (std::size_t c = 0; c < g.n_cols; ++c) {
            double v = 0;
            for (const auto& p : pts)
                v += p.weight * oracle_quartic(oracle_distance_m(g.cell_center_lat(r), g.cell_center_lon(c),
                                                                 p.latitude, p.longitude),
                                               radius);
            out.at(r, c) = v;
        }
    return out;
}

void expect_close(const RasterGrid& a, const RasterGrid& b, double rel) {
    ASSERT_EQ(a.spec(), b.spec());
    const double scale = std::max(std::abs(a.max()), std::abs(b.max()));
    for (std::size_t i = 0; i < a.size(); ++i)
        ASSERT_NEAR(a.values()[i], b.values()[i], rel * scale) << "cell " << i;
}

ResultSet located_set(const std::vector<std::pair<double, double>>& coords, Date date = ymd(2011, 9, 8)) {
    std::vector<WebPageRecord> records;
    for (std::size_t i = 0; i < coords.size(); ++i)
        records.push_back(record(static_cast<int>(i + 1), "http://s" + std::to_string(i) + ".com/",
                                 loc(coords[i].first, coords[i].second)));
    return result_set(records, date);
}

}  // namespace

TEST(Weights, InverseRankIsTotalPlusOneMinusRank) {
    for (int rank = 1; rank <= 600; ++rank)
        ASSERT_EQ(population_weight(rank, 600, PopulationMethod::InverseRank), 601.0 - rank);
    EXPECT_EQ(population_weight(600, 600, PopulationMethod::InverseRank), 1.0);
}

TEST(Weights, OtherMethods) {
    EXPECT_EQ(population_weight(3, 10, PopulationMethod::None), 1.0);
    EXPECT_DOUBLE_EQ(population_weight(1, 10, PopulationMethod::LogRank), std::log(10.0) + 1.0);
    EXPECT_DOUBLE_EQ(population_weight(10, 10, PopulationMethod::LogRank), 1.0);
    EXPECT_DOUBLE_EQ(population_weight(1, 10, PopulationMethod::Fuzzy), 1.0);
    EXPECT_DOUBLE_EQ(population_weight(10, 10, PopulationMethod::Fuzzy), 0.1);
    for (int rank = 1; rank < 50; ++rank)
        for (auto m : {PopulationMethod::InverseRank, PopulationMethod::LogRank, PopulationMethod::Fuzzy})
            EXPECT_GT(population_weight(rank, 50, m), population_weight(rank + 1, 50, m));
    EXPECT_THROW(population_weight(0, 10, PopulationMethod::None), ValidationError);
    EXPECT_THROW(population_weight(11, 10, PopulationMethod::None), ValidationError);
}

TEST(Weights, MethodNames) {
    for (auto m : {PopulationMethod::None, PopulationMethod::InverseRank, PopulationMethod::LogRank,
                   PopulationMethod::Fuzzy})
        EXPECT_EQ(parse_population_method(to_string(m)), m);
    EXPECT_EQ(parse_population_method("Log-Rank"), PopulationMethod::LogRank);
    EXPECT_EQ(parse_population_method("inverse_rank"), PopulationMethod::InverseRank);
    EXPECT_EQ(parse_normalization("score-range"), Normalization::ScoreRange);
    EXPECT_EQ(to_string(Normalization::MaxScore), "maxscore");
    EXPECT_THROW(parse_population_method("gaussian"), ValidationError);
    EXPECT_THROW(parse_normalization("zscore"), ValidationError);
}

TEST(Kernel, PeakSupportAndShape) {
    const double r = 200'000;
    EXPECT_DOUBLE_EQ(quartic_kernel(0, r), 3.0 / (std::numbers::pi * r * r));
    EXPECT_EQ(quartic_kernel(r, r), 0.0);
    EXPECT_EQ(quartic_kernel(r * 1.0001, r), 0.0);
    EXPECT_DOUBLE_EQ(quartic_kernel(r / 2, r), quartic_kernel(0, r) * 0.5625);
    // Radial integral of the kernel over its disk is 1.
    const int steps = 100000;
    double mass = 0;
    for (int i = 0; i < steps; ++i) {
        const double d = (i + 0.5) * r / steps;
        mass += quartic_kernel(d, r) * 2 * std::numbers::pi * d * (r / steps);
    }
    EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(Density, MatchesStraightLineOracle) {
    std::mt19937_64 rng(4);
    const auto pts = random_points(rng, 25);
    const auto g = small_grid();
    expect_close(kernel_density(pts, g, 150'000), oracle_density(pts, g, 150'000), 1e-12);
}

TEST(Density, LinearInPointsAndWeights) {
    std::mt19937_64 rng(5);
    const auto a = random_points(rng, 10), b = random_points(rng, 15);
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto g = small_grid();
    const auto da = kernel_density(a, g, 120'000), db = kernel_density(b, g, 120'000);
    std::vector<double> sum(da.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = da.values()[i] + db.values()[i];
    expect_close(kernel_density(both, g, 120'000), RasterGrid(g, sum), 1e-12);

    auto scaled = a;
    for (auto& p : scaled) p.weight *= 3.5;
    const auto ds = kernel_density(scaled, g, 120'000);
    for (std::size_t i = 0; i < ds.size(); ++i) ASSERT_NEAR(ds.values()[i], 3.5 * da.values()[i], 1e-12 * ds.max());
}

TEST(Density, OrderAndThreadCountDoNotChangeBits) {
    std::mt19937_64 rng(6);
    auto pts = random_points(rng, 40);
    const auto g = small_grid();
    const auto reference = kernel_density(pts, g, 200'000, 1);
    for (unsigned threads : {0u, 2u, 3u, 7u, 64u}) {
        std::shuffle(pts.begin(), pts.end(), rng);
        EXPECT_EQ(kernel_density(pts, g, 200'000, threads), reference) << threads;
    }
}

TEST(Density, MassIsConserved) {
    // 100 km kernel at 35 N on a 0.02 degree grid with a 2r margin.
    const double r = 100'000;
    const auto g = GridSpec::from_cell_size(-104, 31, -96, 39, 0.02);
    const std::vector<WeightedPoint> one{{35.0, -100.0, 1.0}};
    const auto d = kernel_density(one, g, r);
    double mass = 0;
    for (std::size_t row = 0; row < g.n_rows; ++row) {
        const double north = g.max_lat - static_cast<double>(row) * g.cell_height();
        const double area = oracle_cell_area_m2(north - g.cell_height(), north, g.cell_width());
        for (std::size_t c = 0; c < g.n_cols; ++c) mass += d.at(row, c) * area;
    }
    EXPECT_NEAR(mass, 1.0, 0.01);
}

TEST(Density, PointsNearTheAntimeridianWrap) {
    const GridSpec g{-180, -10, 180, 10, 360, 20};
    const std::vector<WeightedPoint> pts{{0.0, 179.9, 1.0}};
    const auto d = kernel_density(pts, g, 300'000);
    expect_close(d, oracle_density(pts, g, 300'000), 1e-12);
    EXPECT_GT(d.at(10, 0), 0.0);  // cell centred at -179.5
}

TEST(Normalize, Examples) {
    const auto ms = normalize(row_raster({0, 2, 4}), Normalization::MaxScore);
    EXPECT_EQ(std::vector<double>(ms.values().begin(), ms.values().end()), (std::vector<double>{0, 0.5, 1}));
    const auto sr = normalize(row_raster({1, 2, 3}), Normalization::ScoreRange);
    EXPECT_EQ(std::vector<double>(sr.values().begin(), sr.values().end()), (std::vector<double>{0, 0.5, 1}));
    const auto ms2 = normalize(row_raster({1, 2, 3}), Normalization::MaxScore);
    EXPECT_DOUBLE_EQ(ms2.values()[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(ms2.values()[1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(ms2.values()[2], 1.0);
}

TEST(Normalize, Errors) {
    EXPECT_THROW(normalize(row_raster({0, 0, 0}), Normalization::MaxScore), ValidationError);
    EXPECT_THROW(normalize(row_raster({2, 2, 2}), Normalization::ScoreRange), ValidationError);
    EXPECT_THROW(normalize(row_raster({-1, -2}), Normalization::MaxScore), ValidationError);
}

TEST(Differential, IdentityIsZero) {
    std::mt19937_64 rng(7);
    const auto d = kernel_density(random_points(rng, 12), small_grid(), 150'000);
    for (auto norm : {Normalization::MaxScore, Normalization::ScoreRange})
        for (double v : differential(d, d, norm).values()) ASSERT_EQ(v, 0.0);
}

TEST(Differential, ExtremesAndBounds) {
    const auto k = row_raster({0, 0, 5});
    const auto b = row_raster({5, 0, 0});
    const auto d = differential(k, b);
    EXPECT_EQ(d.values()[2], 1.0);
    EXPECT_EQ(d.values()[0], -1.0);
    EXPECT_THROW(differential(k, row_raster({0, 0, 0})), ValidationError);
    EXPECT_THROW(differential(k, row_raster({1, 2})), ValidationError);
}

TEST(Differential, MatchesCellwiseRecomputation) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(64), b(64);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        const RasterGrid ka(GridSpec{0, 0, 8, 8, 8, 8}, a), kb(GridSpec{0, 0, 8, 8, 8, 8}, b);
        const double ma = *std::max_element(a.begin(), a.end()), mb = *std::max_element(b.begin(), b.end());
        const auto d = differential(ka, kb);
        for (std::size_t i = 0; i < a.size(); ++i) {
            ASSERT_NEAR(d.values()[i], a[i] / ma - b[i] / mb, 1e-12);
            ASSERT_GE(d.values()[i], -1.0);
            ASSERT_LE(d.values()[i], 1.0);
        }
    }
}

TEST(Selection, CountsAndFilters) {
    auto set = located_set({{32.7, -117.1}, {40.7, -74.0}, {39.8283, -98.5795}});
    std::vector<WebPageRecord> records(set.records().begin(), set.records().end());
    records[1].accuracy = AccuracyCode::E3;
    records.push_back(record(4, "http://nowhere.com/"));
    records.push_back(record(5, "http://coded.com/", loc(30, -90), {}, AccuracyCode::I1));
    set = ResultSet(set.keyword(), set.engine(), set.search_date(), records);
    const std::vector<ResultSet> sets{set};

    const auto all = select_points(sets);
    EXPECT_EQ(all.records, 5u);
    EXPECT_EQ(all.points.size(), 3u);
    EXPECT_EQ(all.without_location, 1u);
    EXPECT_EQ(all.sentinel, 1u);
    EXPECT_EQ(all.points.front().total, 5);

    PointFilter accurate;
    accurate.accurate_only = true;
    const auto acc = select_points(sets, accurate);
    EXPECT_EQ(acc.points.size(), 2u);  // uncoded rank 1 and I1 rank 5
    EXPECT_EQ(acc.not_accurate, 1u);
    EXPECT_NE(acc.describe().find("1 not coded spatially accurate"), std::string::npos);
}

TEST(Background, SingleSetEqualsKernelOfItsPoints) {
    const auto set = located_set({{32.7, -117.1}, {34.0, -118.2}, {33.4, -112.0}});
    const KernelParams params{150'000, PopulationMethod::InverseRank, Normalization::MaxScore};
    const std::vector<ResultSet> sets{set};
    const std::vector<WeightedPoint> pts{{32.7, -117.1, 3}, {34.0, -118.2, 2}, {33.4, -112.0, 1}};
    expect_close(build_background(sets, params, small_grid()), oracle_density(pts, small_grid(), 150'000), 1e-12);
}

TEST(Background, SuperposesSetsAndIgnoresOrder) {
    const auto a = located_set({{32.7, -117.1}, {34.0, -118.2}});
    const auto b = located_set({{33.4, -112.0}, {35.1, -114.0}, {31.0, -111.0}}, ymd(2011, 9, 15));
    const KernelParams params{180'000, PopulationMethod::LogRank, Normalization::MaxScore};
    const auto g = small_grid();
    const auto both = build_background(std::vector<ResultSet>{a, b}, params, g);
    const auto da = build_background(std::vector<ResultSet>{a}, params, g);
    const auto db = build_background(std::vector<ResultSet>{b}, params, g);
    std::vector<double> sum(da.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = da.values()[i] + db.values()[i];
    expect_close(both, RasterGrid(g, sum), 1e-12);
    EXPECT_EQ(build_background(std::vector<ResultSet>{b, a}, params, g), both);
    EXPECT_THROW(build_background(std::vector<ResultSet>{result_set({record(1, "http://x.com/")})}, params, g),
                 ValidationError);
}

TEST(Sweep, DefaultRadiiGiveSixNamedRasters) {
    EXPECT_EQ(default_sweep_radii(), (std::vector<double>{50'000, 100'000, 150'000, 200'000, 250'000, 300'000}));
    const auto pts = select_points(std::vector<ResultSet>{located_set({{32.7, -117.1}, {34.0, -118.2}})}).points;
    const auto sweep = parameter_sweep(pts, small_grid(), default_sweep_radii(), {PopulationMethod::LogRank},
                                       {Normalization::MaxScore});
    ASSERT_EQ(sweep.entries.size(), 6u);
    EXPECT_EQ(sweep.entries[0].name, "50000_logrank_maxscore");
    EXPECT_EQ(sweep.entries[5].name, "300000_logrank_maxscore");
    EXPECT_EQ(sweep.failures(), 0u);
    EXPECT_EQ(sweep_name(200'000, PopulationMethod::InverseRank, Normalization::ScoreRange),
              "200000_inverserank_scorerange");
}

TEST(Sweep, DuplicatesCollapseAndSingletonMatchesDirectComputation) {
    const auto pts = select_points(std::vector<ResultSet>{located_set({{32.7, -117.1}, {34.0, -118.2}})}).points;
    const auto g = small_grid();
    const auto sweep = parameter_sweep(pts, g, {100'000, 100'000}, {PopulationMethod::Fuzzy, PopulationMethod::Fuzzy},
                                       {Normalization::ScoreRange});
    ASSERT_EQ(sweep.entries.size(), 1u);
    const auto direct = normalize(kernel_density(weight_points(pts, PopulationMethod::Fuzzy), g, 100'000),
                                  Normalization::ScoreRange);
    EXPECT_EQ(*sweep.entries[0].raster, direct);
    EXPECT_THROW(parameter_sweep(pts, g, {}, {PopulationMethod::Fuzzy}, {Normalization::MaxScore}), ValidationError);
}

TEST(Sweep, FailuresAreRecordedAndTheRestContinue) {
    const auto pts = select_points(std::vector<ResultSet>{located_set({{32.7, -117.1}})}).points;
    // A single point makes ScoreRange fine but a zero radius fails.
    const auto sweep = parameter_sweep(pts, small_grid(), {0, 100'000}, {PopulationMethod::None},
                                       {Normalization::MaxScore, Normalization::ScoreRange});
    ASSERT_EQ(sweep.entries.size(), 4u);
    EXPECT_EQ(sweep.failures(), 2u);
    EXPECT_FALSE(sweep.find("0_none_maxscore")->raster);
    EXPECT_FALSE(sweep.find("0_none_maxscore")->error.empty());
    EXPECT_TRUE(sweep.find("100000_none_scorerange")->raster);

    const auto empty = parameter_sweep({}, small_grid(), {100'000}, {PopulationMethod::None}, {Normalization::MaxScore});
    EXPECT_EQ(empty.failures(), 1u);
}

TEST(Sweep, WritesRastersAndManifest) {
    const auto pts = select_points(std::vector<ResultSet>{located_set({{32.7, -117.1}})}).points;
    const auto sweep = parameter_sweep(pts, small_grid(), {0, 100'000}, {PopulationMethod::None},
                                       {Normalization::MaxScore});
    const auto dir = scratch_dir("sweep");
    write_sweep(sweep, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "100000_none_maxscore.asc"));
    EXPECT_FALSE(std::filesystem::exists(dir / "0_none_maxscore.asc"));
    const auto manifest = slurp(dir / "manifest.csv");
    EXPECT_EQ(manifest.substr(0, manifest.find('\n')), "name,radius_m,population_method,normalization,file,status,message");
    EXPECT_NE(manifest.find("100000_none_maxscore,100000,none,maxscore,100000_none_maxscore.asc,ok,"), std::string::npos);
    EXPECT_NE(manifest.find("0_none_maxscore,0,none,maxscore,,failed,"), std::string::npos);
    const auto back = read_ascii_grid(slurp(dir / "100000_none_maxscore.asc"));
    EXPECT_EQ(back.spec(), small_grid());
    EXPECT_NEAR(back.max(), 1.0, 1e-12);
}
