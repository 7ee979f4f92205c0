#include <gtest/gtest.h>

#include "test_support.hpp"
#include "webscape/errors.hpp"
#include "webscape/model.hpp"

using namespace webscape;
using webscape::testing::loc;
using webscape::testing::record;
using webscape::testing::ymd;

TEST(Dates, ParsesIsoAndUsForms) {
    EXPECT_EQ(parse_date("2011-09-08"), ymd(2011, 9, 8));
    EXPECT_EQ(parse_date("09/08/2011"), ymd(2011, 9, 8));
    EXPECT_EQ(parse_date("9/8/2011"), ymd(2011, 9, 8));
    EXPECT_EQ(format_date(ymd(2011, 9, 8)), "2011-09-08");
}

TEST(Dates, RejectsInvalid) {
    EXPECT_THROW(parse_date("2011-02-30"), ValidationError);
    EXPECT_THROW(parse_date("13/01/2011"), ValidationError);
    EXPECT_THROW(parse_date("yesterday"), ValidationError);
    EXPECT_THROW(parse_date(""), ValidationError);
}

TEST(Engines, RoundTrip) {
    for (Engine e : {Engine::Yahoo, Engine::Bing, Engine::Other})
        EXPECT_EQ(parse_engine(to_string(e)), e);
    EXPECT_EQ(parse_engine("YAHOO"), Engine::Yahoo);
    EXPECT_THROW(parse_engine("altavista"), ValidationError);
}

TEST(Categories, ExactlyTwelveInTaxonomyOrder) {
    ASSERT_EQ(kAllCategories.size(), 12u);
    EXPECT_EQ(category_number(Category::Blog), 1);
    EXPECT_EQ(category_number(Category::Governmental), 6);
    EXPECT_EQ(category_number(Category::Offline), 12);
    for (int n = 1; n <= 12; ++n) EXPECT_EQ(category_number(*category_from_number(n)), n);
    EXPECT_FALSE(category_from_number(0));
    EXPECT_FALSE(category_from_number(13));
}

TEST(Categories, LabelsParseBackAndAcceptSheetSpellings) {
    for (Category c : kAllCategories) EXPECT_EQ(parse_category(to_string(c)), c);
    EXPECT_EQ(parse_category("governmental"), Category::Governmental);
    EXPECT_EQ(parse_category("Special Interest"), Category::SpecialInterest);
    EXPECT_EQ(parse_category("social media"), Category::SocialMedia);
    EXPECT_EQ(parse_category("blog"), Category::Blog);
    EXPECT_EQ(parse_category("ngo"), Category::NGO);
    EXPECT_FALSE(parse_category("spam"));
}

TEST(AccuracyCodes, SevenCodesAndAccuracyClasses) {
    ASSERT_EQ(kAllAccuracyCodes.size(), 7u);
    int accurate = 0, inaccurate = 0;
    for (AccuracyCode c : kAllAccuracyCodes) {
        EXPECT_EQ(parse_accuracy_code(to_string(c)), c);
        accurate += is_spatially_accurate(c);
        inaccurate += is_spatially_inaccurate(c);
    }
    EXPECT_EQ(accurate, 4);
    EXPECT_EQ(inaccurate, 2);
    EXPECT_EQ(parse_accuracy_code("E-1"), AccuracyCode::E1);
    EXPECT_EQ(parse_accuracy_code("N/A"), AccuracyCode::NA);
    EXPECT_FALSE(parse_accuracy_code("E4"));
}

TEST(Ipv4, ParsesDottedQuads) {
    EXPECT_EQ(Ipv4Address::parse("130.191.118.3").value, (130u << 24) | (191u << 16) | (118u << 8) | 3u);
    EXPECT_EQ(Ipv4Address::parse("0.0.0.0").value, 0u);
    EXPECT_EQ(Ipv4Address::parse("255.255.255.255").value, 0xffffffffu);
    EXPECT_EQ(Ipv4Address::parse("198.180.31.12").to_string(), "198.180.31.12");
    for (const char* bad : {"256.1.1.1", "1.2.3", "1.2.3.4.5", "a.b.c.d", "1..2.3", "", "1.2.3.4 "})
        EXPECT_FALSE(Ipv4Address::try_parse(bad)) << bad;
    EXPECT_THROW(Ipv4Address::parse("1.2.3"), ValidationError);
}

TEST(GeoLocations, OriginBecomesUnknown) {
    EXPECT_FALSE(GeoLocation::make(0, 0));
    EXPECT_TRUE(GeoLocation::make(0, 1));
    EXPECT_TRUE(GeoLocation::make(1, 0));
}

TEST(GeoLocations, RejectsOutOfRange) {
    EXPECT_THROW(GeoLocation::make(91, 0), ValidationError);
    EXPECT_THROW(GeoLocation::make(0, -181), ValidationError);
    EXPECT_THROW(GeoLocation::make(std::nan(""), 0), ValidationError);
    EXPECT_NO_THROW(GeoLocation::make(90, 180));
    EXPECT_NO_THROW(GeoLocation::make(-90, -180));
}

TEST(GeoLocations, EmptyOptionalTextIsAbsent) {
    const auto g = GeoLocation::make(32.7977, -117.23, std::string(""), std::string("858"));
    ASSERT_TRUE(g);
    EXPECT_FALSE(g->zip());
    EXPECT_EQ(g->area(), "858");
    EXPECT_EQ(g->source(), LocationSource::Database);
}

TEST(Records, Validation) {
    auto r = record(1, "http://www.sandiego.gov/mayor/about/");
    r.host = "sandiego.gov";
    EXPECT_NO_THROW(r.validate());
    r.host = "www.sandiego.gov";
    EXPECT_NO_THROW(r.validate());

    auto bad = r;
    bad.rank = 0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = r;
    bad.url = "sandiego.gov/mayor";
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = r;
    bad.host = "example.com";
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = r;
    bad.accuracy = AccuracyCode::E1;  // numbered code needs a server location
    EXPECT_THROW(bad.validate(), ValidationError);
    bad.accuracy = AccuracyCode::NA;
    EXPECT_NO_THROW(bad.validate());
    bad.keyword.clear();
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Evidence, NoneSourceCarriesNoLocations) {
    LocationEvidence e;
    EXPECT_NO_THROW(e.validate());
    e.creator_location = loc(32.7, -117.1);
    EXPECT_THROW(e.validate(), ValidationError);
    e.evidence_source = EvidenceSource::OnSite;
    EXPECT_NO_THROW(e.validate());
}

TEST(ResultSets, SortsByRankAndRejectsDuplicates) {
    std::vector<WebPageRecord> rs = {record(3, "http://c.com/"), record(1, "http://a.com/"),
                                     record(2, "http://b.com/")};
    const ResultSet set("test keyword", Engine::Yahoo, ymd(2011, 9, 8), rs);
    ASSERT_EQ(set.total(), 3u);
    EXPECT_EQ(set.records()[0].rank, 1);
    EXPECT_EQ(set.records()[2].rank, 3);
    EXPECT_EQ(set.find_rank(2)->url, "http://b.com/");
    EXPECT_EQ(set.find_rank(4), nullptr);

    rs.push_back(record(2, "http://d.com/"));
    EXPECT_THROW(ResultSet("test keyword", Engine::Yahoo, ymd(2011, 9, 8), rs), ValidationError);
}

TEST(ResultSets, RecordsMustMatchSetMetadata) {
    auto r = record(1, "http://a.com/");
    EXPECT_THROW(ResultSet("other", Engine::Yahoo, ymd(2011, 9, 8), {r}), ValidationError);
    EXPECT_THROW(ResultSet("test keyword", Engine::Bing, ymd(2011, 9, 8), {r}), ValidationError);
    EXPECT_THROW(ResultSet("test keyword", Engine::Yahoo, ymd(2011, 9, 15), {r}), ValidationError);
}

TEST(ResultSets, WithRecordReplacesByRank) {
    const ResultSet set("test keyword", Engine::Yahoo, ymd(2011, 9, 8),
                        {record(1, "http://a.com/"), record(2, "http://b.com/")});
    auto changed = *set.find_rank(2);
    changed.category = Category::News;
    const auto updated = set.with_record(changed);
    EXPECT_EQ(updated.find_rank(2)->category, Category::News);
    EXPECT_FALSE(set.find_rank(2)->category);
    auto missing = changed;
    missing.rank = 9;
    EXPECT_THROW(set.with_record(missing), ValidationError);
}

TEST(Slugs, KeywordSlug) {
    EXPECT_EQ(keyword_slug("Jerry Sanders"), "jerry-sanders");
    EXPECT_EQ(keyword_slug("  Occupy   Wall St. "), "occupy-wall-st");
    EXPECT_EQ(keyword_slug("jerry sanders"), keyword_slug("Jerry  Sanders"));
}
