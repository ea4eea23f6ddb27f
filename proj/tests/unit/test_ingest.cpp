#include "epitest/errors.hpp"
#include "epitest/ingest.hpp"

#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

using namespace epitest;

namespace {

std::vector<RegionRecord> parse(const std::string& text, Schema schema = Schema::world, ParseRequirements req = {})
{
    std::istringstream in(text);
    return parse_surveillance_csv(in, schema, req);
}

} // namespace

TEST_CASE("world schema with cumulative columns")
{
    const auto records = parse("date,location,population,total_cases,total_tests,total_deaths\n"
                               "2020-03-01,Aland,1000,1,10,0\n"
                               "2020-03-02,Aland,1000,4,,0\n"
                               "2020-03-03,Aland,1000,9,40,1\n"
                               "2020-03-01,Borduria,500,2,5,0\n"
                               "2020-03-02,Borduria,500,3,6,0\n");
    REQUIRE(records.size() == 2);
    const RegionRecord& a = records[0];
    CHECK(a.name == "Aland");
    CHECK(a.population == 1000);
    CHECK(a.new_cases.dense() == std::vector<double>{1, 3, 5});
    // 10 -> 40 in two days: log-linear fill gives 20
    CHECK(*a.total_tests[1] == doctest::Approx(20.0));
    CHECK(*a.new_tests[1] == doctest::Approx(10.0));
    CHECK(*a.new_tests[2] == doctest::Approx(20.0));
    CHECK_FALSE(a.reported_total_tests[1].has_value());
    CHECK(*a.test_rate()[2] == doctest::Approx(0.02));
    CHECK(records[1].days() == 2);
}

TEST_CASE("daily-only columns build running totals")
{
    const auto r = parse("date,location,population,new_cases,new_tests,new_deaths\n"
                         "2020-03-01,X,100,1,5,0\n2020-03-02,X,100,2,5,1\n2020-03-03,X,100,3,5,0\n");
    CHECK(r[0].total_cases.dense() == std::vector<double>{1, 3, 6});
    CHECK(r[0].new_deaths.dense() == std::vector<double>{0, 1, 0});
}

TEST_CASE("cumulative revisions are flattened with a warning")
{
    const auto r = parse("date,location,population,total_cases,total_tests,total_deaths\n"
                         "2020-03-01,X,100,5,10,0\n2020-03-02,X,100,4,20,0\n2020-03-03,X,100,8,30,0\n");
    CHECK(r[0].new_cases.dense() == std::vector<double>{5, 0, 3});
    CHECK_FALSE(r[0].warnings.empty());
}

TEST_CASE("us_states column names")
{
    const auto r = parse("date,state,population,positive,totalTestResults,death\n"
                         "2020-03-02,NY,19450000,10,100,1\n2020-03-01,NY,19450000,5,50,0\n",
                         Schema::us_states);
    REQUIRE(r.size() == 1);
    CHECK(r[0].name == "NY");
    CHECK(r[0].start() == Date(2020, 3, 1));
    CHECK(r[0].new_cases.dense() == std::vector<double>{5, 5});
}

TEST_CASE("schema and data errors")
{
    CHECK_THROWS_AS(parse("date,location,population,total_cases,total_deaths\n2020-03-01,X,1,1,1\n"), SchemaError);
    CHECK_THROWS_AS(parse("date,location,population,total_cases,total_tests,total_deaths\n"
                          "2020-03-01,X,1,1,1,1\n2020-03-01,X,1,1,1,1\n"),
                    DataError);
    CHECK_THROWS_AS(parse("date,location,population,total_cases,total_tests,total_deaths\n"
                          "03/01/2020,X,1,1,1,1\n"),
                    DataError);
    CHECK_THROWS_AS(parse("date,location,population,new_cases,new_tests,new_deaths\n"
                          "2020-03-01,X,1,-3,1,1\n"),
                    DataError);
    CHECK_THROWS_AS(parse_schema("europe"), ConfigError);
    // tests optional when not required
    const auto r = parse("date,location,population,total_cases,total_deaths\n2020-03-01,X,1,1,1\n", Schema::world,
                         ParseRequirements{true, false, true});
    CHECK_FALSE(r[0].has_tests());
}

TEST_CASE("quoted fields, stringency and mobility")
{
    const auto r = parse("date,location,population,total_cases,total_tests,total_deaths,stringency_index,"
                         "retail_and_recreation_percent_change_from_baseline,"
                         "transit_stations_percent_change_from_baseline,workplaces_percent_change_from_baseline\n"
                         "2020-03-01,\"Korea, South\",10,1,1,0,20,-10,-20,-30\n"
                         "2020-03-02,\"Korea, South\",10,2,2,0,75,-40,-50,-60\n");
    CHECK(r[0].name == "Korea, South");
    CHECK(*r[0].stringency[1] == 75.0);
    CHECK(*r[0].mobility[0] == -60.0);
    CHECK(*r[0].mobility[1] == -150.0);
    CHECK_THROWS_AS(parse("date,location,population,total_cases,total_tests,total_deaths,stringency_index\n"
                          "2020-03-01,X,1,1,1,1,120\n"),
                    DataError);
}

TEST_CASE("write then parse round trip")
{
    RegionRecord rec = make_record("Zed", 1000, Date(2020, 4, 1), std::vector<double>{1, 2, 3, 4},
                                   std::vector<double>{10, 10, 20, 20}, std::vector<double>{0, 0, 1, 0});
    rec.covariates["gdp_per_capita"] = 12345.5;
    rec.covariates["population_density"] = 80.0;
    rec.covariates["urban_population_percent"] = 55.0;
    std::ostringstream out;
    write_surveillance_csv(out, {rec});
    std::istringstream in(out.str());
    const auto back = parse_surveillance_csv(in, Schema::world);
    REQUIRE(back.size() == 1);
    CHECK(back[0].new_cases.dense() == rec.new_cases.dense());
    CHECK(back[0].new_tests.dense() == rec.new_tests.dense());
    CHECK(back[0].new_deaths.dense() == rec.new_deaths.dense());
    CHECK(back[0].covariate_vector() == std::vector<double>{12345.5, 80.0, 55.0});
    std::ostringstream again;
    write_surveillance_csv(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("regular testing requires gaps of at most a week")
{
    std::string csv = "date,location,population,total_cases,total_tests,total_deaths\n";
    for (int d = 1; d <= 30; ++d) {
        const std::string day = (d < 10 ? "2020-04-0" : "2020-04-") + std::to_string(d);
        const bool report = d == 1 || d == 8 || d == 15 || d == 29;
        csv += day + ",X,100," + std::to_string(d) + "," + (report ? std::to_string(d * 10) : "") + ",0\n";
    }
    const auto r = parse(csv);
    CHECK(testing_is_regular(r[0], 14));
    CHECK_FALSE(testing_is_regular(r[0], 7));
}

TEST_CASE("selection for validation")
{
    const auto make = [](std::string name, double deaths_per_day) {
        std::vector<double> cases(60), tests(60, 100.0), deaths(60, deaths_per_day);
        for (std::size_t i = 0; i < cases.size(); ++i)
            cases[i] = static_cast<double>(i);
        return make_record(std::move(name), 100000, Date(2020, 3, 1), cases, tests, deaths);
    };
    const std::vector<RegionRecord> all = {make("Big", 30.0), make("Small", 1.0), make("China", 30.0)};
    const auto chosen = select_regions_for_validation(all);
    REQUIRE(chosen.size() == 1);
    CHECK(chosen[0].name == "Big");
    // cumulative cases reach 20 on day 6 (0+1+...+6 = 21)
    CHECK(chosen[0].start() == Date(2020, 3, 7));
}

TEST_CASE("bundled lockdown tables")
{
    const LockdownTable first = load_lockdown_dates("world_first");
    const LockdownTable second = load_lockdown_dates("world_second");
    const LockdownTable states = load_lockdown_dates("us_states");
    CHECK(first.size() == 13);
    CHECK(second.size() == 13);
    CHECK(states.size() == 33);
    CHECK(*first.find("Austria") == Date(2020, 3, 13));
    CHECK(*first.find("United States") == Date(2020, 3, 16));
    CHECK(*second.find("France") == Date(2020, 10, 30));
    CHECK(*second.find("Croatia") == Date(2020, 12, 14));
    CHECK(*states.find("CA") == Date(2020, 3, 19));
    CHECK(*states.find("AL") == Date(2020, 4, 4));
    CHECK_FALSE(first.find("Atlantis").has_value());
    CHECK_THROWS_AS(load_lockdown_dates("mars"), ConfigError);
}

TEST_CASE("lockdown csv validation")
{
    std::istringstream ok("region,date\nA,2020-03-01\nB,2020-04-01\n");
    CHECK(parse_lockdown_csv(ok, "custom").size() == 2);
    std::istringstream dup("region,date\nA,2020-03-01\nA,2020-04-01\n");
    CHECK_THROWS_AS(parse_lockdown_csv(dup, "custom"), DataError);
    std::istringstream year("region,date\nA,2021-03-01\n");
    CHECK_THROWS_AS(parse_lockdown_csv(year, "custom"), DataError);
}
