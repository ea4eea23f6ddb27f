#include "epitest/config.hpp"
#include "epitest/errors.hpp"
#include "epitest/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

using namespace epitest;

TEST_CASE("piecewise exponential prevalence")
{
    ScenarioSpec s;
    s.initial_prevalence = 300.0;
    s.lambda0 = 0.2;
    s.theta0 = 0.3;
    s.lockdown_day = 10;
    s.days = 30;
    const std::vector<double> p = simulate_prevalence(s).dense();
    CHECK(p[0] == doctest::Approx(300.0));
    for (std::size_t t = 1; t < p.size(); ++t) {
        const double slope = std::log(p[t] / p[t - 1]);
        CHECK(slope == doctest::Approx(t <= 10 ? 0.2 : -0.1).epsilon(1e-12));
    }
    s.theta0 = 0.0;
    const std::vector<double> q = simulate_prevalence(s).dense();
    CHECK(q[7] / q[0] == doctest::Approx(std::exp(1.4)));
}

TEST_CASE("test-rate trajectory")
{
    ScenarioSpec s;
    s.tests = {1e-4, 0.1, 0.02};
    s.lockdown_day = 20;
    const std::vector<double> r = simulate_test_rate(s).dense();
    CHECK(r[0] == doctest::Approx(1e-4));
    CHECK(r[20] == doctest::Approx(1e-4 * std::exp(2.0)));
    CHECK(r[30] == doctest::Approx(1e-4 * std::exp(2.2)));
}

TEST_CASE("scenario validation")
{
    ScenarioSpec s;
    s.days = s.lockdown_day + 14;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    ScenarioSpec z;
    z.initial_prevalence = 0.0;
    CHECK_THROWS_AS(z.validate(), ConfigError);
    ScenarioSpec t;
    t.tests.initial_rate = 0.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("observations are deterministic given the seed")
{
    ScenarioSpec s;
    const RegionRecord a = simulate_region(s);
    const RegionRecord b = simulate_region(s);
    CHECK(a.new_cases.dense() == b.new_cases.dense());
    CHECK(a.new_deaths.dense() == b.new_deaths.dense());
    s.seed = 2;
    const RegionRecord c = simulate_region(s);
    CHECK(a.new_cases.dense() != c.new_cases.dense());
}

TEST_CASE("zero fatality gives no deaths")
{
    ScenarioSpec s;
    s.ifr = 0.0;
    for (double d : simulate_region(s).new_deaths.dense())
        CHECK(d == 0.0);
}

TEST_CASE("sampled cases average to their expectation")
{
    const Date d0(2020, 1, 1);
    const std::size_t n = 1000;
    const DailySeries prevalence = DailySeries::from_values(d0, std::vector<double>(n, 1e4));
    std::vector<double> rate(n);
    for (std::size_t i = 0; i < n; ++i)
        rate[i] = 1e-4 * (1.0 + static_cast<double>(i % 50));
    const DailySeries rates = DailySeries::from_values(d0, rate);
    const TestingModel m = TestingModel::up_saturating(0.002);
    const Observations obs = simulate_observations(prevalence, rates, m, 0.01, 99);
    double ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        ratio += *obs.cases[i] / (1e4 * eval_f(m, rate[i]));
    CHECK(std::abs(ratio / n - 1.0) < 0.01);
    const Observations expected = expected_observations(prevalence, rates, m, 0.01);
    CHECK(*expected.cases[10] == doctest::Approx(1e4 * eval_f(m, rate[10])));
}

TEST_CASE("oversized expectations are rejected")
{
    const Date d0(2020, 1, 1);
    const DailySeries prevalence = DailySeries::from_values(d0, std::vector<double>(5, 1e13));
    const DailySeries rates = DailySeries::from_values(d0, std::vector<double>(5, 1.0));
    CHECK_THROWS_AS(simulate_observations(prevalence, rates, TestingModel::adapted(), 0.0, 1), DomainError);
}

TEST_CASE("up-saturating generated cases approach the limiting regime for large alpha")
{
    ScenarioSpec s;
    s.model = TestingModel::up_saturating(1.0);
    const RegionRecord up = simulate_region(s, true);
    const std::vector<double> rates = simulate_test_rate(s).dense();
    const double max_rate = *std::max_element(rates.begin(), rates.end());
    REQUIRE(1.0 >= 100.0 * max_rate);
    s.model = TestingModel::limiting(1.0);
    const RegionRecord lim = simulate_region(s, true);
    const auto u = up.new_cases.dense();
    const auto l = lim.new_cases.dense();
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(std::abs(u[i] / l[i] - 1.0) < 0.02);
}

TEST_CASE("worlds draw parameters inside their ranges")
{
    WorldSpec w;
    w.regions = 12;
    w.lambda0 = {0.1, 0.2};
    w.test_rate0 = {1e-5, 1e-4};
    w.covariates = {{1e3, 5e4}, {10, 500}, {20, 90}};
    const auto scenarios = world_scenarios(w);
    REQUIRE(scenarios.size() == 12);
    CHECK(scenarios[0].name == "Region 01");
    CHECK(scenarios[11].name == "Region 12");
    for (const auto& s : scenarios) {
        CHECK(s.lambda0 >= 0.1);
        CHECK(s.lambda0 <= 0.2);
        CHECK(s.tests.initial_rate >= 1e-5);
        CHECK(s.tests.initial_rate <= 1e-4);
        CHECK(s.covariates.size() == 3);
    }
    const auto records = simulate_world(w);
    CHECK(records[3].covariate_vector().has_value());
    CHECK(records[3].covariates.at("population_density") == scenarios[3].covariates.at("population_density"));

    w.covariate_beta = {1e-3, 1e-8, 0.0, 1e-5};
    for (const auto& s : world_scenarios(w)) {
        const std::vector<double> x = {s.covariates.at("gdp_per_capita"), s.covariates.at("population_density"),
                                       s.covariates.at("urban_population_percent")};
        CHECK(*s.model.alpha == doctest::Approx(alpha_from_covariates(w.covariate_beta, x)));
    }
}

TEST_CASE("world configuration files")
{
    std::istringstream in("regions = 5\nseed = 11\nlambda0_min = 0.1\nlambda0_max = 0.2\ntheta0 = 0.3\n"
                          "model = up\nalpha = 0.003\n");
    const WorldSpec w = load_world_spec(KeyValueConfig::parse(in));
    CHECK(w.regions == 5);
    CHECK(w.base.seed == 11);
    CHECK(w.lambda0.lo == 0.1);
    CHECK(w.lambda0.hi == 0.2);
    CHECK(w.theta0.lo == 0.3);
    CHECK(*w.base.model.alpha == 0.003);
    bool found = false;
    for (const auto& [k, v] : describe(w))
        found = found || (k == "lambda0_max" && v == "0.2");
    CHECK(found);

    std::istringstream unknown("regionz = 5\n");
    CHECK_THROWS_AS(load_world_spec(KeyValueConfig::parse(unknown)), ConfigError);
    std::istringstream both("lambda0 = 0.1\nlambda0_min = 0.1\nlambda0_max = 0.2\n");
    CHECK_THROWS_AS(load_world_spec(KeyValueConfig::parse(both)), ConfigError);
    std::istringstream short_run("days = 50\nlockdown_day = 40\n");
    CHECK_THROWS_AS(load_world_spec(KeyValueConfig::parse(short_run)), ConfigError);
    std::istringstream alpha_limiting("model = limiting\nalpha = 0.1\n");
    CHECK_THROWS_AS(load_world_spec(KeyValueConfig::parse(alpha_limiting)), ConfigError);
}

TEST_CASE("risk population: no tests, no positives")
{
    RiskPopulationSpec spec;
    const RiskPopulationResult r = simulate_risk_population(spec, 0.0, 1);
    CHECK(r.expected_positives == 0.0);
    CHECK(r.sampled_positives == 0);
    CHECK(r.threshold == spec.r_max);
}

TEST_CASE("risk population: exact positives approach I f_u(T) for small prevalence")
{
    RiskPopulationSpec spec;
    spec.infectious = 100.0;
    spec.non_infectious = 1e6;
    const TestingModel m = spec.implied_model();
    CHECK(*m.alpha == doctest::Approx(spec.non_infectious * spec.nu0 * spec.omega0));
    CHECK(m.kappa == doctest::Approx(spec.nu1 * spec.omega0));
    for (double t : {1e3, 1e4, 5e4, 2e5, 6e5}) {
        const RiskPopulationResult r = simulate_risk_population(spec, t, 1, false);
        CHECK(std::abs(r.expected_positives / (spec.infectious * eval_f(m, t)) - 1.0) < 1e-3);
        CHECK(r.approx_positives == doctest::Approx(spec.infectious * eval_f(m, t)));
    }
}

TEST_CASE("risk population: down-saturating point mass")
{
    RiskPopulationSpec spec;
    spec.density = RiskDensity::down_saturating;
    spec.delta = 0.2;
    spec.nu1 = 0.5;
    spec.infectious = 100.0;
    const TestingModel m = spec.implied_model();
    CHECK(m.kind == TestingKind::down_saturating);
    for (double t : {1e4, 1e5, 5e5}) {
        const RiskPopulationResult r = simulate_risk_population(spec, t, 1, false);
        CHECK(std::abs(r.expected_positives / (spec.infectious * eval_f(m, t)) - 1.0) < 1e-3);
    }
    // fewer tests than point-mass individuals: every test is positive
    CHECK(simulate_risk_population(spec, 10.0, 1, false).expected_positives == 10.0);
}

TEST_CASE("risk population: sampled count agrees with the exact expectation")
{
    RiskPopulationSpec spec;
    for (double t : {2e4, 2e5}) {
        const RiskPopulationResult r = simulate_risk_population(spec, t, 17);
        CHECK(std::abs(static_cast<double>(r.sampled_positives) - r.expected_positives) <= 4.0 * r.sampled_sd);
    }
}

TEST_CASE("risk population: argument checks")
{
    RiskPopulationSpec spec;
    CHECK_THROWS_AS(simulate_risk_population(spec, spec.testable_mass() * 1.01, 1), DomainError);
    CHECK_THROWS_AS(simulate_risk_population(spec, -1.0, 1), DomainError);
    RiskPopulationSpec heavy;
    heavy.nu0 = 2.0;
    CHECK_THROWS_AS(heavy.validate(), DomainError);
    RiskPopulationSpec mass;
    mass.density = RiskDensity::down_saturating;
    mass.delta = 0.7;
    mass.nu1 = 0.5;
    CHECK_THROWS_AS(mass.validate(), DomainError);
}

TEST_CASE("risk population: proportional risks give the limiting regime")
{
    RiskPopulationSpec spec;
    spec.density = RiskDensity::proportional;
    spec.mu0 = 0.8;
    spec.nu1 = 0.9;
    spec.infectious = 200.0;
    const TestingModel m = spec.implied_model();
    CHECK(m.kind == TestingKind::limiting);
    CHECK(m.kappa == doctest::Approx(1.0 / (spec.mu0 * spec.non_infectious)));
    for (double t : {1e3, 5e4, 3e5}) {
        const RiskPopulationResult r = simulate_risk_population(spec, t, 5);
        // every tested person is positive with probability I / (mu0 N0 + I)
        const double exact = spec.infectious * t / (spec.mu0 * spec.non_infectious + spec.infectious);
        CHECK(r.expected_positives == doctest::Approx(exact).epsilon(1e-9));
        CHECK(std::abs(r.approx_positives / exact - 1.0) < 1e-3);
        CHECK(std::abs(static_cast<double>(r.sampled_positives) - exact) <= 4.0 * r.sampled_sd);
    }
    RiskPopulationSpec bad = spec;
    bad.mu0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
