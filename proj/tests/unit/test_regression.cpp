#include "epitest/errors.hpp"
#include "epitest/random.hpp"
#include "epitest/regression.hpp"
#include "epitest/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace epitest;

TEST_CASE("noise-free exponential counts recover intercept and slope")
{
    for (double b : {-0.08, 0.0, 0.05, 0.2}) {
        std::vector<double> y, t, off;
        for (int i = 0; i < 30; ++i) {
            t.push_back(i);
            off.push_back(0.0);
            y.push_back(std::exp(12.0 + b * i));
        }
        const PoissonFit fit = poisson_regress(y, t, off);
        CHECK(fit.converged);
        CHECK(std::abs(fit.slope - b) < 1e-6);
        CHECK(std::abs(fit.intercept - 12.0) < 1e-5);
    }
}

TEST_CASE("offsets enter with unit coefficient")
{
    Rng rng(4);
    std::vector<double> y, t, off;
    for (int i = 0; i < 25; ++i) {
        const double o = std::log(0.01 + rng.uniform());
        t.push_back(i);
        off.push_back(o);
        y.push_back(std::exp(10.0 + 0.1 * i + o));
    }
    const PoissonFit fit = poisson_regress(y, t, off);
    CHECK(std::abs(fit.slope - 0.1) < 1e-4);
}

TEST_CASE("standard errors from the information matrix")
{
    const std::vector<double> y = {3, 7, 4, 9, 12, 10, 17, 21, 18, 30};
    std::vector<double> t, off(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        t.push_back(static_cast<double>(i));
    const PoissonFit fit = poisson_regress(y, t, off);
    // score equations hold at the estimate
    double s0 = 0.0, s1 = 0.0, i00 = 0.0, i01 = 0.0, i11 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double mu = std::exp(fit.intercept + fit.slope * t[i]);
        s0 += y[i] - mu;
        s1 += (y[i] - mu) * t[i];
        i00 += mu;
        i01 += mu * t[i];
        i11 += mu * t[i] * t[i];
    }
    CHECK(std::abs(s0) < 1e-6);
    CHECK(std::abs(s1) < 1e-5);
    const double det = i00 * i11 - i01 * i01;
    CHECK(fit.se_slope == doctest::Approx(std::sqrt(i00 / det)).epsilon(1e-6));
    CHECK(fit.se_intercept == doctest::Approx(std::sqrt(i11 / det)).epsilon(1e-6));
    CHECK(fit.se_slope > 0.0);
}

TEST_CASE("regression input checks")
{
    const std::vector<double> zeros = {0, 0, 0, 0};
    const std::vector<double> t = {0, 1, 2, 3};
    const std::vector<double> off(4, 0.0);
    CHECK_THROWS_AS(poisson_regress(zeros, t, off), DomainError);
    const std::vector<double> same_t = {1, 1, 1, 1};
    const std::vector<double> y = {1, 2, 3, 4};
    CHECK_THROWS_AS(poisson_regress(y, same_t, off), DomainError);
    CHECK_THROWS_AS(poisson_regress(std::vector<double>{1, 2}, std::vector<double>{0, 1}, std::vector<double>{0, 0}),
                    DomainError);
    std::vector<double> bad_off = off;
    bad_off[1] = -INFINITY;
    CHECK_THROWS_AS(poisson_regress(y, t, bad_off), DomainError);
}

TEST_CASE("fixed windows for the autumn lockdown")
{
    const LockdownWindows w = second_lockdown_windows(Date(2020, 10, 30));
    CHECK(w.pre.first == Date(2020, 10, 9));
    CHECK(w.pre.last == Date(2020, 10, 29));
    CHECK(w.during.first == Date(2020, 11, 9));
    CHECK(w.during.last == Date(2020, 11, 29));
    CHECK(w.pre.length() == 21);
    CHECK(w.during.length() == 21);
}

TEST_CASE("stringency crossing detection")
{
    std::vector<std::optional<double>> s;
    for (int d = 0; d < 150; ++d)
        s.push_back(d < 20 ? 70.0 : (d < 100 ? 45.0 : 65.0));
    const DailySeries series(Date(2020, 7, 1), s);
    // the high spell before August does not count
    CHECK(detect_stringency_lockdown(series, Date(2020, 8, 1)) == Date(2020, 7, 1) + 100);
    const DailySeries always_high(Date(2020, 8, 1), std::vector<std::optional<double>>(60, 80.0));
    CHECK_THROWS_AS(detect_stringency_lockdown(always_high, Date(2020, 8, 1)), ExclusionError);
    const DailySeries never_back(Date(2020, 8, 1), std::vector<std::optional<double>>(60, 30.0));
    CHECK_THROWS_AS(detect_stringency_lockdown(never_back, Date(2020, 8, 1)), ExclusionError);
}

TEST_CASE("spring windows follow cases and mobility")
{
    ScenarioSpec spec;
    spec.mobility_reduction = 100.0;
    spec.mobility_hold_days = 30;
    spec.mobility_recovery_days = 20;
    const RegionRecord rec = simulate_region(spec, true);
    const Date lockdown = spec.start + spec.lockdown_day;
    const LockdownWindows w = build_windows_first_lockdown(rec, lockdown, rec.mobility);
    std::optional<Date> first_ten;
    for (std::size_t i = 0; i < rec.total_cases.size() && !first_ten; ++i)
        if (*rec.total_cases[i] >= 10.0)
            first_ten = rec.start() + static_cast<std::int32_t>(i);
    CHECK(w.pre.first == *first_ten);
    CHECK(w.pre.last == lockdown + 5);
    CHECK(w.during.first == lockdown + 10);
    // the weekly mean stays within 80% of -100 from ramp end until about 3 days into the recovery
    CHECK(w.during.last > lockdown + 5 + 30);
    CHECK(w.during.last < lockdown + 5 + 30 + 8);

    const DailySeries flat = DailySeries::signed_values(rec.start(), std::vector<std::optional<double>>(rec.days(), 0.0));
    CHECK_THROWS_AS(build_windows_first_lockdown(rec, lockdown, flat), ExclusionError);
    CHECK_THROWS_AS(build_windows_first_lockdown(rec, rec.start() + 2, rec.mobility), ExclusionError);
}

TEST_CASE("growth rates recovered when the analysis model matches the data")
{
    ScenarioSpec spec;
    spec.model = TestingModel::up_saturating(0.002);
    const RegionRecord rec = simulate_region(spec, true);
    const Date lockdown = spec.start + spec.lockdown_day;
    LockdownWindows w{lockdown, {spec.start + 20, lockdown}, {lockdown + 10, lockdown + 40}};
    const CausalEstimate e = estimate_growth_and_effect(rec, w, spec.model);
    CHECK(std::abs(e.lambda_pre - spec.lambda0) < 1e-3);
    CHECK(std::abs(e.lambda_during - (spec.lambda0 - spec.theta0)) < 1e-3);
    CHECK(std::abs(e.theta - spec.theta0) < 1e-3);
    // ignoring the tests inflates the pre-lockdown growth
    const CausalEstimate adapted = estimate_growth_and_effect(rec, w, TestingModel::adapted());
    CHECK(adapted.lambda_pre > e.lambda_pre + 0.5 * spec.tests.growth_pre);
}

TEST_CASE("window validation")
{
    LockdownWindows w{Date(2020, 3, 20), {Date(2020, 3, 1), Date(2020, 3, 25)}, {Date(2020, 3, 22), Date(2020, 4, 20)}};
    CHECK_THROWS_AS(w.validate(), DomainError);
    LockdownWindows short_pre{Date(2020, 3, 20), {Date(2020, 3, 1), Date(2020, 3, 3)}, {Date(2020, 3, 30), Date(2020, 4, 20)}};
    CHECK_THROWS_AS(short_pre.validate(), DomainError);
}
