#include "epitest/errors.hpp"
#include "epitest/mortality.hpp"
#include "epitest/random.hpp"
#include "epitest/special_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace epitest;

TEST_CASE("onset-to-death probabilities")
{
    const OnsetToDeathPMF pmf = build_onset_to_death_pmf();
    CHECK(pmf.horizon() == 120);
    CHECK(pmf.total_mass() >= 1.0 - 1e-6);
    CHECK(pmf.total_mass() <= 1.0 + 1e-12);
    // continuous mixture mean 0.5 * 4.39 * 1.16 + 0.5 * 8.46 * 2.22
    CHECK(std::abs(pmf.mean() - 11.9368) <= 0.01);
    for (double p : pmf.probs)
        CHECK(p >= 0.0);
    // bins are differences of the mixture cdf
    const auto cdf = [](double x) {
        return 0.5 * special::gamma_cdf(x, 4.39, 1.16) + 0.5 * special::gamma_cdf(x, 8.46, 2.22);
    };
    CHECK(pmf.probs[0] == doctest::Approx(cdf(0.5)).epsilon(1e-13));
    CHECK(pmf.probs[10] == doctest::Approx(cdf(10.5) - cdf(9.5)).epsilon(1e-12));
    CHECK(onset_to_death_cdf(10.5) == doctest::Approx(cdf(10.5)).epsilon(1e-14));
    CHECK_THROWS_AS(build_onset_to_death_pmf(10), DomainError);
}

TEST_CASE("recovery rate bounds")
{
    CHECK(RecoveryRate().value() == 0.2);
    CHECK_THROWS_AS(RecoveryRate(0.0), DomainError);
    CHECK_THROWS_AS(RecoveryRate(1.5), DomainError);
}

TEST_CASE("incidence from prevalence")
{
    const DailySeries prev = DailySeries::from_values(Date(2020, 3, 1), std::vector<double>{100.0, 110.0, 50.0, 60.0});
    const IncidenceResult r = incidence_from_prevalence(prev, RecoveryRate(0.2));
    const std::vector<double> i = r.incidence.dense();
    CHECK(i[0] == doctest::Approx(20.0));
    CHECK(i[1] == doctest::Approx(110.0 - 0.8 * 100.0));
    CHECK(i[2] == 0.0);
    CHECK(i[3] == doctest::Approx(60.0 - 0.8 * 50.0));
    CHECK(r.clamped == std::vector<std::size_t>{2});
}

TEST_CASE("constant prevalence gives incidence gamma times prevalence")
{
    const DailySeries prev = DailySeries::from_values(Date(2020, 3, 1), std::vector<double>(30, 500.0));
    for (double g : {0.15, 0.2, 0.25})
        for (double v : incidence_from_prevalence(prev, RecoveryRate(g)).incidence.dense())
            CHECK(v == doctest::Approx(g * 500.0));
}

TEST_CASE("death curve equals a direct convolution")
{
    const OnsetToDeathPMF pmf = build_onset_to_death_pmf();
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> inc(60 + rep * 5);
        for (double& v : inc)
            v = rng.uniform() * 1000.0;
        const std::vector<double> fast = convolve_pmf(inc, pmf);
        for (std::size_t t = 0; t < inc.size(); ++t) {
            double s = 0.0;
            for (std::size_t k = 0; k <= t && k < pmf.probs.size(); ++k)
                s += pmf.probs[k] * inc[t - k];
            CHECK(fast[t] == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("convolution is linear and keeps dates")
{
    const OnsetToDeathPMF pmf = build_onset_to_death_pmf();
    const DailySeries inc = DailySeries::from_values(Date(2020, 3, 1), std::vector<double>(40, 1.0));
    const DailySeries d = predict_death_curve(inc, pmf);
    CHECK(d.start() == inc.start());
    CHECK(d.size() == inc.size());
    const DailySeries scaled = predict_death_curve(DailySeries::from_values(inc.start(), std::vector<double>(40, 3.0)), pmf);
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(*scaled[i] == doctest::Approx(3.0 * *d[i]));
    // a unit pulse reproduces the probabilities
    std::vector<double> pulse(130, 0.0);
    pulse[0] = 1.0;
    const std::vector<double> out = convolve_pmf(pulse, pmf);
    for (std::size_t k = 0; k <= pmf.horizon(); ++k)
        CHECK(out[k] == pmf.probs[k]);
    CHECK(out[125] == 0.0);
}
