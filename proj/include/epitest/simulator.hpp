#pragma once

#include "epitest/config.hpp"
#include "epitest/date.hpp"
#include "epitest/ingest.hpp"
#include "epitest/mortality.hpp"
#include "epitest/random.hpp"
#include "epitest/testing_models.hpp"
#include "epitest/timeseries.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace epitest {

/// Exponential test-rate trajectory with a growth change at the lockdown.
struct TestTrajectory {
    double initial_rate = 2e-5; ///< tests/person/day at day 0
    double growth_pre = 0.04;   ///< 1/day before the lockdown
    double growth_post = 0.01;  ///< 1/day from the lockdown on
};

/// One synthetic region with piecewise-exponential prevalence
/// log I(t) = log I0 + lambda0 t - theta0 (t - t_L) H(t - t_L).
struct ScenarioSpec {
    std::string name = "Synthetic";
    double initial_prevalence = 100; ///< persons at day 0
    double lambda0 = 0.12;           ///< 1/day
    double theta0 = 0.17;            ///< 1/day
    std::int32_t lockdown_day = 65;
    std::int32_t days = 180;
    TestTrajectory tests;
    TestingModel model = TestingModel::up_saturating(0.002);
    double ifr = 0.01;
    std::uint64_t seed = 1;
    std::int64_t population = 10'000'000;
    Date start = Date(2020, 3, 1);
    double gamma = RecoveryRate::kDefault;
    /// Copied onto the simulated record.
    std::map<std::string, double> covariates;

    /// Summed mobility percent change reached a few days after the lockdown.
    double mobility_reduction = 150.0;
    std::int32_t mobility_hold_days = 40;
    std::int32_t mobility_recovery_days = 30;
    double stringency_before = 30.0;
    double stringency_after = 70.0;

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;
};

/// I(t) for t = 0..days-1.
DailySeries simulate_prevalence(const ScenarioSpec& spec);

/// Test rate T(t), tests/person/day.
DailySeries simulate_test_rate(const ScenarioSpec& spec);

struct Observations {
    DailySeries cases;
    DailySeries deaths;
};

/// cases(t) ~ Poisson(I(t) f(T(t))), deaths(t) ~ Poisson(ifr (pmf * i)(t)), with i
/// from incidence_from_prevalence(). Deterministic given the seed. Throws
/// DomainError when an expected value exceeds 1e12.
Observations simulate_observations(const DailySeries& prevalence, const DailySeries& test_rate,
                                   const TestingModel& model, double ifr, std::uint64_t seed,
                                   const OnsetToDeathPMF& pmf = build_onset_to_death_pmf(),
                                   RecoveryRate gamma = RecoveryRate{});

/// Noise-free expectations behind simulate_observations().
Observations expected_observations(const DailySeries& prevalence, const DailySeries& test_rate,
                                   const TestingModel& model, double ifr,
                                   const OnsetToDeathPMF& pmf = build_onset_to_death_pmf(),
                                   RecoveryRate gamma = RecoveryRate{});

/// Full surveillance record for a scenario, including stringency and mobility.
///
/// Prevalence is run from pmf-horizon days before day 0 so deaths at day 0
/// already reflect earlier infections. With `noise_free`, counts are the
/// unrounded expectations.
RegionRecord simulate_region(const ScenarioSpec& spec, bool noise_free = false);

/// Inclusive interval for a per-region parameter draw.
struct Range {
    double lo;
    double hi;
};

/// A set of regions sharing a testing regime with per-region parameters drawn
/// uniformly from ranges.
struct WorldSpec {
    std::size_t regions = 20;
    std::string name_prefix = "Region";
    ScenarioSpec base;
    Range initial_prevalence{100, 100};
    Range lambda0{0.12, 0.12};
    Range theta0{0.17, 0.17};
    Range lockdown_day{65, 65};
    Range test_rate0{2e-5, 2e-5};
    Range test_growth_pre{0.04, 0.04};
    Range test_growth_post{0.01, 0.01};
    /// Covariates drawn per region, in kCovariateNames order (empty: none).
    std::vector<Range> covariates;
    /// When set, each region's alpha is alpha_from_covariates(beta, covariates).
    std::vector<double> covariate_beta;

    void validate() const;
};

/// Per-region scenarios, deterministic given base.seed.
std::vector<ScenarioSpec> world_scenarios(const WorldSpec& world);
std::vector<RegionRecord> simulate_world(const WorldSpec& world, bool noise_free = false);

/// Reads a world/scenario from key=value configuration.
///
/// Each ranged parameter is given either as `key` or as `key_min` and
/// `key_max`. Unknown keys are rejected.
WorldSpec load_world_spec(const KeyValueConfig& config);

/// All scenario parameters as key=value pairs, for metadata sidecars.
std::vector<std::pair<std::string, std::string>> describe(const WorldSpec& world);

// -- risk-structured population ---------------------------------------------

enum class RiskDensity { up_saturating, down_saturating, proportional };

/// Population with continuous risk scores used to derive the testing functions.
///
/// Non-infectious risk density nu0 on [0, r_max]. Infectious density is
/// nu1 * omega0^2 / (r_max - r + omega0)^2 (up-saturating) or nu1 plus a point
/// mass delta at r_max (down-saturating). With the proportional density both
/// groups are uniform and the non-infectious density is mu0 times the
/// infectious one nu1, so nu0 is ignored. Remaining mass sits below every
/// testable risk.
struct RiskPopulationSpec {
    RiskDensity density = RiskDensity::up_saturating;
    double non_infectious = 1e6; ///< N0, persons
    double infectious = 1e3;     ///< I, persons
    double nu0 = 1.0;
    double nu1 = 1.0;
    double omega0 = 0.05;
    double r_max = 1.0;
    double delta = 0.0;
    double mu0 = 1.0;

    void validate() const;
    /// nu0, or mu0 * nu1 for the proportional density.
    [[nodiscard]] double non_infectious_density() const;
    /// Reparametrized testing model (kappa = nu1 omega0, alpha = N0 nu0 omega0 for
    /// up-saturating; kappa = nu1 / (N0 nu0), alpha = delta N0 nu0 / nu1 for
    /// down-saturating; limiting with kappa = 1 / (mu0 N0) for proportional).
    /// Test counts, not rates.
    [[nodiscard]] TestingModel implied_model() const;
    /// Number of individuals with a testable risk.
    [[nodiscard]] double testable_mass() const;
};

struct RiskPopulationResult {
    double threshold = 0.0;          ///< rho(T)
    double expected_positives = 0.0; ///< integral of I_r over [rho(T), r_max]
    double approx_positives = 0.0;   ///< I f(T) from the implied model
    std::int64_t sampled_positives = 0;
    /// Binomial standard deviation of the sampled count.
    double sampled_sd = 0.0;
};

/// Tests the `tests` highest-risk individuals. Solves T = int (N_r + I_r) dr
/// for the threshold exactly and, when `sample` is set, draws every
/// individual's risk and counts infectious among the top T.
RiskPopulationResult simulate_risk_population(const RiskPopulationSpec& spec, double tests, std::uint64_t seed,
                                              bool sample = true);

} // namespace epitest
