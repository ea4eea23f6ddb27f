#pragma once

#include "epitest/timeseries.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epitest {

/// How confirmed cases relate to prevalence and test volume.
enum class TestingKind {
    adapted,         ///< f(T) = kappa
    limiting,        ///< f(T) = kappa * T
    up_saturating,   ///< f(T) = kappa * T / (T + alpha)
    down_saturating, ///< f(T) = kappa * (alpha + T)
};

std::string_view to_string(TestingKind kind);
/// Accepts the full names plus the short forms "up" and "down".
TestingKind parse_testing_kind(std::string_view text);
bool is_saturating(TestingKind kind);

/// A testing regime with its parameters. Test rates are tests/person/day.
///
/// `beta`, when non-empty, maps region covariates to alpha
/// (alpha = beta[0] + sum beta[i] * x[i-1]) and takes precedence over `alpha`
/// once resolved for a region via with_covariates().
struct TestingModel {
    TestingKind kind = TestingKind::adapted;
    double kappa = 1.0;
    std::optional<double> alpha;
    std::vector<double> beta;

    static TestingModel adapted(double kappa = 1.0);
    static TestingModel limiting(double kappa = 1.0);
    static TestingModel up_saturating(double alpha, double kappa = 1.0);
    static TestingModel down_saturating(double alpha, double kappa = 1.0);
    static TestingModel make(TestingKind kind, std::optional<double> alpha, double kappa = 1.0);

    /// Throws DomainError when the invariants do not hold.
    void validate() const;

    /// Copy with alpha resolved from covariates (no-op when beta is empty).
    [[nodiscard]] TestingModel with_covariates(std::span<const double> covariates) const;
};

/// Testing function f_m(T).
double eval_f(const TestingModel& model, double tests_per_person);

/// Prevalence estimate Y / f(T). Throws DomainError when f(T) == 0.
double estimate_prevalence(double cases, double tests_per_person, const TestingModel& model);

/// Day-wise prevalence estimate; days with a missing input or f(T) == 0 are missing.
///
/// `tests_per_person` may be an empty series for the adapted kind.
DailySeries estimate_prevalence(const DailySeries& cases, const DailySeries& tests_per_person,
                                const TestingModel& model);

/// alpha = beta[0] + sum beta[i] * x[i-1]; throws DomainError if the result is not positive.
double alpha_from_covariates(std::span<const double> beta, std::span<const double> covariates);

/// Test-rate interval where the limiting regime holds within a factor of two.
struct LinearityRange {
    double lower; ///< alpha of the down-saturating model, tests/person/day
    double upper; ///< alpha of the up-saturating model, tests/person/day

    [[nodiscard]] bool contains(double tests_per_person) const
    {
        return tests_per_person >= lower && tests_per_person <= upper;
    }
};

LinearityRange linearity_range(const TestingModel& up_model, const TestingModel& down_model);

} // namespace epitest
