#pragma once

#include "epitest/date.hpp"
#include "epitest/ingest.hpp"
#include "epitest/testing_models.hpp"
#include "epitest/timeseries.hpp"

#include <cstddef>
#include <span>

namespace epitest {

/// Maximum-likelihood fit of log mu(t) = a + b t + offset(t).
struct PoissonFit {
    double intercept = 0.0; ///< a
    double slope = 0.0;     ///< b, 1/day
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    /// Norm of the score vector at the returned estimate.
    double gradient_norm = 0.0;
};

struct PoissonOptions {
    std::size_t max_iterations = 100;
    /// Stop when |dLL| / (|LL| + 1) falls below this.
    double relative_tolerance = 1e-9;
};

/// Poisson regression by iteratively reweighted least squares.
///
/// Counts are rounded to the nearest integer. Standard errors come from the
/// inverse observed information. Throws DomainError when all counts are zero,
/// all t are equal, fewer than 3 points are given, or an offset is not finite.
/// Non-convergence is reported through PoissonFit::converged.
PoissonFit poisson_regress(std::span<const double> counts, std::span<const double> t, std::span<const double> offset,
                           const PoissonOptions& options = {});

/// Inclusive calendar interval.
struct DateWindow {
    Date first;
    Date last;

    [[nodiscard]] std::int32_t length() const { return last - first + 1; }
};

/// Pre-lockdown and during-lockdown regression windows.
struct LockdownWindows {
    Date lockdown;
    DateWindow pre;
    DateWindow during;

    /// Throws DomainError unless pre.last <= during.first and both windows span >= 5 days.
    void validate() const;
};

inline constexpr std::int32_t kMinWindowDays = 5;

/// Windows around a spring lockdown.
///
/// pre = [first day with >= 10 cumulative cases, lockdown + 5];
/// during = [lockdown + 10, last day of the post-peak stretch where the weekly
/// mobility reduction stays >= 80% of its maximum]. `mobility` holds the summed
/// retail, transit-station and workplace percent changes. Requires >= 10
/// cumulative cases at least 7 days before the lockdown.
LockdownWindows build_windows_first_lockdown(const RegionRecord& record, Date lockdown, const DailySeries& mobility);

/// Windows around an autumn lockdown detected from the stringency index.
///
/// The lockdown is the first day with stringency > 50 following a day at or
/// below 50, searching from `analysis_start`. pre = the 21 days before it;
/// during = 21 days from lockdown + 10. Throws ExclusionError when stringency
/// never drops to 50 or never crosses it again.
LockdownWindows build_windows_second_lockdown(const RegionRecord& record, const DailySeries& stringency,
                                              Date analysis_start = Date(2020, 8, 1));

/// The fixed 3-week windows for a known second-lockdown date.
LockdownWindows second_lockdown_windows(Date lockdown);

/// First day stringency exceeds 50 after having been at or below 50.
Date detect_stringency_lockdown(const DailySeries& stringency, Date analysis_start);

/// Trailing 7-day mean of the present values among the last seven days.
DailySeries weekly_mobility(const DailySeries& mobility);

struct CausalEstimate {
    double lambda_pre = 0.0;
    double lambda_during = 0.0;
    double theta = 0.0; ///< lambda_pre - lambda_during
    double se_pre = 0.0;
    double se_during = 0.0;
    PoissonFit pre_fit;
    PoissonFit during_fit;
};

/// Growth rate in one window: Poisson regression of new cases with offset log f(T).
PoissonFit fit_window_growth(const RegionRecord& record, const DateWindow& window, const TestingModel& model);

/// Growth rates before and during a lockdown and their difference.
CausalEstimate estimate_growth_and_effect(const RegionRecord& record, const LockdownWindows& windows,
                                          const TestingModel& model);

} // namespace epitest
