#pragma once

#include "epitest/ingest.hpp"
#include "epitest/mortality.hpp"
#include "epitest/optimize.hpp"
#include "epitest/testing_models.hpp"
#include "epitest/timeseries.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epitest {

/// Smoothed daily deaths below this are left out of the error.
inline constexpr double kMinDeathsForError = 10.0;
inline constexpr std::size_t kDeathSmoothingWindow = 7;

/// Population variance of ln(observed) - ln(predicted) over days where the
/// (already smoothed) observed deaths reach kMinDeathsForError and a prediction
/// exists. Dates are matched between the two series. Missing with fewer than
/// two such days; DomainError when a prediction there is not positive.
std::optional<double> prediction_error(const DailySeries& observed, const DailySeries& predicted);

/// Mean over regions of error / (Var(ln D) + 1), the variance taken over the
/// region's days with observed deaths >= kMinDeathsForError. Throws DataError
/// when the map is empty.
double averaged_error(const std::map<std::string, double>& per_region,
                      const std::map<std::string, DailySeries>& observed);

/// A region reduced to the arrays the death-prediction error needs.
struct PreparedRegion {
    std::string name;
    /// First day of the case/test window.
    Date start;
    std::vector<double> cases;
    /// Tests per person per day; empty when the region has no test data.
    std::vector<std::optional<double>> test_rate;
    /// 7-day trailing mean of daily deaths on the same window.
    DailySeries observed_deaths;
    /// Indices into the window with smoothed deaths >= kMinDeathsForError.
    std::vector<std::size_t> qualifying;
    std::vector<double> log_observed;
    /// Population variance of log_observed.
    double log_variance = 0.0;
    std::optional<std::vector<double>> covariates;

    [[nodiscard]] bool has_tests() const { return !test_rate.empty(); }
    [[nodiscard]] std::size_t days() const { return cases.size(); }
};

/// Restricts the record to the days with reported cases (and tests, when the
/// record has any) and precomputes the observed log deaths.
PreparedRegion prepare_region(const RegionRecord& record);

struct PipelineOptions {
    RecoveryRate gamma{};
    OnsetToDeathPMF pmf = build_onset_to_death_pmf();
    /// Trailing mean applied to the predicted curve so it carries the same lag
    /// as the smoothed observations; 1 leaves it unsmoothed.
    std::size_t prediction_smoothing = kDeathSmoothingWindow;
};

/// Prevalence Y / f(T) on the region window. Days with f = 0 or missing input
/// are filled linearly between their neighbours; leading and trailing gaps
/// are dropped.
DailySeries region_prevalence(const PreparedRegion& region, const TestingModel& model);

/// Death curve (up to the ifr factor) predicted from the estimated prevalence,
/// smoothed as set in the options.
DailySeries predict_region_deaths(const PreparedRegion& region, const TestingModel& model,
                                  const PipelineOptions& options = {});

/// Death-prediction error of one region; missing with fewer than two
/// qualifying days.
std::optional<double> region_error(const PreparedRegion& region, const TestingModel& model,
                                   const PipelineOptions& options = {});

/// Averaged error over the regions for one model.
double region_set_error(std::span<const PreparedRegion> regions, const TestingModel& model,
                        const PipelineOptions& options = {});

struct FitOptions {
    optimize::BfgsOptions bfgs{};
    PipelineOptions pipeline{};
};

struct FitResult {
    /// Fitted model: alpha set, or beta set when covariates were used.
    TestingModel model;
    double objective = 0.0;
    double initial_objective = 0.0;
    optimize::BfgsResult optimizer;
};

/// Minimizes the averaged error over log alpha or, with `covariates`, over the
/// covariate-linear alpha coefficients. Throws DomainError for parameter-free
/// kinds and DataError when the objective is undefined at the start.
FitResult fit_model_params(std::span<const PreparedRegion> regions, TestingKind kind, double init_alpha,
                           bool covariates = false, const FitOptions& options = {});

/// Default starting alpha (tests/person/day) for a saturating kind.
double default_initial_alpha(TestingKind kind);

/// Regions sorted by name and shuffled with the seed, assigned round-robin to
/// `folds` folds. Returns the fold index of each input region.
std::vector<std::size_t> assign_folds(std::span<const PreparedRegion> regions, std::size_t folds,
                                      std::uint64_t seed);

struct ValidationReport {
    TestingKind kind = TestingKind::adapted;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    bool covariates = false;
    /// Held-out error of each region with enough qualifying days.
    std::map<std::string, double> per_region_error;
    /// Held-out error / (Var(ln D) + 1), the terms of averaged_error.
    std::map<std::string, double> per_region_normalized_error;
    double averaged_error = 0.0;
    /// Fitted alpha of every fold (saturating kinds without covariates).
    std::vector<double> per_fold_alpha;
    /// Fitted covariate coefficients of every fold.
    std::vector<std::vector<double>> per_fold_beta;
    std::optional<double> alpha_median;
    /// Order-statistic 95% interval; needs at least 6 folds.
    std::optional<std::pair<double, double>> alpha_ci;
};

/// k-fold cross-validation. Parameter-free kinds score every region directly.
ValidationReport cross_validate(std::span<const PreparedRegion> regions, TestingKind kind, std::size_t folds = 10,
                                std::uint64_t seed = 0, bool covariates = false, const FitOptions& options = {});

} // namespace epitest
