#include "epitest/validation.hpp"

#include "epitest/errors.hpp"
#include "epitest/random.hpp"
#include "epitest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epitest {

namespace {

double population_variance(std::span<const double> v)
{
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size());
}

bool qualifies(const std::optional<double>& observed)
{
    return observed && *observed >= kMinDeathsForError;
}

TestingModel resolve(const TestingModel& model, const PreparedRegion& region)
{
    if (model.beta.empty())
        return model;
    if (!region.covariates)
        throw DataError("region " + region.name + " lacks covariates");
    return model.with_covariates(*region.covariates);
}

// Error of one region against its fixed qualifying days; missing below two days.
std::optional<double> error_on_window(const PreparedRegion& region, const DailySeries& predicted)
{
    std::vector<double> residuals;
    residuals.reserve(region.qualifying.size());
    for (std::size_t k = 0; k < region.qualifying.size(); ++k) {
        const Date day = region.start + static_cast<std::int32_t>(region.qualifying[k]);
        const auto value = predicted.contains(day) ? predicted.at(day) : std::nullopt;
        if (!value)
            continue;
        if (!(*value > 0.0))
            throw DomainError("non-positive predicted deaths on " + day.to_string() + " in " + region.name);
        residuals.push_back(region.log_observed[k] - std::log(*value));
    }
    if (residuals.size() < 2)
        return std::nullopt;
    return population_variance(residuals);
}

double checked_average(double sum, std::size_t count)
{
    if (count == 0)
        throw DataError("no region has enough days with at least 10 smoothed deaths");
    return sum / static_cast<double>(count);
}

} // namespace

std::optional<double> prediction_error(const DailySeries& observed, const DailySeries& predicted)
{
    std::vector<double> residuals;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!qualifies(observed[i]))
            continue;
        const Date day = observed.start() + static_cast<std::int32_t>(i);
        const auto value = predicted.contains(day) ? predicted.at(day) : std::nullopt;
        if (!value)
            continue;
        if (!(*value > 0.0))
            throw DomainError("non-positive predicted deaths on " + day.to_string());
        residuals.push_back(std::log(*observed[i]) - std::log(*value));
    }
    if (residuals.size() < 2)
        return std::nullopt;
    return population_variance(residuals);
}

double averaged_error(const std::map<std::string, double>& per_region,
                      const std::map<std::string, DailySeries>& observed)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [name, error] : per_region) {
        const auto it = observed.find(name);
        if (it == observed.end())
            throw DataError("no observed deaths for region " + name);
        std::vector<double> logs;
        for (const auto& v : it->second.values())
            if (qualifies(v))
                logs.push_back(std::log(*v));
        const double variance = logs.empty() ? 0.0 : population_variance(logs);
        sum += error / (variance + 1.0);
        ++count;
    }
    return checked_average(sum, count);
}

PreparedRegion prepare_region(const RegionRecord& record)
{
    const auto first_case = record.new_cases.first_present();
    const auto last_case = record.new_cases.last_present();
    if (!first_case)
        throw DataError("region " + record.name + " has no case data");
    std::size_t lo = *first_case;
    std::size_t hi = *last_case;
    const bool tests = record.has_tests();
    DailySeries rate;
    if (tests) {
        rate = record.test_rate();
        const auto first_test = rate.first_present();
        const auto last_test = rate.last_present();
        if (!first_test)
            throw DataError("region " + record.name + " has no test data");
        lo = std::max(lo, *first_test);
        hi = std::min(hi, *last_test);
    }
    if (lo > hi)
        throw DataError("region " + record.name + " has no day with both cases and tests");

    PreparedRegion region;
    region.name = record.name;
    region.start = record.start() + static_cast<std::int32_t>(lo);
    const Date last = record.start() + static_cast<std::int32_t>(hi);
    for (std::size_t i = lo; i <= hi; ++i) {
        const auto y = record.new_cases[i];
        region.cases.push_back(y ? *y : std::numeric_limits<double>::quiet_NaN());
        if (tests)
            region.test_rate.push_back(rate[i]);
    }
    region.observed_deaths = rolling_mean(record.new_deaths, kDeathSmoothingWindow).slice(region.start, last);
    for (std::size_t i = 0; i < region.observed_deaths.size(); ++i) {
        if (!qualifies(region.observed_deaths[i]))
            continue;
        region.qualifying.push_back(i);
        region.log_observed.push_back(std::log(*region.observed_deaths[i]));
    }
    region.log_variance = region.log_observed.empty() ? 0.0 : population_variance(region.log_observed);
    region.covariates = record.covariate_vector();
    return region;
}

DailySeries region_prevalence(const PreparedRegion& region, const TestingModel& model)
{
    const TestingModel resolved = resolve(model, region);
    if (resolved.kind != TestingKind::adapted && !region.has_tests())
        throw DataError("region " + region.name + " has no test data for the " + std::string(to_string(resolved.kind)) + " model");
    const std::size_t n = region.days();
    std::vector<double> prevalence(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        const double y = region.cases[i];
        if (std::isnan(y))
            continue;
        double f = 0.0;
        if (resolved.kind == TestingKind::adapted) {
            f = eval_f(resolved, 0.0);
        } else {
            if (!region.test_rate[i])
                continue;
            f = eval_f(resolved, *region.test_rate[i]);
        }
        if (f > 0.0)
            prevalence[i] = y / f;
    }
    std::size_t lo = 0;
    while (lo < n && std::isnan(prevalence[lo]))
        ++lo;
    if (lo == n)
        return DailySeries::missing(region.start, 0);
    std::size_t hi = n - 1;
    while (std::isnan(prevalence[hi]))
        --hi;
    std::size_t prev = lo;
    for (std::size_t i = lo + 1; i <= hi; ++i) {
        if (std::isnan(prevalence[i]))
            continue;
        for (std::size_t j = prev + 1; j < i; ++j) {
            const double w = static_cast<double>(j - prev) / static_cast<double>(i - prev);
            prevalence[j] = (1.0 - w) * prevalence[prev] + w * prevalence[i];
        }
        prev = i;
    }
    return DailySeries::from_values(region.start + static_cast<std::int32_t>(lo),
                                    std::span<const double>(prevalence).subspan(lo, hi - lo + 1));
}

DailySeries predict_region_deaths(const PreparedRegion& region, const TestingModel& model,
                                  const PipelineOptions& options)
{
    const DailySeries prevalence = region_prevalence(region, model);
    if (prevalence.empty())
        return prevalence;
    const DailySeries incidence = incidence_from_prevalence(prevalence, options.gamma).incidence;
    const DailySeries deaths = predict_death_curve(incidence, options.pmf);
    return options.prediction_smoothing > 1 ? rolling_mean(deaths, options.prediction_smoothing) : deaths;
}

std::optional<double> region_error(const PreparedRegion& region, const TestingModel& model,
                                   const PipelineOptions& options)
{
    return error_on_window(region, predict_region_deaths(region, model, options));
}

double region_set_error(std::span<const PreparedRegion> regions, const TestingModel& model,
                        const PipelineOptions& options)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& region : regions) {
        if (const auto error = region_error(region, model, options)) {
            sum += *error / (region.log_variance + 1.0);
            ++count;
        }
    }
    return checked_average(sum, count);
}

double default_initial_alpha(TestingKind kind)
{
    switch (kind) {
    case TestingKind::up_saturating:
        return 1e-3;
    case TestingKind::down_saturating:
        return 1e-4;
    default:
        throw DomainError(std::string("the ") + std::string(to_string(kind)) + " model has no parameter to fit");
    }
}

FitResult fit_model_params(std::span<const PreparedRegion> regions, TestingKind kind, double init_alpha,
                           bool covariates, const FitOptions& options)
{
    if (!is_saturating(kind))
        throw DomainError(std::string("the ") + std::string(to_string(kind)) + " model has no parameter to fit");
    if (!(init_alpha > 0.0) || !std::isfinite(init_alpha))
        throw DomainError("initial alpha must be positive");
    if (regions.empty())
        throw DataError("no regions to fit");

    if (!covariates) {
        const auto model_at = [&](double log_alpha) { return TestingModel::make(kind, std::exp(log_alpha)); };
        const auto objective = [&](std::span<const double> x) {
            try {
                return region_set_error(regions, model_at(x[0]), options.pipeline);
            } catch (const DomainError&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        FitResult fit;
        fit.initial_objective = region_set_error(regions, model_at(std::log(init_alpha)), options.pipeline);
        fit.optimizer = optimize::minimize_bfgs(objective, {std::log(init_alpha)}, options.bfgs);
        fit.model = model_at(fit.optimizer.x[0]);
        fit.objective = fit.optimizer.value;
        return fit;
    }

    // alpha = init * (g0 + sum g_i z_i) with standardized covariates z.
    const std::size_t p = kCovariateNames.size();
    std::vector<double> mean(p, 0.0), scale(p, 0.0);
    for (const auto& r : regions) {
        if (!r.covariates)
            throw DataError("region " + r.name + " lacks covariates");
        for (std::size_t i = 0; i < p; ++i)
            mean[i] += (*r.covariates)[i];
    }
    const auto n = static_cast<double>(regions.size());
    for (double& m : mean)
        m /= n;
    for (const auto& r : regions)
        for (std::size_t i = 0; i < p; ++i)
            scale[i] += std::pow((*r.covariates)[i] - mean[i], 2);
    for (double& s : scale)
        s = s > 0.0 ? std::sqrt(s / n) : 1.0;

    const auto beta_of = [&](std::span<const double> g) {
        std::vector<double> beta(p + 1);
        beta[0] = init_alpha * g[0];
        for (std::size_t i = 0; i < p; ++i) {
            beta[i + 1] = init_alpha * g[i + 1] / scale[i];
            beta[0] -= beta[i + 1] * mean[i];
        }
        return beta;
    };
    const auto model_at = [&](std::span<const double> g) {
        TestingModel m{kind, 1.0, std::nullopt, beta_of(g)};
        return m;
    };
    const auto objective = [&](std::span<const double> g) {
        try {
            return region_set_error(regions, model_at(g), options.pipeline);
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    std::vector<double> g0(p + 1, 0.0);
    g0[0] = 1.0;
    FitResult fit;
    fit.initial_objective = region_set_error(regions, model_at(g0), options.pipeline);
    fit.optimizer = optimize::minimize_bfgs(objective, g0, options.bfgs);
    fit.model = model_at(fit.optimizer.x);
    fit.objective = fit.optimizer.value;
    return fit;
}

std::vector<std::size_t> assign_folds(std::span<const PreparedRegion> regions, std::size_t folds,
                                      std::uint64_t seed)
{
    if (folds == 0)
        throw ConfigError("fold count must be positive");
    std::vector<std::size_t> order(regions.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return regions[a].name < regions[b].name; });
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<std::size_t> fold(regions.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        fold[order[k]] = k % folds;
    return fold;
}

ValidationReport cross_validate(std::span<const PreparedRegion> regions, TestingKind kind, std::size_t folds,
                                std::uint64_t seed, bool covariates, const FitOptions& options)
{
    ValidationReport report;
    report.kind = kind;
    report.seed = seed;
    report.covariates = covariates && is_saturating(kind);
    if (regions.empty())
        throw DataError("no regions to validate");

    const auto record = [&](const PreparedRegion& region, const TestingModel& model) {
        if (const auto error = region_error(region, model, options.pipeline)) {
            report.per_region_error[region.name] = *error;
            report.per_region_normalized_error[region.name] = *error / (region.log_variance + 1.0);
        }
    };

    if (!is_saturating(kind)) {
        const TestingModel model = TestingModel::make(kind, std::nullopt);
        for (const auto& region : regions)
            record(region, model);
    } else {
        if (folds < 2)
            throw ConfigError("cross-validation needs at least 2 folds");
        if (regions.size() < folds)
            throw DataError("cross-validation needs at least as many regions as folds");
        report.folds = folds;
        const std::vector<std::size_t> fold = assign_folds(regions, folds, seed);
        const double init = default_initial_alpha(kind);
        for (std::size_t k = 0; k < folds; ++k) {
            std::vector<PreparedRegion> train;
            for (std::size_t i = 0; i < regions.size(); ++i)
                if (fold[i] != k)
                    train.push_back(regions[i]);
            const FitResult fit = fit_model_params(train, kind, init, report.covariates, options);
            if (report.covariates)
                report.per_fold_beta.push_back(fit.model.beta);
            else
                report.per_fold_alpha.push_back(*fit.model.alpha);
            for (std::size_t i = 0; i < regions.size(); ++i) {
                if (fold[i] != k)
                    continue;
                try {
                    record(regions[i], fit.model);
                } catch (const DomainError&) {
                    // Covariates can push a held-out alpha out of range; the region is not scored.
                }
            }
        }
        if (!report.per_fold_alpha.empty()) {
            report.alpha_median = stats::median(report.per_fold_alpha);
            if (report.per_fold_alpha.size() >= 6) {
                const auto ci = stats::median_ci(report.per_fold_alpha);
                report.alpha_ci = std::make_pair(ci.lower, ci.upper);
            }
        }
    }
    double sum = 0.0;
    for (const auto& [name, value] : report.per_region_normalized_error)
        sum += value;
    report.averaged_error = checked_average(sum, report.per_region_normalized_error.size());
    return report;
}

} // namespace epitest
