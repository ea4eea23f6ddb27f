#include "epitest/regression.hpp"

#include "epitest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epitest {

namespace {

double poisson_log_likelihood(std::span<const double> y, std::span<const double> eta)
{
    double ll = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        ll += y[i] * eta[i] - std::exp(eta[i]) - std::lgamma(y[i] + 1.0);
    return ll;
}

} // namespace

PoissonFit poisson_regress(std::span<const double> counts, std::span<const double> t, std::span<const double> offset,
                           const PoissonOptions& options)
{
    const std::size_t n = counts.size();
    if (t.size() != n || offset.size() != n)
        throw DomainError("poisson_regress: counts, t and offset must have equal length");
    if (n < 3)
        throw DomainError("poisson_regress needs at least 3 points");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(counts[i] >= 0.0) || !std::isfinite(counts[i]))
            throw DomainError("poisson_regress: counts must be finite and non-negative");
        if (!std::isfinite(offset[i]) || !std::isfinite(t[i]))
            throw DomainError("poisson_regress: t and offset must be finite");
        y[i] = std::round(counts[i]);
    }
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }))
        throw DomainError("poisson_regress: all counts are zero");
    if (std::all_of(t.begin(), t.end(), [&](double v) { return v == t[0]; }))
        throw DomainError("poisson_regress: design is collinear (all t equal)");

    const double mean_count = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const double mean_offset = std::accumulate(offset.begin(), offset.end(), 0.0) / static_cast<double>(n);
    double a = std::log(mean_count + 1.0) - mean_offset;
    double b = 0.0;

    std::vector<double> eta(n);
    const auto update_eta = [&](double ca, double cb) {
        for (std::size_t i = 0; i < n; ++i)
            eta[i] = ca + cb * t[i] + offset[i];
    };
    update_eta(a, b);
    double ll = poisson_log_likelihood(y, eta);

    PoissonFit fit;
    double info_aa = 0.0, info_ab = 0.0, info_bb = 0.0;
    double score_a = 0.0, score_b = 0.0;
    const auto information = [&]() {
        info_aa = info_ab = info_bb = score_a = score_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = std::exp(eta[i]);
            info_aa += mu;
            info_ab += mu * t[i];
            info_bb += mu * t[i] * t[i];
            score_a += y[i] - mu;
            score_b += (y[i] - mu) * t[i];
        }
    };

    for (fit.iterations = 1; fit.iterations <= options.max_iterations; ++fit.iterations) {
        information();
        const double det = info_aa * info_bb - info_ab * info_ab;
        if (!(det > 0.0) || !std::isfinite(det))
            break;
        // Newton step on the concave log-likelihood, equivalent to one IRLS pass.
        const double da = (info_bb * score_a - info_ab * score_b) / det;
        const double db = (info_aa * score_b - info_ab * score_a) / det;

        double step = 1.0;
        double new_ll = -std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < 50; ++halving) {
            update_eta(a + step * da, b + step * db);
            new_ll = poisson_log_likelihood(y, eta);
            if (std::isfinite(new_ll) && new_ll >= ll - 1e-12 * std::fabs(ll))
                break;
            step *= 0.5;
        }
        if (!std::isfinite(new_ll)) {
            update_eta(a, b);
            break;
        }
        a += step * da;
        b += step * db;
        const double change = std::fabs(new_ll - ll) / (std::fabs(ll) + 1.0);
        ll = new_ll;
        if (change < options.relative_tolerance) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = std::min(fit.iterations, options.max_iterations);

    update_eta(a, b);
    information();
    const double det = info_aa * info_bb - info_ab * info_ab;
    fit.intercept = a;
    fit.slope = b;
    fit.log_likelihood = poisson_log_likelihood(y, eta);
    fit.gradient_norm = std::hypot(score_a, score_b);
    if (det > 0.0) {
        fit.se_intercept = std::sqrt(info_bb / det);
        fit.se_slope = std::sqrt(info_aa / det);
    } else {
        fit.se_intercept = fit.se_slope = std::numeric_limits<double>::infinity();
        fit.converged = false;
    }
    // Score is in count units; accept relative to the total count.
    const double total = mean_count * static_cast<double>(n);
    if (fit.converged && fit.gradient_norm > 1e-4 * (total + 1.0) * (1.0 + std::fabs(t.back())))
        fit.converged = false;
    return fit;
}

void LockdownWindows::validate() const
{
    if (pre.length() < kMinWindowDays)
        throw DomainError("pre-lockdown window shorter than 5 days");
    if (during.length() < kMinWindowDays)
        throw DomainError("during-lockdown window shorter than 5 days");
    if (pre.last > during.first)
        throw DomainError("pre-lockdown window must end before the during window starts");
}

DailySeries weekly_mobility(const DailySeries& mobility)
{
    std::vector<std::optional<double>> out(mobility.size());
    for (std::size_t i = 0; i < mobility.size(); ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = i + 1 >= 7 ? i + 1 - 7 : 0; j <= i; ++j) {
            if (mobility[j]) {
                sum += *mobility[j];
                ++count;
            }
        }
        if (count > 0 && mobility[i])
            out[i] = sum / static_cast<double>(count);
    }
    return DailySeries::signed_values(mobility.start(), std::move(out));
}

LockdownWindows build_windows_first_lockdown(const RegionRecord& record, Date lockdown, const DailySeries& mobility)
{
    std::optional<Date> first_ten;
    for (std::size_t i = 0; i < record.total_cases.size(); ++i) {
        if (record.total_cases[i] && *record.total_cases[i] >= 10.0) {
            first_ten = record.total_cases.start() + static_cast<std::int32_t>(i);
            break;
        }
    }
    if (!first_ten || *first_ten > lockdown - 7)
        throw ExclusionError(record.name + ": fewer than 10 cumulative cases 7 days before the lockdown");

    LockdownWindows windows;
    windows.lockdown = lockdown;
    windows.pre = {*first_ten, lockdown + 5};
    if (windows.pre.length() < kMinWindowDays)
        throw ExclusionError(record.name + ": pre-lockdown window shorter than 5 days");

    const DailySeries weekly = weekly_mobility(mobility);
    const DailySeries after = weekly.slice(lockdown, weekly.empty() ? lockdown : weekly.end());
    std::optional<std::size_t> peak;
    for (std::size_t i = 0; i < after.size(); ++i)
        if (after[i] && (!peak || *after[i] < *after[*peak]))
            peak = i;
    if (!peak || !(*after[*peak] < 0.0))
        throw ExclusionError(record.name + ": mobility never shows a reduction after the lockdown");
    const double threshold = 0.8 * *after[*peak];

    std::size_t last = *peak;
    for (std::size_t i = *peak + 1; i < after.size(); ++i) {
        if (!after[i])
            continue;
        if (*after[i] > threshold)
            break;
        last = i;
    }
    windows.during = {lockdown + 10, std::min(after.start() + static_cast<std::int32_t>(last), record.end())};
    if (windows.during.length() < kMinWindowDays)
        throw ExclusionError(record.name + ": mobility reduction too short for a during-lockdown window");
    windows.validate();
    return windows;
}

LockdownWindows second_lockdown_windows(Date lockdown)
{
    LockdownWindows windows;
    windows.lockdown = lockdown;
    windows.pre = {lockdown - 21, lockdown - 1};
    windows.during = {lockdown + 10, lockdown + 30};
    windows.validate();
    return windows;
}

Date detect_stringency_lockdown(const DailySeries& stringency, Date analysis_start)
{
    bool below = false;
    for (std::size_t i = 0; i < stringency.size(); ++i) {
        const Date d = stringency.start() + static_cast<std::int32_t>(i);
        if (d < analysis_start || !stringency[i])
            continue;
        if (*stringency[i] <= 50.0)
            below = true;
        else if (below)
            return d;
    }
    if (!below)
        throw ExclusionError("stringency never drops to 50 or below in the analysis period");
    throw ExclusionError("stringency never rises above 50 again in the analysis period");
}

LockdownWindows build_windows_second_lockdown(const RegionRecord& record, const DailySeries& stringency,
                                              Date analysis_start)
{
    try {
        return second_lockdown_windows(detect_stringency_lockdown(stringency, analysis_start));
    } catch (const ExclusionError& e) {
        throw ExclusionError(record.name + ": " + e.what());
    }
}

PoissonFit fit_window_growth(const RegionRecord& record, const DateWindow& window, const TestingModel& model)
{
    if (window.length() < 1)
        throw DomainError(record.name + ": empty regression window");
    const bool needs_tests = model.kind != TestingKind::adapted;
    const DailySeries rate = record.test_rate();
    std::vector<double> counts, t, offset;
    for (Date d = window.first; d <= window.last; d = d + 1) {
        const auto y = record.new_cases.at(d);
        if (!y)
            continue;
        double f = eval_f(model, 0.0);
        if (needs_tests) {
            const auto rate_d = rate.at(d);
            if (!rate_d)
                continue;
            f = eval_f(model, *rate_d);
        }
        if (!(f > 0.0))
            continue;
        counts.push_back(*y);
        t.push_back(static_cast<double>(d - window.first));
        offset.push_back(std::log(f));
    }
    if (counts.size() < 3)
        throw ExclusionError(record.name + ": fewer than 3 usable days in window " + window.first.to_string() + " to " +
                             window.last.to_string());
    return poisson_regress(counts, t, offset);
}

CausalEstimate estimate_growth_and_effect(const RegionRecord& record, const LockdownWindows& windows,
                                          const TestingModel& model)
{
    windows.validate();
    CausalEstimate est;
    est.pre_fit = fit_window_growth(record, windows.pre, model);
    est.during_fit = fit_window_growth(record, windows.during, model);
    est.lambda_pre = est.pre_fit.slope;
    est.lambda_during = est.during_fit.slope;
    est.theta = est.lambda_pre - est.lambda_during;
    est.se_pre = est.pre_fit.se_slope;
    est.se_during = est.during_fit.se_slope;
    return est;
}

} // namespace epitest
