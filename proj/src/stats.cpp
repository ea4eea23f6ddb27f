#include "epitest/stats.hpp"

#include "epitest/errors.hpp"
#include "epitest/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace epitest::stats {

std::string_view to_string(TestMethod method)
{
    switch (method) {
    case TestMethod::exact:
        return "exact";
    case TestMethod::normal_approx:
        return "normal_approx";
    case TestMethod::chi_square_approx:
        return "chi_square_approx";
    }
    return "unknown";
}

std::string_view to_string(Alternative alternative)
{
    switch (alternative) {
    case Alternative::two_sided:
        return "two_sided";
    case Alternative::less:
        return "less";
    case Alternative::greater:
        return "greater";
    }
    return "unknown";
}

std::vector<double> average_ranks(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
            ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double median(std::span<const double> values)
{
    if (values.empty())
        throw DomainError("median of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace {

double clamp_probability(double p)
{
    return std::clamp(p, 0.0, 1.0);
}

// Sum of tie sizes t^3 - t over groups of equal values.
double tie_term(std::span<const double> values)
{
    std::map<double, std::size_t> counts;
    for (double v : values)
        ++counts[v];
    double sum = 0.0;
    for (const auto& [value, t] : counts) {
        const double td = static_cast<double>(t);
        sum += td * td * td - td;
    }
    return sum;
}

// Exact null distribution of W+ given the (possibly tied) ranks. Ranks are
// doubled so half-integer averages become integers.
TestResult exact_signed_rank(std::span<const double> ranks, double w_plus, Alternative alternative)
{
    std::vector<long> doubled(ranks.size());
    long total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        doubled[i] = std::lround(2.0 * ranks[i]);
        total += doubled[i];
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (long r : doubled) {
        for (long s = reach; s >= 0; --s)
            if (counts[static_cast<std::size_t>(s)] != 0.0)
                counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
        reach += r;
    }
    const double outcomes = std::ldexp(1.0, static_cast<int>(ranks.size()));
    const long observed = std::lround(2.0 * w_plus);
    double lower = 0.0;
    double upper = 0.0;
    for (long s = 0; s <= total; ++s) {
        const double c = counts[static_cast<std::size_t>(s)];
        if (s <= observed)
            lower += c;
        if (s >= observed)
            upper += c;
    }
    lower /= outcomes;
    upper /= outcomes;

    TestResult result;
    result.statistic = w_plus;
    result.n_effective = ranks.size();
    result.method = TestMethod::exact;
    switch (alternative) {
    case Alternative::two_sided:
        result.p_value = clamp_probability(2.0 * std::min(lower, upper));
        break;
    case Alternative::less:
        result.p_value = clamp_probability(lower);
        break;
    case Alternative::greater:
        result.p_value = clamp_probability(upper);
        break;
    }
    return result;
}

TestResult normal_signed_rank(std::span<const double> abs_diffs, double w_plus, Alternative alternative)
{
    const double n = static_cast<double>(abs_diffs.size());
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(abs_diffs) / 48.0;
    TestResult result;
    result.statistic = w_plus;
    result.n_effective = abs_diffs.size();
    result.method = TestMethod::normal_approx;
    if (!(var > 0.0)) {
        result.p_value = 1.0;
        result.degenerate = true;
        return result;
    }
    const double sd = std::sqrt(var);
    const double diff = w_plus - mean;
    switch (alternative) {
    case Alternative::two_sided: {
        const double z = std::max(std::fabs(diff) - 0.5, 0.0) / sd;
        result.p_value = clamp_probability(2.0 * special::normal_cdf(-z));
        break;
    }
    case Alternative::less:
        result.p_value = clamp_probability(special::normal_cdf((diff + 0.5) / sd));
        break;
    case Alternative::greater:
        result.p_value = clamp_probability(special::normal_cdf(-(diff - 0.5) / sd));
        break;
    }
    return result;
}

} // namespace

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, Alternative alternative,
                                MethodChoice method)
{
    if (x.size() != y.size())
        throw DomainError("wilcoxon_signed_rank needs paired samples of equal length");
    if (x.size() < 2)
        throw DomainError("wilcoxon_signed_rank needs at least two pairs");

    std::vector<double> abs_diffs;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (!std::isfinite(d))
            throw DomainError("wilcoxon_signed_rank got a non-finite difference");
        if (d == 0.0)
            continue;
        abs_diffs.push_back(std::fabs(d));
        positive.push_back(d > 0.0);
    }
    if (abs_diffs.empty())
        throw DomainError("wilcoxon_signed_rank: all differences are zero");

    const std::vector<double> ranks = average_ranks(abs_diffs);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (positive[i])
            w_plus += ranks[i];

    const bool exact = method == MethodChoice::exact ||
                       (method == MethodChoice::automatic && ranks.size() <= kExactWilcoxonLimit);
    return exact ? exact_signed_rank(ranks, w_plus, alternative) : normal_signed_rank(abs_diffs, w_plus, alternative);
}

TestResult wilcoxon_signed_rank(std::span<const double> x, Alternative alternative, MethodChoice method)
{
    const std::vector<double> zeros(x.size(), 0.0);
    return wilcoxon_signed_rank(x, zeros, alternative, method);
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups)
{
    if (groups.size() < 2)
        throw DomainError("kruskal_wallis needs at least two groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty())
            throw DomainError("kruskal_wallis groups must be non-empty");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const double n = static_cast<double>(pooled.size());
    const std::vector<double> ranks = average_ranks(pooled);

    TestResult result;
    result.n_effective = pooled.size();
    result.method = TestMethod::chi_square_approx;

    const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);
    if (!(correction > 0.0)) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.degenerate = true;
        return result;
    }

    double sum_term = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            rank_sum += ranks[offset + i];
        offset += g.size();
        sum_term += rank_sum * rank_sum / static_cast<double>(g.size());
    }
    const double h = (12.0 / (n * (n + 1.0)) * sum_term - 3.0 * (n + 1.0)) / correction;
    result.statistic = std::max(h, 0.0);
    result.p_value = clamp_probability(special::chi_square_sf(result.statistic, static_cast<double>(groups.size() - 1)));
    return result;
}

MedianInterval median_ci(std::span<const double> values, double confidence)
{
    if (!(confidence > 0.0 && confidence < 1.0))
        throw DomainError("confidence must lie in (0, 1)");
    const std::size_t n = values.size();
    if (n == 0)
        throw DomainError("median_ci of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    // pmf of Binomial(n, 1/2) in log space to stay finite for large n.
    std::vector<double> pmf(n + 1);
    const double log_half_n = static_cast<double>(n) * std::log(0.5);
    for (std::size_t j = 0; j <= n; ++j)
        pmf[j] = std::exp(std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
                          std::lgamma(static_cast<double>(n - j) + 1.0) + log_half_n);

    // Coverage of (x_(k), x_(n-k+1)) is P(k <= B <= n - k).
    auto coverage = [&](std::size_t k) {
        double c = 0.0;
        for (std::size_t j = k; j + k <= n; ++j)
            c += pmf[j];
        return c;
    };

    std::size_t best = 0;
    for (std::size_t k = 1; 2 * k <= n + 1; ++k) {
        if (coverage(k) >= confidence)
            best = k;
        else
            break;
    }
    if (best == 0)
        throw DomainError("too few values (" + std::to_string(n) + ") for the requested confidence");

    return MedianInterval{median(sorted), sorted[best - 1], sorted[n - best], coverage(best)};
}

} // namespace epitest::stats
