#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace epitest::stats {

enum class Alternative { two_sided, less, greater };

enum class TestMethod {
    exact,
    normal_approx,
    chi_square_approx,
};

/// Method selection for the signed-rank test; `automatic` is exact up to 25 pairs.
enum class MethodChoice { automatic, exact, normal_approx };

inline constexpr std::size_t kExactWilcoxonLimit = 25;

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_effective = 0;
    TestMethod method = TestMethod::exact;
    /// Set when the statistic is undefined and p = 1 is a convention.
    bool degenerate = false;
};

std::string_view to_string(TestMethod method);
std::string_view to_string(Alternative alternative);

/// Paired Wilcoxon signed-rank test on d = x - y; the statistic is W+.
///
/// Zero differences are dropped, ties receive average ranks. For up to 25
/// non-zero pairs the exact conditional null distribution is enumerated,
/// beyond that the tie-corrected normal approximation with continuity
/// correction is used. "greater" tests x > y.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                Alternative alternative = Alternative::two_sided,
                                MethodChoice method = MethodChoice::automatic);

/// One-sample version: tests the median of `x` against zero.
TestResult wilcoxon_signed_rank(std::span<const double> x, Alternative alternative = Alternative::two_sided,
                                MethodChoice method = MethodChoice::automatic);

/// Kruskal-Wallis H with tie correction, chi-square(groups - 1) tail.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct MedianInterval {
    double median;
    double lower;
    double upper;
    /// Binomial coverage actually achieved by the order statistics.
    double coverage;
};

/// Sample median with the exact order-statistic confidence interval.
MedianInterval median_ci(std::span<const double> values, double confidence = 0.95);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

double median(std::span<const double> values);

} // namespace epitest::stats
