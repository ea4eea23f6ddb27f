#include "epitest/errors.hpp"
#include "epitest/random.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace epitest;

TEST_CASE("SplitMix64 reference output")
{
    Rng rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next() == b.next());
}

TEST_CASE("uniform and bounded draws stay in range")
{
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.below(7) < 7);
    }
}

TEST_CASE("Poisson draws have the right mean and variance")
{
    for (double mean : {0.3, 4.0, 29.5, 30.0, 250.0, 1e5}) {
        Rng rng(static_cast<std::uint64_t>(mean * 10));
        const int n = 100000;
        double s = 0.0, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<double>(rng.poisson(mean));
            CHECK(k >= 0.0);
            s += k;
            ss += k * k;
        }
        const double m = s / n;
        const double v = ss / n - m * m;
        // 5 standard errors of the sample mean and variance
        CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
        CHECK(std::abs(v - mean) < 5.0 * mean * std::sqrt((2.0 + 1.0 / mean) / n));
    }
}

TEST_CASE("Poisson frequencies match the probabilities in the rejection branch")
{
    const double mean = 45.0;
    const int n = 200000;
    std::vector<int> counts(200, 0);
    Rng rng(77);
    for (int i = 0; i < n; ++i) {
        const auto k = rng.poisson(mean);
        if (k < 200)
            ++counts[static_cast<std::size_t>(k)];
    }
    double chi2 = 0.0;
    int cells = 0;
    for (int k = 20; k <= 75; ++k) {
        const double p = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
        const double e = p * n;
        chi2 += std::pow(counts[static_cast<std::size_t>(k)] - e, 2) / e;
        ++cells;
    }
    // 56 cells: the 0.999 quantile of chi-square(56) is about 95
    CHECK(chi2 < 95.0);
    CHECK(cells == 56);
}

TEST_CASE("Poisson argument checks")
{
    Rng rng(3);
    CHECK(rng.poisson(0.0) == 0);
    CHECK_THROWS_AS(rng.poisson(-1.0), DomainError);
    CHECK_THROWS_AS(rng.poisson(std::nan("")), DomainError);
}
