#include "epitest/errors.hpp"
#include "epitest/optimize.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace epitest;
using namespace epitest::optimize;

TEST_CASE("minimizes a shifted quadratic")
{
    const Objective f = [](std::span<const double> x) {
        return std::pow(x[0] - 3.0, 2) + 10.0 * std::pow(x[1] + 1.0, 2);
    };
    const BfgsResult r = minimize_bfgs(f, {0.0, 0.0});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.value < 1e-10);
}

TEST_CASE("minimizes the Rosenbrock function")
{
    const Objective f = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const BfgsResult r = minimize_bfgs(f, {-1.2, 1.0});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.iterations <= 200);
}

TEST_CASE("infeasible values shrink the step")
{
    const Objective f = [](std::span<const double> x) {
        if (x[0] <= 0.0)
            return std::numeric_limits<double>::infinity();
        return x[0] - std::log(x[0]);
    };
    const BfgsResult r = minimize_bfgs(f, {5.0});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS(minimize_bfgs(f, {-1.0}), DomainError);
}

TEST_CASE("never returns a point worse than the start")
{
    const Objective f = [](std::span<const double> x) { return std::cos(3.0 * x[0]) + 0.1 * x[0] * x[0]; };
    for (double x0 : {-3.0, -1.0, 0.2, 2.5}) {
        const BfgsResult r = minimize_bfgs(f, {x0});
        const std::vector<double> start = {x0};
        CHECK(r.value <= f(start));
    }
}

TEST_CASE("central differences")
{
    const Objective f = [](std::span<const double> x) { return x[0] * x[0] * x[1]; };
    const std::vector<double> x = {2.0, 3.0};
    const std::vector<double> g = numeric_gradient(f, x, 1e-4);
    CHECK(g[0] == doctest::Approx(12.0).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-8));
}
