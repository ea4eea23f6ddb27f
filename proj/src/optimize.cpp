#include "epitest/optimize.hpp"

#include "epitest/errors.hpp"

#include <cmath>
#include <limits>

namespace epitest::optimize {

namespace {

double norm(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

} // namespace

std::vector<double> numeric_gradient(const Objective& f, std::span<const double> x, double step,
                                     std::size_t* evaluations)
{
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
        if (evaluations)
            *evaluations += 2;
    }
    return grad;
}

BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options)
{
    const std::size_t n = x0.size();
    BfgsResult result;
    result.x = x0;
    result.value = f(x0);
    result.evaluations = 1;
    if (!std::isfinite(result.value))
        throw DomainError("objective is undefined at the initial point");

    std::vector<double> x = x0;
    double fx = result.value;
    std::vector<double> g = numeric_gradient(f, x, options.fd_step, &result.evaluations);
    // Row-major inverse Hessian approximation, starts at identity.
    std::vector<double> h(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        h[i * n + i] = 1.0;

    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 40;

    for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
        result.gradient_norm = norm(g);
        if (result.gradient_norm < options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        std::vector<double> direction(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                direction[i] -= h[i * n + j] * g[j];
        double slope = dot(direction, g);
        if (!(slope < 0.0)) {
            // Lost descent; reset to steepest descent.
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j)
                    h[i * n + j] = i == j ? 1.0 : 0.0;
                direction[i] = -g[i];
            }
            slope = dot(direction, g);
        }

        double step = 1.0;
        std::vector<double> candidate(n);
        double f_candidate = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < kMaxHalvings; ++k) {
            for (std::size_t i = 0; i < n; ++i)
                candidate[i] = x[i] + step * direction[i];
            f_candidate = f(candidate);
            ++result.evaluations;
            if (std::isfinite(f_candidate) && f_candidate <= fx + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            break;

        std::vector<double> g_new = numeric_gradient(f, candidate, options.fd_step, &result.evaluations);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = candidate[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * norm(s) * norm(y)) {
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rho = 1.0 / sy;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    hy[i] += h[i * n + j] * y[j];
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }

        x = candidate;
        fx = f_candidate;
        g = std::move(g_new);
        if (fx < result.value) {
            result.value = fx;
            result.x = x;
        }
    }
    result.gradient_norm = norm(g);
    if (result.gradient_norm < options.gradient_tolerance)
        result.converged = true;
    return result;
}

} // namespace epitest::optimize
