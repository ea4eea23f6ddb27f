#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace epitest::optimize {

struct BfgsOptions {
    double gradient_tolerance = 1e-6;
    std::size_t max_iterations = 200;
    /// Central-difference step.
    double fd_step = 1e-4;
};

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Central finite-difference gradient.
std::vector<double> numeric_gradient(const Objective& f, std::span<const double> x, double step,
                                     std::size_t* evaluations = nullptr);

/// Quasi-Newton minimization with BFGS inverse-Hessian updates, finite-difference
/// gradients and a backtracking Armijo line search. Non-finite objective values
/// are treated as infeasible and shrink the step. Returns the best point seen.
BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {});

} // namespace epitest::optimize
