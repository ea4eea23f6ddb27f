#pragma once

namespace epitest::special {

/// Regularized lower incomplete gamma P(a, x), relative error <= 1e-10.
///
/// Series expansion for x < a + 1, Lentz continued fraction for Q otherwise.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// CDF of Gamma(shape, scale) at x.
double gamma_cdf(double x, double shape, double scale);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

/// Standard normal CDF.
double normal_cdf(double z);

} // namespace epitest::special
