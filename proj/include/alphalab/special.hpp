#pragma once

namespace alphalab {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Chi-square distribution function with dof degrees of freedom.
double chi_square_cdf(double x, double dof);

double normal_cdf(double z);

// Inverse standard normal CDF (Acklam's rational approximation, refined
// by one Halley step); p in (0, 1).
double normal_quantile(double p);

} // namespace alphalab
