#pragma once

namespace anomaly {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
double incomplete_beta(double x, double a, double b);

/// Student's t cumulative distribution function.
double t_cdf(double x, double df);

/// Upper tail P(T > x) for x >= 0, computed without cancellation.
double t_upper_tail(double x, double df);

/// Inverse CDF of Student's t. Throws MathError unless 0 < p < 1 and df > 0.
double t_quantile(double p, double df);

}  // namespace anomaly
