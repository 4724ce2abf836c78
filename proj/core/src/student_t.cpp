#include "anomaly/student_t.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "anomaly/errors.hpp"

namespace anomaly {

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw MathError(fmt::format("incomplete beta failed to converge (x={}, a={}, b={})", x, a, b));
}

// I_x(a, b) with y = 1 - x supplied separately so neither loses precision.
double beta_regularized(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log(y));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

double t_density(double x, double df) {
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw MathError(fmt::format("incomplete beta domain error (x={}, a={}, b={})", x, a, b));
  }
  return beta_regularized(x, 1.0 - x, a, b);
}

double t_upper_tail(double x, double df) {
  if (!(df > 0.0)) throw MathError(fmt::format("t distribution needs df > 0, got {}", df));
  if (x < 0.0) return 1.0 - t_upper_tail(-x, df);
  const double x2 = x * x;
  if (!std::isfinite(x2)) return 0.0;
  const double z = df / (df + x2);
  const double w = x2 / (df + x2);
  return 0.5 * beta_regularized(z, w, 0.5 * df, 0.5);
}

double t_cdf(double x, double df) {
  if (x >= 0.0) return 1.0 - t_upper_tail(x, df);
  return t_upper_tail(-x, df);
}

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw MathError(fmt::format("t quantile needs 0 < p < 1, got {}", p));
  }
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw MathError(fmt::format("t quantile needs df > 0, got {}", df));
  }
  if (p == 0.5) return 0.0;

  // Solve P(T > x) = q for x >= 0 and restore the sign.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;

  double lo = 0.0;
  double hi = 1.0;
  while (t_upper_tail(hi, df) > q) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw MathError("t quantile bracket overflow");
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double f = t_upper_tail(x, df) - q;
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    // Newton on the tail: d/dx P(T > x) = -density(x).
    const double dens = t_density(x, df);
    double next = dens > 0.0 ? x + f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= 1e-15 * std::max(1.0, x) || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
      break;
    }
  }
  return upper ? x : -x;
}

}  // namespace anomaly
