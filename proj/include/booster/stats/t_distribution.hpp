#ifndef BOOSTER_STATS_T_DISTRIBUTION_HPP
#define BOOSTER_STATS_T_DISTRIBUTION_HPP

#include <booster/error.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace booster::stats {

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return h;
    }
  }
  throw StatsError("incomplete beta continued fraction did not converge");
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw StatsError("incomplete_beta: a and b must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw StatsError("incomplete_beta: x outside [0, 1]");
  }
  if (x == 0.0 || x == 1.0) {
    return x;
  }
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T > t) for Student's t with df degrees of freedom.
inline double t_upper_tail(double t, double df) {
  if (!(df > 0.0)) {
    throw StatsError("t distribution: df must be positive");
  }
  if (std::isnan(t)) {
    throw StatsError("t distribution: t is NaN");
  }
  if (std::isinf(t)) {
    return t > 0.0 ? 0.0 : 1.0;
  }
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

inline double t_cdf(double t, double df) {
  if (!(df > 0.0)) {
    throw StatsError("t distribution: df must be positive");
  }
  if (t < 0.0) {
    return t_upper_tail(-t, df);
  }
  return 1.0 - t_upper_tail(t, df);
}

inline double t_pdf(double t, double df) {
  const double log_c =
      std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_c - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

/// Inverse CDF. Brackets the root, bisects, then polishes with Newton steps
/// that are only kept when they improve the residual.
inline double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw StatsError("t_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  if (!(df > 0.0)) {
    throw StatsError("t_quantile: df must be positive");
  }
  if (p == 0.5) {
    return 0.0;
  }
  if (p < 0.5) {
    return -t_quantile(1.0 - p, df);
  }
  // Upper tail target; working in the tail keeps precision for p near 1.
  const double tail = 1.0 - p;
  double lo = 0.0;
  double hi = 1.0;
  while (t_upper_tail(hi, df) > tail) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) {
      throw StatsError("t_quantile: failed to bracket");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t_upper_tail(mid, df) > tail ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  double residual = std::abs(t_upper_tail(t, df) - tail);
  for (int i = 0; i < 4; ++i) {
    const double step = (t_upper_tail(t, df) - tail) / t_pdf(t, df);
    const double candidate = t + step;
    const double r = std::abs(t_upper_tail(candidate, df) - tail);
    if (!(r < residual)) break;
    t = candidate;
    residual = r;
  }
  return t;
}

} // namespace booster::stats

#endif
