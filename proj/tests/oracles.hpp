// Independent reference computations used only by the tests. Nothing here
// calls into the library's numeric kernels.
#ifndef BOOSTER_TESTS_ORACLES_HPP
#define BOOSTER_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace oracle {

/// |H(f)| by direct DTFT summation, in dB.
inline double dtft_db(std::span<const double> h, double f_hz, double fs) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < h.size(); ++n) {
    acc += h[n] * std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs * static_cast<double>(n));
  }
  return 20.0 * std::log10(std::abs(acc));
}

/// y[k] = sum_m h[m] x[k-m], summed per output sample.
inline std::vector<double> convolve_truncated(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < h.size() && m <= k; ++m) {
      acc += h[m] * x[k - m];
    }
    y[k] = acc;
  }
  return y;
}

inline std::vector<double> white_noise(std::size_t n, std::uint32_t seed, double amplitude = 0.5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<double> x(n);
  for (auto& v : x) {
    v = dist(rng);
  }
  return x;
}

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 60) {
  auto whole = [&](double lo, double hi, double flo, double fmid, double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  };
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double s, double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = whole(lo, mid, flo, flm, fmid);
    const double right = whole(mid, hi, fmid, frm, fhi);
    if (d <= 0 || std::abs(left + right - s) <= 15.0 * eps) {
      return left + right + (left + right - s) / 15.0;
    }
    return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) + rec(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, whole(a, b, fa, fm, fb), tol, depth);
}

/// Student t density.
inline double t_pdf(double x, double df) {
  const double logc = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * std::numbers::pi);
  return std::exp(logc - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

/// P(T > t) for t >= 0 by integrating the density on [0, t] (substituting
/// nothing clever): 0.5 - int_0^t pdf.
inline double t_upper_tail(double t, double df) {
  const double abs_t = std::abs(t);
  const double body = simpson([df](double x) { return t_pdf(x, df); }, 0.0, abs_t, 1e-13);
  const double upper = 0.5 - body;
  return t >= 0.0 ? upper : 1.0 - upper;
}

inline double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

inline double sample_var(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) {
    s += (x - m) * (x - m);
  }
  return s / (v.size() - 1);
}

/// Welch two-sided p-value with the tail computed by quadrature.
inline double welch_two_sided_quadrature(std::span<const double> a, std::span<const double> b) {
  const double va = sample_var(a) / a.size();
  const double vb = sample_var(b) / b.size();
  const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / (a.size() - 1.0) + vb * vb / (b.size() - 1.0));
  return 2.0 * t_upper_tail(std::abs(t), df);
}

/// Exact two-sided permutation test on |mean difference| over every
/// relabelling of the pooled sample.
inline double permutation_two_sided(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t na = a.size();
  const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
  const double observed = std::abs(mean(a) - mean(b));
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(na), true);
  std::size_t hits = 0;
  std::size_t count = 0;
  do {
    double sa = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) sa += pooled[i];
    }
    const double diff = std::abs(sa / na - (total - sa) / (n - na));
    if (diff >= observed - 1e-12) ++hits;
    ++count;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(hits) / static_cast<double>(count);
}

/// Standard normal quantile by bisection on 0.5*erfc(-x/sqrt2).
inline double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::numbers::sqrt2);
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace oracle

#endif
