#ifndef BOOSTER_STATS_WELCH_HPP
#define BOOSTER_STATS_WELCH_HPP

#include <booster/error.hpp>
#include <booster/stats/t_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

namespace booster::stats {

enum class Sidedness {
  TwoSided,
  Greater  // H1: mean(a) > mean(b)
};

struct TestResult {
  double t_statistic = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p_value = 1.0;
  Sidedness sidedness = Sidedness::TwoSided;
};

inline double mean(std::span<const double> x) {
  if (x.empty()) throw StatsError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample variance (n - 1 denominator), two-pass.
inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw StatsError("sample variance needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

inline double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

/// Welch's unequal-variance t-test.
inline TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                               Sidedness sided = Sidedness::TwoSided) {
  if (a.size() < 2 || b.size() < 2) {
    throw StatsError("welch_t_test: each sample needs at least two values");
  }
  const double va = sample_variance(a) / static_cast<double>(a.size());
  const double vb = sample_variance(b) / static_cast<double>(b.size());
  if (va + vb == 0.0) {
    throw StatsError("welch_t_test: both samples have zero variance");
  }
  TestResult r;
  r.sidedness = sided;
  r.t_statistic = (mean(a) - mean(b)) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  if (sided == Sidedness::TwoSided) {
    r.p_value = 2.0 * t_upper_tail(std::abs(r.t_statistic), r.df);
  } else {
    r.p_value = t_upper_tail(r.t_statistic, r.df);
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

} // namespace booster::stats

#endif
