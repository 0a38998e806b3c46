#ifndef BOOSTER_DSP_RESPONSE_HPP
#define BOOSTER_DSP_RESPONSE_HPP

#include <booster/dsp/booster.hpp>
#include <booster/dsp/fir.hpp>
#include <booster/error.hpp>

#include <cmath>
#include <algorithm>
#include <complex>
#include <limits>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace booster {

inline constexpr std::size_t kReportGridPoints = 4096;
inline constexpr double kReportLowestHz = 10.0;
/// Floor used when a response is exactly zero.
inline constexpr double kMagnitudeFloorDb = -400.0;

struct ResponseCurve {
  std::vector<double> freq_hz;
  std::vector<double> magnitude_db;

  [[nodiscard]] std::size_t size() const noexcept { return freq_hz.size(); }

  /// Index of the smallest magnitude with freq in [lo, hi]; size() if none.
  [[nodiscard]] std::size_t argmin_in(double lo_hz, double hi_hz) const noexcept {
    std::size_t best = size();
    for (std::size_t i = 0; i < size(); ++i) {
      if (freq_hz[i] < lo_hz || freq_hz[i] > hi_hz) {
        continue;
      }
      if (best == size() || magnitude_db[i] < magnitude_db[best]) {
        best = i;
      }
    }
    return best;
  }

  /// Largest magnitude with freq in [lo, hi]; -inf when the range is empty.
  [[nodiscard]] double max_in(double lo_hz, double hi_hz) const noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
      if (freq_hz[i] >= lo_hz && freq_hz[i] <= hi_hz) {
        m = std::max(m, magnitude_db[i]);
      }
    }
    return m;
  }

  void write_csv(std::ostream& os) const {
    os << "freq_hz,magnitude_db\n";
    const auto old_precision = os.precision(10);
    for (std::size_t i = 0; i < size(); ++i) {
      os << freq_hz[i] << ',' << magnitude_db[i] << '\n';
    }
    os.precision(old_precision);
  }
};

/// Log-spaced grid from lo_hz to hi_hz inclusive.
inline std::vector<double> log_frequency_grid(double lo_hz, double hi_hz, std::size_t points) {
  if (points < 2) {
    throw ParameterError("response grid needs at least 2 points");
  }
  if (!(lo_hz > 0.0) || !(hi_hz > lo_hz)) {
    throw ParameterError("response grid bounds must satisfy 0 < lo < hi");
  }
  std::vector<double> f(points);
  const double ratio = std::log(hi_hz / lo_hz);
  for (std::size_t i = 0; i < points; ++i) {
    f[i] = lo_hz * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  f.back() = hi_hz;
  return f;
}

/// DTFT of a coefficient sequence at one frequency.
inline std::complex<double> evaluate_response(std::span<const double> h, double freq_hz, double sample_rate_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  double re = 0.0;
  double im = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double phase = w * static_cast<double>(n);
    re += h[n] * std::cos(phase);
    im -= h[n] * std::sin(phase);
  }
  return {re, im};
}

inline double magnitude_db(std::complex<double> value) {
  const double mag = std::abs(value);
  if (mag <= 0.0) {
    return kMagnitudeFloorDb;
  }
  return std::max(kMagnitudeFloorDb, 20.0 * std::log10(mag));
}

inline ResponseCurve frequency_response(std::span<const double> h, int sample_rate_hz,
                                        std::size_t grid_points = kReportGridPoints) {
  if (sample_rate_hz <= 0) {
    throw ParameterError("sample rate must be positive");
  }
  ResponseCurve curve;
  curve.freq_hz = log_frequency_grid(kReportLowestHz, sample_rate_hz / 2.0, grid_points);
  curve.magnitude_db.reserve(grid_points);
  for (double f : curve.freq_hz) {
    curve.magnitude_db.push_back(magnitude_db(evaluate_response(h, f, sample_rate_hz)));
  }
  return curve;
}

inline ResponseCurve frequency_response(const FirFilter& filter, std::size_t grid_points = kReportGridPoints) {
  return frequency_response(filter.coefficients(), filter.sample_rate_hz(), grid_points);
}

/// Impulse response of low*c.low + high*c.high.
inline std::vector<double> composite_coefficients(const FilterBank& bank, BandCoefficients coeffs) {
  const auto l = bank.lowpass.coefficients();
  const auto h = bank.highpass.coefficients();
  std::vector<double> out(l.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = coeffs.low() * l[i] + coeffs.high() * h[i];
  }
  return out;
}

/// Response of the band-split chain: the lowpass alone when no band
/// coefficients are given, otherwise the recombined pair.
inline ResponseCurve frequency_response(const FilterBank& bank, std::optional<BandCoefficients> coeffs,
                                        std::size_t grid_points = kReportGridPoints) {
  if (!coeffs) {
    return frequency_response(bank.lowpass, grid_points);
  }
  const auto combined = composite_coefficients(bank, *coeffs);
  return frequency_response(combined, bank.lowpass.sample_rate_hz(), grid_points);
}

} // namespace booster

#endif
