#ifndef BOOSTER_DSP_FIR_HPP
#define BOOSTER_DSP_FIR_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/error.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace booster {

enum class FilterKind { Lowpass, Highpass };

/// Linear-phase FIR with an odd number of taps, so the group delay is a whole
/// number of samples.
class FirFilter {
public:
  static constexpr double kSymmetryTolerance = 1e-12;

  FirFilter(std::vector<double> coefficients, double cutoff_hz, int sample_rate_hz, FilterKind kind)
      : coefficients_(std::move(coefficients)), cutoff_hz_(cutoff_hz), sample_rate_hz_(sample_rate_hz), kind_(kind) {
    if (coefficients_.size() < 3 || coefficients_.size() % 2 == 0) {
      throw ParameterError("FIR tap count must be odd and >= 3, got " + std::to_string(coefficients_.size()));
    }
    if (sample_rate_hz_ <= 0) {
      throw ParameterError("FIR sample rate must be positive");
    }
    if (!is_symmetric(coefficients_)) {
      throw ParameterError("FIR coefficients are not symmetric (filter is not linear phase)");
    }
  }

  [[nodiscard]] std::span<const double> coefficients() const noexcept { return coefficients_; }
  [[nodiscard]] std::size_t taps() const noexcept { return coefficients_.size(); }
  [[nodiscard]] double cutoff_hz() const noexcept { return cutoff_hz_; }
  [[nodiscard]] int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  [[nodiscard]] FilterKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t group_delay_samples() const noexcept { return (coefficients_.size() - 1) / 2; }

  static bool is_symmetric(std::span<const double> h) noexcept {
    const auto n = h.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      if (std::abs(h[i] - h[n - 1 - i]) > kSymmetryTolerance) {
        return false;
      }
    }
    return true;
  }

private:
  std::vector<double> coefficients_;
  double cutoff_hz_;
  int sample_rate_hz_;
  FilterKind kind_;
};

/// Symmetric Blackman window of length n (both end points are zero).
inline std::vector<double> blackman_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) {
    return w;
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i <= (n - 1) / 2; ++i) {
    const double x = static_cast<double>(i) / denom;
    const double v = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * x) + 0.08 * std::cos(4.0 * std::numbers::pi * x);
    w[i] = v;
    w[n - 1 - i] = v;
  }
  return w;
}

/// Windowed-sinc lowpass (Blackman window) normalized to unity gain at DC.
/// The ideal response is cut at fc, which puts the -6 dB point there.
inline FirFilter design_lowpass_fir(double fc_hz, int sample_rate_hz, std::size_t taps) {
  if (sample_rate_hz <= 0) {
    throw ParameterError("sample rate must be positive");
  }
  if (!(fc_hz > 0.0) || !(fc_hz < sample_rate_hz / 2.0)) {
    throw ParameterError("cutoff " + std::to_string(fc_hz) + " Hz outside (0, fs/2)");
  }
  if (taps < 3 || taps % 2 == 0) {
    throw ParameterError("tap count must be odd and >= 3, got " + std::to_string(taps));
  }

  const std::size_t centre = (taps - 1) / 2;
  const double fn = fc_hz / sample_rate_hz; // cycles per sample
  const auto window = blackman_window(taps);

  std::vector<double> h(taps);
  for (std::size_t i = 0; i <= centre; ++i) {
    const double k = static_cast<double>(centre - i);
    const double ideal = (k == 0.0) ? 2.0 * fn : std::sin(2.0 * std::numbers::pi * fn * k) / (std::numbers::pi * k);
    h[i] = ideal * window[i];
    h[taps - 1 - i] = h[i];
  }

  // Pairwise sum from the outside in keeps the normalization symmetric.
  double dc = h[centre];
  for (std::size_t i = 0; i < centre; ++i) {
    dc += 2.0 * h[i];
  }
  for (auto& c : h) {
    c /= dc;
  }
  return FirFilter(std::move(h), fc_hz, sample_rate_hz, FilterKind::Lowpass);
}

/// Highpass as delay-minus-lowpass: h[n] = d[n - delay] - l[n]. The two bands
/// then sum to a pure delay.
inline FirFilter derive_complementary_highpass(const FirFilter& lowpass) {
  std::vector<double> h(lowpass.coefficients().begin(), lowpass.coefficients().end());
  for (auto& c : h) {
    c = -c;
  }
  h[lowpass.group_delay_samples()] += 1.0;
  return FirFilter(std::move(h), lowpass.cutoff_hz(), lowpass.sample_rate_hz(), FilterKind::Highpass);
}

/// Direct-form convolution with zero history, truncated to the input length.
inline AudioBuffer apply_fir(const AudioBuffer& input, const FirFilter& filter) {
  if (input.sample_rate_hz() != filter.sample_rate_hz()) {
    throw ParameterError("apply_fir: buffer at " + std::to_string(input.sample_rate_hz()) + " Hz, filter at " +
                         std::to_string(filter.sample_rate_hz()) + " Hz");
  }
  const auto x = input.samples();
  const auto h = filter.coefficients();
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t m = 0; m < h.size() && m < n; ++m) {
    const double hm = h[m];
    if (hm == 0.0) {
      continue;
    }
    double* out = y.data() + m;
    const double* in = x.data();
    const std::size_t count = n - m;
    for (std::size_t k = 0; k < count; ++k) {
      out[k] += hm * in[k];
    }
  }
  return AudioBuffer(std::move(y), input.sample_rate_hz());
}

} // namespace booster

#endif
