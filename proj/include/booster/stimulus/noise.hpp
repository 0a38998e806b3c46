#ifndef BOOSTER_STIMULUS_NOISE_HPP
#define BOOSTER_STIMULUS_NOISE_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/error.hpp>
#include <booster/stimulus/levels.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace booster {

inline constexpr double kUniformNoisePeakDb = -6.0;

/// Uniform value in [-1, 1) built from the top 53 bits of the engine output,
/// so the sequence only depends on mt19937_64 (which the standard fixes).
inline double uniform_symmetric(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

/// White noise with i.i.d. uniform samples, scaled so the peak is -6 dBFS.
inline AudioBuffer generate_uniform_noise(double duration_s, int sample_rate_hz, std::uint64_t seed) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ParameterError("generate_uniform_noise: duration must be positive");
  }
  if (sample_rate_hz <= 0) {
    throw ParameterError("generate_uniform_noise: sample rate must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  if (n == 0) {
    throw ParameterError("generate_uniform_noise: duration shorter than one sample");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> x(n);
  double peak = 0.0;
  for (auto& v : x) {
    v = uniform_symmetric(rng);
    peak = std::max(peak, std::abs(v));
  }
  const double scale = db_to_gain(kUniformNoisePeakDb) / peak;
  for (auto& v : x) {
    v *= scale;
  }
  return AudioBuffer(std::move(x), sample_rate_hz);
}

} // namespace booster

#endif
