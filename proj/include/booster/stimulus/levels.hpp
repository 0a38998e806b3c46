#ifndef BOOSTER_STIMULUS_LEVELS_HPP
#define BOOSTER_STIMULUS_LEVELS_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace booster {

/// Level reported for a buffer with no energy.
inline constexpr double kSilenceDb = std::numeric_limits<double>::lowest();
inline constexpr double kDefaultPeakCeilingDb = -0.1;

inline double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }

inline double gain_to_db(double amplitude) {
  return amplitude > 0.0 ? 20.0 * std::log10(amplitude) : kSilenceDb;
}

/// Peak and RMS in dBFS. RMS is referenced to a full-scale square wave, so a
/// constant 1.0 reads 0 dB and a full-scale sine reads -3.01 dB.
struct LevelReport {
  double peak_db = kSilenceDb;
  double rms_db = kSilenceDb;
  bool silent = true;
};

inline LevelReport measure_levels(std::span<const double> x) {
  if (x.empty()) {
    throw ParameterError("measure_levels: empty buffer");
  }
  double peak = 0.0;
  double energy = 0.0;
  for (double v : x) {
    peak = std::max(peak, std::abs(v));
    energy += v * v;
  }
  LevelReport r;
  r.silent = peak == 0.0;
  r.peak_db = gain_to_db(peak);
  r.rms_db = gain_to_db(std::sqrt(energy / static_cast<double>(x.size())));
  return r;
}

inline LevelReport measure_levels(const AudioBuffer& buffer) { return measure_levels(buffer.samples()); }

inline AudioBuffer apply_gain_db(const AudioBuffer& buffer, double gain_db) {
  if (!std::isfinite(gain_db)) {
    throw ParameterError("apply_gain_db: gain must be finite");
  }
  if (gain_db == 0.0) {
    return buffer;
  }
  const double g = db_to_gain(gain_db);
  std::vector<double> out(buffer.data());
  for (auto& v : out) {
    v *= g;
  }
  return AudioBuffer(std::move(out), buffer.sample_rate_hz());
}

struct NormalizationResult {
  AudioBuffer buffer;
  LevelReport levels;      // after normalization
  double gain_db = 0.0;    // gain actually applied
  bool ceiling_engaged = false;
};

/// Scales the buffer so its RMS reaches target_rms_db. If that would lift
/// the peak above peak_ceiling_db the gain is capped so the peak sits exactly
/// on the ceiling, and the lower RMS actually reached is reported.
inline NormalizationResult normalize_rms(const AudioBuffer& buffer, double target_rms_db,
                                         double peak_ceiling_db = kDefaultPeakCeilingDb) {
  if (buffer.empty()) {
    throw NormalizationError("normalize_rms: empty buffer");
  }
  const auto before = measure_levels(buffer);
  if (before.silent) {
    throw NormalizationError("normalize_rms: buffer is silent");
  }
  NormalizationResult result;
  result.gain_db = target_rms_db - before.rms_db;
  if (before.peak_db + result.gain_db > peak_ceiling_db) {
    result.gain_db = peak_ceiling_db - before.peak_db;
    result.ceiling_engaged = true;
  }
  result.buffer = apply_gain_db(buffer, result.gain_db);
  result.levels = measure_levels(result.buffer);
  return result;
}

/// Per-sample (L + R) / 2.
inline AudioBuffer downmix_mono(const StereoBuffer& stereo) {
  std::vector<double> out(stereo.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (stereo.left()[i] + stereo.right()[i]) / 2.0;
  }
  return AudioBuffer(std::move(out), stereo.sample_rate_hz());
}

/// Scales the buffer so its absolute peak is peak_db.
inline AudioBuffer normalize_peak(const AudioBuffer& buffer, double peak_db) {
  const auto levels = measure_levels(buffer);
  if (levels.silent) {
    throw NormalizationError("normalize_peak: buffer is silent");
  }
  return apply_gain_db(buffer, peak_db - levels.peak_db);
}

/// Equal-energy mix: every source is brought down to the quietest source's
/// RMS, the sources are summed, and the sum is peak-normalized. Sources are
/// truncated to the shortest one.
inline AudioBuffer mix_equal_energy(std::span<const AudioBuffer> sources, double peak_db = -1.0) {
  if (sources.empty()) {
    throw ParameterError("mix_equal_energy: no sources");
  }
  std::size_t length = sources.front().size();
  double quietest = std::numeric_limits<double>::infinity();
  std::vector<double> rms(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    require_same_rate(sources.front(), sources[s], "mix_equal_energy");
    length = std::min(length, sources[s].size());
  }
  if (length == 0) {
    throw ParameterError("mix_equal_energy: empty source");
  }
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto levels = measure_levels(sources[s].samples().first(length));
    if (levels.silent) {
      throw NormalizationError("mix_equal_energy: source " + std::to_string(s) + " is silent");
    }
    rms[s] = levels.rms_db;
    quietest = std::min(quietest, levels.rms_db);
  }
  std::vector<double> sum(length, 0.0);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const double g = db_to_gain(quietest - rms[s]);
    const auto x = sources[s].samples();
    for (std::size_t i = 0; i < length; ++i) {
      sum[i] += g * x[i];
    }
  }
  return normalize_peak(AudioBuffer(std::move(sum), sources.front().sample_rate_hz()), peak_db);
}

/// Jump at the loop point relative to the buffer RMS: |x[last] - x[0]| / rms.
/// Reported only; a seamless loop keeps this near the typical
/// sample-to-sample step.
inline double loop_discontinuity(const AudioBuffer& buffer) {
  if (buffer.size() < 2) {
    return 0.0;
  }
  const auto levels = measure_levels(buffer);
  if (levels.silent) {
    return 0.0;
  }
  const double rms = db_to_gain(levels.rms_db);
  return std::abs(buffer[buffer.size() - 1] - buffer[0]) / rms;
}

} // namespace booster

#endif
