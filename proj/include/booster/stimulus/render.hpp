#ifndef BOOSTER_STIMULUS_RENDER_HPP
#define BOOSTER_STIMULUS_RENDER_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/dsp/booster.hpp>
#include <booster/error.hpp>
#include <booster/plan/condition.hpp>
#include <booster/stimulus/gain_table.hpp>
#include <booster/stimulus/levels.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace booster {

/// One ear-pair of a rendered sound plus the number of samples (over both
/// ears) that had to be clamped to +/-1.
struct RenderedSound {
  StereoBuffer audio;
  std::size_t clip_count = 0;
};

/// Sound A (reference, adjustable) and Sound B (processed, fixed) for one trial.
struct TrialStimulus {
  StereoBuffer sound_a;
  StereoBuffer sound_b;
  Condition condition;
  double initial_gain_db = 0.0;
  double variable_gain_db = 0.0;
  std::size_t clip_count_a = 0;
  std::size_t clip_count_b = 0;
};

/// Per-trial renderer. The speech is band-split once at construction; each
/// sound is then a gain times a recombined speech path plus the shared noise.
/// Gain is applied after the (linear) filter bank so changing the variable
/// gain never re-filters.
class TrialRenderer {
public:
  TrialRenderer(const AudioBuffer& speech, const AudioBuffer& noise, const Condition& condition,
                const GainTable& gains, std::size_t taps = kDefaultTaps)
      : TrialRenderer(split_speech(speech, noise, condition, taps), noise, condition, gains) {}

  /// Same, from a speech signal already split at condition.method's cutoff.
  TrialRenderer(const Bands& bands, const AudioBuffer& noise, const Condition& condition, const GainTable& gains)
      : condition_(condition), initial_gain_db_(gains.at(condition.signal, condition.noise)) {
    check_inputs(bands.low, noise);
    reference_path_ = recombine_bands(bands, BandCoefficients{1, 1});
    processed_path_ = recombine_bands(bands, BandCoefficients::for_method(condition.method));
    noise_ = noise.head(bands.low.size());
  }

  [[nodiscard]] const Condition& condition() const noexcept { return condition_; }
  [[nodiscard]] double initial_gain_db() const noexcept { return initial_gain_db_; }

  /// Reference speech (both ears through the [1, 1] path) at
  /// initial + variable gain, over the noise.
  [[nodiscard]] RenderedSound sound_a(double variable_gain_db) const {
    const double g = db_to_gain(initial_gain_db_ + variable_gain_db);
    std::size_t clips = 0;
    auto left = mix(reference_path_, g, clips);
    auto right = mix(reference_path_, g, clips);
    return {StereoBuffer(std::move(left), std::move(right)), clips};
  }

  /// Processed speech in the left ear, reference path in the right, both at
  /// the initial gain, over the same noise.
  [[nodiscard]] RenderedSound sound_b() const {
    const double g = db_to_gain(initial_gain_db_);
    std::size_t clips = 0;
    auto left = mix(processed_path_, g, clips);
    auto right = mix(reference_path_, g, clips);
    return {StereoBuffer(std::move(left), std::move(right)), clips};
  }

  [[nodiscard]] TrialStimulus render(double variable_gain_db) const {
    auto a = sound_a(variable_gain_db);
    auto b = sound_b();
    return TrialStimulus{std::move(a.audio), std::move(b.audio), condition_, initial_gain_db_, variable_gain_db,
                         a.clip_count, b.clip_count};
  }

private:
  static void check_inputs(const AudioBuffer& speech, const AudioBuffer& noise) {
    if (speech.sample_rate_hz() != kSampleRateHz || noise.sample_rate_hz() != kSampleRateHz) {
      throw ParameterError("render: speech and noise must both be 48 kHz (got " +
                           std::to_string(speech.sample_rate_hz()) + " and " + std::to_string(noise.sample_rate_hz()) +
                           ")");
    }
    if (speech.empty()) {
      throw ParameterError("render: empty speech");
    }
    if (noise.size() < speech.size()) {
      throw ParameterError("render: noise (" + std::to_string(noise.size()) + " samples) shorter than speech (" +
                           std::to_string(speech.size()) + ")");
    }
  }

  static Bands split_speech(const AudioBuffer& speech, const AudioBuffer& noise, const Condition& condition,
                            std::size_t taps) {
    check_inputs(speech, noise);
    return split_bands(speech, FilterBank::design(condition.method.fc_hz(), kSampleRateHz, taps));
  }

  AudioBuffer mix(const AudioBuffer& speech_path, double gain, std::size_t& clips) const {
    std::vector<double> out(noise_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double v = gain * speech_path[i] + noise_[i];
      if (v > 1.0) {
        v = 1.0;
        ++clips;
      } else if (v < -1.0) {
        v = -1.0;
        ++clips;
      }
      out[i] = v;
    }
    return AudioBuffer(std::move(out), kSampleRateHz);
  }

  Condition condition_;
  double initial_gain_db_;
  AudioBuffer reference_path_;
  AudioBuffer processed_path_;
  AudioBuffer noise_;
};

inline TrialStimulus render_trial_pair(const AudioBuffer& speech, const AudioBuffer& noise, const Condition& condition,
                                       const GainTable& gains, double variable_gain_db,
                                       std::size_t taps = kDefaultTaps) {
  if (!std::isfinite(variable_gain_db)) {
    throw ParameterError("render: variable gain must be finite");
  }
  return TrialRenderer(speech, noise, condition, gains, taps).render(variable_gain_db);
}

} // namespace booster

#endif
