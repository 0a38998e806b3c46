#ifndef BOOSTER_FIXTURES_SYNTHETIC_HPP
#define BOOSTER_FIXTURES_SYNTHETIC_HPP

// Deterministic stand-ins for the recorded speech and noise sources, used by
// the tests and by `booster make-fixtures`. They are not meant to sound like
// the originals, only to have speech-like and noise-like level statistics.

#include <booster/dsp/audio_buffer.hpp>
#include <booster/stimulus/prepare.hpp>
#include <booster/error.hpp>
#include <booster/stimulus/levels.hpp>
#include <booster/stimulus/noise.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace booster::fixtures {

inline double crest_factor_db(std::span<const double> x) {
  const auto l = measure_levels(x);
  return l.peak_db - l.rms_db;
}

/// Lowers the crest factor of x to target_db with a tanh soft clipper whose
/// drive is found by bisection. Throws if x already has a lower crest factor.
inline std::vector<double> shape_crest_factor(std::vector<double> x, double target_db) {
  const double current = crest_factor_db(x);
  if (current < target_db) {
    throw ParameterError("shape_crest_factor: crest factor " + std::to_string(current) + " dB is below target " +
                         std::to_string(target_db) + " dB");
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  auto clipped = [&](double drive) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(drive * x[i] / peak);
    return y;
  };
  double lo = -6.0; // log10 of the drive
  double hi = 3.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (crest_factor_db(clipped(std::pow(10.0, mid))) > target_db ? lo : hi) = mid;
  }
  return clipped(std::pow(10.0, 0.5 * (lo + hi)));
}

/// Rescales x so its RMS is rms_db.
inline std::vector<double> scale_to_rms(std::vector<double> x, double rms_db) {
  const auto l = measure_levels(x);
  const double g = db_to_gain(rms_db - l.rms_db);
  for (auto& v : x) v *= g;
  return x;
}

struct VoiceParams {
  double f0_hz = 120.0;
  std::array<double, 3> formants_hz{700.0, 1200.0, 2600.0};
  double brightness = 1.0;  // spectral tilt; > 1 keeps more high harmonics
  double fricative_level = 0.1;
};

/// Syllable-rate bursts of a harmonic source shaped by moving formants, with
/// short noise bursts for consonants and pauses between phrases.
inline std::vector<double> synth_speech(const VoiceParams& voice, double duration_s, std::uint64_t seed,
                                        int sample_rate_hz = kSampleRateHz) {
  const auto n = static_cast<std::size_t>(duration_s * sample_rate_hz);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(n, 0.0);
  const double fs = sample_rate_hz;

  std::size_t pos = static_cast<std::size_t>(0.05 * fs);
  double phase = 0.0;
  double lp = 0.0;
  while (pos < n) {
    const double syl_s = 0.12 + 0.14 * unit(rng);
    const auto len = static_cast<std::size_t>(syl_s * fs);
    std::array<double, 3> fm{};
    for (std::size_t k = 0; k < 3; ++k) fm[k] = voice.formants_hz[k] * (0.8 + 0.4 * unit(rng));
    const double loud = 0.4 + 0.6 * unit(rng);
    const double f0 = voice.f0_hz * (0.85 + 0.3 * unit(rng));
    const std::size_t fric = unit(rng) < 0.5 ? static_cast<std::size_t>(0.04 * fs) : 0;

    const int harmonics = static_cast<int>(std::min(40.0, 5000.0 * voice.brightness / f0));
    std::vector<double> amp(static_cast<std::size_t>(harmonics) + 1, 0.0);
    for (int h = 1; h <= harmonics; ++h) {
      const double f = h * f0;
      double a = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double bw = 80.0 + 0.1 * fm[k];
        a += std::exp(-0.5 * ((f - fm[k]) / bw) * ((f - fm[k]) / bw)) / (1.0 + k);
      }
      amp[static_cast<std::size_t>(h)] = (a + 0.02) * std::pow(static_cast<double>(h), -0.6 / voice.brightness);
    }

    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(len);
      const double env = std::pow(std::sin(std::numbers::pi * t), 2.0) * loud;
      const double inst_f0 = f0 * (1.0 + 0.04 * std::sin(2.0 * std::numbers::pi * 5.0 * i / fs) - 0.08 * t);
      phase += 2.0 * std::numbers::pi * inst_f0 / fs;
      double v = 0.0;
      for (int h = 1; h <= harmonics; ++h) v += amp[static_cast<std::size_t>(h)] * std::sin(h * phase);
      if (i < fric) {
        const double w = 2.0 * unit(rng) - 1.0;
        const double hp = w - lp;
        lp += 0.3 * (w - lp);
        v += voice.fricative_level * hp * (1.0 - static_cast<double>(i) / fric) * 8.0;
      }
      out[pos + i] += env * v;
    }
    pos += len;
    const double gap_s = unit(rng) < 0.15 ? 0.18 + 0.15 * unit(rng) : 0.02 + 0.05 * unit(rng);
    pos += static_cast<std::size_t>(gap_s * fs);
  }
  return out;
}

/// One-pole smoothed Gaussian noise with a slow random loudness drift.
inline std::vector<double> synth_crowd(double duration_s, std::uint64_t seed, int sample_rate_hz = kSampleRateHz) {
  const auto n = static_cast<std::size_t>(duration_s * sample_rate_hz);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  double s1 = 0.0;
  double s2 = 0.0;
  double drift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = gauss(rng);
    s1 += 0.35 * (w - s1);
    s2 += 0.05 * (w - s2);
    drift += 0.0005 * (gauss(rng) - drift);
    out[i] = (s1 + 2.0 * s2) * (1.0 + 0.3 * std::tanh(20.0 * drift));
  }
  return out;
}

/// Saturated periodic hum with a little noise, like a motor or a drill.
inline std::vector<double> synth_machinery(double f0_hz, double drive, double duration_s, std::uint64_t seed,
                                           int sample_rate_hz = kSampleRateHz) {
  const auto n = static_cast<std::size_t>(duration_s * sample_rate_hz);
  std::mt19937_64 rng(seed);
  const double phase0 = 2.0 * std::numbers::pi * uniform_symmetric(rng);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    const double wobble = 1.0 + 0.01 * std::sin(2.0 * std::numbers::pi * 0.5 * t);
    const double v = std::sin(2.0 * std::numbers::pi * f0_hz * wobble * t + phase0) + 0.3 * uniform_symmetric(rng);
    out[i] = std::tanh(drive * v);
  }
  return out;
}

/// Wraps a mono signal in a stereo pair whose average is exactly the mono
/// signal: L = m + d, R = m - d with a small decorrelated d.
inline StereoBuffer widen(const std::vector<double>& mono, double side_level, std::uint64_t seed,
                          int sample_rate_hz = kSampleRateHz) {
  std::mt19937_64 rng(seed);
  const auto l = measure_levels(mono);
  const double side = db_to_gain(l.rms_db) * side_level;
  std::vector<double> left(mono.size());
  std::vector<double> right(mono.size());
  double s = 0.0;
  for (std::size_t i = 0; i < mono.size(); ++i) {
    s += 0.2 * (uniform_symmetric(rng) - s);
    const double d = side * s;
    left[i] = mono[i] + d;
    right[i] = mono[i] - d;
  }
  return StereoBuffer(AudioBuffer(std::move(left), sample_rate_hz), AudioBuffer(std::move(right), sample_rate_hz));
}

/// Raw, unaligned inputs for the preparation pipeline.
struct RawSources {
  std::array<AudioBuffer, 3> signals;        // mono speech A, B, C
  StereoBuffer noise_b;                      // crowd recording
  std::array<StereoBuffer, 5> noise_c_parts; // urban sources mixed into Noise C
};

/// Level targets for the raw fixtures. The RMS values follow the unaligned
/// measurements of the original material; the crest factors are the ones
/// the aligned material ended up with.
struct FixtureTargets {
  std::array<double, 3> signal_rms_db{-34.4, -29.1, -24.3};
  std::array<double, 3> signal_crest_db{14.8, 14.4, 10.7};
  double noise_b_rms_db = -16.5;
  double noise_b_crest_db = 6.8;
};

inline RawSources make_raw_sources(std::uint64_t seed = 1, const FixtureTargets& targets = {}) {
  const std::array<VoiceParams, 3> voices{
      VoiceParams{115.0, {650.0, 1100.0, 2500.0}, 0.8, 0.05},  // low male voice
      VoiceParams{215.0, {800.0, 1500.0, 2900.0}, 1.0, 0.08},
      VoiceParams{245.0, {900.0, 1900.0, 3400.0}, 1.6, 0.2},   // brighter female voice
  };
  const std::array<double, 3> durations{2.9, 3.1, 3.0};

  RawSources raw;
  for (std::size_t i = 0; i < 3; ++i) {
    auto x = synth_speech(voices[i], durations[i], seed * 101 + i);
    x = shape_crest_factor(std::move(x), targets.signal_crest_db[i]);
    raw.signals[i] = AudioBuffer(scale_to_rms(std::move(x), targets.signal_rms_db[i]), kSampleRateHz);
  }

  auto crowd = shape_crest_factor(synth_crowd(5.0, seed * 101 + 10), targets.noise_b_crest_db);
  raw.noise_b = widen(scale_to_rms(std::move(crowd), targets.noise_b_rms_db), 0.3, seed * 101 + 11);

  const std::array<std::pair<double, double>, 5> machines{
      {{100.0, 6.0}, {173.0, 8.0}, {61.0, 5.0}, {227.0, 7.0}, {139.0, 6.0}}};
  const std::array<double, 5> part_rms_db{-18.0, -12.0, -15.0, -20.0, -14.0};
  for (std::size_t i = 0; i < 5; ++i) {
    auto x = synth_machinery(machines[i].first, machines[i].second, 5.0, seed * 101 + 20 + i);
    raw.noise_c_parts[i] = widen(scale_to_rms(std::move(x), part_rms_db[i]), 0.2, seed * 101 + 30 + i);
  }
  return raw;
}

/// Mono inputs for prepare_stimuli; the stereo recordings are downmixed.
inline PrepareInputs prepare_inputs(const RawSources& raw) {
  PrepareInputs in;
  in.signals = raw.signals;
  in.noise_b = downmix_mono(raw.noise_b);
  for (const auto& p : raw.noise_c_parts) in.noise_c_parts.push_back(downmix_mono(p));
  return in;
}

} // namespace booster::fixtures

#endif
