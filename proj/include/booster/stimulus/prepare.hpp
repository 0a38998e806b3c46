#ifndef BOOSTER_STIMULUS_PREPARE_HPP
#define BOOSTER_STIMULUS_PREPARE_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/error.hpp>
#include <booster/io/wav.hpp>
#include <booster/plan/condition.hpp>
#include <booster/stimulus/levels.hpp>
#include <booster/stimulus/noise.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace booster {

struct PrepareOptions {
  double speech_target_rms_db = -14.0;
  double noise_target_rms_db = -8.0;
  double peak_ceiling_db = kDefaultPeakCeilingDb;
  double noise_c_mix_peak_db = -1.0;
  std::uint64_t noise_a_seed = 7;
  /// Noise segment length; 0 means "as long as the longest speech signal".
  std::size_t noise_segment_samples = 0;
};

/// Raw material, already mono and at 48 kHz.
struct PrepareInputs {
  std::array<AudioBuffer, 3> signals;
  std::optional<AudioBuffer> noise_a;       // generated when absent
  AudioBuffer noise_b;
  std::vector<AudioBuffer> noise_c_parts;   // mixed with equal energy...
  std::optional<AudioBuffer> noise_c;       // ...unless a premixed Noise C is given
};

struct LevelsManifestRow {
  std::string id;
  LevelReport before;
  LevelReport after;
  double gain_db = 0.0;
  bool ceiling_engaged = false;
  double loop_discontinuity = 0.0;  // noises only
};

struct PreparedStimuli {
  std::array<AudioBuffer, 3> signals;
  std::array<AudioBuffer, 3> noises;
  std::vector<LevelsManifestRow> manifest;

  [[nodiscard]] const AudioBuffer& signal(SignalId s) const { return signals[static_cast<std::size_t>(s)]; }
  [[nodiscard]] const AudioBuffer& noise(NoiseId n) const { return noises[static_cast<std::size_t>(n)]; }
};

inline std::string signal_file_id(SignalId s) { return std::string("signal_") + to_char(s); }
inline std::string noise_file_id(NoiseId n) { return std::string("noise_") + to_char(n); }

/// Aligns speech to the speech RMS target and noise segments to the noise
/// RMS target, capping at the peak ceiling.
inline PreparedStimuli prepare_stimuli(const PrepareInputs& in, const PrepareOptions& opt = {}) {
  for (const auto& s : in.signals) {
    if (s.sample_rate_hz() != kSampleRateHz) throw ParameterError("prepare: speech must be 48 kHz");
    if (s.empty()) throw ParameterError("prepare: empty speech signal");
  }
  std::size_t segment = opt.noise_segment_samples;
  if (segment == 0) {
    for (const auto& s : in.signals) segment = std::max(segment, s.size());
  }

  PreparedStimuli out;
  auto align = [&](const std::string& id, const AudioBuffer& raw, double target, bool is_noise) {
    const auto before = measure_levels(raw);
    auto norm = normalize_rms(raw, target, opt.peak_ceiling_db);
    LevelsManifestRow row{id, before, norm.levels, norm.gain_db, norm.ceiling_engaged,
                          is_noise ? loop_discontinuity(norm.buffer) : 0.0};
    out.manifest.push_back(row);
    return std::move(norm.buffer);
  };
  auto segment_of = [&](const AudioBuffer& noise, const char* name) {
    if (noise.sample_rate_hz() != kSampleRateHz) {
      throw ParameterError(std::string("prepare: ") + name + " must be 48 kHz");
    }
    if (noise.size() < segment) {
      throw ParameterError(std::string("prepare: ") + name + " is shorter than the " + std::to_string(segment) +
                           "-sample segment");
    }
    return noise.head(segment);
  };

  for (auto s : kSignals) {
    out.signals[static_cast<std::size_t>(s)] =
        align(signal_file_id(s), in.signals[static_cast<std::size_t>(s)], opt.speech_target_rms_db, false);
  }

  const AudioBuffer noise_a = in.noise_a ? segment_of(*in.noise_a, "noise A")
                                         : generate_uniform_noise(static_cast<double>(segment) / kSampleRateHz,
                                                                  kSampleRateHz, opt.noise_a_seed);
  AudioBuffer noise_c;
  if (in.noise_c) {
    noise_c = segment_of(*in.noise_c, "noise C");
  } else {
    if (in.noise_c_parts.empty()) throw ParameterError("prepare: no Noise C material");
    std::vector<AudioBuffer> parts;
    for (const auto& p : in.noise_c_parts) parts.push_back(segment_of(p, "noise C source"));
    noise_c = mix_equal_energy(parts, opt.noise_c_mix_peak_db);
  }
  out.noises[0] = align(noise_file_id(NoiseId::A), noise_a.head(segment), opt.noise_target_rms_db, true);
  out.noises[1] = align(noise_file_id(NoiseId::B), segment_of(in.noise_b, "noise B"), opt.noise_target_rms_db, true);
  out.noises[2] = align(noise_file_id(NoiseId::C), noise_c, opt.noise_target_rms_db, true);
  return out;
}

inline void write_levels_manifest(std::ostream& os, const std::vector<LevelsManifestRow>& rows) {
  auto db = [](double v) {
    if (v == kSilenceDb) return std::string("-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  os << "id,peak_db_before,peak_db_after,rms_db_before,rms_db_after,gain_db,ceiling_engaged,loop_discontinuity\n";
  for (const auto& r : rows) {
    os << r.id << ',' << db(r.before.peak_db) << ',' << db(r.after.peak_db) << ',' << db(r.before.rms_db) << ','
       << db(r.after.rms_db) << ',' << db(r.gain_db) << ',' << (r.ceiling_engaged ? 1 : 0) << ','
       << db(r.loop_discontinuity) << '\n';
  }
}

/// Reads a WAV for the pipeline: 48 kHz only, stereo is averaged to mono.
inline AudioBuffer load_mono_48k(const std::filesystem::path& path) {
  auto data = wav::read(path);
  if (data.sample_rate_hz != kSampleRateHz) {
    throw FormatError(path.string() + ": sample rate " + std::to_string(data.sample_rate_hz) +
                      " Hz; inputs must already be 48 kHz (resampling is not supported)");
  }
  if (data.channels.size() == 1) {
    return AudioBuffer(std::move(data.channels[0]), kSampleRateHz);
  }
  if (data.channels.size() == 2) {
    return downmix_mono(StereoBuffer(AudioBuffer(std::move(data.channels[0]), kSampleRateHz),
                                     AudioBuffer(std::move(data.channels[1]), kSampleRateHz)));
  }
  throw FormatError(path.string() + ": expected mono or stereo, got " + std::to_string(data.channels.size()) +
                    " channels");
}

/// Loads the aligned material written by `prepare`.
inline PreparedStimuli load_prepared(const std::filesystem::path& dir) {
  PreparedStimuli p;
  for (auto s : kSignals) p.signals[static_cast<std::size_t>(s)] = load_mono_48k(dir / (signal_file_id(s) + ".wav"));
  for (auto n : kNoises) p.noises[static_cast<std::size_t>(n)] = load_mono_48k(dir / (noise_file_id(n) + ".wav"));
  return p;
}

inline void save_prepared(const std::filesystem::path& dir, const PreparedStimuli& p) {
  std::filesystem::create_directories(dir);
  for (auto s : kSignals) wav::write_float32(dir / (signal_file_id(s) + ".wav"), p.signal(s));
  for (auto n : kNoises) wav::write_float32(dir / (noise_file_id(n) + ".wav"), p.noise(n));
}

} // namespace booster

#endif
