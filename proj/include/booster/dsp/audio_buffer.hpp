#ifndef BOOSTER_DSP_AUDIO_BUFFER_HPP
#define BOOSTER_DSP_AUDIO_BUFFER_HPP

#include <booster/error.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace booster {

inline constexpr int kSampleRateHz = 48000;

/// Mono block of samples at a fixed rate. Full scale is +/-1.0.
class AudioBuffer {
public:
  AudioBuffer() = default;

  AudioBuffer(std::vector<double> samples, int sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (sample_rate_hz_ <= 0) {
      throw ParameterError("sample rate must be positive, got " + std::to_string(sample_rate_hz_));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i])) {
        throw ParameterError("non-finite sample at index " + std::to_string(i));
      }
    }
  }

  static AudioBuffer zeros(std::size_t length, int sample_rate_hz = kSampleRateHz) {
    return AudioBuffer(std::vector<double>(length, 0.0), sample_rate_hz);
  }

  [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return samples_; }
  [[nodiscard]] int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
  [[nodiscard]] double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  /// First `length` samples (or all of them if shorter).
  [[nodiscard]] AudioBuffer head(std::size_t length) const {
    const auto n = std::min(length, samples_.size());
    return AudioBuffer(std::vector<double>(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(n)),
                       sample_rate_hz_);
  }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

private:
  std::vector<double> samples_;
  int sample_rate_hz_ = kSampleRateHz;
};

/// Left/right pair; channel 1 (left) is the one that may carry the inversion.
class StereoBuffer {
public:
  StereoBuffer() = default;

  StereoBuffer(AudioBuffer left, AudioBuffer right) : left_(std::move(left)), right_(std::move(right)) {
    if (left_.size() != right_.size()) {
      throw ParameterError("stereo channels differ in length");
    }
    if (left_.sample_rate_hz() != right_.sample_rate_hz()) {
      throw ParameterError("stereo channels differ in sample rate");
    }
  }

  static StereoBuffer diotic(const AudioBuffer& mono) { return StereoBuffer(mono, mono); }

  [[nodiscard]] const AudioBuffer& left() const noexcept { return left_; }
  [[nodiscard]] const AudioBuffer& right() const noexcept { return right_; }
  [[nodiscard]] std::size_t size() const noexcept { return left_.size(); }
  [[nodiscard]] int sample_rate_hz() const noexcept { return left_.sample_rate_hz(); }

  friend bool operator==(const StereoBuffer&, const StereoBuffer&) = default;

private:
  AudioBuffer left_;
  AudioBuffer right_;
};

inline void require_same_rate(const AudioBuffer& a, const AudioBuffer& b, const char* what) {
  if (a.sample_rate_hz() != b.sample_rate_hz()) {
    throw ParameterError(std::string(what) + ": sample rate mismatch (" + std::to_string(a.sample_rate_hz()) +
                         " vs " + std::to_string(b.sample_rate_hz()) + ")");
  }
}

} // namespace booster

#endif
