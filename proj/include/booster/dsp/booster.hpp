#ifndef BOOSTER_DSP_BOOSTER_HPP
#define BOOSTER_DSP_BOOSTER_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/dsp/fir.hpp>
#include <booster/error.hpp>

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace booster {

inline constexpr std::size_t kDefaultTaps = 513;
inline constexpr std::array<int, 3> kCutoffsHz{250, 500, 1000};

enum class BoosterKind { Original, LowBooster, HighBooster, AllBooster };

/// Processing applied to the left-ear speech. Original and AllBooster carry
/// fc = 250 so every method keys uniformly on (kind, fc).
class BoosterMethod {
public:
  constexpr BoosterMethod() = default;

  BoosterMethod(BoosterKind kind, int fc_hz) : kind_(kind), fc_hz_(fc_hz) {
    const bool banded = kind == BoosterKind::LowBooster || kind == BoosterKind::HighBooster;
    if (banded) {
      if (fc_hz != 250 && fc_hz != 500 && fc_hz != 1000) {
        throw ParameterError("unsupported cutoff " + std::to_string(fc_hz) + " Hz (expected 250, 500 or 1000)");
      }
    } else if (fc_hz != 250) {
      throw ParameterError("Original and AllBooster are keyed at 250 Hz only");
    }
  }

  static BoosterMethod original() { return {BoosterKind::Original, 250}; }
  static BoosterMethod low(int fc_hz) { return {BoosterKind::LowBooster, fc_hz}; }
  static BoosterMethod high(int fc_hz) { return {BoosterKind::HighBooster, fc_hz}; }
  static BoosterMethod all() { return {BoosterKind::AllBooster, 250}; }

  /// The eight methods in canonical order: Original, Low x3, High x3, All.
  static std::array<BoosterMethod, 8> enumerate() {
    return {original(), low(250), low(500), low(1000), high(250), high(500), high(1000), all()};
  }

  [[nodiscard]] constexpr BoosterKind kind() const noexcept { return kind_; }
  [[nodiscard]] constexpr int fc_hz() const noexcept { return fc_hz_; }
  [[nodiscard]] constexpr bool is_original() const noexcept { return kind_ == BoosterKind::Original; }

  /// Position in enumerate(); used as a dense key.
  [[nodiscard]] std::size_t index() const noexcept {
    const std::size_t fc_slot = fc_hz_ == 250 ? 0 : (fc_hz_ == 500 ? 1 : 2);
    switch (kind_) {
    case BoosterKind::Original: return 0;
    case BoosterKind::LowBooster: return 1 + fc_slot;
    case BoosterKind::HighBooster: return 4 + fc_slot;
    case BoosterKind::AllBooster: return 7;
    }
    return 0;
  }

  [[nodiscard]] std::string name() const {
    switch (kind_) {
    case BoosterKind::Original: return "Original";
    case BoosterKind::LowBooster: return "Low" + std::to_string(fc_hz_);
    case BoosterKind::HighBooster: return "High" + std::to_string(fc_hz_);
    case BoosterKind::AllBooster: return "All" + std::to_string(fc_hz_);
    }
    return {};
  }

  /// Kind without the cutoff: "Original", "Low", "High" or "All".
  [[nodiscard]] std::string_view kind_name() const noexcept {
    switch (kind_) {
    case BoosterKind::Original: return "Original";
    case BoosterKind::LowBooster: return "Low";
    case BoosterKind::HighBooster: return "High";
    case BoosterKind::AllBooster: return "All";
    }
    return {};
  }

  static BoosterMethod parse(std::string_view text) {
    if (text == "Original") {
      return original();
    }
    auto with_fc = [&](std::string_view prefix, BoosterKind kind) -> std::optional<BoosterMethod> {
      if (text.substr(0, prefix.size()) != prefix) {
        return std::nullopt;
      }
      const auto digits = std::string(text.substr(prefix.size()));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
        throw ParameterError("malformed booster method '" + std::string(text) + "'");
      }
      return BoosterMethod(kind, std::stoi(digits));
    };
    if (auto m = with_fc("Low", BoosterKind::LowBooster)) return *m;
    if (auto m = with_fc("High", BoosterKind::HighBooster)) return *m;
    if (auto m = with_fc("All", BoosterKind::AllBooster)) return *m;
    throw ParameterError("unknown booster method '" + std::string(text) + "'");
  }

  friend constexpr bool operator==(const BoosterMethod&, const BoosterMethod&) = default;
  friend std::strong_ordering operator<=>(const BoosterMethod& a, const BoosterMethod& b) noexcept {
    return a.index() <=> b.index();
  }

private:
  BoosterKind kind_ = BoosterKind::Original;
  int fc_hz_ = 250;
};

/// Gains (+1 or -1) applied to the low and high bands before they are added.
class BandCoefficients {
public:
  constexpr BandCoefficients() = default;
  BandCoefficients(int low, int high) : low_(low), high_(high) {
    if ((low != 1 && low != -1) || (high != 1 && high != -1)) {
      throw ParameterError("band coefficients must be +1 or -1");
    }
  }

  static BandCoefficients for_method(const BoosterMethod& m) {
    switch (m.kind()) {
    case BoosterKind::Original: return {1, 1};
    case BoosterKind::LowBooster: return {-1, 1};
    case BoosterKind::HighBooster: return {1, -1};
    case BoosterKind::AllBooster: return {-1, -1};
    }
    return {1, 1};
  }

  [[nodiscard]] constexpr int low() const noexcept { return low_; }
  [[nodiscard]] constexpr int high() const noexcept { return high_; }

  friend constexpr bool operator==(const BandCoefficients&, const BandCoefficients&) = default;

private:
  int low_ = 1;
  int high_ = 1;
};

/// Lowpass and its complementary highpass at one cutoff.
struct FilterBank {
  FirFilter lowpass;
  FirFilter highpass;

  static FilterBank design(double fc_hz, int sample_rate_hz = kSampleRateHz, std::size_t taps = kDefaultTaps) {
    auto lpf = design_lowpass_fir(fc_hz, sample_rate_hz, taps);
    auto hpf = derive_complementary_highpass(lpf);
    return FilterBank{std::move(lpf), std::move(hpf)};
  }

  [[nodiscard]] std::size_t delay_samples() const noexcept { return lowpass.group_delay_samples(); }
};

struct Bands {
  AudioBuffer low;
  AudioBuffer high;
};

inline Bands split_bands(const AudioBuffer& input, const FilterBank& bank) {
  return Bands{apply_fir(input, bank.lowpass), apply_fir(input, bank.highpass)};
}

inline AudioBuffer recombine_bands(const AudioBuffer& low, const AudioBuffer& high, BandCoefficients coeffs) {
  if (low.size() != high.size()) {
    throw ParameterError("recombine_bands: band lengths differ (" + std::to_string(low.size()) + " vs " +
                         std::to_string(high.size()) + ")");
  }
  require_same_rate(low, high, "recombine_bands");
  const double cl = coeffs.low();
  const double ch = coeffs.high();
  std::vector<double> out(low.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = cl * low[i] + ch * high[i];
  }
  return AudioBuffer(std::move(out), low.sample_rate_hz());
}

inline AudioBuffer recombine_bands(const Bands& bands, BandCoefficients coeffs) {
  return recombine_bands(bands.low, bands.high, coeffs);
}

/// Band-split both ears at the method's cutoff. The left ear is recombined
/// with the method's coefficients, the right ear always with [1, 1] so both
/// ears carry the same filter delay.
inline StereoBuffer apply_booster(const StereoBuffer& stimulus, const BoosterMethod& method,
                                  std::size_t taps = kDefaultTaps) {
  if (stimulus.sample_rate_hz() != kSampleRateHz) {
    throw ParameterError("apply_booster expects 48 kHz input, got " + std::to_string(stimulus.sample_rate_hz()));
  }
  const auto bank = FilterBank::design(method.fc_hz(), stimulus.sample_rate_hz(), taps);
  auto left = recombine_bands(split_bands(stimulus.left(), bank), BandCoefficients::for_method(method));
  auto right = recombine_bands(split_bands(stimulus.right(), bank), BandCoefficients{1, 1});
  return StereoBuffer(std::move(left), std::move(right));
}

} // namespace booster

#endif
