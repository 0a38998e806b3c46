#ifndef BOOSTER_PLAN_CONDITION_HPP
#define BOOSTER_PLAN_CONDITION_HPP

#include <booster/dsp/booster.hpp>
#include <booster/error.hpp>

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace booster {

enum class SignalId { A, B, C };
enum class NoiseId { A, B, C };

inline constexpr std::array<SignalId, 3> kSignals{SignalId::A, SignalId::B, SignalId::C};
inline constexpr std::array<NoiseId, 3> kNoises{NoiseId::A, NoiseId::B, NoiseId::C};

inline char to_char(SignalId s) { return static_cast<char>('A' + static_cast<int>(s)); }
inline char to_char(NoiseId n) { return static_cast<char>('A' + static_cast<int>(n)); }

inline SignalId parse_signal_id(std::string_view text) {
  if (text == "A") return SignalId::A;
  if (text == "B") return SignalId::B;
  if (text == "C") return SignalId::C;
  throw ParameterError("unknown signal id '" + std::string(text) + "'");
}

inline NoiseId parse_noise_id(std::string_view text) {
  if (text == "A") return NoiseId::A;
  if (text == "B") return NoiseId::B;
  if (text == "C") return NoiseId::C;
  throw ParameterError("unknown noise id '" + std::string(text) + "'");
}

/// One cell of the 3 x 3 x 8 grid.
struct Condition {
  SignalId signal = SignalId::A;
  NoiseId noise = NoiseId::A;
  BoosterMethod method;

  /// Row of the (signal, noise) pair, 0..8.
  [[nodiscard]] std::size_t pair_index() const noexcept {
    return static_cast<std::size_t>(signal) * 3 + static_cast<std::size_t>(noise);
  }
  /// Position in enumerate_conditions(), 0..71.
  [[nodiscard]] std::size_t index() const noexcept { return pair_index() * 8 + method.index(); }

  [[nodiscard]] bool is_dummy() const noexcept { return method.is_original(); }

  [[nodiscard]] std::string label() const {
    return std::string("S") + to_char(signal) + "/N" + to_char(noise) + "/" + method.name();
  }

  friend bool operator==(const Condition&, const Condition&) = default;
  friend std::strong_ordering operator<=>(const Condition& a, const Condition& b) noexcept {
    return a.index() <=> b.index();
  }
};

inline constexpr std::size_t kConditionCount = 72;
inline constexpr std::size_t kPairCount = 9;
inline constexpr std::size_t kMethodCount = 8;

/// All 72 conditions ordered by signal, then noise, then method.
inline std::vector<Condition> enumerate_conditions() {
  std::vector<Condition> out;
  out.reserve(kConditionCount);
  for (auto s : kSignals) {
    for (auto n : kNoises) {
      for (const auto& m : BoosterMethod::enumerate()) {
        out.push_back(Condition{s, n, m});
      }
    }
  }
  return out;
}

} // namespace booster

#endif
