#ifndef BOOSTER_STIMULUS_GAIN_TABLE_HPP
#define BOOSTER_STIMULUS_GAIN_TABLE_HPP

#include <booster/error.hpp>
#include <booster/plan/condition.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace booster {

/// Initial speech gain per (signal, noise) pair, relative to the
/// RMS-aligned speech.
class GainTable {
public:
  /// The values listeners started from (minimum perceptible speech level).
  static GainTable defaults() {
    GainTable t;
    t.set(SignalId::A, NoiseId::A, -21.2);
    t.set(SignalId::A, NoiseId::B, -27.7);
    t.set(SignalId::A, NoiseId::C, -17.1);
    t.set(SignalId::B, NoiseId::A, -22.6);
    t.set(SignalId::B, NoiseId::B, -30.5);
    t.set(SignalId::B, NoiseId::C, -21.1);
    t.set(SignalId::C, NoiseId::A, -19.7);
    t.set(SignalId::C, NoiseId::B, -22.1);
    t.set(SignalId::C, NoiseId::C, -20.0);
    return t;
  }

  void set(SignalId s, NoiseId n, double gain_db) {
    if (!std::isfinite(gain_db)) {
      throw ParameterError("gain table values must be finite");
    }
    gains_[slot(s, n)] = gain_db;
  }

  [[nodiscard]] bool contains(SignalId s, NoiseId n) const noexcept { return gains_[slot(s, n)].has_value(); }

  [[nodiscard]] double at(SignalId s, NoiseId n) const {
    const auto& v = gains_[slot(s, n)];
    if (!v) {
      throw ParameterError(std::string("gain table has no entry for ") + to_char(s) + "." + to_char(n));
    }
    return *v;
  }

  [[nodiscard]] bool complete() const noexcept {
    for (const auto& g : gains_) {
      if (!g) return false;
    }
    return true;
  }

  /// Parses `signal.noise = dB` lines, e.g. `B.C = -21.1`. Blank lines and
  /// `#` comments are ignored. Every pair must be present.
  static GainTable parse(std::istream& in) {
    GainTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      const auto trimmed = trim(line);
      if (trimmed.empty()) {
        continue;
      }
      const auto eq = trimmed.find('=');
      const auto fail = [&](const std::string& why) {
        return FormatError("gain table line " + std::to_string(line_no) + ": " + why);
      };
      if (eq == std::string::npos) throw fail("expected 'signal.noise = dB'");
      const auto key = trim(trimmed.substr(0, eq));
      const auto value = trim(trimmed.substr(eq + 1));
      if (key.size() != 3 || key[1] != '.') throw fail("malformed key '" + key + "'");
      SignalId s;
      NoiseId n;
      try {
        s = parse_signal_id(key.substr(0, 1));
        n = parse_noise_id(key.substr(2, 1));
      } catch (const ParameterError& e) {
        throw fail(e.what());
      }
      double db = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), db);
      if (ec != std::errc() || ptr != value.data() + value.size()) throw fail("malformed value '" + value + "'");
      if (t.contains(s, n)) throw fail("duplicate key '" + key + "'");
      t.set(s, n, db);
    }
    if (!t.complete()) {
      throw FormatError("gain table is missing one or more of the 9 signal.noise pairs");
    }
    return t;
  }

  static GainTable parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  void write(std::ostream& os) const {
    os << "# initial speech gain in dB, keyed signal.noise\n";
    for (auto s : kSignals) {
      for (auto n : kNoises) {
        if (contains(s, n)) {
          os << to_char(s) << '.' << to_char(n) << " = " << at(s, n) << '\n';
        }
      }
    }
  }

private:
  static std::size_t slot(SignalId s, NoiseId n) noexcept {
    return static_cast<std::size_t>(s) * 3 + static_cast<std::size_t>(n);
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::array<std::optional<double>, 9> gains_{};
};

} // namespace booster

#endif
