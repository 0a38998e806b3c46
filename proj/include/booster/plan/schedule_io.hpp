#ifndef BOOSTER_PLAN_SCHEDULE_IO_HPP
#define BOOSTER_PLAN_SCHEDULE_IO_HPP

#include <booster/error.hpp>
#include <booster/plan/condition.hpp>
#include <booster/plan/session_planner.hpp>

#include <json.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace booster {

inline constexpr int kScheduleSchemaVersion = 1;

/// One line of a schedule file. Session 0 is the practice session; scored
/// trials are numbered into sessions 1..3 in presentation order.
struct ScheduledTrial {
  std::string participant;
  std::size_t session_index = 0;
  std::size_t trial_index = 0;
  Condition condition;
  bool scored = false;
  std::size_t tentative_session = 0;
  std::uint64_t seed = 0;

  /// Position in the participant's run (0..35 for a standard plan).
  [[nodiscard]] std::size_t run_position() const noexcept {
    return session_index * kTrialsPerSession + trial_index;
  }
};

inline std::vector<ScheduledTrial> flatten(const ParticipantPlan& plan) {
  std::vector<ScheduledTrial> out;
  for (std::size_t i = 0; i < plan.practice.size(); ++i) {
    out.push_back({plan.participant_id, 0, i, plan.practice[i].condition, false, plan.practice[i].tentative_session,
                   plan.seed});
  }
  for (std::size_t i = 0; i < plan.playlist.size(); ++i) {
    out.push_back({plan.participant_id, 1 + i / kTrialsPerSession, i % kTrialsPerSession, plan.playlist[i].condition,
                   true, plan.playlist[i].tentative_session, plan.seed});
  }
  return out;
}

inline nlohmann::json to_json(const ScheduledTrial& t) {
  return nlohmann::json{{"schema", kScheduleSchemaVersion},
                        {"participant", t.participant},
                        {"session", t.session_index},
                        {"trial", t.trial_index},
                        {"signal", std::string(1, to_char(t.condition.signal))},
                        {"noise", std::string(1, to_char(t.condition.noise))},
                        {"method", std::string(t.condition.method.kind_name())},
                        {"fc", t.condition.method.fc_hz()},
                        {"scored", t.scored},
                        {"tentative_session", t.tentative_session},
                        {"seed", t.seed}};
}

inline Condition condition_from_json(const nlohmann::json& j) {
  const auto kind = j.at("method").get<std::string>();
  const int fc = j.at("fc").get<int>();
  BoosterMethod method;
  if (kind == "Original") method = BoosterMethod(BoosterKind::Original, fc);
  else if (kind == "Low") method = BoosterMethod(BoosterKind::LowBooster, fc);
  else if (kind == "High") method = BoosterMethod(BoosterKind::HighBooster, fc);
  else if (kind == "All") method = BoosterMethod(BoosterKind::AllBooster, fc);
  else throw ParameterError("unknown method '" + kind + "'");
  return Condition{parse_signal_id(j.at("signal").get<std::string>()), parse_noise_id(j.at("noise").get<std::string>()),
                   method};
}

inline nlohmann::json condition_fields(const Condition& c) {
  return {{"signal", std::string(1, to_char(c.signal))},
          {"noise", std::string(1, to_char(c.noise))},
          {"method", std::string(c.method.kind_name())},
          {"fc", c.method.fc_hz()}};
}

inline void write_schedule(std::ostream& os, const Schedule& schedule) {
  for (const auto& plan : schedule.plans) {
    for (const auto& t : flatten(plan)) {
      os << to_json(t).dump() << '\n';
    }
  }
}

/// Per-participant trial lists in run order.
using ParsedSchedule = std::map<std::string, std::vector<ScheduledTrial>>;

/// Parses a schedule written by write_schedule. Each participant's records
/// must be contiguous runs of trial indices 0..n-1 within sessions 0, 1, ...
inline ParsedSchedule read_schedule(std::istream& in) {
  ParsedSchedule out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fail = [&](const std::string& why) {
      return FormatError("schedule line " + std::to_string(line_no) + ": " + why);
    };
    ScheduledTrial t;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("schema").get<int>() != kScheduleSchemaVersion) throw fail("unsupported schema version");
      t.participant = j.at("participant").get<std::string>();
      t.session_index = j.at("session").get<std::size_t>();
      t.trial_index = j.at("trial").get<std::size_t>();
      t.condition = condition_from_json(j);
      t.scored = j.at("scored").get<bool>();
      t.tentative_session = j.value("tentative_session", std::size_t{0});
      t.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    } catch (const ParameterError& e) {
      throw fail(e.what());
    }
    if (t.participant.empty()) throw fail("empty participant id");
    if (t.scored == (t.session_index == 0)) throw fail("session 0 is the unscored practice session");
    auto& trials = out[t.participant];
    if (!trials.empty()) {
      const auto& prev = trials.back();
      const bool next_in_session = t.session_index == prev.session_index && t.trial_index == prev.trial_index + 1;
      const bool next_session = t.session_index == prev.session_index + 1 && t.trial_index == 0;
      if (!next_in_session && !next_session) throw fail("trial out of order for " + t.participant);
    } else if (t.session_index != 0 || t.trial_index != 0) {
      throw fail("first trial of " + t.participant + " must be session 0, trial 0");
    }
    trials.push_back(t);
  }
  if (out.empty()) throw FormatError("schedule is empty");
  return out;
}

} // namespace booster

#endif
