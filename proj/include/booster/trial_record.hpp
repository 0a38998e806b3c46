#ifndef BOOSTER_TRIAL_RECORD_HPP
#define BOOSTER_TRIAL_RECORD_HPP

#include <booster/error.hpp>
#include <booster/plan/condition.hpp>
#include <booster/plan/schedule_io.hpp>

#include <json.hpp>

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace booster {

inline constexpr int kTrialLogSchemaVersion = 1;

/// One committed comparison. bhld_db is the final variable gain minus the
/// starting one (always 0), in whole dB.
struct TrialRecord {
  std::string participant_id;
  std::size_t session_index = 0;
  std::size_t trial_index = 0;
  std::size_t run_position = 0;
  bool scored = false;
  Condition condition;
  std::size_t tentative_session = 0;
  std::uint64_t seed = 0;
  double initial_gain_db = 0.0;
  int final_variable_gain_db = 0;
  int bhld_db = 0;
  std::size_t playback_count_a = 0;
  std::size_t playback_count_b = 0;
  std::size_t clip_count = 0;
  std::string started_at;
  std::string committed_at;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j{{"schema", kTrialLogSchemaVersion},
                   {"participant", r.participant_id},
                   {"session", r.session_index},
                   {"trial", r.trial_index},
                   {"position", r.run_position},
                   {"scored", r.scored}};
  j.update(condition_fields(r.condition));
  j.update(nlohmann::json{{"tentative_session", r.tentative_session},
                          {"seed", r.seed},
                          {"initial_gain_db", r.initial_gain_db},
                          {"final_variable_gain_db", r.final_variable_gain_db},
                          {"bhld_db", r.bhld_db},
                          {"playback_count_a", r.playback_count_a},
                          {"playback_count_b", r.playback_count_b},
                          {"clip_count", r.clip_count},
                          {"started_at", r.started_at},
                          {"committed_at", r.committed_at}});
  return j;
}

inline TrialRecord trial_record_from_json(const nlohmann::json& j) {
  if (j.at("schema").get<int>() != kTrialLogSchemaVersion) {
    throw FormatError("unsupported trial log schema version " + j.at("schema").dump());
  }
  TrialRecord r;
  r.participant_id = j.at("participant").get<std::string>();
  r.session_index = j.at("session").get<std::size_t>();
  r.trial_index = j.at("trial").get<std::size_t>();
  r.run_position = j.at("position").get<std::size_t>();
  r.scored = j.at("scored").get<bool>();
  r.condition = condition_from_json(j);
  r.tentative_session = j.value("tentative_session", std::size_t{0});
  r.seed = j.value("seed", std::uint64_t{0});
  r.initial_gain_db = j.at("initial_gain_db").get<double>();
  r.final_variable_gain_db = j.at("final_variable_gain_db").get<int>();
  r.bhld_db = j.at("bhld_db").get<int>();
  r.playback_count_a = j.value("playback_count_a", std::size_t{0});
  r.playback_count_b = j.value("playback_count_b", std::size_t{0});
  r.clip_count = j.value("clip_count", std::size_t{0});
  r.started_at = j.value("started_at", std::string{});
  r.committed_at = j.value("committed_at", std::string{});
  return r;
}

/// Reads a line-delimited trial log. A torn final line (crash mid-append)
/// is ignored; any other malformed line is an error.
inline std::vector<TrialRecord> read_trial_log(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  int line_no = 0;
  std::string pending_error;
  while (std::getline(in, line)) {
    ++line_no;
    if (!pending_error.empty()) throw FormatError(pending_error);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trial_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      pending_error = "trial log line " + std::to_string(line_no) + ": " + e.what();
      if (in.eof()) break;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("trial log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParameterError& e) {
      throw FormatError("trial log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

} // namespace booster

#endif
