#ifndef BOOSTER_STATS_SCREENING_HPP
#define BOOSTER_STATS_SCREENING_HPP

#include <booster/error.hpp>
#include <booster/trial_record.hpp>

#include <cstdlib>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace booster::stats {

inline constexpr int kDefaultExclusionThresholdDb = 5;
inline constexpr std::size_t kMinDummyTrials = 3;

/// Dummy-trial adjustments per participant, in presentation order.
using DummyTable = std::map<std::string, std::vector<int>>;

struct ScreeningOutcome {
  std::set<std::string> excluded;
  DummyTable dummy_adjustments;

  [[nodiscard]] bool is_excluded(const std::string& participant) const { return excluded.contains(participant); }
};

/// Excludes every participant with at least one Dummy adjustment whose
/// magnitude reaches threshold_db.
inline ScreeningOutcome screen_participants(const DummyTable& dummies,
                                            int threshold_db = kDefaultExclusionThresholdDb,
                                            std::size_t min_dummy_trials = kMinDummyTrials) {
  ScreeningOutcome out;
  out.dummy_adjustments = dummies;
  for (const auto& [participant, adjustments] : dummies) {
    if (adjustments.empty()) {
      throw ScreeningError("participant " + participant + " has no dummy trials");
    }
    if (adjustments.size() < min_dummy_trials) {
      throw ScreeningError("participant " + participant + " has " + std::to_string(adjustments.size()) +
                           " dummy trials, need at least " + std::to_string(min_dummy_trials));
    }
    for (int a : adjustments) {
      if (std::abs(a) >= threshold_db) {
        out.excluded.insert(participant);
        break;
      }
    }
  }
  return out;
}

/// Screens from trial records. Every participant appearing in the scored
/// records must have Dummy (Original) trials among them.
inline ScreeningOutcome screen_participants(std::span<const TrialRecord> records,
                                            int threshold_db = kDefaultExclusionThresholdDb,
                                            std::size_t min_dummy_trials = kMinDummyTrials) {
  DummyTable table;
  for (const auto& r : records) {
    if (!r.scored) continue;
    auto& row = table[r.participant_id];
    if (r.condition.is_dummy()) row.push_back(r.bhld_db);
  }
  return screen_participants(table, threshold_db, min_dummy_trials);
}

/// Scored records of participants that were not excluded.
inline std::vector<TrialRecord> retained_records(std::span<const TrialRecord> records,
                                                 const ScreeningOutcome& screening) {
  std::vector<TrialRecord> out;
  for (const auto& r : records) {
    if (r.scored && !screening.is_excluded(r.participant_id)) out.push_back(r);
  }
  return out;
}

} // namespace booster::stats

#endif
