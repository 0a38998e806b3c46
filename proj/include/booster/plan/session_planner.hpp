#ifndef BOOSTER_PLAN_SESSION_PLANNER_HPP
#define BOOSTER_PLAN_SESSION_PLANNER_HPP

#include <booster/error.hpp>
#include <booster/plan/condition.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace booster {

inline constexpr std::size_t kSessionsPerBlock = 8;
inline constexpr std::size_t kTrialsPerSession = 9;
inline constexpr std::size_t kScoredSessionsPerParticipant = 3;

/// Unbiased index in [0, n) by rejection; keeps results independent of the
/// standard library's distribution implementations.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

/// Fisher-Yates with uniform_index.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

/// splitmix64 step; derives independent child seeds from one parent.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t salt) {
  std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Nine trials: every (signal, noise) pair once, all eight methods, one of
/// them twice.
struct TentativeSession {
  std::vector<Condition> trials;

  /// Empty string when the session satisfies its invariants, otherwise the
  /// first violation.
  [[nodiscard]] std::string violation() const {
    if (trials.size() != kTrialsPerSession) {
      return "session has " + std::to_string(trials.size()) + " trials, expected 9";
    }
    std::set<std::size_t> pairs;
    std::set<std::size_t> methods;
    for (const auto& c : trials) {
      pairs.insert(c.pair_index());
      methods.insert(c.method.index());
    }
    if (pairs.size() != kPairCount) return "session repeats a (signal, noise) pair";
    if (methods.size() != kMethodCount) return "session does not contain all eight methods";
    return {};
  }

  [[nodiscard]] std::size_t dummy_count() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const Condition& c) { return c.is_dummy(); }));
  }
};

using TentativeBlock = std::array<TentativeSession, kSessionsPerBlock>;

/// Eight sessions covering all 72 conditions once. Each (signal, noise) row
/// walks a shared random method order with its own cyclic offset; the nine
/// offsets are the eight residues plus one random repeat, so every session
/// sees all eight methods and exactly one of them twice.
inline TentativeBlock build_tentative_block(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto all_methods = BoosterMethod::enumerate();
  std::vector<BoosterMethod> order(all_methods.begin(), all_methods.end());
  seeded_shuffle(order, rng);

  std::vector<std::size_t> offsets(kMethodCount);
  std::iota(offsets.begin(), offsets.end(), 0);
  offsets.push_back(uniform_index(rng, kMethodCount));
  seeded_shuffle(offsets, rng);

  TentativeBlock block;
  for (std::size_t k = 0; k < kSessionsPerBlock; ++k) {
    auto& session = block[k];
    session.trials.reserve(kTrialsPerSession);
    for (std::size_t row = 0; row < kPairCount; ++row) {
      const auto signal = kSignals[row / 3];
      const auto noise = kNoises[row % 3];
      session.trials.push_back(Condition{signal, noise, order[(k + offsets[row]) % kMethodCount]});
    }
  }
  return block;
}

/// A trial in a participant's run, with where it came from.
struct PlannedTrial {
  Condition condition;
  std::size_t tentative_session = 0;
};

/// Practice session followed by 27 scored trials in random order.
struct ParticipantPlan {
  std::string participant_id;
  std::size_t practice_session = 0;
  std::array<std::size_t, kScoredSessionsPerParticipant> sessions{};
  std::vector<PlannedTrial> practice;  // unscored
  std::vector<PlannedTrial> playlist;  // scored, presentation order
  std::uint64_t seed = 0;
};

/// Shuffles the three assigned sessions into one 27-trial playlist. The
/// practice session is an unassigned session of the same block (chosen with
/// the seed unless given), also shuffled.
inline ParticipantPlan build_participant_plan(const std::string& participant_id, const TentativeBlock& block,
                                              const std::array<std::size_t, kScoredSessionsPerParticipant>& which,
                                              std::uint64_t seed, std::optional<std::size_t> practice = std::nullopt) {
  std::set<std::size_t> distinct(which.begin(), which.end());
  if (distinct.size() != which.size()) {
    throw ParameterError("participant " + participant_id + ": session indices must be distinct");
  }
  for (auto i : which) {
    if (i >= kSessionsPerBlock) {
      throw ParameterError("participant " + participant_id + ": session index " + std::to_string(i) + " out of range");
    }
  }
  std::mt19937_64 rng(seed);

  std::vector<std::size_t> unassigned;
  for (std::size_t i = 0; i < kSessionsPerBlock; ++i) {
    if (!distinct.contains(i)) unassigned.push_back(i);
  }
  const std::size_t practice_index = practice ? *practice : unassigned[uniform_index(rng, unassigned.size())];
  if (practice_index >= kSessionsPerBlock || distinct.contains(practice_index)) {
    throw ParameterError("participant " + participant_id + ": practice session must be an unassigned session");
  }

  ParticipantPlan plan;
  plan.participant_id = participant_id;
  plan.practice_session = practice_index;
  plan.sessions = which;
  plan.seed = seed;
  for (const auto& c : block[practice_index].trials) plan.practice.push_back({c, practice_index});
  seeded_shuffle(plan.practice, rng);
  for (auto s : which) {
    for (const auto& c : block[s].trials) plan.playlist.push_back({c, s});
  }
  seeded_shuffle(plan.playlist, rng);
  return plan;
}

/// Which three tentative sessions each participant receives.
struct AssignmentTable {
  std::vector<std::string> participants;
  std::vector<std::array<std::size_t, kScoredSessionsPerParticipant>> sessions;

  /// Participant p gets sessions 3p, 3p+1, 3p+2 (mod 8). Sixteen
  /// participants use every session six times.
  static AssignmentTable rotation(std::size_t participant_count) {
    AssignmentTable t;
    for (std::size_t p = 0; p < participant_count; ++p) {
      t.participants.push_back("P" + std::to_string(p + 1));
      std::array<std::size_t, 3> s{};
      for (std::size_t j = 0; j < 3; ++j) s[j] = (3 * p + j) % kSessionsPerBlock;
      t.sessions.push_back(s);
    }
    return t;
  }

  /// Lines of `participant s1 s2 s3`; `#` starts a comment.
  static AssignmentTable parse(std::istream& in) {
    AssignmentTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string id;
      if (!(fields >> id)) continue;
      std::array<std::size_t, 3> s{};
      for (auto& v : s) {
        long long x;
        if (!(fields >> x) || x < 0) {
          throw FormatError("assignment line " + std::to_string(line_no) + ": expected three session indices");
        }
        v = static_cast<std::size_t>(x);
      }
      std::string extra;
      if (fields >> extra) throw FormatError("assignment line " + std::to_string(line_no) + ": trailing fields");
      if (std::find(t.participants.begin(), t.participants.end(), id) != t.participants.end()) {
        throw FormatError("assignment line " + std::to_string(line_no) + ": duplicate participant " + id);
      }
      t.participants.push_back(id);
      t.sessions.push_back(s);
    }
    return t;
  }

  /// How many times each tentative session is used.
  [[nodiscard]] std::array<std::size_t, kSessionsPerBlock> usage() const {
    std::array<std::size_t, kSessionsPerBlock> u{};
    for (const auto& s : sessions)
      for (auto i : s)
        if (i < kSessionsPerBlock) ++u[i];
    return u;
  }
};

/// One block shared by every participant; per-participant seeds derive from
/// the block seed.
struct Schedule {
  std::uint64_t block_seed = 0;
  TentativeBlock block;
  std::vector<ParticipantPlan> plans;

  [[nodiscard]] const ParticipantPlan* find(const std::string& participant) const {
    for (const auto& p : plans)
      if (p.participant_id == participant) return &p;
    return nullptr;
  }

  /// Scheduled scored trials per condition index.
  [[nodiscard]] std::array<std::size_t, kConditionCount> condition_counts() const {
    std::array<std::size_t, kConditionCount> counts{};
    for (const auto& p : plans)
      for (const auto& t : p.playlist) ++counts[t.condition.index()];
    return counts;
  }
};

inline Schedule build_schedule(std::uint64_t block_seed, const AssignmentTable& assignment) {
  Schedule s;
  s.block_seed = block_seed;
  s.block = build_tentative_block(block_seed);
  for (std::size_t p = 0; p < assignment.participants.size(); ++p) {
    s.plans.push_back(build_participant_plan(assignment.participants[p], s.block, assignment.sessions[p],
                                             derive_seed(block_seed, p)));
  }
  return s;
}

} // namespace booster

#endif
