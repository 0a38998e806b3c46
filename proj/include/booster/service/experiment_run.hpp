#ifndef BOOSTER_SERVICE_EXPERIMENT_RUN_HPP
#define BOOSTER_SERVICE_EXPERIMENT_RUN_HPP

#include <booster/error.hpp>
#include <booster/io/wav.hpp>
#include <booster/plan/schedule_io.hpp>
#include <booster/service/trial_log.hpp>
#include <booster/stimulus/gain_table.hpp>
#include <booster/stimulus/prepare.hpp>
#include <booster/stimulus/render.hpp>
#include <booster/trial_record.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace booster {

inline constexpr int kDefaultGainClampDb = 30;

enum class Phase { Idle, PlayingA, PlayingB, Stopped };
enum class Which { A, B };

inline std::string_view to_string(Phase p) {
  switch (p) {
  case Phase::Idle: return "idle";
  case Phase::PlayingA: return "playing_a";
  case Phase::PlayingB: return "playing_b";
  case Phase::Stopped: return "stopped";
  }
  return "idle";
}

inline Which parse_which(std::string_view s) {
  if (s == "A" || s == "a") return Which::A;
  if (s == "B" || s == "b") return Which::B;
  throw ParameterError("which must be A or B, got '" + std::string(s) + "'");
}

using Clock = std::function<std::chrono::system_clock::time_point()>;

inline Clock system_clock() {
  return [] { return std::chrono::system_clock::now(); };
}

/// UTC, millisecond resolution: 2024-05-01T12:00:00.250Z
inline std::string format_timestamp(std::chrono::system_clock::time_point tp) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(tp.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(tp);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &utc);
  char out[48];
  std::snprintf(out, sizeof out, "%.*s.%03dZ", static_cast<int>(n), buf, static_cast<int>(ms < 0 ? ms + 1000 : ms));
  return out;
}

/// Aligned stimuli plus the initial gains; shared read-only by all runs.
/// Each speech signal is split once per cutoff up front so loading a trial
/// costs only a recombination and two mixes.
struct StimulusLibrary {
  PreparedStimuli stimuli;
  GainTable gains = GainTable::defaults();
  std::size_t taps = kDefaultTaps;
  std::map<std::pair<SignalId, int>, Bands> bands;

  [[nodiscard]] const Bands& split(SignalId s, int fc_hz) const {
    const auto it = bands.find({s, fc_hz});
    if (it == bands.end()) throw ParameterError("no band split for this signal and cutoff");
    return it->second;
  }
};

inline std::shared_ptr<const StimulusLibrary> make_library(PreparedStimuli stimuli,
                                                           GainTable gains = GainTable::defaults(),
                                                           std::size_t taps = kDefaultTaps) {
  if (!gains.complete()) throw ParameterError("gain table must cover all nine signal/noise pairs");
  auto lib = std::make_shared<StimulusLibrary>();
  lib->stimuli = std::move(stimuli);
  lib->gains = std::move(gains);
  lib->taps = taps;
  for (int fc : kCutoffsHz) {
    const auto bank = FilterBank::design(fc, kSampleRateHz, taps);
    for (auto s : {SignalId::A, SignalId::B, SignalId::C}) {
      lib->bands.emplace(std::pair{s, fc}, split_bands(lib->stimuli.signal(s), bank));
    }
  }
  return lib;
}

struct RunConfig {
  int clamp_db = kDefaultGainClampDb;
  bool loop_playback = false;
};

struct GainStep {
  int variable_gain_db = 0;
  bool clamped = false;
};

struct Progress {
  std::size_t committed = 0;
  std::size_t total = 0;
  std::size_t scored_committed = 0;
  bool complete = false;
};

/// What the listener may see about the current trial. Carries no condition
/// information.
struct TrialView {
  std::string participant;
  std::size_t number = 0;  // 1-based "No." counter over the whole run
  std::size_t total = 0;
  std::size_t session_index = 0;
  std::size_t trial_index = 0;
  bool practice = false;
  int variable_gain_db = 0;
  Phase phase = Phase::Idle;
  bool complete = false;
  bool loop_playback = false;
};

/// Comparable run state; a run rebuilt from its log must equal the live one.
struct RunSnapshot {
  std::string participant;
  std::size_t cursor = 0;
  int variable_gain_db = 0;
  Phase phase = Phase::Idle;
  std::vector<TrialRecord> committed;

  friend bool operator==(const RunSnapshot&, const RunSnapshot&) = default;
};

using WavBytes = std::shared_ptr<const std::vector<std::uint8_t>>;

/// One participant's run through a schedule. All operations are serialized
/// on an internal mutex; returned audio is immutable and may be streamed
/// after the call returns.
class ExperimentRun {
public:
  ExperimentRun(std::string participant, std::vector<ScheduledTrial> trials,
                std::shared_ptr<const StimulusLibrary> library, TrialSink& sink, RunConfig config = {},
                Clock clock = system_clock())
      : participant_(std::move(participant)), trials_(std::move(trials)), library_(std::move(library)), sink_(sink),
        config_(config), clock_(std::move(clock)) {
    if (trials_.empty()) throw ParameterError("run for " + participant_ + " has no trials");
    if (config_.clamp_db < 1) throw ParameterError("gain clamp must be at least 1 dB");
    replay();
    load_trial();
  }

  [[nodiscard]] const std::string& participant() const noexcept { return participant_; }

  [[nodiscard]] bool complete() const {
    const std::lock_guard lock(mutex_);
    return cursor_ >= trials_.size();
  }

  [[nodiscard]] TrialView view() const {
    const std::lock_guard lock(mutex_);
    TrialView v;
    v.participant = participant_;
    v.total = trials_.size();
    v.complete = cursor_ >= trials_.size();
    v.number = v.complete ? trials_.size() : cursor_ + 1;
    if (!v.complete) {
      v.session_index = trials_[cursor_].session_index;
      v.trial_index = trials_[cursor_].trial_index;
      v.practice = !trials_[cursor_].scored;
    }
    v.variable_gain_db = gain_db_;
    v.phase = phase_;
    v.loop_playback = config_.loop_playback;
    return v;
  }

  [[nodiscard]] Progress progress() const {
    const std::lock_guard lock(mutex_);
    Progress p;
    p.committed = committed_.size();
    p.total = trials_.size();
    for (const auto& r : committed_) p.scored_committed += r.scored ? 1 : 0;
    p.complete = cursor_ >= trials_.size();
    return p;
  }

  [[nodiscard]] RunSnapshot snapshot() const {
    const std::lock_guard lock(mutex_);
    return RunSnapshot{participant_, cursor_, gain_db_, phase_, committed_};
  }

  /// 48 kHz stereo 16-bit WAV of Sound A (at the current variable gain) or
  /// Sound B (fixed). Each request restarts playback of that sound.
  WavBytes request_audio(Which which) {
    const std::lock_guard lock(mutex_);
    require_active("request audio");
    if (which == Which::A) {
      ++playback_a_;
      phase_ = Phase::PlayingA;
      return rendered_a(gain_db_).bytes;
    }
    ++playback_b_;
    phase_ = Phase::PlayingB;
    return sound_b_.bytes;
  }

  /// Steps Sound A's speech by +/-1 dB. At the clamp the step is refused and
  /// flagged.
  GainStep adjust_gain(int delta_db) {
    const std::lock_guard lock(mutex_);
    require_active("adjust gain");
    if (delta_db != 1 && delta_db != -1) {
      throw ParameterError("gain delta must be +1 or -1 dB, got " + std::to_string(delta_db));
    }
    const int next = gain_db_ + delta_db;
    if (next > config_.clamp_db || next < -config_.clamp_db) return {gain_db_, true};
    gain_db_ = next;
    return {gain_db_, false};
  }

  void stop_playback() {
    const std::lock_guard lock(mutex_);
    if (phase_ == Phase::PlayingA || phase_ == Phase::PlayingB) phase_ = Phase::Stopped;
  }

  /// Records the current adjustment and loads the next trial. If the log
  /// write fails nothing changes and the StorageError propagates.
  TrialRecord commit_trial() {
    const std::lock_guard lock(mutex_);
    require_active("commit");
    const auto& t = trials_[cursor_];
    TrialRecord r;
    r.participant_id = participant_;
    r.session_index = t.session_index;
    r.trial_index = t.trial_index;
    r.run_position = cursor_;
    r.scored = t.scored;
    r.condition = t.condition;
    r.tentative_session = t.tentative_session;
    r.seed = t.seed;
    r.initial_gain_db = renderer_->initial_gain_db();
    r.final_variable_gain_db = gain_db_;
    r.bhld_db = gain_db_;  // adjustment always starts from 0
    r.playback_count_a = playback_a_;
    r.playback_count_b = playback_b_;
    r.clip_count = rendered_a(gain_db_).clip_count + sound_b_.clip_count;
    r.started_at = started_at_;
    r.committed_at = format_timestamp(clock_());
    sink_.append(r);
    committed_.push_back(r);
    ++cursor_;
    load_trial();
    return r;
  }

private:
  struct Rendered {
    WavBytes bytes;
    std::size_t clip_count = 0;
  };

  static Rendered encode(const RenderedSound& s) {
    return {std::make_shared<const std::vector<std::uint8_t>>(wav::encode_pcm16(s.audio)), s.clip_count};
  }

  void require_active(const char* what) const {
    if (cursor_ >= trials_.size()) throw RunStateError(std::string("cannot ") + what + ": run is complete");
  }

  /// Rebuilds the committed prefix from the log. Records must match the
  /// schedule position by position.
  void replay() {
    for (auto& r : sink_.records()) {
      if (r.participant_id != participant_) continue;
      if (committed_.size() >= trials_.size()) {
        throw FormatError("trial log has more records for " + participant_ + " than the schedule");
      }
      const auto& t = trials_[committed_.size()];
      if (r.run_position != committed_.size() || r.session_index != t.session_index ||
          r.trial_index != t.trial_index || !(r.condition == t.condition)) {
        throw FormatError("trial log for " + participant_ + " diverges from the schedule at position " +
                          std::to_string(committed_.size()));
      }
      committed_.push_back(std::move(r));
    }
    cursor_ = committed_.size();
  }

  /// Splits the speech and pre-renders Sound B and Sound A at gain 0.
  void load_trial() {
    gain_db_ = 0;
    phase_ = Phase::Idle;
    playback_a_ = 0;
    playback_b_ = 0;
    cache_a_.clear();
    renderer_.reset();
    if (cursor_ >= trials_.size()) return;
    const auto& c = trials_[cursor_].condition;
    renderer_ = std::make_unique<TrialRenderer>(library_->split(c.signal, c.method.fc_hz()),
                                                library_->stimuli.noise(c.noise), c, library_->gains);
    sound_b_ = encode(renderer_->sound_b());
    rendered_a(0);
    started_at_ = format_timestamp(clock_());
  }

  const Rendered& rendered_a(int gain_db) {
    auto it = cache_a_.find(gain_db);
    if (it == cache_a_.end()) it = cache_a_.emplace(gain_db, encode(renderer_->sound_a(gain_db))).first;
    return it->second;
  }

  std::string participant_;
  std::vector<ScheduledTrial> trials_;
  std::shared_ptr<const StimulusLibrary> library_;
  TrialSink& sink_;
  RunConfig config_;
  Clock clock_;

  mutable std::mutex mutex_;
  std::size_t cursor_ = 0;
  int gain_db_ = 0;
  Phase phase_ = Phase::Idle;
  std::size_t playback_a_ = 0;
  std::size_t playback_b_ = 0;
  std::string started_at_;
  std::vector<TrialRecord> committed_;
  std::unique_ptr<TrialRenderer> renderer_;
  Rendered sound_b_;
  std::map<int, Rendered> cache_a_;
};

/// All runs served by one process. Runs for different participants are
/// independent; starting an already active run returns it unchanged.
class Experiment {
public:
  Experiment(ParsedSchedule schedule, std::shared_ptr<const StimulusLibrary> library, TrialSink& sink,
             RunConfig config = {}, Clock clock = system_clock())
      : schedule_(std::move(schedule)), library_(std::move(library)), sink_(sink), config_(config),
        clock_(std::move(clock)) {}

  [[nodiscard]] const RunConfig& config() const noexcept { return config_; }

  ExperimentRun& start_run(const std::string& participant) {
    const std::lock_guard lock(mutex_);
    if (auto it = runs_.find(participant); it != runs_.end()) {
      current_ = participant;
      return *it->second;
    }
    const auto plan = schedule_.find(participant);
    if (plan == schedule_.end()) throw ParameterError("participant " + participant + " is not in the schedule");
    auto run = std::make_unique<ExperimentRun>(participant, plan->second, library_, sink_, config_, clock_);
    auto& ref = *run;
    runs_.emplace(participant, std::move(run));
    current_ = participant;
    return ref;
  }

  /// The named run, or the most recently started one when no name is given.
  ExperimentRun& run(const std::optional<std::string>& participant = std::nullopt) {
    const std::lock_guard lock(mutex_);
    const std::string& id = participant.value_or(current_);
    const auto it = runs_.find(id);
    if (it == runs_.end()) {
      throw RunStateError(id.empty() ? std::string("no active run") : "no active run for " + id);
    }
    return *it->second;
  }

private:
  ParsedSchedule schedule_;
  std::shared_ptr<const StimulusLibrary> library_;
  TrialSink& sink_;
  RunConfig config_;
  Clock clock_;

  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<ExperimentRun>> runs_;
  std::string current_;
};

} // namespace booster

#endif
