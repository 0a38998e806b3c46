#include <booster/io/wav.hpp>
#include <booster/service/experiment_run.hpp>
#include <booster/service/http_api.hpp>
#include <booster/service/trial_log.hpp>

#include "service_fixture.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace booster;
using testing::fixture_library;
using testing::fixture_schedule;
using testing::ticking_clock;

namespace {

const ParsedSchedule& schedule() {
  static const auto s = fixture_schedule();
  return s;
}

ExperimentRun make_run(TrialSink& sink, const std::string& who = "P1", RunConfig cfg = {}) {
  return ExperimentRun(who, schedule().at(who), fixture_library(), sink, cfg, ticking_clock());
}

/// Commits until the current trial satisfies pred; returns its position.
template <class Pred>
std::size_t advance_until(ExperimentRun& run, const std::vector<ScheduledTrial>& trials, Pred pred) {
  std::size_t pos = run.snapshot().cursor;
  while (!pred(trials.at(pos))) {
    run.commit_trial();
    ++pos;
  }
  return pos;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("start_run", "[service]") {
  MemoryTrialLog log;
  SECTION("fresh run has 9 practice and 27 scored trials") {
    auto run = make_run(log);
    const auto v = run.view();
    CHECK(v.total == 36);
    CHECK(v.number == 1);
    CHECK(v.practice);
    CHECK(v.variable_gain_db == 0);
    CHECK(v.phase == Phase::Idle);
    const auto& trials = schedule().at("P1");
    CHECK(std::count_if(trials.begin(), trials.end(), [](const auto& t) { return !t.scored; }) == 9);
  }
  SECTION("unknown participant") {
    Experiment exp(schedule(), fixture_library(), log);
    CHECK_THROWS_AS(exp.start_run("P99"), ParameterError);
    CHECK_THROWS_AS(exp.run(), RunStateError);
  }
  SECTION("starting an active run again returns it unchanged") {
    Experiment exp(schedule(), fixture_library(), log);
    auto& a = exp.start_run("P2");
    a.adjust_gain(1);
    auto& b = exp.start_run("P2");
    CHECK(&a == &b);
    CHECK(b.view().variable_gain_db == 1);
    CHECK(&exp.run() == &a);
  }
}

TEST_CASE("adjust_gain", "[service]") {
  MemoryTrialLog log;
  auto run = make_run(log);
  SECTION("three up, one down") {
    run.adjust_gain(1);
    run.adjust_gain(1);
    run.adjust_gain(1);
    const auto step = run.adjust_gain(-1);
    CHECK(step.variable_gain_db == 2);
    CHECK_FALSE(step.clamped);
  }
  SECTION("31 increments stop at the clamp") {
    GainStep step;
    for (int i = 0; i < 30; ++i) {
      step = run.adjust_gain(1);
      CHECK_FALSE(step.clamped);
    }
    step = run.adjust_gain(1);
    CHECK(step.variable_gain_db == 30);
    CHECK(step.clamped);
    CHECK(run.view().variable_gain_db == 30);
  }
  SECTION("lower clamp and configurable bound") {
    auto narrow = make_run(log, "P3", RunConfig{2, false});
    narrow.adjust_gain(-1);
    narrow.adjust_gain(-1);
    CHECK(narrow.adjust_gain(-1).clamped);
    CHECK(narrow.view().variable_gain_db == -2);
  }
  SECTION("only single-dB steps") {
    CHECK_THROWS_AS(run.adjust_gain(2), ParameterError);
    CHECK_THROWS_AS(run.adjust_gain(0), ParameterError);
  }
}

TEST_CASE("request_audio", "[service]") {
  MemoryTrialLog log;
  auto run = make_run(log);
  const auto& trials = schedule().at("P1");
  const auto& lib = *fixture_library();

  SECTION("B is identical on repeat and unaffected by A's gain") {
    const auto b1 = run.request_audio(Which::B);
    for (int i = 0; i < 4; ++i) run.adjust_gain(1);
    const auto b2 = run.request_audio(Which::B);
    CHECK(*b1 == *b2);
  }
  SECTION("A at +4 is the reference rendered 4 dB up") {
    for (int i = 0; i < 4; ++i) run.adjust_gain(1);
    const auto a = run.request_audio(Which::A);
    const auto& c = trials[0].condition;
    const auto expected = render_trial_pair(lib.stimuli.signal(c.signal), lib.stimuli.noise(c.noise), c, lib.gains, 4.0);
    CHECK(*a == wav::encode_pcm16(expected.sound_a));
    CHECK(*run.request_audio(Which::B) == wav::encode_pcm16(expected.sound_b));

    const auto decoded = wav::decode(*a);
    CHECK(decoded.sample_rate_hz == kSampleRateHz);
    CHECK(decoded.channels.size() == 2);
    CHECK(decoded.bits_per_sample == 16);
  }
  SECTION("Dummy trial at gain 0 gives bit-identical A and B") {
    advance_until(run, trials, [](const ScheduledTrial& t) { return t.condition.is_dummy(); });
    CHECK(*run.request_audio(Which::A) == *run.request_audio(Which::B));
  }
  SECTION("non-Dummy trial differs between A and B") {
    advance_until(run, trials, [](const ScheduledTrial& t) { return !t.condition.is_dummy(); });
    CHECK(*run.request_audio(Which::A) != *run.request_audio(Which::B));
  }
  SECTION("phases follow requests and stop") {
    run.stop_playback();
    CHECK(run.view().phase == Phase::Idle);
    const auto first = run.request_audio(Which::A);
    CHECK(run.view().phase == Phase::PlayingA);
    run.request_audio(Which::B);
    CHECK(run.view().phase == Phase::PlayingB);
    run.stop_playback();
    CHECK(run.view().phase == Phase::Stopped);
    CHECK(*run.request_audio(Which::A) == *first);
    CHECK(run.view().phase == Phase::PlayingA);
  }
}

TEST_CASE("commit_trial", "[service]") {
  MemoryTrialLog log;
  auto run = make_run(log);

  SECTION("records the adjustment as BHLD and resets the gain") {
    for (int i = 0; i < 6; ++i) run.adjust_gain(1);
    run.request_audio(Which::A);
    run.request_audio(Which::B);
    run.request_audio(Which::A);
    const auto r = run.commit_trial();
    CHECK(r.bhld_db == 6);
    CHECK(r.final_variable_gain_db == 6);
    CHECK_FALSE(r.scored);
    CHECK(r.playback_count_a == 2);
    CHECK(r.playback_count_b == 1);
    CHECK(r.initial_gain_db == GainTable::defaults().at(r.condition.signal, r.condition.noise));
    CHECK(run.view().number == 2);
    CHECK(run.view().variable_gain_db == 0);
    CHECK(log.records().size() == 1);
  }
  SECTION("storage failure leaves the trial in place") {
    run.adjust_gain(-1);
    log.fail_next_append();
    CHECK_THROWS_AS(run.commit_trial(), StorageError);
    CHECK(run.view().number == 1);
    CHECK(run.view().variable_gain_db == -1);
    CHECK(log.records().empty());
    CHECK(run.commit_trial().bhld_db == -1);
    CHECK(run.view().number == 2);
  }
  SECTION("a full run ends complete with 36 records") {
    for (int i = 0; i < 36; ++i) run.commit_trial();
    CHECK(run.complete());
    const auto p = run.progress();
    CHECK(p.committed == 36);
    CHECK(p.scored_committed == 27);
    CHECK(log.records().size() == 36);
    CHECK_THROWS_AS(run.commit_trial(), RunStateError);
    CHECK_THROWS_AS(run.adjust_gain(1), RunStateError);
    CHECK_THROWS_AS(run.request_audio(Which::A), RunStateError);
    run.stop_playback();
  }
}

TEST_CASE("file log replay", "[service][log]") {
  const auto dir = testing::scratch_dir("replay");
  const auto path = dir / "trials.jsonl";

  RunSnapshot live;
  {
    FileTrialLog log(path);
    auto run = make_run(log);
    for (int k = 0; k < 5; ++k) {
      for (int i = 0; i < k; ++i) run.adjust_gain(1);
      run.request_audio(Which::A);
      run.commit_trial();
    }
    live = run.snapshot();
  }

  SECTION("restart resumes after the last committed trial") {
    FileTrialLog log(path);
    auto resumed = make_run(log);
    CHECK(resumed.snapshot() == live);
    CHECK(resumed.view().number == 6);
  }
  SECTION("a torn final line is dropped") {
    { std::ofstream(path, std::ios::app) << R"({"schema":1,"participant":"P1","sess)"; }
    FileTrialLog log(path);
    auto resumed = make_run(log);
    CHECK(resumed.snapshot() == live);
    resumed.commit_trial();
    CHECK(log.records().size() == 6);
  }
  SECTION("other participants' runs are independent") {
    FileTrialLog log(path);
    auto other = make_run(log, "P2");
    CHECK(other.view().number == 1);
  }
  SECTION("a log that disagrees with the schedule is rejected") {
    FileTrialLog log(path);
    auto other_schedule = fixture_schedule(99);
    CHECK_THROWS_AS(ExperimentRun("P1", other_schedule.at("P1"), fixture_library(), log), FormatError);
  }
  SECTION("unwritable log") {
    CHECK_THROWS_AS(FileTrialLog(dir), StorageError);
    const auto other = dir / "other.jsonl";
    FileTrialLog log(other);
    auto run = make_run(log, "P4");
    std::filesystem::create_directories(other);  // the log file can no longer be opened
    run.adjust_gain(1);
    CHECK_THROWS_AS(run.commit_trial(), StorageError);
    CHECK(run.view().number == 1);
    CHECK(run.view().variable_gain_db == 1);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("same inputs give a byte-identical log", "[service][log]") {
  const auto dir = testing::scratch_dir("determinism");
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    FileTrialLog log(dir / name);
    auto run = make_run(log, "P7");
    for (int k = 0; k < 12; ++k) {
      for (int i = 0; i < k % 5; ++i) run.adjust_gain(k % 2 ? 1 : -1);
      run.request_audio(Which::B);
      run.commit_trial();
    }
  }
  const auto a = read_text(dir / "a.jsonl");
  CHECK(!a.empty());
  CHECK(a == read_text(dir / "b.jsonl"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("timestamps", "[service]") {
  CHECK(format_timestamp(std::chrono::system_clock::time_point{} + std::chrono::milliseconds(1'700'000'000'250)) ==
        "2023-11-14T22:13:20.250Z");
}

TEST_CASE("HTTP API", "[service][http]") {
  MemoryTrialLog log;
  Experiment exp(schedule(), fixture_library(), log, RunConfig{30, true}, ticking_clock());
  ServiceHost host(exp);
  httplib::Client cli("127.0.0.1", host.port());
  const auto post = [&](const std::string& path, const nlohmann::json& body) {
    return cli.Post(path, body.dump(), "application/json");
  };

  SECTION("errors before a run exists") {
    CHECK(cli.Get("/trial")->status == 409);
    CHECK(post("/run", nlohmann::json::object())->status == 400);
    CHECK(post("/run", {{"participant", "nobody"}})->status == 400);
    CHECK(cli.Post("/run", "{oops", "application/json")->status == 400);
  }
  SECTION("a trial round trip") {
    auto res = post("/run", {{"participant", "P5"}});
    REQUIRE(res->status == 200);
    auto view = nlohmann::json::parse(res->body);
    CHECK(view["number"] == 1);
    CHECK(view["total"] == 36);
    CHECK(view["loop"] == true);

    auto a0 = cli.Get("/audio?which=A");
    REQUIRE(a0->status == 200);
    CHECK(a0->get_header_value("Content-Type") == "audio/wav");
    CHECK(nlohmann::json::parse(cli.Get("/trial")->body)["phase"] == "playing_a");

    auto g = nlohmann::json::parse(post("/gain", {{"delta", 1}})->body);
    CHECK(g["variable_gain_db"] == 1);
    CHECK(g["clamped"] == false);
    CHECK(post("/gain", {{"delta", 3}})->status == 400);
    CHECK(post("/gain", nlohmann::json::object())->status == 400);
    CHECK(cli.Get("/audio?which=C")->status == 400);
    CHECK(cli.Get("/audio")->status == 400);

    auto a1 = cli.Get("/audio?which=A&participant=P5");
    CHECK(a1->body != a0->body);

    CHECK(nlohmann::json::parse(post("/stop", nlohmann::json::object())->body)["phase"] == "stopped");
    view = nlohmann::json::parse(post("/next", nlohmann::json::object())->body);
    CHECK(view["number"] == 2);
    CHECK(view["variable_gain_db"] == 0);
    CHECK(log.records().at(0).bhld_db == 1);

    const auto progress = nlohmann::json::parse(cli.Get("/progress")->body);
    CHECK(progress["committed"] == 1);
    CHECK(progress["complete"] == false);
  }
  SECTION("responses never reveal the condition") {
    post("/run", {{"participant", "P6"}});
    for (int i = 0; i < 36; ++i) {
      for (const auto& body : {cli.Get("/trial")->body, cli.Get("/progress")->body,
                               post("/stop", nlohmann::json::object())->body}) {
        const auto j = nlohmann::json::parse(body);
        for (const char* key : {"method", "fc", "signal", "noise", "condition", "scored", "seed"}) {
          CHECK_FALSE(j.contains(key));
        }
        for (const char* word : {"Original", "Low", "High", "All"}) CHECK(body.find(word) == std::string::npos);
      }
      post("/next", nlohmann::json::object());
    }
    CHECK(post("/next", nlohmann::json::object())->status == 409);
    CHECK(nlohmann::json::parse(cli.Get("/progress")->body)["complete"] == true);
  }
}
