// booster: command-line front end for filter reports, stimulus preparation,
// scheduling, the listening service and analysis.

#include <booster/dsp/booster.hpp>
#include <booster/dsp/response.hpp>
#include <booster/fixtures/synthetic.hpp>
#include <booster/io/wav.hpp>
#include <booster/plan/schedule_io.hpp>
#include <booster/plan/session_planner.hpp>
#include <booster/service/experiment_run.hpp>
#include <booster/service/http_api.hpp>
#include <booster/service/trial_log.hpp>
#include <booster/stats/aggregate.hpp>
#include <booster/stats/screening.hpp>
#include <booster/stats/welch.hpp>
#include <booster/stimulus/gain_table.hpp>
#include <booster/stimulus/prepare.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace booster;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StorageError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  return in;
}

// filter-report ------------------------------------------------------------

struct FilterReportArgs {
  int fc = 500;
  std::size_t taps = kDefaultTaps;
  std::string combine = "lowpass";
  std::string output;
};

int filter_report(const FilterReportArgs& a) {
  const auto bank = FilterBank::design(a.fc, kSampleRateHz, a.taps);
  std::optional<BandCoefficients> coeffs;
  if (a.combine != "lowpass" && a.combine != "highpass") {
    const auto method = a.combine == "original" ? BoosterMethod::original()
                        : a.combine == "all"    ? BoosterMethod::all()
                        : a.combine == "low"    ? BoosterMethod::low(a.fc)
                                                : BoosterMethod::high(a.fc);
    coeffs = BandCoefficients::for_method(method);
  }
  const auto curve = a.combine == "highpass" ? frequency_response(bank.highpass) : frequency_response(bank, coeffs);
  if (a.output.empty()) {
    curve.write_csv(std::cout);
  } else {
    auto out = open_out(a.output);
    curve.write_csv(out);
  }

  const auto lp = frequency_response(bank, std::nullopt);
  const double edge = a.fc + 3.0 * kSampleRateHz / static_cast<double>(a.taps);
  std::fprintf(stderr, "fc %d Hz, %zu taps, group delay %zu samples\n", a.fc, a.taps,
               bank.lowpass.group_delay_samples());
  std::fprintf(stderr, "lowpass stopband (>= %.0f Hz) peak: %.1f dB\n", edge, lp.max_in(edge, kSampleRateHz / 2.0));
  const auto dip = frequency_response(bank, BandCoefficients{-1, 1});
  const auto i = dip.argmin_in(0.8 * a.fc, 1.2 * a.fc);
  std::fprintf(stderr, "booster dip: %.1f dB at %.1f Hz\n", dip.magnitude_db[i], dip.freq_hz[i]);
  return 0;
}

// make-fixtures --------------------------------------------------------------

int make_fixtures(const fs::path& out_dir, std::uint64_t seed) {
  fs::create_directories(out_dir);
  const auto raw = fixtures::make_raw_sources(seed);
  for (auto s : kSignals) {
    wav::write_float32(out_dir / (signal_file_id(s) + ".wav"), raw.signals[static_cast<std::size_t>(s)]);
  }
  wav::write_pcm16(out_dir / "noise_B.wav", raw.noise_b);
  for (std::size_t i = 0; i < raw.noise_c_parts.size(); ++i) {
    wav::write_pcm16(out_dir / ("noise_C_part" + std::to_string(i + 1) + ".wav"), raw.noise_c_parts[i]);
  }
  std::cerr << "wrote synthetic raw sources to " << out_dir << "\n";
  return 0;
}

// prepare --------------------------------------------------------------------

struct PrepareArgs {
  std::string raw_dir;
  std::string out_dir;
  PrepareOptions options;
};

int prepare(const PrepareArgs& a) {
  const fs::path raw = a.raw_dir;
  PrepareInputs in;
  for (auto s : kSignals) in.signals[static_cast<std::size_t>(s)] = load_mono_48k(raw / (signal_file_id(s) + ".wav"));
  if (fs::exists(raw / "noise_A.wav")) in.noise_a = load_mono_48k(raw / "noise_A.wav");
  in.noise_b = load_mono_48k(raw / "noise_B.wav");
  if (fs::exists(raw / "noise_C.wav")) {
    in.noise_c = load_mono_48k(raw / "noise_C.wav");
  } else {
    for (int i = 1; fs::exists(raw / ("noise_C_part" + std::to_string(i) + ".wav")); ++i) {
      in.noise_c_parts.push_back(load_mono_48k(raw / ("noise_C_part" + std::to_string(i) + ".wav")));
    }
    if (in.noise_c_parts.empty()) throw FormatError("no noise_C.wav or noise_C_part*.wav in " + raw.string());
  }

  const auto prepared = prepare_stimuli(in, a.options);
  const fs::path out = a.out_dir;
  save_prepared(out, prepared);
  {
    auto csv = open_out(out / "levels.csv");
    write_levels_manifest(csv, prepared.manifest);
  }
  {
    auto gains = open_out(out / "gains.txt");
    GainTable::defaults().write(gains);
  }
  write_levels_manifest(std::cout, prepared.manifest);
  return 0;
}

// plan -----------------------------------------------------------------------

struct PlanArgs {
  std::uint64_t seed = 1;
  std::size_t participants = 16;
  std::string assignment;
  std::string output;
};

int plan(const PlanArgs& a) {
  AssignmentTable table;
  if (a.assignment.empty()) {
    table = AssignmentTable::rotation(a.participants);
  } else {
    auto in = open_in(a.assignment);
    table = AssignmentTable::parse(in);
  }
  const auto schedule = build_schedule(a.seed, table);
  if (a.output.empty()) {
    write_schedule(std::cout, schedule);
  } else {
    auto out = open_out(a.output);
    write_schedule(out, schedule);
  }
  const auto counts = schedule.condition_counts();
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  std::fprintf(stderr, "%zu participants, %zu scored trials, %zu..%zu per condition\n", schedule.plans.size(),
               schedule.plans.size() * kTrialsPerSession * kScoredSessionsPerParticipant, *lo, *hi);
  return 0;
}

// serve ----------------------------------------------------------------------

struct ServeArgs {
  std::string schedule;
  std::string log = "trials.jsonl";
  std::string stimuli_dir;
  std::string gains;
  std::string host = "127.0.0.1";
  int port = 8080;
  int clamp = kDefaultGainClampDb;
  std::size_t taps = kDefaultTaps;
  bool loop = false;
};

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

/// Relative log paths land in $BOOSTER_STORAGE_DIR when it is set.
fs::path storage_path(const fs::path& p) {
  const char* dir = std::getenv("BOOSTER_STORAGE_DIR");
  if (p.is_absolute() || dir == nullptr || *dir == '\0') return p;
  return fs::path(dir) / p;
}

int serve(const ServeArgs& a) {
  auto schedule_in = open_in(a.schedule);
  auto schedule = read_schedule(schedule_in);

  PreparedStimuli stimuli;
  if (a.stimuli_dir.empty()) {
    std::cerr << "no --stimuli-dir given; using synthetic fixtures\n";
    stimuli = prepare_stimuli(fixtures::prepare_inputs(fixtures::make_raw_sources(1)));
  } else {
    stimuli = load_prepared(a.stimuli_dir);
  }
  GainTable gains = GainTable::defaults();
  fs::path gains_path = a.gains;
  if (gains_path.empty() && !a.stimuli_dir.empty() && fs::exists(fs::path(a.stimuli_dir) / "gains.txt")) {
    gains_path = fs::path(a.stimuli_dir) / "gains.txt";
  }
  if (!gains_path.empty()) {
    auto in = open_in(gains_path);
    gains = GainTable::parse(in);
  }
  const auto library = make_library(std::move(stimuli), gains, a.taps);

  FileTrialLog log(storage_path(a.log));
  Experiment experiment(std::move(schedule), library, log, RunConfig{a.clamp, a.loop});
  httplib::Server server;
  install_routes(server, experiment);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving on http://" << a.host << ":" << a.port << ", log " << log.path() << "\n";
  if (!server.listen(a.host, a.port)) {
    std::cerr << "cannot listen on " << a.host << ":" << a.port << "\n";
    return 1;
  }
  return 0;
}

// analyze --------------------------------------------------------------------

struct AnalyzeArgs {
  std::vector<std::string> logs;
  int threshold = stats::kDefaultExclusionThresholdDb;
  std::string grouping = "overall";
  std::string output;
  bool allow_exclusions = false;
};

int analyze(const AnalyzeArgs& a) {
  std::vector<TrialRecord> records;
  for (const auto& path : a.logs) {
    auto in = open_in(path);
    auto r = read_trial_log(in);
    records.insert(records.end(), r.begin(), r.end());
  }
  std::vector<TrialRecord> scored;
  for (const auto& r : records)
    if (r.scored) scored.push_back(r);

  const auto screening = stats::screen_participants(scored, a.threshold);
  for (const auto& [who, dummies] : screening.dummy_adjustments) {
    std::string list;
    for (int d : dummies) list += (list.empty() ? "" : ",") + std::to_string(d);
    std::fprintf(stderr, "%-8s dummy [%s]%s\n", who.c_str(), list.c_str(),
                 screening.is_excluded(who) ? "  EXCLUDED" : "");
  }
  const auto kept = stats::retained_records(scored, screening);
  const auto result = stats::aggregate_bhld(kept, stats::parse_grouping(a.grouping));
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (a.output.empty()) {
    stats::export_figure_data(std::cout, result.rows);
  } else {
    auto out = open_out(a.output);
    stats::export_figure_data(out, result.rows);
  }

  // Each booster against the Dummy condition, pooled over signal and noise.
  std::map<BoosterMethod, std::vector<double>> by_method;
  for (const auto& r : kept) by_method[r.condition.method].push_back(r.bhld_db);
  const auto& dummy = by_method[BoosterMethod::original()];
  for (const auto& m : BoosterMethod::enumerate()) {
    if (m.is_original()) continue;
    const auto& x = by_method[m];
    try {
      const auto t = stats::welch_t_test(x, dummy, stats::Sidedness::Greater);
      std::fprintf(stderr, "%-8s vs Original: t = %6.3f, df = %6.2f, one-sided p = %.3g\n", m.name().c_str(),
                   t.t_statistic, t.df, t.p_value);
    } catch (const StatsError& e) {
      std::fprintf(stderr, "%-8s vs Original: %s\n", m.name().c_str(), e.what());
    }
  }
  if (!screening.excluded.empty() && !a.allow_exclusions) {
    std::fprintf(stderr, "%zu participant(s) excluded; pass --allow-exclusions to exit 0\n",
                 screening.excluded.size());
    return 2;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band-limited phase inversion (Booster) listening-test toolkit"};
  app.require_subcommand(1);

  FilterReportArgs fr;
  auto* fr_cmd = app.add_subcommand("filter-report", "Frequency response CSV of the filter bank");
  fr_cmd->add_option("--fc", fr.fc, "Cutoff in Hz")->check(CLI::IsMember({250, 500, 1000}));
  fr_cmd->add_option("--taps", fr.taps, "FIR length (odd)");
  fr_cmd->add_option("--combine", fr.combine, "Which response to report")
      ->check(CLI::IsMember({"lowpass", "highpass", "original", "low", "high", "all"}));
  fr_cmd->add_option("-o,--output", fr.output, "CSV path (default stdout)");

  std::string fixtures_dir;
  std::uint64_t fixtures_seed = 1;
  auto* mf_cmd = app.add_subcommand("make-fixtures", "Write synthetic raw speech and noise recordings");
  mf_cmd->add_option("-o,--output", fixtures_dir, "Directory")->required();
  mf_cmd->add_option("--seed", fixtures_seed);

  PrepareArgs pr;
  auto* pr_cmd = app.add_subcommand("prepare", "Align raw recordings and write the stimulus set");
  pr_cmd->add_option("--raw", pr.raw_dir, "Directory with signal_[ABC].wav, noise_B.wav, noise_C*.wav")->required();
  pr_cmd->add_option("-o,--output", pr.out_dir, "Output directory")->required();
  pr_cmd->add_option("--speech-rms", pr.options.speech_target_rms_db, "Speech RMS target (dB)");
  pr_cmd->add_option("--noise-rms", pr.options.noise_target_rms_db, "Noise RMS target (dB)");
  pr_cmd->add_option("--ceiling", pr.options.peak_ceiling_db, "Peak ceiling (dBFS)");
  pr_cmd->add_option("--noise-seed", pr.options.noise_a_seed, "Seed for the generated white noise");

  PlanArgs pl;
  auto* pl_cmd = app.add_subcommand("plan", "Randomize sessions and write a schedule");
  pl_cmd->add_option("--seed", pl.seed);
  pl_cmd->add_option("--participants", pl.participants, "Participants for the default rotation");
  pl_cmd->add_option("--assignment", pl.assignment, "Assignment table: 'id s1 s2 s3' per line");
  pl_cmd->add_option("-o,--output", pl.output, "Schedule path (default stdout)");

  ServeArgs sv;
  auto* sv_cmd = app.add_subcommand("serve", "Run the listening service");
  sv_cmd->add_option("--schedule", sv.schedule)->required();
  sv_cmd->add_option("--log", sv.log, "Trial log; relative paths go under $BOOSTER_STORAGE_DIR");
  sv_cmd->add_option("--stimuli-dir", sv.stimuli_dir, "Output of 'prepare' (default: synthetic fixtures)");
  sv_cmd->add_option("--gains", sv.gains, "Initial gain table");
  sv_cmd->add_option("--host", sv.host);
  sv_cmd->add_option("--port", sv.port);
  sv_cmd->add_option("--clamp", sv.clamp, "Variable gain limit (dB)")->check(CLI::Range(1, 60));
  sv_cmd->add_option("--taps", sv.taps);
  sv_cmd->add_flag("--loop", sv.loop, "Ask the client to loop playback");

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Screen participants and summarize BHLD");
  an_cmd->add_option("logs", an.logs, "Trial logs")->required();
  an_cmd->add_option("--threshold", an.threshold, "Dummy exclusion threshold (dB)");
  an_cmd->add_option("--grouping", an.grouping)->check(CLI::IsMember({"overall", "by-signal", "by-noise"}));
  an_cmd->add_option("-o,--output", an.output, "Figure CSV (default stdout)");
  an_cmd->add_flag("--allow-exclusions", an.allow_exclusions, "Exit 0 even if someone was excluded");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fr_cmd) return filter_report(fr);
    if (*mf_cmd) return make_fixtures(fixtures_dir, fixtures_seed);
    if (*pr_cmd) return prepare(pr);
    if (*pl_cmd) return plan(pl);
    if (*sv_cmd) return serve(sv);
    if (*an_cmd) return analyze(an);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
