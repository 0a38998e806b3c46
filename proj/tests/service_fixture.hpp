// Shared setup for the service tests and the acceptance dry run.
#ifndef BOOSTER_TESTS_SERVICE_FIXTURE_HPP
#define BOOSTER_TESTS_SERVICE_FIXTURE_HPP

#include <booster/fixtures/synthetic.hpp>
#include <booster/plan/schedule_io.hpp>
#include <booster/service/experiment_run.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>
#include <string>

namespace testing {

/// Aligned synthetic stimuli, built once per process.
inline std::shared_ptr<const booster::StimulusLibrary> fixture_library() {
  static const auto lib = booster::make_library(
      booster::prepare_stimuli(booster::fixtures::prepare_inputs(booster::fixtures::make_raw_sources(1))));
  return lib;
}

/// A 16-participant schedule pushed through the file format and back.
inline booster::ParsedSchedule fixture_schedule(std::uint64_t seed = 2024) {
  std::stringstream ss;
  booster::write_schedule(ss, booster::build_schedule(seed, booster::AssignmentTable::rotation(16)));
  return booster::read_schedule(ss);
}

/// Deterministic clock: one second per call from a fixed epoch.
inline booster::Clock ticking_clock() {
  auto n = std::make_shared<std::atomic<long>>(0);
  return [n] {
    return std::chrono::system_clock::time_point{} + std::chrono::seconds(1'700'000'000 + (*n)++);
  };
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() / ("booster_" + tag + "_" + std::to_string(rd()));
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace testing

#endif
