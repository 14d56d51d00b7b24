/* Copyright 2026 The Loadgauge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command line front end. Exit codes: 0 = run valid / check passed,
// 1 = run invalid / check failed, 2 = usage or configuration problem.

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loadgauge/adversaries.h"
#include "loadgauge/audit.h"
#include "loadgauge/bridge.h"
#include "loadgauge/clock.h"
#include "loadgauge/harness.h"
#include "loadgauge/json_io.h"
#include "loadgauge/log_io.h"
#include "loadgauge/report.h"
#include "loadgauge/scenario.h"
#include "loadgauge/schedule.h"
#include "loadgauge/sim.h"
#include "loadgauge/sut.h"

namespace {

using namespace loadgauge;

constexpr int kExitValid = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

/// Flags shared by every verb that performs runs.
struct RunFlags {
  std::string task;
  std::string scenario = "single_stream";
  std::string mode = "performance";
  std::string clock = "virtual";

  uint64_t schedule_seed = kDefaultScheduleSeed;
  uint64_t sample_seed = kDefaultSampleSeed;
  double target_qps = 0.0;
  int64_t streams = 0;
  double min_duration_ms = 0.0;
  int64_t min_queries = 0;
  int64_t min_samples = 0;
  int64_t performance_samples = 0;

  int64_t library_size = 4096;
  std::string sim_config_path;
  std::string sut_command;
  std::string adversary = "none";
  double corrupt_rate = 0.2;
  double slow_factor = 3.0;
  uint64_t adversary_seed = 7;

  double watchdog_ms = 0.0;
  double digest_sampling = 0.0;

  std::string log_out;
  std::string result_out;
};

void AddRunFlags(CLI::App& cmd, RunFlags& flags, bool with_scenario) {
  cmd.add_option("--task", flags.task, "Benchmark task name")->required();
  if (with_scenario) {
    cmd.add_option("--scenario", flags.scenario,
                   "single_stream, multi_stream, server or offline");
  }
  cmd.add_option("--clock", flags.clock, "virtual or wall");
  cmd.add_option("--schedule-seed", flags.schedule_seed,
                 "Seed for arrival times");
  cmd.add_option("--sample-seed", flags.sample_seed,
                 "Seed for sample selection");
  cmd.add_option("--target-qps", flags.target_qps,
                 "Server arrival rate in queries per second");
  cmd.add_option("--streams", flags.streams,
                 "Multi-stream samples per query");
  cmd.add_option("--min-duration-ms", flags.min_duration_ms,
                 "Minimum run duration (0 = default 60000)");
  cmd.add_option("--min-queries", flags.min_queries,
                 "Minimum query count (0 = profile default)");
  cmd.add_option("--min-samples", flags.min_samples,
                 "Offline minimum sample count (0 = profile default)");
  cmd.add_option("--performance-samples", flags.performance_samples,
                 "Resident sample set size in performance mode (0 = all)");
  cmd.add_option("--library-size", flags.library_size,
                 "Synthetic sample library size");
  cmd.add_option("--sim-config", flags.sim_config_path,
                 "JSON file describing the simulated SUT");
  cmd.add_option("--sut-command", flags.sut_command,
                 "Run this command as the SUT over the frame protocol "
                 "(wall clock only; split on spaces)");
  cmd.add_option("--adversary", flags.adversary,
                 "none, mode-split or schedule-keyed (demo cheats for "
                 "exercising the audits)");
  cmd.add_option("--corrupt-rate", flags.corrupt_rate,
                 "mode-split: fraction of samples answered wrong");
  cmd.add_option("--slow-factor", flags.slow_factor,
                 "schedule-keyed: slowdown off the expected schedule");
  cmd.add_option("--adversary-seed", flags.adversary_seed,
                 "Seed for adversary decisions");
  cmd.add_option("--watchdog-ms", flags.watchdog_ms,
                 "Abort when the SUT stalls this long (0 = scenario default)");
  cmd.add_option("--digest-sampling", flags.digest_sampling,
                 "Fraction of performance queries keeping result digests");
  cmd.add_option("--log-out", flags.log_out, "Write the run log here");
  cmd.add_option("--result-out", flags.result_out,
                 "Write the result record here as JSON");
}

/// Everything a verb needs to drive a run, owned together so lifetimes are
/// simple: clock outlives SUT, SUT outlives nothing else.
struct RunSetup {
  ResolvedSettings resolved;
  std::unique_ptr<Clock> clock;
  std::unique_ptr<SampleLibrary> library;
  std::unique_ptr<SutInterface> sut;
  HarnessOptions options;
};

std::vector<std::string> SplitCommand(const std::string& command) {
  std::vector<std::string> parts;
  std::istringstream in(command);
  std::string part;
  while (in >> part) {
    parts.push_back(part);
  }
  return parts;
}

Duration FirstArrival(const ResolvedSettings& resolved) {
  if (resolved.settings.scenario != Scenario::kServer) {
    return Duration::zero();
  }
  SeededRng rng(resolved.settings.schedule_seed, "schedule");
  return GenPoissonSchedule(rng, resolved.settings.target_qps, 1).front();
}

/// Builds the clock, library and SUT described by the flags. Prints a
/// message and returns nullopt on configuration problems.
std::optional<RunSetup> MakeSetup(const RunFlags& flags,
                                  Scenario scenario_override,
                                  bool has_scenario_override) {
  TestSettings settings;
  const auto scenario = ScenarioFromString(flags.scenario);
  const auto mode = TestModeFromString(flags.mode);
  const auto clock_mode = ClockModeFromString(flags.clock);
  if (!scenario) {
    std::cerr << "unknown scenario \"" << flags.scenario << "\"\n";
    return std::nullopt;
  }
  if (!mode) {
    std::cerr << "unknown mode \"" << flags.mode << "\"\n";
    return std::nullopt;
  }
  if (!clock_mode) {
    std::cerr << "unknown clock \"" << flags.clock << "\"\n";
    return std::nullopt;
  }
  settings.scenario = has_scenario_override ? scenario_override : *scenario;
  settings.mode = *mode;
  settings.clock = *clock_mode;
  settings.task_name = flags.task;
  settings.schedule_seed = flags.schedule_seed;
  settings.sample_seed = flags.sample_seed;
  settings.target_qps = flags.target_qps;
  settings.samples_per_query = flags.streams;
  settings.min_duration = DurationFromMillisF(flags.min_duration_ms);
  settings.min_query_count = flags.min_queries;
  settings.min_sample_count = flags.min_samples;
  settings.performance_sample_count = flags.performance_samples;

  SettingsValidation validation =
      ValidateSettings(settings, BuiltinProfiles());
  if (!validation.ok()) {
    for (const std::string& error : validation.errors) {
      std::cerr << error << "\n";
    }
    return std::nullopt;
  }

  RunSetup setup;
  setup.resolved = *validation.resolved;
  if (*clock_mode == ClockMode::kVirtual) {
    setup.clock = std::make_unique<VirtualClock>();
  } else {
    setup.clock = std::make_unique<WallClock>();
  }
  if (flags.library_size < 1) {
    std::cerr << "--library-size must be positive\n";
    return std::nullopt;
  }
  setup.library = std::make_unique<InMemorySampleLibrary>(flags.library_size);

  if (!flags.sut_command.empty()) {
    if (*clock_mode != ClockMode::kWall) {
      std::cerr << "--sut-command needs --clock wall\n";
      return std::nullopt;
    }
    if (flags.adversary != "none") {
      std::cerr << "--adversary applies to the simulated SUT only\n";
      return std::nullopt;
    }
    setup.sut =
        std::make_unique<SubprocessSut>(SplitCommand(flags.sut_command));
  } else {
    SimConfig config;
    if (!flags.sim_config_path.empty()) {
      config = SimConfigFromJson(ReadJsonFile(flags.sim_config_path));
    }
    if (flags.adversary == "none") {
      setup.sut = MakeSimulatedSut(config, *setup.clock);
    } else if (flags.adversary == "mode-split") {
      setup.sut = std::make_unique<ModeSplitSut>(
          MakeSimulatedSut(config, *setup.clock), flags.corrupt_rate,
          flags.adversary_seed);
    } else if (flags.adversary == "schedule-keyed") {
      setup.sut = std::make_unique<ScheduleKeyedSut>(
          config, *setup.clock, FirstArrival(setup.resolved),
          flags.slow_factor);
    } else {
      std::cerr << "unknown adversary \"" << flags.adversary << "\"\n";
      return std::nullopt;
    }
  }

  setup.options.watchdog_timeout = DurationFromMillisF(flags.watchdog_ms);
  setup.options.accuracy_digest_sampling = flags.digest_sampling;
  return setup;
}

void MaybeWriteOutputs(const RunFlags& flags, const RunLog& log,
                       const RunResult& result) {
  if (!flags.log_out.empty()) {
    WriteRunLog(log, flags.log_out);
  }
  if (!flags.result_out.empty()) {
    WriteJsonFile(flags.result_out, RunResultToJson(result));
  }
}

int DoRun(const RunFlags& flags) {
  auto setup = MakeSetup(flags, Scenario::kSingleStream, false);
  if (!setup) {
    return kExitUsage;
  }

  if (setup->resolved.settings.mode == TestMode::kAccuracy) {
    RunLog log = RunAccuracy(*setup->sut, *setup->library, setup->resolved,
                             *setup->clock, setup->options);
    RunResult result = CheckValidity(log);
    MaybeWriteOutputs(flags, log, result);
    if (log.aborted) {
      std::cout << SummarizeResults({&result, 1});
      return kExitInvalid;
    }
    AccuracyResult accuracy =
        CheckAccuracy(*log.measured_accuracy, setup->resolved.profile);
    std::cout << "measured " << accuracy.measured << " vs threshold "
              << accuracy.threshold << " (" << accuracy.target_fraction
              << " x " << accuracy.reference << "): "
              << (accuracy.pass ? "PASS" : "FAIL") << "\n";
    return accuracy.pass ? kExitValid : kExitInvalid;
  }

  RunLog log = RunPerformance(*setup->sut, *setup->library, setup->resolved,
                              *setup->clock, setup->options);
  RunResult result = CheckValidity(log);
  MaybeWriteOutputs(flags, log, result);
  std::cout << SummarizeResults({&result, 1});
  return result.valid ? kExitValid : kExitInvalid;
}

int DoOfficialServer(const RunFlags& flags) {
  auto setup = MakeSetup(flags, Scenario::kServer, true);
  if (!setup) {
    return kExitUsage;
  }
  OfficialServerResult official = RunServerOfficial(
      *setup->sut, *setup->library, setup->resolved, *setup->clock,
      setup->options);
  std::vector<RunResult> rows = official.runs;
  rows.push_back(official.official);
  std::cout << SummarizeResults(rows);
  if (!flags.result_out.empty()) {
    WriteJsonFile(flags.result_out, RunResultToJson(official.official));
  }
  return official.official.valid ? kExitValid : kExitInvalid;
}

void PrintProbes(std::span<const SearchProbe> probes) {
  for (const SearchProbe& probe : probes) {
    std::cout << "probe " << probe.value << ": "
              << (probe.valid ? "valid" : "invalid") << " ("
              << probe.result.metric_name << " = "
              << probe.result.metric_value << ")\n";
  }
}

int DoSearchQps(const RunFlags& flags, const QpsSearchParams& params) {
  RunFlags adjusted = flags;
  if (adjusted.target_qps <= 0.0) {
    // The search sets each probe's rate itself; validation only needs a
    // nominal one.
    adjusted.target_qps = params.lo;
  }
  auto setup = MakeSetup(adjusted, Scenario::kServer, true);
  if (!setup) {
    return kExitUsage;
  }
  QpsSearchResult result =
      FindMaxQps(*setup->sut, *setup->library, setup->resolved, *setup->clock,
                 params, setup->options);
  PrintProbes(result.probes);
  if (!result.max_qps) {
    std::cout << "no sustainable rate at or above " << params.lo << "\n";
    return kExitInvalid;
  }
  std::cout << "max qps: " << *result.max_qps << "\n";
  return kExitValid;
}

int DoSearchStreams(const RunFlags& flags, int64_t max_candidate) {
  RunFlags adjusted = flags;
  if (adjusted.streams < 1) {
    // The search sets each probe's stream count itself.
    adjusted.streams = 1;
  }
  auto setup = MakeSetup(adjusted, Scenario::kMultiStream, true);
  if (!setup) {
    return kExitUsage;
  }
  StreamsSearchResult result =
      FindMaxStreams(*setup->sut, *setup->library, setup->resolved,
                     *setup->clock, max_candidate, setup->options);
  PrintProbes(result.probes);
  if (!result.max_streams) {
    std::cout << "not sustainable even at 1 stream\n";
    return kExitInvalid;
  }
  std::cout << "max streams: " << *result.max_streams << "\n";
  return kExitValid;
}

void PrintAudit(const AuditReport& report) {
  std::cout << "audit " << report.audit_name << " on " << report.task_name
            << ": " << ToString(report.verdict) << "\n";
  for (const AuditEvidence& item : report.evidence) {
    std::cout << "  " << item.name << " = " << item.measured
              << " (threshold " << item.threshold << ")";
    if (!item.note.empty()) {
      std::cout << " " << item.note;
    }
    std::cout << "\n";
  }
}

int DoAudit(const RunFlags& flags, const std::string& which,
            std::vector<uint64_t> alt_seeds, const std::string& reference_path,
            const AuditOptions& audit_options) {
  auto setup = MakeSetup(flags, Scenario::kSingleStream, false);
  if (!setup) {
    return kExitUsage;
  }

  AuditReport report;
  if (which == "accuracy-verification") {
    RunLog reference;
    if (!reference_path.empty()) {
      reference = ReadRunLog(reference_path);
    } else {
      reference = RunAccuracy(*setup->sut, *setup->library, setup->resolved,
                              *setup->clock, setup->options);
    }
    report = AuditAccuracyVerification(*setup->sut, *setup->library,
                                       setup->resolved, *setup->clock,
                                       reference, audit_options);
  } else if (which == "caching") {
    report = AuditCaching(*setup->sut, *setup->library, setup->resolved,
                          *setup->clock, audit_options);
  } else if (which == "alternate-seed") {
    if (alt_seeds.empty()) {
      for (uint64_t i = 0; i < 3; ++i) {
        alt_seeds.push_back(
            DeriveSeed(setup->resolved.settings.schedule_seed, i + 1));
      }
    }
    report = AuditAlternateSeed(*setup->sut, *setup->library, setup->resolved,
                                *setup->clock, alt_seeds, audit_options);
  } else {
    std::cerr << "unknown audit \"" << which
              << "\" (known: accuracy-verification, caching, "
                 "alternate-seed)\n";
    return kExitUsage;
  }

  PrintAudit(report);
  if (!flags.result_out.empty()) {
    WriteJsonFile(flags.result_out, AuditReportToJson(report));
  }
  return report.verdict == AuditVerdict::kPass ? kExitValid : kExitInvalid;
}

int DoCheck(const std::string& log_path, const std::string& result_out) {
  RunLog log = ReadRunLog(log_path);
  RunResult result = CheckValidity(log);
  std::cout << SummarizeResults({&result, 1});
  bool pass = result.valid;
  if (log.measured_accuracy) {
    AccuracyResult accuracy =
        CheckAccuracy(*log.measured_accuracy, log.profile);
    std::cout << "accuracy " << accuracy.measured << " vs threshold "
              << accuracy.threshold << ": "
              << (accuracy.pass ? "PASS" : "FAIL") << "\n";
    pass = pass && accuracy.pass;
  }
  if (!result_out.empty()) {
    WriteJsonFile(result_out, RunResultToJson(result));
  }
  return pass ? kExitValid : kExitInvalid;
}

int DoSummarize(const std::vector<std::string>& result_paths) {
  std::vector<RunResult> results;
  results.reserve(result_paths.size());
  for (const std::string& path : result_paths) {
    results.push_back(RunResultFromJson(ReadJsonFile(path)));
  }
  std::cout << SummarizeResults(results);
  return kExitValid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Load generator and measurement harness for inference-style "
               "systems"};
  app.require_subcommand(1);

  RunFlags flags;

  CLI::App* run = app.add_subcommand("run", "One run of one scenario");
  AddRunFlags(*run, flags, true);
  run->add_option("--mode", flags.mode, "performance or accuracy");

  CLI::App* official = app.add_subcommand(
      "official-server", "The five-run server protocol; reports the worst "
                         "run");
  AddRunFlags(*official, flags, false);

  QpsSearchParams qps_params;
  CLI::App* search_qps = app.add_subcommand(
      "search-qps", "Binary search for the highest sustainable server rate");
  AddRunFlags(*search_qps, flags, false);
  search_qps->add_option("--lo", qps_params.lo, "Lower bracket, QPS")
      ->required();
  search_qps->add_option("--hi", qps_params.hi, "Upper bracket, QPS")
      ->required();
  search_qps->add_option("--resolution", qps_params.resolution,
                         "Stop when the bracket is this narrow")
      ->required();

  int64_t max_candidate = 1024;
  CLI::App* search_streams = app.add_subcommand(
      "search-streams", "Search for the highest sustainable stream count");
  AddRunFlags(*search_streams, flags, false);
  search_streams->add_option("--max-candidate", max_candidate,
                             "Upper limit on the stream count tried");

  std::string audit_which;
  std::string reference_path;
  std::vector<uint64_t> alt_seeds;
  AuditOptions audit_options;
  CLI::App* audit = app.add_subcommand("audit", "Run one compliance audit");
  AddRunFlags(*audit, flags, true);
  audit->add_option("which", audit_which,
                    "accuracy-verification, caching or alternate-seed")
      ->required();
  audit->add_option("--reference", reference_path,
                    "Accuracy-mode run log to compare against "
                    "(accuracy-verification; default runs one)");
  audit->add_option("--alt-seed", alt_seeds,
                    "Alternate seeds to try (repeatable)");
  audit->add_option("--probe-queries", audit_options.probe_query_count,
                    "Queries per probe phase");
  audit->add_option("--subset-size", audit_options.caching_subset_size,
                    "Caching audit repeat subset size");
  audit->add_option("--speedup-threshold",
                    audit_options.caching_speedup_threshold,
                    "Repeat-phase speedup that counts as caching");
  audit->add_option("--sensitivity-threshold",
                    audit_options.seed_sensitivity_threshold,
                    "Throughput loss that counts as seed tuning");
  audit->add_option("--audit-sampling", audit_options.digest_sampling_rate,
                    "Digest sampling rate for accuracy verification");

  std::string check_log_path;
  std::string check_result_out;
  CLI::App* check = app.add_subcommand(
      "check", "Validate a stored run log against its profile's rules");
  check->add_option("log", check_log_path, "Run log file")->required();
  check->add_option("--result-out", check_result_out,
                    "Write the result record here as JSON");

  std::vector<std::string> summarize_paths;
  CLI::App* summarize = app.add_subcommand(
      "summarize", "Print a table of stored result records");
  summarize->add_option("results", summarize_paths, "Result JSON files")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) {
      return DoRun(flags);
    }
    if (official->parsed()) {
      return DoOfficialServer(flags);
    }
    if (search_qps->parsed()) {
      return DoSearchQps(flags, qps_params);
    }
    if (search_streams->parsed()) {
      return DoSearchStreams(flags, max_candidate);
    }
    if (audit->parsed()) {
      return DoAudit(flags, audit_which, alt_seeds, reference_path,
                     audit_options);
    }
    if (check->parsed()) {
      return DoCheck(check_log_path, check_result_out);
    }
    if (summarize->parsed()) {
      return DoSummarize(summarize_paths);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
