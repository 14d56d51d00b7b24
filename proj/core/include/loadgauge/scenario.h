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

/// \file
/// \brief Scenarios, benchmark profiles and test settings.

#ifndef LOADGAUGE_SCENARIO_H_
#define LOADGAUGE_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadgauge/query.h"

namespace loadgauge {

/// How queries arrive at the SUT.
///
/// * SingleStream: one sample per query, issued back to back; the next query
///   waits for the previous completion. Measures 90th percentile latency.
/// * MultiStream: N samples per query on a fixed arrival interval; an
///   interval whose slot is still busy is skipped. The metric is N.
/// * Server: single-sample queries on a Poisson arrival process, issued
///   regardless of outstanding work. Measures throughput subject to a tail
///   latency bound.
/// * Offline: every sample in one batch query. Measures samples per second.
enum class Scenario {
  kSingleStream,
  kMultiStream,
  kServer,
  kOffline,
};

enum class TestMode {
  kPerformance,
  kAccuracy,
};

enum class ClockMode {
  kVirtual,
  kWall,
};

std::string_view ToString(Scenario scenario);
std::string_view ToString(TestMode mode);
std::string_view ToString(ClockMode mode);
std::optional<Scenario> ScenarioFromString(std::string_view text);
std::optional<TestMode> TestModeFromString(std::string_view text);
std::optional<ClockMode> ClockModeFromString(std::string_view text);

/// Minimum query counts per scenario for statistically meaningful results.
/// Latency-bound scenarios need enough queries to pin down the tail; offline
/// needs one query but a minimum number of samples inside it.
struct MinQueryCounts {
  int64_t single_stream = 0;
  int64_t multi_stream = 0;
  int64_t server = 0;
  int64_t offline = 0;
};

/// Everything that defines a benchmark task: its latency constraints, the
/// tail being measured, accuracy requirements and run-size floors.
struct BenchmarkProfile {
  std::string task_name;

  /// Arrival period between multi-stream queries.
  Duration multistream_arrival_interval = Duration::zero();
  /// Latency each server query must usually meet.
  Duration server_qos_bound = Duration::zero();
  /// Percentile the latency constraint applies to (e.g. 0.99 means 99% of
  /// queries must finish within the bound).
  double tail_percentile = 0.0;
  /// Maximum fraction of queries allowed over the bound; equals
  /// 1 - tail_percentile.
  double server_overtime_max = 0.0;

  /// Reference accuracy of the task in its native units, and the fraction of
  /// it a run must reach to pass.
  double accuracy_reference = 0.0;
  double accuracy_target_fraction = 0.0;

  MinQueryCounts min_queries;
  /// Offline queries must contain at least this many samples.
  int64_t offline_min_samples = 0;

  bool multistream_supported = true;
};

/// The five tasks shipped with the library. Synthetic stand-ins at desk
/// scale: two image classification tasks (a heavy and a light one), two
/// object detection tasks, and machine translation.
std::span<const BenchmarkProfile> BuiltinProfiles();

/// Looks up a profile by task name. Returns nullptr if absent.
const BenchmarkProfile* FindProfile(std::span<const BenchmarkProfile> profiles,
                                    std::string_view task_name);

inline constexpr uint64_t kDefaultScheduleSeed = 778923461;
inline constexpr uint64_t kDefaultSampleSeed = 392874290;

/// Runs shorter than this do not count, no matter how many queries they
/// contain. Applies to performance mode.
inline constexpr Duration kDefaultMinDuration = std::chrono::seconds(60);

/// Knobs for one run. Zero means "use the default for this profile and
/// scenario" wherever a zero value would be meaningless.
struct TestSettings {
  Scenario scenario = Scenario::kSingleStream;
  TestMode mode = TestMode::kPerformance;
  std::string task_name;

  uint64_t schedule_seed = kDefaultScheduleSeed;
  uint64_t sample_seed = kDefaultSampleSeed;

  /// Server arrival rate in queries per second. Required for server runs.
  double target_qps = 0.0;
  /// Samples per multi-stream query (the stream count being tested).
  /// Required for multi-stream runs.
  int64_t samples_per_query = 0;

  /// 0 = kDefaultMinDuration.
  Duration min_duration = Duration::zero();
  /// 0 = the profile's minimum for the scenario.
  int64_t min_query_count = 0;
  /// Offline only: 0 = the profile's offline_min_samples. Values above it
  /// grow the batch, e.g. to stretch run time.
  int64_t min_sample_count = 0;
  /// Samples the SUT may hold resident during performance runs.
  /// 0 = the whole library.
  int64_t performance_sample_count = 0;

  ClockMode clock = ClockMode::kVirtual;
};

/// Settings with every default resolved and the profile attached. Produced
/// by ValidateSettings; the harness only accepts resolved settings.
struct ResolvedSettings {
  TestSettings settings;
  BenchmarkProfile profile;
};

struct SettingsValidation {
  std::optional<ResolvedSettings> resolved;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

/// Checks `settings` against `profiles`, fills in defaults, and returns
/// either the resolved settings or the full list of problems found.
SettingsValidation ValidateSettings(const TestSettings& settings,
                                    std::span<const BenchmarkProfile> profiles);

/// Minimum query count for the scenario, from the resolved settings.
int64_t ScenarioMinQueries(const BenchmarkProfile& profile, Scenario scenario);

}  // namespace loadgauge

#endif  // LOADGAUGE_SCENARIO_H_
