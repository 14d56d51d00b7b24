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
/// \brief Turning run logs into verdicts: scenario metrics, validity rules
/// and accuracy thresholds.

#ifndef LOADGAUGE_REPORT_H_
#define LOADGAUGE_REPORT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadgauge/run_log.h"
#include "loadgauge/scenario.h"

namespace loadgauge {

/// One validity rule the run broke, with the number that broke it.
struct Violation {
  std::string rule;
  double measured = 0.0;
  double limit = 0.0;
};

/// Verdict for one run: the scenario's metric and whether the run counts.
struct RunResult {
  std::string task_name;
  Scenario scenario = Scenario::kSingleStream;
  TestMode mode = TestMode::kPerformance;

  /// What the scenario reports: p90_latency_ms (single-stream), streams
  /// (multi-stream), qps (server), samples_per_second (offline).
  std::string metric_name;
  double metric_value = 0.0;

  bool valid = false;
  std::vector<Violation> violations;

  int64_t query_count = 0;
  Duration duration = Duration::zero();

  /// Server: fraction of queries over the QoS bound.
  std::optional<double> overtime_fraction;
  /// Multi-stream: fraction of queries that caused at least one skipped
  /// arrival slot.
  std::optional<double> skipped_query_fraction;
};

/// Scores a performance (or accuracy) run against the profile's validity
/// rules: duration and query-count floors, the server overtime limit, the
/// multi-stream skip limit and the offline sample floor. An aborted run is
/// never valid.
RunResult CheckValidity(const RunLog& log, const BenchmarkProfile& profile,
                        const TestSettings& settings);

/// Convenience overload using the profile and settings stored in the log.
RunResult CheckValidity(const RunLog& log);

/// Accuracy verdict: measured value against the profile's target, which is
/// accuracy_target_fraction of the reference.
struct AccuracyResult {
  double measured = 0.0;
  double reference = 0.0;
  double target_fraction = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

AccuracyResult CheckAccuracy(double measured, const BenchmarkProfile& profile);

/// Fixed-width text table of results, one row per run. Each row stands
/// alone; rows are never averaged or otherwise combined across tasks, since
/// the metrics have different units and meanings.
std::string SummarizeResults(std::span<const RunResult> results);

}  // namespace loadgauge

#endif  // LOADGAUGE_REPORT_H_
