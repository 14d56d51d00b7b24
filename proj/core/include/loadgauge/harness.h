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
/// \brief The run engine: drives a SUT through a scenario's arrival process
/// and records what happened, plus the official multi-run server protocol
/// and the capacity searches built on top of single runs.

#ifndef LOADGAUGE_HARNESS_H_
#define LOADGAUGE_HARNESS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "loadgauge/clock.h"
#include "loadgauge/report.h"
#include "loadgauge/run_log.h"
#include "loadgauge/scenario.h"
#include "loadgauge/schedule.h"
#include "loadgauge/sut.h"

namespace loadgauge {

struct HarnessOptions {
  /// Abort if the SUT goes this long past a query's issue with the run
  /// unable to make progress. Zero picks a default from the scenario's
  /// latency scale.
  Duration watchdog_timeout = Duration::zero();

  /// Performance mode: fraction of queries whose result digests are kept as
  /// accuracy evidence. Zero keeps none. Sampling decisions come from the
  /// sample seed under a dedicated stream label, so they reproduce exactly.
  double accuracy_digest_sampling = 0.0;
};

/// Runs the scenario configured in `resolved` in performance mode: builds
/// the schedule, loads the performance sample set, restarts the clock,
/// issues queries per the scenario's arrival discipline and collects every
/// completion. Never throws on SUT misbehavior; that ends up in
/// RunLog::aborted.
RunLog RunPerformance(SutInterface& sut, SampleLibrary& library,
                      const ResolvedSettings& resolved, Clock& clock,
                      const HarnessOptions& options = {});

/// Runs one pass over the whole library with result digests recorded for
/// every sample, and scores them against the library's reference digests.
RunLog RunAccuracy(SutInterface& sut, SampleLibrary& library,
                   const ResolvedSettings& resolved, Clock& clock,
                   const HarnessOptions& options = {});

/// Runs a caller-supplied plan under the scenario in `resolved`. Audits use
/// this to replay crafted schedules. The plan is taken as is: no extension
/// and no duration or count floors.
RunLog RunWithSchedule(SutInterface& sut, SampleLibrary& library,
                       const ResolvedSettings& resolved, Clock& clock,
                       const Schedule& schedule,
                       const HarnessOptions& options = {});

/// The official server protocol: five runs with schedule seeds derived from
/// the configured seed, each checked for validity; the reported throughput
/// is the worst run's. `valid` on the official result requires all five runs
/// valid.
struct OfficialServerResult {
  std::vector<RunResult> runs;
  RunResult official;
};
OfficialServerResult RunServerOfficial(SutInterface& sut,
                                       SampleLibrary& library,
                                       const ResolvedSettings& resolved,
                                       Clock& clock,
                                       const HarnessOptions& options = {});

/// One probe of a capacity search: the rate or stream count tried and how
/// the validity check came out.
struct SearchProbe {
  double value = 0.0;
  bool valid = false;
  RunResult result;
};

/// Binary search for the highest server arrival rate the SUT sustains while
/// staying valid. Probes `lo` first (returns nullopt if even that fails,
/// with the probe recorded), then `hi` (returned immediately if it passes),
/// then bisects until the bracket is narrower than `resolution`. Returns
/// the highest rate that produced a valid run.
struct QpsSearchParams {
  double lo = 0.0;
  double hi = 0.0;
  double resolution = 0.0;
};
struct QpsSearchResult {
  std::optional<double> max_qps;
  std::vector<SearchProbe> probes;
};
QpsSearchResult FindMaxQps(SutInterface& sut, SampleLibrary& library,
                           const ResolvedSettings& resolved, Clock& clock,
                           const QpsSearchParams& params,
                           const HarnessOptions& options = {});

/// Walks the multi-stream count upward (doubling, then bisecting) to the
/// largest samples-per-query the SUT sustains with a valid run. Returns
/// nullopt if even one stream fails.
struct StreamsSearchResult {
  std::optional<int64_t> max_streams;
  std::vector<SearchProbe> probes;
};
StreamsSearchResult FindMaxStreams(SutInterface& sut, SampleLibrary& library,
                                   const ResolvedSettings& resolved,
                                   Clock& clock, int64_t max_candidate,
                                   const HarnessOptions& options = {});

}  // namespace loadgauge

#endif  // LOADGAUGE_HARNESS_H_
