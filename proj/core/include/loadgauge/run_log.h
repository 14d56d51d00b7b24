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
/// \brief What a run records: one entry per query plus run-level facts.

#ifndef LOADGAUGE_RUN_LOG_H_
#define LOADGAUGE_RUN_LOG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loadgauge/query.h"
#include "loadgauge/scenario.h"

namespace loadgauge {

/// Timing record for one query. All times are run-relative nanoseconds.
struct QueryRecord {
  int64_t query_id = 0;
  /// When the plan wanted the query issued. Zero for single-stream and
  /// offline. For multi-stream this is the original grid slot even when
  /// skips pushed the actual issue to a later slot.
  Duration scheduled_time = Duration::zero();
  Duration issue_time = Duration::zero();
  Duration completion_time = Duration::zero();
  Duration latency = Duration::zero();
  int64_t sample_count = 0;
  /// Multi-stream: arrival slots that fired while this query was still in
  /// flight, forcing the next query to wait.
  int64_t skipped_intervals = 0;
  /// Present when the run sampled this query for accuracy evidence.
  std::optional<uint64_t> payload_digest;
};

/// Per-sample accuracy evidence: the digest the SUT reported for one sample
/// of one query.
struct AccuracyEntry {
  int64_t query_id = 0;
  SampleIndex sample_index = 0;
  uint64_t digest = 0;
};

/// Complete record of one run. Everything checks and reports need is here;
/// nothing has to be recomputed from the SUT afterwards.
struct RunLog {
  TestSettings settings;
  BenchmarkProfile profile;

  std::vector<QueryRecord> records;
  std::vector<AccuracyEntry> accuracy_entries;

  /// Time from clock restart to the end of the run (last completion or the
  /// moment the stop condition was reached, whichever is later).
  Duration duration = Duration::zero();

  /// Multi-stream only: total skipped arrival slots and how many queries
  /// caused at least one.
  int64_t skipped_intervals = 0;
  int64_t queries_with_skips = 0;

  /// Accuracy mode: the matched-sample fraction scaled to the task's
  /// reference score, so it compares directly against the target threshold.
  std::optional<double> measured_accuracy;

  bool aborted = false;
  std::string abort_reason;

  /// Wall-clock bookkeeping, never part of determinism comparisons. Empty
  /// in virtual-clock runs.
  std::string wall_started_at;
};

int64_t TotalSampleCount(const RunLog& log);

}  // namespace loadgauge

#endif  // LOADGAUGE_RUN_LOG_H_
