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
/// \brief Query schedules: when queries should be issued and which samples
/// they carry. Everything here is decided before the run clock starts.

#ifndef LOADGAUGE_SCHEDULE_H_
#define LOADGAUGE_SCHEDULE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "loadgauge/query.h"
#include "loadgauge/rng.h"
#include "loadgauge/scenario.h"

namespace loadgauge {

/// A fully materialized run plan. Query i should be issued at
/// issue_times[i] and carries the samples in SamplesFor(i). Sample indices
/// live in one flat pool so large plans stay cache friendly.
struct Schedule {
  std::vector<Duration> issue_times;
  std::vector<SampleIndex> sample_pool;

  struct SampleSpan {
    size_t offset = 0;
    size_t length = 0;
  };
  std::vector<SampleSpan> sample_spans;

  size_t size() const { return issue_times.size(); }

  std::span<const SampleIndex> SamplesFor(size_t query) const {
    const SampleSpan& s = sample_spans[query];
    return std::span<const SampleIndex>(sample_pool).subspan(s.offset,
                                                             s.length);
  }
};

/// `count` uniform draws from [0, pool_size), with replacement, consumed
/// from `rng` in order.
std::vector<SampleIndex> GenSampleIndices(SeededRng& rng, int64_t count,
                                          int64_t pool_size);

/// Arrival times of a Poisson process with rate `rate_qps`: cumulative sums
/// of exponential gaps, each gap rounded to whole nanoseconds before
/// accumulating so the sum is exact integer arithmetic. The first arrival is
/// one gap after time zero.
std::vector<Duration> GenPoissonSchedule(SeededRng& rng, double rate_qps,
                                         int64_t count);

/// Fixed-cadence arrivals at 0, interval, 2*interval, ...
std::vector<Duration> GenMultistreamSchedule(Duration interval, int64_t count);

/// Builds the plan for a run: enough queries to satisfy the scenario's
/// query-count and duration floors in performance mode, or exactly one pass
/// over the library in accuracy mode. `library_total` is the sample
/// library's size; performance runs draw from the first
/// performance_sample_count indices of it (all of it when that is zero).
Schedule BuildSchedule(const ResolvedSettings& resolved,
                       int64_t library_total);

/// Owns a schedule plus the generator state needed to grow it. Single-stream
/// runs are closed loop, so how many queries they need depends on how fast
/// the SUT answers; the harness extends the plan in blocks as the run
/// outlives it. Extension appends, so earlier queries' samples never move.
class ScheduleSource {
 public:
  ScheduleSource(const ResolvedSettings& resolved, int64_t library_total);

  const Schedule& schedule() const { return schedule_; }

  /// Appends `more_queries` single-stream queries, drawing their samples
  /// from the same stream the original plan used.
  void ExtendSingleStream(int64_t more_queries);

  /// Size of the pool sample indices are drawn from.
  int64_t draw_pool_size() const { return draw_pool_; }

 private:
  ResolvedSettings resolved_;
  SeededRng sample_rng_;
  int64_t draw_pool_;
  Schedule schedule_;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_SCHEDULE_H_
