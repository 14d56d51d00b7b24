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

#include "loadgauge/schedule.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace loadgauge {
namespace {

constexpr std::string_view kScheduleStream = "schedule";
constexpr std::string_view kSampleStream = "samples";

int64_t ExponentialGapNanos(SeededRng& rng, double rate_qps) {
  // -ln(U)/rate with U in (0, 1], rounded once to whole nanoseconds. The
  // cumulative times are then exact integer sums, identical on every
  // platform.
  const double gap_seconds = -std::log(rng.NextUnitOpen()) / rate_qps;
  return std::llround(gap_seconds * 1e9);
}

void AppendQueries(Schedule& schedule, std::vector<Duration> times,
                   std::vector<SampleIndex> indices,
                   int64_t samples_per_query) {
  const size_t base = schedule.sample_pool.size();
  schedule.sample_pool.insert(schedule.sample_pool.end(), indices.begin(),
                              indices.end());
  size_t offset = base;
  for (size_t i = 0; i < times.size(); ++i) {
    schedule.issue_times.push_back(times[i]);
    schedule.sample_spans.push_back(
        {offset, static_cast<size_t>(samples_per_query)});
    offset += static_cast<size_t>(samples_per_query);
  }
}

int64_t CeilDiv(int64_t a, int64_t b) { return (a + b - 1) / b; }

}  // namespace

std::vector<SampleIndex> GenSampleIndices(SeededRng& rng, int64_t count,
                                          int64_t pool_size) {
  if (count < 0 || pool_size <= 0) {
    throw std::invalid_argument(
        "GenSampleIndices: count must be >= 0 and pool_size > 0");
  }
  std::vector<SampleIndex> indices;
  indices.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    indices.push_back(rng.NextBounded(static_cast<uint64_t>(pool_size)));
  }
  return indices;
}

std::vector<Duration> GenPoissonSchedule(SeededRng& rng, double rate_qps,
                                         int64_t count) {
  if (!(rate_qps > 0.0)) {
    throw std::invalid_argument("GenPoissonSchedule: rate must be positive");
  }
  if (count < 0) {
    throw std::invalid_argument("GenPoissonSchedule: count must be >= 0");
  }
  std::vector<Duration> times;
  times.reserve(static_cast<size_t>(count));
  int64_t now_ns = 0;
  for (int64_t i = 0; i < count; ++i) {
    now_ns += ExponentialGapNanos(rng, rate_qps);
    times.push_back(Duration(now_ns));
  }
  return times;
}

std::vector<Duration> GenMultistreamSchedule(Duration interval,
                                             int64_t count) {
  if (interval <= Duration::zero()) {
    throw std::invalid_argument(
        "GenMultistreamSchedule: interval must be positive");
  }
  if (count < 0) {
    throw std::invalid_argument("GenMultistreamSchedule: count must be >= 0");
  }
  std::vector<Duration> times;
  times.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    times.push_back(Duration(interval.count() * i));
  }
  return times;
}

ScheduleSource::ScheduleSource(const ResolvedSettings& resolved,
                               int64_t library_total)
    : resolved_(resolved),
      sample_rng_(resolved.settings.sample_seed, kSampleStream),
      draw_pool_(library_total) {
  const TestSettings& s = resolved_.settings;
  if (library_total <= 0) {
    throw std::invalid_argument("BuildSchedule: library has no samples");
  }
  if (s.performance_sample_count > library_total) {
    throw std::invalid_argument(
        "BuildSchedule: performance_sample_count exceeds the library");
  }
  if (s.mode == TestMode::kPerformance && s.performance_sample_count > 0) {
    draw_pool_ = s.performance_sample_count;
  }

  if (s.mode == TestMode::kAccuracy) {
    // One pass over the whole library, in index order, shaped to whatever
    // query geometry the scenario uses. A short final query is padded by
    // wrapping to the start so every query has the same sample count.
    const int64_t spq =
        s.scenario == Scenario::kOffline ? library_total : s.samples_per_query;
    const int64_t queries = CeilDiv(library_total, spq);
    std::vector<SampleIndex> indices;
    indices.reserve(static_cast<size_t>(queries * spq));
    for (int64_t i = 0; i < queries * spq; ++i) {
      indices.push_back(static_cast<SampleIndex>(i % library_total));
    }

    std::vector<Duration> times;
    SeededRng schedule_rng(s.schedule_seed, kScheduleStream);
    switch (s.scenario) {
      case Scenario::kSingleStream:
      case Scenario::kOffline:
        times.assign(static_cast<size_t>(queries), Duration::zero());
        break;
      case Scenario::kMultiStream:
        times = GenMultistreamSchedule(
            resolved_.profile.multistream_arrival_interval, queries);
        break;
      case Scenario::kServer:
        times = GenPoissonSchedule(schedule_rng, s.target_qps, queries);
        break;
    }
    AppendQueries(schedule_, std::move(times), std::move(indices), spq);
    return;
  }

  SeededRng schedule_rng(s.schedule_seed, kScheduleStream);
  switch (s.scenario) {
    case Scenario::kSingleStream: {
      // Initial block only; the harness extends as needed.
      const int64_t count = s.min_query_count;
      std::vector<Duration> times(static_cast<size_t>(count),
                                  Duration::zero());
      AppendQueries(schedule_, std::move(times),
                    GenSampleIndices(sample_rng_, count, draw_pool_), 1);
      break;
    }
    case Scenario::kMultiStream: {
      const auto interval = resolved_.profile.multistream_arrival_interval;
      const int64_t for_duration =
          CeilDiv(s.min_duration.count(), interval.count());
      const int64_t count = std::max(s.min_query_count, for_duration);
      AppendQueries(
          schedule_, GenMultistreamSchedule(interval, count),
          GenSampleIndices(sample_rng_, count * s.samples_per_query,
                           draw_pool_),
          s.samples_per_query);
      break;
    }
    case Scenario::kServer: {
      // Enough arrivals to satisfy both floors: the query count and the
      // duration of the arrival process itself.
      std::vector<Duration> times;
      int64_t now_ns = 0;
      while (static_cast<int64_t>(times.size()) < s.min_query_count ||
             now_ns < s.min_duration.count()) {
        now_ns += ExponentialGapNanos(schedule_rng, s.target_qps);
        times.push_back(Duration(now_ns));
      }
      const int64_t count = static_cast<int64_t>(times.size());
      AppendQueries(schedule_, std::move(times),
                    GenSampleIndices(sample_rng_, count, draw_pool_), 1);
      break;
    }
    case Scenario::kOffline: {
      const int64_t batch = s.samples_per_query;
      AppendQueries(schedule_, {Duration::zero()},
                    GenSampleIndices(sample_rng_, batch, draw_pool_), batch);
      break;
    }
  }
}

void ScheduleSource::ExtendSingleStream(int64_t more_queries) {
  if (resolved_.settings.scenario != Scenario::kSingleStream) {
    throw std::logic_error(
        "ExtendSingleStream: only single-stream plans can grow");
  }
  std::vector<Duration> times(static_cast<size_t>(more_queries),
                              Duration::zero());
  AppendQueries(schedule_, std::move(times),
                GenSampleIndices(sample_rng_, more_queries, draw_pool_), 1);
}

Schedule BuildSchedule(const ResolvedSettings& resolved,
                       int64_t library_total) {
  return ScheduleSource(resolved, library_total).schedule();
}

}  // namespace loadgauge
