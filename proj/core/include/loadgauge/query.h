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
/// \brief Basic types shared by the scheduler, the harness and SUTs.

#ifndef LOADGAUGE_QUERY_H_
#define LOADGAUGE_QUERY_H_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace loadgauge {

/// All load generation and measurement runs on a single signed 64-bit
/// nanosecond timeline whose origin is the start of the run.
using Duration = std::chrono::nanoseconds;

/// Index of a sample in a sample library. Indices are dense in
/// [0, total_samples).
using SampleIndex = uint64_t;

constexpr Duration DurationFromMillis(int64_t ms) {
  return std::chrono::milliseconds(ms);
}

constexpr Duration DurationFromMicros(int64_t us) {
  return std::chrono::microseconds(us);
}

constexpr Duration DurationFromSeconds(int64_t s) {
  return std::chrono::seconds(s);
}

/// Converts a fractional millisecond count, rounding to the nearest
/// nanosecond.
inline Duration DurationFromMillisF(double ms) {
  return Duration(std::llround(ms * 1e6));
}

constexpr double ToSeconds(Duration d) {
  return static_cast<double>(d.count()) * 1e-9;
}

constexpr double ToMillis(Duration d) {
  return static_cast<double>(d.count()) * 1e-6;
}

/// A unit of work issued to the SUT. The sample indices point into the
/// schedule that produced the query and stay valid until the query's
/// completion callback has returned.
struct Query {
  int64_t query_id = 0;
  std::span<const SampleIndex> sample_indices;
  /// When the schedule wanted the query issued. Always zero for
  /// single-stream, where issue times are decided by completion of the
  /// previous query rather than planned ahead.
  Duration scheduled_time = Duration::zero();
};

/// A completion reported by the SUT. `payload_digest` summarizes the whole
/// result; `sample_digests` carries one digest per sample, in the order the
/// indices appeared in the query, so accuracy checks can attribute errors.
/// The harness timestamps completions itself; SUTs may leave
/// `completion_time` zero.
struct QueryResponse {
  int64_t query_id = 0;
  Duration completion_time = Duration::zero();
  uint64_t payload_digest = 0;
  std::vector<uint64_t> sample_digests;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_QUERY_H_
