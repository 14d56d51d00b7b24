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
/// \brief Run timelines: a discrete-event virtual clock for deterministic
/// simulation and a wall clock for measuring real systems.

#ifndef LOADGAUGE_CLOCK_H_
#define LOADGAUGE_CLOCK_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "loadgauge/query.h"

namespace loadgauge {

/// Time source for a run. Durations are relative to the most recent
/// Restart().
class Clock {
 public:
  virtual ~Clock() = default;

  virtual Duration Now() const = 0;
  virtual bool IsVirtual() const = 0;
  /// Rewinds the timeline to zero. Called by the harness at the start of
  /// each run, after sample loading, so setup work is never measured.
  virtual void Restart() = 0;
};

/// Deterministic discrete-event clock. Time advances only by running
/// scheduled events; events at equal times run in scheduling order. Not
/// thread safe: the harness, the clock and simulated SUTs all live on one
/// thread in virtual mode.
class VirtualClock final : public Clock {
 public:
  VirtualClock() = default;

  Duration Now() const override { return now_; }
  bool IsVirtual() const override { return true; }
  void Restart() override;

  /// Registers `fn` to run when the clock reaches `time`. Scheduling in the
  /// past is an error; scheduling at the current time is allowed and runs on
  /// the next pump.
  void ScheduleAt(Duration time, std::function<void()> fn);

  /// Runs the earliest pending event, advancing Now() to its time. Returns
  /// false if no events are pending.
  bool RunOne();

  /// Runs every event with time <= `time` (including events they schedule
  /// within that window), then sets Now() to `time`. `time` must not be in
  /// the past.
  void AdvanceTo(Duration time);

  std::optional<Duration> NextEventTime() const;
  bool HasPending() const { return !events_.empty(); }
  size_t PendingCount() const { return events_.size(); }

 private:
  struct Event {
    Duration time;
    uint64_t seq;
    std::function<void()> fn;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  Duration now_ = Duration::zero();
  uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
};

/// Real time, anchored to a steady monotonic clock.
class WallClock final : public Clock {
 public:
  WallClock() { Restart(); }

  Duration Now() const override;
  bool IsVirtual() const override { return false; }
  void Restart() override;

  /// Sleeps until the run timeline reaches `time`. Returns immediately if it
  /// already has.
  void SleepUntil(Duration time) const;

  /// The steady-clock instant corresponding to run time `time`, for
  /// condition-variable deadlines.
  std::chrono::steady_clock::time_point TimePointFor(Duration time) const {
    return epoch_ + time;
  }

 private:
  std::chrono::steady_clock::time_point epoch_;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_CLOCK_H_
