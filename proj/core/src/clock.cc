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

#include "loadgauge/clock.h"

#include <stdexcept>
#include <thread>
#include <utility>

namespace loadgauge {

void VirtualClock::Restart() {
  now_ = Duration::zero();
  next_seq_ = 0;
  events_ = {};
}

void VirtualClock::ScheduleAt(Duration time, std::function<void()> fn) {
  if (time < now_) {
    throw std::invalid_argument("VirtualClock: cannot schedule in the past");
  }
  events_.push(Event{time, next_seq_++, std::move(fn)});
}

bool VirtualClock::RunOne() {
  if (events_.empty()) {
    return false;
  }
  // Move the callback out before popping: it may schedule more events.
  Event event = std::move(const_cast<Event&>(events_.top()));
  events_.pop();
  now_ = event.time;
  event.fn();
  return true;
}

void VirtualClock::AdvanceTo(Duration time) {
  if (time < now_) {
    throw std::invalid_argument("VirtualClock: cannot advance into the past");
  }
  while (!events_.empty() && events_.top().time <= time) {
    RunOne();
  }
  now_ = time;
}

std::optional<Duration> VirtualClock::NextEventTime() const {
  if (events_.empty()) {
    return std::nullopt;
  }
  return events_.top().time;
}

Duration WallClock::Now() const {
  return std::chrono::duration_cast<Duration>(
      std::chrono::steady_clock::now() - epoch_);
}

void WallClock::Restart() { epoch_ = std::chrono::steady_clock::now(); }

void WallClock::SleepUntil(Duration time) const {
  std::this_thread::sleep_until(epoch_ + time);
}

}  // namespace loadgauge
