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
#include <stdexcept>
#include <vector>

#include "doctest.h"

namespace loadgauge {
namespace {

ResolvedSettings Resolve(const TestSettings& settings) {
  const SettingsValidation validation =
      ValidateSettings(settings, BuiltinProfiles());
  REQUIRE(validation.ok());
  return *validation.resolved;
}

std::vector<SampleIndex> ToVector(std::span<const SampleIndex> samples) {
  return std::vector<SampleIndex>(samples.begin(), samples.end());
}

TEST_CASE("sample draws are reproducible and in range") {
  SeededRng a(99, "samples");
  SeededRng b(99, "samples");
  const auto first = GenSampleIndices(a, 1000, 17);
  const auto second = GenSampleIndices(b, 1000, 17);
  CHECK(first == second);
  for (SampleIndex index : first) {
    CHECK(index < 17);
  }
}

TEST_CASE("poisson schedule accumulates whole-nanosecond gaps") {
  SeededRng rng(5, "schedule");
  const auto times = GenPoissonSchedule(rng, 1000.0, 5000);
  REQUIRE(times.size() == 5000);

  Duration prev = Duration::zero();
  for (Duration t : times) {
    CHECK(t >= prev);
    prev = t;
  }

  // Replaying the same stream and summing the gaps by hand gives the same
  // final instant: integer accumulation, no float drift.
  SeededRng replay(5, "schedule");
  int64_t total_ns = 0;
  for (int i = 0; i < 5000; ++i) {
    total_ns += std::llround(-std::log(replay.NextUnitOpen()) / 1000.0 * 1e9);
  }
  CHECK(times.back().count() == total_ns);
}

TEST_CASE("poisson schedule has the requested mean rate") {
  SeededRng rng(5, "schedule");
  const int64_t n = 20000;
  const auto times = GenPoissonSchedule(rng, 250.0, n);
  const double mean_gap = ToSeconds(times.back()) / static_cast<double>(n);
  CHECK(mean_gap == doctest::Approx(1.0 / 250.0).epsilon(0.02));
}

TEST_CASE("multistream schedule is a fixed grid from zero") {
  const auto times = GenMultistreamSchedule(DurationFromMillis(50), 4);
  CHECK(times == std::vector<Duration>{Duration::zero(),
                                       DurationFromMillis(50),
                                       DurationFromMillis(100),
                                       DurationFromMillis(150)});
}

TEST_CASE("single-stream performance plan has count floor and zero times") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kSingleStream;
  settings.performance_sample_count = 64;

  const Schedule schedule = BuildSchedule(Resolve(settings), 1024);
  CHECK(schedule.size() == 1024);  // the single-stream floor
  for (size_t i = 0; i < schedule.size(); ++i) {
    CHECK(schedule.issue_times[i] == Duration::zero());
    REQUIRE(schedule.SamplesFor(i).size() == 1);
    CHECK(schedule.SamplesFor(i)[0] < 64);
  }
}

TEST_CASE("multistream plan covers both the count and duration floors") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kMultiStream;
  settings.samples_per_query = 4;
  settings.min_query_count = 8;
  settings.min_duration = DurationFromMillis(1000);

  // 50 ms cadence, 1 s floor: 20 queries even though only 8 were asked for.
  const Schedule schedule = BuildSchedule(Resolve(settings), 256);
  CHECK(schedule.size() == 20);
  for (size_t i = 0; i < schedule.size(); ++i) {
    CHECK(schedule.issue_times[i] ==
          DurationFromMillis(50) * static_cast<int64_t>(i));
    CHECK(schedule.SamplesFor(i).size() == 4);
  }
}

TEST_CASE("server plan satisfies count and duration floors") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kServer;
  settings.target_qps = 1000.0;
  settings.min_query_count = 100;
  settings.min_duration = DurationFromMillis(1000);

  const Schedule schedule = BuildSchedule(Resolve(settings), 256);
  CHECK(schedule.size() >= 100);
  CHECK(schedule.issue_times.back() >= DurationFromMillis(1000));
  // ~1000 arrivals in the first second; the plan should not run far past
  // the floor.
  CHECK(schedule.size() < 1400);
}

TEST_CASE("offline plan is one batch query") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kOffline;

  const Schedule schedule = BuildSchedule(Resolve(settings), 100000);
  REQUIRE(schedule.size() == 1);
  CHECK(schedule.issue_times[0] == Duration::zero());
  CHECK(schedule.SamplesFor(0).size() == 24576);
}

TEST_CASE("accuracy plan walks the library in order with wrap padding") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kMultiStream;
  settings.samples_per_query = 4;
  settings.mode = TestMode::kAccuracy;

  const Schedule schedule = BuildSchedule(Resolve(settings), 10);
  REQUIRE(schedule.size() == 3);  // ceil(10 / 4)
  CHECK(ToVector(schedule.SamplesFor(0)) ==
        std::vector<SampleIndex>{0, 1, 2, 3});
  CHECK(ToVector(schedule.SamplesFor(1)) ==
        std::vector<SampleIndex>{4, 5, 6, 7});
  CHECK(ToVector(schedule.SamplesFor(2)) ==
        std::vector<SampleIndex>{8, 9, 0, 1});
}

TEST_CASE("accuracy plan covers every sample exactly once before padding") {
  TestSettings settings;
  settings.task_name = "machine-translation";
  settings.scenario = Scenario::kSingleStream;
  settings.mode = TestMode::kAccuracy;

  const Schedule schedule = BuildSchedule(Resolve(settings), 37);
  CHECK(schedule.size() == 37);
  std::vector<bool> seen(37, false);
  for (size_t i = 0; i < schedule.size(); ++i) {
    for (SampleIndex s : schedule.SamplesFor(i)) {
      seen[s] = true;
    }
    CHECK(schedule.issue_times[i] == Duration::zero());
  }
  for (bool b : seen) {
    CHECK(b);
  }
}

TEST_CASE("extension continues the same sample stream") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kSingleStream;
  settings.min_query_count = 10;
  settings.min_duration = DurationFromMillis(1);

  ScheduleSource whole(Resolve(settings), 512);
  ScheduleSource pieces(Resolve(settings), 512);
  // Same plan whether 20 queries were asked for up front or grown in two
  // steps; extension must not reshuffle what was already planned.
  whole.ExtendSingleStream(10);
  pieces.ExtendSingleStream(5);
  pieces.ExtendSingleStream(5);

  REQUIRE(whole.schedule().size() == 20);
  REQUIRE(pieces.schedule().size() == 20);
  CHECK(whole.schedule().sample_pool == pieces.schedule().sample_pool);
}

TEST_CASE("extension is single-stream only") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kServer;
  settings.target_qps = 100.0;
  settings.min_query_count = 16;
  settings.min_duration = DurationFromMillis(1);

  ScheduleSource source(Resolve(settings), 512);
  CHECK_THROWS_AS(source.ExtendSingleStream(1), std::logic_error);
}

TEST_CASE("schedule source validates the library") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kSingleStream;

  CHECK_THROWS_AS(ScheduleSource(Resolve(settings), 0),
                  std::invalid_argument);

  settings.performance_sample_count = 2048;
  CHECK_THROWS_AS(ScheduleSource(Resolve(settings), 1024),
                  std::invalid_argument);
}

TEST_CASE("schedules with the same seed are identical") {
  TestSettings settings;
  settings.task_name = "image-classification-heavy";
  settings.scenario = Scenario::kServer;
  settings.target_qps = 500.0;
  settings.min_query_count = 64;
  settings.min_duration = DurationFromMillis(10);

  const Schedule a = BuildSchedule(Resolve(settings), 256);
  const Schedule b = BuildSchedule(Resolve(settings), 256);
  CHECK(a.issue_times == b.issue_times);
  CHECK(a.sample_pool == b.sample_pool);

  settings.schedule_seed += 1;
  const Schedule c = BuildSchedule(Resolve(settings), 256);
  CHECK(a.issue_times != c.issue_times);
}

}  // namespace
}  // namespace loadgauge
