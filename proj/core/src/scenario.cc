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

#include "loadgauge/scenario.h"

#include <algorithm>

namespace loadgauge {
namespace {

// Run-size floors. Vision tasks measure a 0.99 tail and need 270,336
// queries in latency-bound scenarios; translation measures a 0.97 tail and
// needs 90,112. Single-stream is sequential, so a lighter floor applies.
constexpr MinQueryCounts kVisionMinQueries = {
    .single_stream = 1024,
    .multi_stream = 270336,
    .server = 270336,
    .offline = 1,
};

constexpr MinQueryCounts kTranslationMinQueries = {
    .single_stream = 1024,
    .multi_stream = 90112,
    .server = 90112,
    .offline = 1,
};

constexpr int64_t kOfflineMinSamples = 24576;

std::vector<BenchmarkProfile> MakeBuiltinProfiles() {
  std::vector<BenchmarkProfile> profiles;

  {
    BenchmarkProfile p;
    p.task_name = "image-classification-heavy";
    p.multistream_arrival_interval = DurationFromMillis(50);
    p.server_qos_bound = DurationFromMillis(15);
    p.tail_percentile = 0.99;
    p.server_overtime_max = 0.01;
    p.accuracy_reference = 76.456;
    p.accuracy_target_fraction = 0.99;
    p.min_queries = kVisionMinQueries;
    p.offline_min_samples = kOfflineMinSamples;
    p.multistream_supported = true;
    profiles.push_back(std::move(p));
  }
  {
    BenchmarkProfile p;
    p.task_name = "image-classification-light";
    p.multistream_arrival_interval = DurationFromMillis(50);
    p.server_qos_bound = DurationFromMillis(10);
    p.tail_percentile = 0.99;
    p.server_overtime_max = 0.01;
    p.accuracy_reference = 71.676;
    p.accuracy_target_fraction = 0.98;
    p.min_queries = kVisionMinQueries;
    p.offline_min_samples = kOfflineMinSamples;
    p.multistream_supported = true;
    profiles.push_back(std::move(p));
  }
  {
    BenchmarkProfile p;
    p.task_name = "object-detection-heavy";
    p.multistream_arrival_interval = DurationFromMillis(66);
    p.server_qos_bound = DurationFromMillis(100);
    p.tail_percentile = 0.99;
    p.server_overtime_max = 0.01;
    p.accuracy_reference = 0.20;
    p.accuracy_target_fraction = 0.99;
    p.min_queries = kVisionMinQueries;
    p.offline_min_samples = kOfflineMinSamples;
    p.multistream_supported = true;
    profiles.push_back(std::move(p));
  }
  {
    BenchmarkProfile p;
    p.task_name = "object-detection-light";
    p.multistream_arrival_interval = DurationFromMillis(50);
    p.server_qos_bound = DurationFromMillis(10);
    p.tail_percentile = 0.99;
    p.server_overtime_max = 0.01;
    p.accuracy_reference = 0.22;
    p.accuracy_target_fraction = 0.99;
    p.min_queries = kVisionMinQueries;
    p.offline_min_samples = kOfflineMinSamples;
    p.multistream_supported = true;
    profiles.push_back(std::move(p));
  }
  {
    BenchmarkProfile p;
    p.task_name = "machine-translation";
    p.multistream_arrival_interval = DurationFromMillis(100);
    p.server_qos_bound = DurationFromMillis(250);
    p.tail_percentile = 0.97;
    p.server_overtime_max = 0.03;
    p.accuracy_reference = 23.9;
    p.accuracy_target_fraction = 0.99;
    p.min_queries = kTranslationMinQueries;
    p.offline_min_samples = kOfflineMinSamples;
    p.multistream_supported = true;
    profiles.push_back(std::move(p));
  }

  return profiles;
}

}  // namespace

std::string_view ToString(Scenario scenario) {
  switch (scenario) {
    case Scenario::kSingleStream:
      return "single_stream";
    case Scenario::kMultiStream:
      return "multi_stream";
    case Scenario::kServer:
      return "server";
    case Scenario::kOffline:
      return "offline";
  }
  return "unknown";
}

std::string_view ToString(TestMode mode) {
  switch (mode) {
    case TestMode::kPerformance:
      return "performance";
    case TestMode::kAccuracy:
      return "accuracy";
  }
  return "unknown";
}

std::string_view ToString(ClockMode mode) {
  switch (mode) {
    case ClockMode::kVirtual:
      return "virtual";
    case ClockMode::kWall:
      return "wall";
  }
  return "unknown";
}

std::optional<Scenario> ScenarioFromString(std::string_view text) {
  if (text == "single_stream") return Scenario::kSingleStream;
  if (text == "multi_stream") return Scenario::kMultiStream;
  if (text == "server") return Scenario::kServer;
  if (text == "offline") return Scenario::kOffline;
  return std::nullopt;
}

std::optional<TestMode> TestModeFromString(std::string_view text) {
  if (text == "performance") return TestMode::kPerformance;
  if (text == "accuracy") return TestMode::kAccuracy;
  return std::nullopt;
}

std::optional<ClockMode> ClockModeFromString(std::string_view text) {
  if (text == "virtual") return ClockMode::kVirtual;
  if (text == "wall") return ClockMode::kWall;
  return std::nullopt;
}

std::span<const BenchmarkProfile> BuiltinProfiles() {
  static const std::vector<BenchmarkProfile> profiles = MakeBuiltinProfiles();
  return profiles;
}

const BenchmarkProfile* FindProfile(std::span<const BenchmarkProfile> profiles,
                                    std::string_view task_name) {
  const auto it = std::find_if(profiles.begin(), profiles.end(),
                               [task_name](const BenchmarkProfile& p) {
                                 return p.task_name == task_name;
                               });
  return it == profiles.end() ? nullptr : &*it;
}

int64_t ScenarioMinQueries(const BenchmarkProfile& profile, Scenario scenario) {
  switch (scenario) {
    case Scenario::kSingleStream:
      return profile.min_queries.single_stream;
    case Scenario::kMultiStream:
      return profile.min_queries.multi_stream;
    case Scenario::kServer:
      return profile.min_queries.server;
    case Scenario::kOffline:
      return profile.min_queries.offline;
  }
  return 0;
}

SettingsValidation ValidateSettings(
    const TestSettings& settings, std::span<const BenchmarkProfile> profiles) {
  SettingsValidation result;
  auto fail = [&result](std::string message) {
    result.errors.push_back(std::move(message));
  };

  const BenchmarkProfile* profile =
      FindProfile(profiles, settings.task_name);
  if (profile == nullptr) {
    std::string known;
    for (const auto& p : profiles) {
      known += known.empty() ? p.task_name : ", " + p.task_name;
    }
    fail("unknown task \"" + settings.task_name + "\" (known tasks: " + known +
         ")");
  }

  if (settings.target_qps < 0.0) {
    fail("target_qps must be nonnegative");
  }
  if (settings.samples_per_query < 0) {
    fail("samples_per_query must be nonnegative");
  }
  if (settings.min_duration < Duration::zero()) {
    fail("min_duration must be nonnegative");
  }
  if (settings.min_query_count < 0) {
    fail("min_query_count must be nonnegative");
  }
  if (settings.min_sample_count < 0) {
    fail("min_sample_count must be nonnegative");
  }
  if (settings.performance_sample_count < 0) {
    fail("performance_sample_count must be nonnegative");
  }

  switch (settings.scenario) {
    case Scenario::kServer:
      if (settings.target_qps <= 0.0) {
        fail("server scenario requires target_qps > 0");
      }
      break;
    case Scenario::kMultiStream:
      if (settings.samples_per_query < 1) {
        fail("multi_stream scenario requires samples_per_query >= 1");
      }
      if (profile != nullptr && !profile->multistream_supported) {
        fail("task \"" + profile->task_name +
             "\" does not support the multi_stream scenario");
      }
      break;
    case Scenario::kSingleStream:
    case Scenario::kOffline:
      break;
  }

  if (settings.min_sample_count > 0 &&
      settings.scenario != Scenario::kOffline) {
    fail("min_sample_count applies to the offline scenario only");
  }

  if (!result.errors.empty()) {
    return result;
  }

  ResolvedSettings resolved;
  resolved.settings = settings;
  resolved.profile = *profile;

  TestSettings& s = resolved.settings;
  if (s.min_duration == Duration::zero()) {
    s.min_duration = kDefaultMinDuration;
  }
  if (s.min_query_count == 0) {
    s.min_query_count = ScenarioMinQueries(*profile, s.scenario);
  }
  switch (s.scenario) {
    case Scenario::kSingleStream:
    case Scenario::kServer:
      s.samples_per_query = 1;
      break;
    case Scenario::kMultiStream:
      break;
    case Scenario::kOffline:
      s.min_sample_count =
          std::max(s.min_sample_count, profile->offline_min_samples);
      s.samples_per_query = s.min_sample_count;
      break;
  }

  result.resolved = std::move(resolved);
  return result;
}

}  // namespace loadgauge
