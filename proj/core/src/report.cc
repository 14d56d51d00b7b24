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

#include "loadgauge/report.h"

#include <iomanip>
#include <sstream>

#include "loadgauge/stats.h"

namespace loadgauge {
namespace {

/// At most 1% of multi-stream queries may run long enough to skip an
/// arrival slot; beyond that the reported stream count is not credible.
constexpr double kMultiStreamMaxSkipFraction = 0.01;

}  // namespace

int64_t TotalSampleCount(const RunLog& log) {
  int64_t total = 0;
  for (const QueryRecord& rec : log.records) {
    total += rec.sample_count;
  }
  return total;
}

RunResult CheckValidity(const RunLog& log, const BenchmarkProfile& profile,
                        const TestSettings& settings) {
  RunResult result;
  result.task_name = profile.task_name;
  result.scenario = settings.scenario;
  result.mode = settings.mode;
  result.query_count = static_cast<int64_t>(log.records.size());
  result.duration = log.duration;

  std::vector<Duration> latencies;
  latencies.reserve(log.records.size());
  for (const QueryRecord& rec : log.records) {
    latencies.push_back(rec.latency);
  }

  const double duration_s = ToSeconds(log.duration);

  switch (settings.scenario) {
    case Scenario::kSingleStream:
      result.metric_name = "p90_latency_ms";
      if (!latencies.empty()) {
        result.metric_value = ToMillis(Percentile(latencies, 0.90));
      }
      break;
    case Scenario::kMultiStream:
      result.metric_name = "streams";
      result.metric_value = static_cast<double>(settings.samples_per_query);
      if (result.query_count > 0) {
        result.skipped_query_fraction =
            static_cast<double>(log.queries_with_skips) /
            static_cast<double>(result.query_count);
      }
      break;
    case Scenario::kServer:
      result.metric_name = "qps";
      if (duration_s > 0.0) {
        result.metric_value =
            static_cast<double>(result.query_count) / duration_s;
      }
      if (!latencies.empty()) {
        result.overtime_fraction =
            OvertimeFraction(latencies, profile.server_qos_bound);
      }
      break;
    case Scenario::kOffline:
      result.metric_name = "samples_per_second";
      if (duration_s > 0.0) {
        result.metric_value =
            static_cast<double>(TotalSampleCount(log)) / duration_s;
      }
      break;
  }

  auto violate = [&result](std::string rule, double measured, double limit) {
    result.violations.push_back({std::move(rule), measured, limit});
  };

  if (log.aborted) {
    violate("aborted: " + log.abort_reason, 0.0, 0.0);
  }

  if (settings.mode == TestMode::kPerformance) {
    if (result.query_count < settings.min_query_count) {
      violate("min_query_count", static_cast<double>(result.query_count),
              static_cast<double>(settings.min_query_count));
    }
    if (log.duration < settings.min_duration) {
      violate("min_duration", duration_s, ToSeconds(settings.min_duration));
    }
    switch (settings.scenario) {
      case Scenario::kServer:
        if (result.overtime_fraction.has_value() &&
            *result.overtime_fraction > profile.server_overtime_max) {
          violate("latency_bound_overtime", *result.overtime_fraction,
                  profile.server_overtime_max);
        }
        break;
      case Scenario::kMultiStream:
        if (result.skipped_query_fraction.has_value() &&
            *result.skipped_query_fraction > kMultiStreamMaxSkipFraction) {
          violate("skipped_intervals", *result.skipped_query_fraction,
                  kMultiStreamMaxSkipFraction);
        }
        break;
      case Scenario::kOffline: {
        const int64_t samples = TotalSampleCount(log);
        if (samples < profile.offline_min_samples) {
          violate("offline_min_samples", static_cast<double>(samples),
                  static_cast<double>(profile.offline_min_samples));
        }
        break;
      }
      case Scenario::kSingleStream:
        break;
    }
  }

  result.valid = result.violations.empty();
  return result;
}

RunResult CheckValidity(const RunLog& log) {
  return CheckValidity(log, log.profile, log.settings);
}

AccuracyResult CheckAccuracy(double measured,
                             const BenchmarkProfile& profile) {
  AccuracyResult result;
  result.measured = measured;
  result.reference = profile.accuracy_reference;
  result.target_fraction = profile.accuracy_target_fraction;
  result.threshold =
      profile.accuracy_reference * profile.accuracy_target_fraction;
  result.pass = measured >= result.threshold;
  return result;
}

std::string SummarizeResults(std::span<const RunResult> results) {
  std::ostringstream out;
  out << std::left << std::setw(30) << "task" << std::setw(15) << "scenario"
      << std::setw(13) << "mode" << std::setw(20) << "metric" << std::right
      << std::setw(16) << "value" << "  " << std::left << "valid" << '\n';
  for (const RunResult& r : results) {
    std::ostringstream value;
    value << std::fixed << std::setprecision(4) << r.metric_value;
    out << std::left << std::setw(30) << r.task_name << std::setw(15)
        << ToString(r.scenario) << std::setw(13) << ToString(r.mode)
        << std::setw(20) << r.metric_name << std::right << std::setw(16)
        << value.str() << "  " << std::left << (r.valid ? "yes" : "NO")
        << '\n';
    for (const Violation& v : r.violations) {
      out << "    violation: " << v.rule << " (measured "
          << std::setprecision(6) << v.measured << ", limit " << v.limit
          << ")\n";
    }
  }
  return out.str();
}

}  // namespace loadgauge
