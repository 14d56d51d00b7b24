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

#include <string>
#include <vector>

#include "doctest.h"

namespace loadgauge {
namespace {

const BenchmarkProfile& Profile(const std::string& task) {
  const BenchmarkProfile* profile = FindProfile(BuiltinProfiles(), task);
  REQUIRE(profile != nullptr);
  return *profile;
}

/// A log skeleton whose floors are set low so individual rules can be
/// exercised one at a time.
RunLog MakeLog(Scenario scenario, const std::string& task) {
  RunLog log;
  log.settings.scenario = scenario;
  log.settings.task_name = task;
  log.settings.min_query_count = 1;
  log.settings.min_duration = DurationFromMillis(1);
  log.settings.samples_per_query = 1;
  log.profile = Profile(task);
  return log;
}

void AddQuery(RunLog& log, Duration issue, Duration latency,
              int64_t sample_count = 1, int64_t skips = 0) {
  QueryRecord record;
  record.query_id = static_cast<int64_t>(log.records.size());
  record.issue_time = issue;
  record.completion_time = issue + latency;
  record.latency = latency;
  record.sample_count = sample_count;
  record.skipped_intervals = skips;
  log.records.push_back(record);
  log.duration = std::max(log.duration, record.completion_time);
  if (skips > 0) {
    log.skipped_intervals += skips;
    ++log.queries_with_skips;
  }
}

TEST_CASE("single-stream reports the 90th percentile latency") {
  RunLog log = MakeLog(Scenario::kSingleStream, "image-classification-heavy");
  // Latencies 1..100 ms inserted out of order; nearest-rank p90 is 90 ms.
  for (int64_t i = 0; i < 100; ++i) {
    const int64_t ms = (i * 37) % 100 + 1;
    AddQuery(log, DurationFromMillis(i * 10), DurationFromMillis(ms));
  }
  const RunResult result = CheckValidity(log);
  CHECK(result.valid);
  CHECK(result.metric_name == "p90_latency_ms");
  CHECK(result.metric_value == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(result.query_count == 100);
}

TEST_CASE("too few queries breaks the count floor") {
  RunLog log = MakeLog(Scenario::kSingleStream, "image-classification-heavy");
  log.settings.min_query_count = 100;
  for (int64_t i = 0; i < 99; ++i) {
    AddQuery(log, DurationFromMillis(i), DurationFromMillis(1));
  }
  const RunResult result = CheckValidity(log);
  CHECK(!result.valid);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].rule == "min_query_count");
  CHECK(result.violations[0].measured == 99.0);
  CHECK(result.violations[0].limit == 100.0);
}

TEST_CASE("a short run breaks the duration floor; exactly at it passes") {
  RunLog log = MakeLog(Scenario::kSingleStream, "image-classification-heavy");
  log.settings.min_duration = DurationFromSeconds(60);
  AddQuery(log, Duration::zero(), DurationFromMillis(5));
  log.duration = DurationFromSeconds(59);
  RunResult result = CheckValidity(log);
  CHECK(!result.valid);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].rule == "min_duration");
  CHECK(result.violations[0].measured == doctest::Approx(59.0));
  CHECK(result.violations[0].limit == doctest::Approx(60.0));

  log.duration = DurationFromSeconds(60);
  result = CheckValidity(log);
  CHECK(result.valid);
}

TEST_CASE("server overtime sits exactly on the 1 percent boundary") {
  const Duration bound =
      Profile("image-classification-heavy").server_qos_bound;
  REQUIRE(bound == DurationFromMillis(15));

  RunLog log = MakeLog(Scenario::kServer, "image-classification-heavy");
  for (int64_t i = 0; i < 990; ++i) {
    AddQuery(log, DurationFromMillis(i), DurationFromMillis(10));
  }
  for (int64_t i = 0; i < 10; ++i) {
    AddQuery(log, DurationFromMillis(990 + i), DurationFromMillis(20));
  }
  RunResult result = CheckValidity(log);
  CHECK(result.valid);  // 10 of 1000 is exactly the limit, not over it
  REQUIRE(result.overtime_fraction.has_value());
  CHECK(*result.overtime_fraction == doctest::Approx(0.01));
  CHECK(result.metric_name == "qps");

  // One more long completion tips it over: 11 of 1001.
  AddQuery(log, DurationFromMillis(1000), DurationFromMillis(20));
  result = CheckValidity(log);
  CHECK(!result.valid);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].rule == "latency_bound_overtime");
  CHECK(result.violations[0].measured == doctest::Approx(11.0 / 1001.0));
  CHECK(result.violations[0].limit == 0.01);
  CHECK(result.violations[0].measured > result.violations[0].limit);
}

TEST_CASE("a completion exactly at the bound is not overtime") {
  RunLog log = MakeLog(Scenario::kServer, "image-classification-heavy");
  for (int64_t i = 0; i < 100; ++i) {
    AddQuery(log, DurationFromMillis(i), DurationFromMillis(15));
  }
  const RunResult result = CheckValidity(log);
  CHECK(result.valid);
  REQUIRE(result.overtime_fraction.has_value());
  CHECK(*result.overtime_fraction == 0.0);
}

TEST_CASE("the translation task allows 3 percent overtime") {
  const BenchmarkProfile& profile = Profile("machine-translation");
  REQUIRE(profile.server_overtime_max == 0.03);
  const Duration over = profile.server_qos_bound + DurationFromMillis(1);

  RunLog log = MakeLog(Scenario::kServer, "machine-translation");
  for (int64_t i = 0; i < 97; ++i) {
    AddQuery(log, DurationFromMillis(i), DurationFromMillis(50));
  }
  for (int64_t i = 0; i < 3; ++i) {
    AddQuery(log, DurationFromMillis(97 + i), over);
  }
  CHECK(CheckValidity(log).valid);

  // Push one more past the bound: 4 of 101 breaks 3 percent.
  AddQuery(log, DurationFromMillis(100), over);
  const RunResult result = CheckValidity(log);
  CHECK(!result.valid);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].rule == "latency_bound_overtime");
}

TEST_CASE("the server metric is completed queries over the duration") {
  RunLog log = MakeLog(Scenario::kServer, "object-detection-heavy");
  for (int64_t i = 0; i < 200; ++i) {
    AddQuery(log, DurationFromMillis(i * 10), DurationFromMillis(5));
  }
  log.duration = DurationFromSeconds(2);
  const RunResult result = CheckValidity(log);
  CHECK(result.metric_value == doctest::Approx(100.0));
}

TEST_CASE("multi-stream skip budget is 1 percent of queries") {
  RunLog log = MakeLog(Scenario::kMultiStream, "image-classification-heavy");
  log.settings.samples_per_query = 8;
  for (int64_t i = 0; i < 99; ++i) {
    AddQuery(log, DurationFromMillis(i * 50), DurationFromMillis(10), 8);
  }
  AddQuery(log, DurationFromMillis(99 * 50), DurationFromMillis(60), 8, 1);

  RunResult result = CheckValidity(log);
  CHECK(result.valid);  // 1 of 100 queries skipped: exactly the limit
  CHECK(result.metric_name == "streams");
  CHECK(result.metric_value == 8.0);
  REQUIRE(result.skipped_query_fraction.has_value());
  CHECK(*result.skipped_query_fraction == doctest::Approx(0.01));

  // A second skipping query among 100 more is 2 of 200: still 1 percent.
  // Concentrate both skips early instead: 2 of 100 breaks the budget.
  RunLog worse = MakeLog(Scenario::kMultiStream,
                         "image-classification-heavy");
  worse.settings.samples_per_query = 8;
  for (int64_t i = 0; i < 98; ++i) {
    AddQuery(worse, DurationFromMillis(i * 50), DurationFromMillis(10), 8);
  }
  AddQuery(worse, DurationFromMillis(98 * 50), DurationFromMillis(60), 8, 1);
  AddQuery(worse, DurationFromMillis(99 * 50), DurationFromMillis(120), 8, 2);
  result = CheckValidity(worse);
  CHECK(!result.valid);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].rule == "skipped_intervals");
  CHECK(result.violations[0].measured == doctest::Approx(0.02));
}

TEST_CASE("offline requires the minimum sample count in its batch") {
  RunLog log = MakeLog(Scenario::kOffline, "image-classification-heavy");
  AddQuery(log, Duration::zero(), DurationFromSeconds(10), 24575);
  RunResult result = CheckValidity(log);
  CHECK(!result.valid);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].rule == "offline_min_samples");
  CHECK(result.violations[0].measured == 24575.0);
  CHECK(result.violations[0].limit == 24576.0);

  RunLog ok = MakeLog(Scenario::kOffline, "image-classification-heavy");
  AddQuery(ok, Duration::zero(), DurationFromSeconds(10), 24576);
  result = CheckValidity(ok);
  CHECK(result.valid);
  CHECK(result.metric_name == "samples_per_second");
  CHECK(result.metric_value == doctest::Approx(2457.6));
}

TEST_CASE("an aborted run is never valid") {
  RunLog log = MakeLog(Scenario::kSingleStream, "image-classification-heavy");
  for (int64_t i = 0; i < 10; ++i) {
    AddQuery(log, DurationFromMillis(i), DurationFromMillis(1));
  }
  log.aborted = true;
  log.abort_reason = "stalled: no pending events with 1 query in flight";

  const RunResult result = CheckValidity(log);
  CHECK(!result.valid);
  REQUIRE(!result.violations.empty());
  CHECK(result.violations[0].rule.rfind("aborted: ", 0) == 0);
  CHECK(result.violations[0].rule.find("stalled") != std::string::npos);
}

TEST_CASE("accuracy verdicts at the frozen thresholds") {
  const BenchmarkProfile& heavy = Profile("image-classification-heavy");
  AccuracyResult result = CheckAccuracy(75.70, heavy);
  CHECK(result.threshold == doctest::Approx(75.69144).epsilon(1e-12));
  CHECK(result.pass);
  CHECK(!CheckAccuracy(75.60, heavy).pass);
  // Exactly at the threshold passes: the target is attainable, not open.
  CHECK(CheckAccuracy(result.threshold, heavy).pass);

  const BenchmarkProfile& light = Profile("image-classification-light");
  result = CheckAccuracy(70.25, light);
  CHECK(result.threshold == doctest::Approx(70.24248).epsilon(1e-12));
  CHECK(result.pass);
  CHECK(!CheckAccuracy(70.20, light).pass);

  CHECK(result.reference == 71.676);
  CHECK(result.target_fraction == 0.98);
}

TEST_CASE("the results table lists every run on its own row") {
  RunLog server = MakeLog(Scenario::kServer, "object-detection-heavy");
  for (int64_t i = 0; i < 100; ++i) {
    AddQuery(server, DurationFromMillis(i * 10), DurationFromMillis(5));
  }
  RunLog stream = MakeLog(Scenario::kMultiStream,
                          "image-classification-heavy");
  stream.settings.samples_per_query = 16;
  for (int64_t i = 0; i < 100; ++i) {
    AddQuery(stream, DurationFromMillis(i * 50), DurationFromMillis(10), 16);
  }

  const std::vector<RunResult> results = {CheckValidity(server),
                                          CheckValidity(stream)};
  const std::string table = SummarizeResults(results);
  CHECK(table.find("object-detection-heavy") != std::string::npos);
  CHECK(table.find("image-classification-heavy") != std::string::npos);
  CHECK(table.find("qps") != std::string::npos);
  CHECK(table.find("streams") != std::string::npos);
  CHECK(table.find("16.0000") != std::string::npos);

  // Violations print under their run's row.
  RunLog bad = MakeLog(Scenario::kSingleStream, "image-classification-heavy");
  bad.settings.min_query_count = 50;
  AddQuery(bad, Duration::zero(), DurationFromMillis(1));
  const std::vector<RunResult> bad_results = {CheckValidity(bad)};
  const std::string bad_table = SummarizeResults(bad_results);
  CHECK(bad_table.find("NO") != std::string::npos);
  CHECK(bad_table.find("violation: min_query_count") != std::string::npos);
}

}  // namespace
}  // namespace loadgauge
