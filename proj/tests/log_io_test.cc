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

#include "loadgauge/log_io.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "loadgauge/harness.h"
#include "loadgauge/sim.h"

namespace loadgauge {
namespace {

RunLog SmallLog() {
  RunLog log;
  log.settings.scenario = Scenario::kServer;
  log.settings.task_name = "object-detection-heavy";
  log.settings.target_qps = 100.0;
  log.settings.min_query_count = 2;
  log.settings.min_duration = DurationFromMillis(1);
  const BenchmarkProfile* profile =
      FindProfile(BuiltinProfiles(), "object-detection-heavy");
  REQUIRE(profile != nullptr);
  log.profile = *profile;

  QueryRecord q0;
  q0.query_id = 0;
  q0.scheduled_time = DurationFromMillis(3);
  q0.issue_time = DurationFromMillis(3);
  q0.completion_time = DurationFromMillis(8);
  q0.latency = DurationFromMillis(5);
  q0.sample_count = 1;
  log.records.push_back(q0);

  QueryRecord q1 = q0;
  q1.query_id = 1;
  q1.scheduled_time = DurationFromMillis(9);
  q1.issue_time = DurationFromMillis(9);
  q1.completion_time = DurationFromMillis(14);
  q1.payload_digest = 0x0123456789abcdefULL;
  log.records.push_back(q1);

  log.accuracy_entries.push_back({1, 42, 0xffff000000000001ULL});
  log.duration = DurationFromMillis(14);
  return log;
}

TEST_CASE("serialization is canonical: parse then re-serialize is identity") {
  const RunLog log = SmallLog();
  const std::string text = RunLogToJsonLines(log);
  const RunLog parsed = RunLogFromJsonLines(text, "mem");
  CHECK(RunLogToJsonLines(parsed) == text);

  CHECK(parsed.settings.task_name == log.settings.task_name);
  CHECK(parsed.settings.target_qps == log.settings.target_qps);
  CHECK(parsed.profile.task_name == log.profile.task_name);
  REQUIRE(parsed.records.size() == 2);
  CHECK(parsed.records[0].scheduled_time == DurationFromMillis(3));
  CHECK(parsed.records[1].latency == DurationFromMillis(5));
  REQUIRE(parsed.records[1].payload_digest.has_value());
  CHECK(*parsed.records[1].payload_digest == 0x0123456789abcdefULL);
  CHECK(!parsed.records[0].payload_digest.has_value());
  REQUIRE(parsed.accuracy_entries.size() == 1);
  CHECK(parsed.accuracy_entries[0].sample_index == 42);
  CHECK(parsed.accuracy_entries[0].digest == 0xffff000000000001ULL);
  CHECK(parsed.duration == DurationFromMillis(14));
  CHECK(!parsed.aborted);
}

TEST_CASE("a real run's log survives the round trip byte for byte") {
  VirtualClock clock;
  SimConfig config;
  SimulatedSut sut(config, clock);
  InMemorySampleLibrary library(128);

  TestSettings settings;
  settings.scenario = Scenario::kServer;
  settings.task_name = "object-detection-heavy";
  settings.target_qps = 200.0;
  settings.min_query_count = 64;
  settings.min_duration = DurationFromMillis(1);
  const SettingsValidation validation =
      ValidateSettings(settings, BuiltinProfiles());
  REQUIRE(validation.ok());

  HarnessOptions options;
  options.accuracy_digest_sampling = 0.3;
  const RunLog log =
      RunPerformance(sut, library, *validation.resolved, clock, options);
  REQUIRE(!log.aborted);
  REQUIRE(!log.accuracy_entries.empty());

  const std::string text = RunLogToJsonLines(log);
  CHECK(RunLogToJsonLines(RunLogFromJsonLines(text, "mem")) == text);
}

TEST_CASE("the first line is a v0 header in canonical key order") {
  const std::string text = RunLogToJsonLines(SmallLog());
  CHECK(text.rfind("{\"record\":\"header\",\"version\":\"v0\",\"settings\":",
                   0) == 0);
  CHECK(text.find("\"wall_started_at\"") == std::string::npos);
}

TEST_CASE("wall start time appears in the header only when present") {
  RunLog log = SmallLog();
  log.wall_started_at = "2026-08-16T09:30:00Z";
  const std::string text = RunLogToJsonLines(log);
  CHECK(text.find("\"wall_started_at\":\"2026-08-16T09:30:00Z\"") !=
        std::string::npos);
  const RunLog parsed = RunLogFromJsonLines(text, "mem");
  CHECK(parsed.wall_started_at == "2026-08-16T09:30:00Z");
  CHECK(RunLogToJsonLines(parsed) == text);
}

TEST_CASE("summary carries accuracy and abort facts when they exist") {
  RunLog log = SmallLog();
  log.measured_accuracy = 75.70;
  log.aborted = true;
  log.abort_reason = "watchdog: no completions for 60.000000s";
  const std::string text = RunLogToJsonLines(log);
  const RunLog parsed = RunLogFromJsonLines(text, "mem");
  REQUIRE(parsed.measured_accuracy.has_value());
  CHECK(*parsed.measured_accuracy == 75.70);
  CHECK(parsed.aborted);
  CHECK(parsed.abort_reason == log.abort_reason);
  CHECK(RunLogToJsonLines(parsed) == text);
}

TEST_CASE("digests serialize as 16 lowercase hex characters") {
  RunLog log = SmallLog();
  log.records[1].payload_digest = 0xff;
  const std::string text = RunLogToJsonLines(log);
  CHECK(text.find("\"digest\":\"00000000000000ff\"") != std::string::npos);
  const RunLog parsed = RunLogFromJsonLines(text, "mem");
  CHECK(*parsed.records[1].payload_digest == 0xffULL);
}

TEST_CASE("empty lines are tolerated but never produced") {
  const RunLog log = SmallLog();
  std::string text = RunLogToJsonLines(log);
  const size_t first_newline = text.find('\n');
  text.insert(first_newline + 1, "\n\n");
  const RunLog parsed = RunLogFromJsonLines(text, "loose");
  CHECK(parsed.records.size() == 2);
  CHECK(RunLogToJsonLines(parsed) == RunLogToJsonLines(log));
}

TEST_CASE("parse errors name the origin and line") {
  const std::string good = RunLogToJsonLines(SmallLog());
  const size_t first_newline = good.find('\n');

  SUBCASE("broken JSON") {
    std::string text = good;
    text.insert(first_newline + 1, "{ not json\n");
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("run.log:2:"), LogParseError);
  }

  SUBCASE("a line that is not a record") {
    std::string text = good;
    text.insert(first_newline + 1, "[1,2,3]\n");
    CHECK_THROWS_WITH_AS(
        RunLogFromJsonLines(text, "run.log"),
        doctest::Contains("object with a \"record\" key"), LogParseError);
  }

  SUBCASE("query before header") {
    const std::string text = "{\"record\":\"query\"}\n";
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("before the header"),
                         LogParseError);
  }

  SUBCASE("header not on the first line") {
    const std::string text = "\n" + good;
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("header must be the first record"),
                         LogParseError);
  }

  SUBCASE("duplicate header") {
    std::string text = good;
    text.insert(first_newline + 1,
                good.substr(0, first_newline + 1));
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("duplicate header"),
                         LogParseError);
  }

  SUBCASE("empty input") {
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines("", "run.log"),
                         doctest::Contains("missing header record"),
                         LogParseError);
  }

  SUBCASE("missing summary") {
    const std::string text = good.substr(0, first_newline + 1);
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("missing summary record"),
                         LogParseError);
  }

  SUBCASE("unknown record kind") {
    std::string text = good;
    text.insert(first_newline + 1, "{\"record\":\"weird\"}\n");
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("unknown record kind \"weird\""),
                         LogParseError);
  }

  SUBCASE("records after the summary") {
    std::string text = good + "{\"record\":\"query\"}\n";
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("after the summary"),
                         LogParseError);
  }

  SUBCASE("unsupported version") {
    std::string text = good;
    const size_t at = text.find("\"version\":\"v0\"");
    REQUIRE(at != std::string::npos);
    text.replace(at, 14, "\"version\":\"v1\"");
    CHECK_THROWS_WITH_AS(RunLogFromJsonLines(text, "run.log"),
                         doctest::Contains("unsupported log version \"v1\""),
                         LogParseError);
  }

  SUBCASE("malformed digest") {
    std::string text = good;
    const size_t at = text.find("0123456789abcdef");
    REQUIRE(at != std::string::npos);
    text.replace(at, 16, "0123456789ABCDEF");
    CHECK_THROWS_WITH_AS(
        RunLogFromJsonLines(text, "run.log"),
        doctest::Contains("16 lowercase hex characters"), LogParseError);
  }

  SUBCASE("a query record missing a field") {
    std::string text = good;
    const size_t at = text.find("\"latency_ns\":");
    REQUIRE(at != std::string::npos);
    // Damage the key so the record parses as JSON but lacks latency_ns.
    text.replace(at, 13, "\"latency_xs\":");
    CHECK_THROWS_AS(RunLogFromJsonLines(text, "run.log"), LogParseError);
  }
}

TEST_CASE("a log with no queries still round trips") {
  RunLog log = SmallLog();
  log.records.clear();
  log.accuracy_entries.clear();
  const std::string text = RunLogToJsonLines(log);
  const RunLog parsed = RunLogFromJsonLines(text, "mem");
  CHECK(parsed.records.empty());
  CHECK(RunLogToJsonLines(parsed) == text);
}

TEST_CASE("log files round trip through the filesystem") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "loadgauge_log_io_test.log")
          .string();
  const RunLog log = SmallLog();
  WriteRunLog(log, path);
  const RunLog back = ReadRunLog(path);
  CHECK(RunLogToJsonLines(back) == RunLogToJsonLines(log));
  std::remove(path.c_str());

  CHECK_THROWS_WITH_AS(ReadRunLog("/nonexistent/dir/run.log"),
                       doctest::Contains("/nonexistent/dir/run.log"),
                       std::runtime_error);
}

}  // namespace
}  // namespace loadgauge
