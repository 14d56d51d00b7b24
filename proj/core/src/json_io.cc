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

#include "loadgauge/json_io.h"

#include <fstream>
#include <set>
#include <stdexcept>

namespace loadgauge {
namespace {

// Tracks which keys a parser consumed so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const Json& value, std::string context)
      : value_(value), context_(std::move(context)) {
    if (!value_.is_object()) {
      throw std::runtime_error(context_ + ": expected a JSON object");
    }
  }

  bool Has(const char* key) {
    return value_.contains(key);
  }

  const Json& Require(const char* key) {
    const auto it = value_.find(key);
    if (it == value_.end()) {
      throw std::runtime_error(context_ + ": missing required key \"" +
                               key + "\"");
    }
    consumed_.insert(key);
    return *it;
  }

  template <typename T>
  T Get(const char* key) {
    try {
      return Require(key).get<T>();
    } catch (const Json::exception& e) {
      throw std::runtime_error(context_ + ": key \"" + key + "\": " +
                               e.what());
    }
  }

  template <typename T>
  T GetOr(const char* key, T fallback) {
    if (!value_.contains(key)) {
      return fallback;
    }
    return Get<T>(key);
  }

  void RejectUnknown() {
    for (const auto& [key, unused] : value_.items()) {
      if (!consumed_.contains(key)) {
        throw std::runtime_error(context_ + ": unknown key \"" + key + "\"");
      }
    }
  }

 private:
  const Json& value_;
  std::string context_;
  std::set<std::string> consumed_;
};

}  // namespace

Json ProfileToJson(const BenchmarkProfile& profile) {
  Json value;
  value["task"] = profile.task_name;
  value["multistream_arrival_interval_ms"] =
      ToMillis(profile.multistream_arrival_interval);
  value["server_qos_bound_ms"] = ToMillis(profile.server_qos_bound);
  value["tail_percentile"] = profile.tail_percentile;
  value["server_overtime_max"] = profile.server_overtime_max;
  value["accuracy_reference"] = profile.accuracy_reference;
  value["accuracy_target_fraction"] = profile.accuracy_target_fraction;
  value["min_queries"] = Json{
      {"single_stream", profile.min_queries.single_stream},
      {"multi_stream", profile.min_queries.multi_stream},
      {"server", profile.min_queries.server},
      {"offline", profile.min_queries.offline},
  };
  value["offline_min_samples"] = profile.offline_min_samples;
  value["multistream_supported"] = profile.multistream_supported;
  return value;
}

BenchmarkProfile ProfileFromJson(const Json& value) {
  ObjectReader reader(value, "profile");
  BenchmarkProfile profile;
  profile.task_name = reader.Get<std::string>("task");
  profile.multistream_arrival_interval =
      DurationFromMillisF(reader.Get<double>("multistream_arrival_interval_ms"));
  profile.server_qos_bound =
      DurationFromMillisF(reader.Get<double>("server_qos_bound_ms"));
  profile.tail_percentile = reader.Get<double>("tail_percentile");
  profile.server_overtime_max = reader.Get<double>("server_overtime_max");
  profile.accuracy_reference = reader.Get<double>("accuracy_reference");
  profile.accuracy_target_fraction =
      reader.Get<double>("accuracy_target_fraction");
  {
    ObjectReader counts(reader.Require("min_queries"),
                        "profile.min_queries");
    profile.min_queries.single_stream = counts.Get<int64_t>("single_stream");
    profile.min_queries.multi_stream = counts.Get<int64_t>("multi_stream");
    profile.min_queries.server = counts.Get<int64_t>("server");
    profile.min_queries.offline = counts.Get<int64_t>("offline");
    counts.RejectUnknown();
  }
  profile.offline_min_samples = reader.Get<int64_t>("offline_min_samples");
  profile.multistream_supported = reader.Get<bool>("multistream_supported");
  reader.RejectUnknown();
  return profile;
}

std::vector<BenchmarkProfile> ProfilesFromJson(const Json& value) {
  const Json* array = &value;
  if (value.is_object()) {
    ObjectReader reader(value, "profiles file");
    array = &reader.Require("profiles");
    reader.RejectUnknown();
  }
  if (!array->is_array()) {
    throw std::runtime_error("profiles: expected an array");
  }
  std::vector<BenchmarkProfile> profiles;
  profiles.reserve(array->size());
  for (const Json& entry : *array) {
    profiles.push_back(ProfileFromJson(entry));
  }
  return profiles;
}

Json ProfilesToJson(std::span<const BenchmarkProfile> profiles) {
  Json array = Json::array();
  for (const BenchmarkProfile& profile : profiles) {
    array.push_back(ProfileToJson(profile));
  }
  return Json{{"profiles", std::move(array)}};
}

Json SettingsToJson(const TestSettings& settings) {
  Json value;
  value["scenario"] = ToString(settings.scenario);
  value["mode"] = ToString(settings.mode);
  value["task"] = settings.task_name;
  value["schedule_seed"] = settings.schedule_seed;
  value["sample_seed"] = settings.sample_seed;
  value["target_qps"] = settings.target_qps;
  value["samples_per_query"] = settings.samples_per_query;
  value["min_duration_ms"] = ToMillis(settings.min_duration);
  value["min_query_count"] = settings.min_query_count;
  value["min_sample_count"] = settings.min_sample_count;
  value["performance_sample_count"] = settings.performance_sample_count;
  value["clock"] = ToString(settings.clock);
  return value;
}

TestSettings SettingsFromJson(const Json& value) {
  ObjectReader reader(value, "settings");
  TestSettings settings;
  if (reader.Has("scenario")) {
    const auto text = reader.Get<std::string>("scenario");
    const auto scenario = ScenarioFromString(text);
    if (!scenario) {
      throw std::runtime_error("settings: unknown scenario \"" + text + "\"");
    }
    settings.scenario = *scenario;
  }
  if (reader.Has("mode")) {
    const auto text = reader.Get<std::string>("mode");
    const auto mode = TestModeFromString(text);
    if (!mode) {
      throw std::runtime_error("settings: unknown mode \"" + text + "\"");
    }
    settings.mode = *mode;
  }
  settings.task_name = reader.GetOr<std::string>("task", "");
  settings.schedule_seed =
      reader.GetOr<uint64_t>("schedule_seed", kDefaultScheduleSeed);
  settings.sample_seed =
      reader.GetOr<uint64_t>("sample_seed", kDefaultSampleSeed);
  settings.target_qps = reader.GetOr<double>("target_qps", 0.0);
  settings.samples_per_query = reader.GetOr<int64_t>("samples_per_query", 0);
  settings.min_duration =
      DurationFromMillisF(reader.GetOr<double>("min_duration_ms", 0.0));
  settings.min_query_count = reader.GetOr<int64_t>("min_query_count", 0);
  settings.min_sample_count = reader.GetOr<int64_t>("min_sample_count", 0);
  settings.performance_sample_count =
      reader.GetOr<int64_t>("performance_sample_count", 0);
  if (reader.Has("clock")) {
    const auto text = reader.Get<std::string>("clock");
    const auto clock = ClockModeFromString(text);
    if (!clock) {
      throw std::runtime_error("settings: unknown clock \"" + text + "\"");
    }
    settings.clock = *clock;
  }
  reader.RejectUnknown();
  return settings;
}

Json SimConfigToJson(const SimConfig& config) {
  Json value;
  value["name"] = config.name;
  value["base_latency_per_sample_ms"] =
      ToMillis(config.base_latency_per_sample);
  value["fixed_overhead_ms"] = ToMillis(config.fixed_overhead);
  value["batch_efficiency"] = config.batch_efficiency;
  value["max_batch"] = config.max_batch;
  value["concurrency"] = config.concurrency;
  value["max_batch_wait_ms"] = ToMillis(config.max_batch_wait);
  value["jitter"] = Json{
      {"kind",
       config.jitter.kind == JitterSpec::Kind::kExponential ? "exponential"
                                                            : "none"},
      {"mean_ms", ToMillis(config.jitter.mean)},
  };
  value["caching_enabled"] = config.caching_enabled;
  value["cache_hit_latency_ms"] = ToMillis(config.cache_hit_latency);
  value["accuracy_error_rate"] = config.accuracy_error_rate;
  value["seed"] = config.seed;
  return value;
}

SimConfig SimConfigFromJson(const Json& value) {
  ObjectReader reader(value, "sim config");
  SimConfig config;
  config.name = reader.GetOr<std::string>("name", "sim");
  config.base_latency_per_sample = DurationFromMillisF(
      reader.GetOr<double>("base_latency_per_sample_ms", 1.0));
  config.fixed_overhead =
      DurationFromMillisF(reader.GetOr<double>("fixed_overhead_ms", 0.0));
  config.batch_efficiency = reader.GetOr<double>("batch_efficiency", 1.0);
  config.max_batch = reader.GetOr<int64_t>("max_batch", 1);
  config.concurrency = reader.GetOr<int64_t>("concurrency", 1);
  config.max_batch_wait =
      DurationFromMillisF(reader.GetOr<double>("max_batch_wait_ms", 0.0));
  if (reader.Has("jitter")) {
    ObjectReader jitter(reader.Require("jitter"), "sim config.jitter");
    const auto kind = jitter.GetOr<std::string>("kind", "none");
    if (kind == "none") {
      config.jitter.kind = JitterSpec::Kind::kNone;
    } else if (kind == "exponential") {
      config.jitter.kind = JitterSpec::Kind::kExponential;
    } else {
      throw std::runtime_error("sim config: unknown jitter kind \"" + kind +
                               "\"");
    }
    config.jitter.mean = DurationFromMillisF(jitter.GetOr<double>("mean_ms", 0.0));
    jitter.RejectUnknown();
  }
  config.caching_enabled = reader.GetOr<bool>("caching_enabled", false);
  config.cache_hit_latency =
      DurationFromMillisF(reader.GetOr<double>("cache_hit_latency_ms", 0.0));
  config.accuracy_error_rate =
      reader.GetOr<double>("accuracy_error_rate", 0.0);
  config.seed = reader.GetOr<uint64_t>("seed", 1);
  reader.RejectUnknown();
  return config;
}

Json RunResultToJson(const RunResult& result) {
  Json value;
  value["task"] = result.task_name;
  value["scenario"] = ToString(result.scenario);
  value["mode"] = ToString(result.mode);
  value["metric_name"] = result.metric_name;
  value["metric_value"] = result.metric_value;
  value["valid"] = result.valid;
  Json violations = Json::array();
  for (const Violation& violation : result.violations) {
    violations.push_back(Json{{"rule", violation.rule},
                              {"measured", violation.measured},
                              {"limit", violation.limit}});
  }
  value["violations"] = std::move(violations);
  value["query_count"] = result.query_count;
  value["duration_ns"] = result.duration.count();
  if (result.overtime_fraction) {
    value["overtime_fraction"] = *result.overtime_fraction;
  }
  if (result.skipped_query_fraction) {
    value["skipped_query_fraction"] = *result.skipped_query_fraction;
  }
  return value;
}

RunResult RunResultFromJson(const Json& value) {
  ObjectReader reader(value, "run result");
  RunResult result;
  result.task_name = reader.Get<std::string>("task");
  {
    const auto text = reader.Get<std::string>("scenario");
    const auto scenario = ScenarioFromString(text);
    if (!scenario) {
      throw std::runtime_error("run result: unknown scenario \"" + text +
                               "\"");
    }
    result.scenario = *scenario;
  }
  {
    const auto text = reader.Get<std::string>("mode");
    const auto mode = TestModeFromString(text);
    if (!mode) {
      throw std::runtime_error("run result: unknown mode \"" + text + "\"");
    }
    result.mode = *mode;
  }
  result.metric_name = reader.Get<std::string>("metric_name");
  result.metric_value = reader.Get<double>("metric_value");
  result.valid = reader.Get<bool>("valid");
  for (const Json& entry : reader.Require("violations")) {
    ObjectReader violation(entry, "run result.violation");
    result.violations.push_back({violation.Get<std::string>("rule"),
                                 violation.Get<double>("measured"),
                                 violation.Get<double>("limit")});
    violation.RejectUnknown();
  }
  result.query_count = reader.Get<int64_t>("query_count");
  result.duration = Duration(reader.Get<int64_t>("duration_ns"));
  if (reader.Has("overtime_fraction")) {
    result.overtime_fraction = reader.Get<double>("overtime_fraction");
  }
  if (reader.Has("skipped_query_fraction")) {
    result.skipped_query_fraction =
        reader.Get<double>("skipped_query_fraction");
  }
  reader.RejectUnknown();
  return result;
}

Json AccuracyResultToJson(const AccuracyResult& result) {
  Json value;
  value["measured"] = result.measured;
  value["reference"] = result.reference;
  value["target_fraction"] = result.target_fraction;
  value["threshold"] = result.threshold;
  value["pass"] = result.pass;
  return value;
}

Json AuditReportToJson(const AuditReport& report) {
  Json value;
  value["audit"] = report.audit_name;
  value["task"] = report.task_name;
  value["verdict"] = ToString(report.verdict);
  Json evidence = Json::array();
  for (const AuditEvidence& entry : report.evidence) {
    evidence.push_back(Json{{"name", entry.name},
                            {"measured", entry.measured},
                            {"threshold", entry.threshold},
                            {"note", entry.note}});
  }
  value["evidence"] = std::move(evidence);
  return value;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open for reading");
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& value) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << value.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

}  // namespace loadgauge
