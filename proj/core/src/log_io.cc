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

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "loadgauge/json_io.h"

namespace loadgauge {
namespace {

std::string DigestToHex(uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, digest);
  return buf;
}

uint64_t DigestFromHex(const std::string& text, std::string_view origin,
                       size_t line) {
  if (text.size() != 16 ||
      text.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw LogParseError(origin, line,
                        "digest must be 16 lowercase hex characters");
  }
  return std::strtoull(text.c_str(), nullptr, 16);
}

Json HeaderToJson(const RunLog& log) {
  Json value;
  value["record"] = "header";
  value["version"] = kLogFormatVersion;
  value["settings"] = SettingsToJson(log.settings);
  value["profile"] = ProfileToJson(log.profile);
  if (!log.wall_started_at.empty()) {
    value["wall_started_at"] = log.wall_started_at;
  }
  return value;
}

Json QueryToJson(const QueryRecord& record) {
  Json value;
  value["record"] = "query";
  value["id"] = record.query_id;
  value["scheduled_ns"] = record.scheduled_time.count();
  value["issue_ns"] = record.issue_time.count();
  value["completion_ns"] = record.completion_time.count();
  value["latency_ns"] = record.latency.count();
  value["samples"] = record.sample_count;
  value["skips"] = record.skipped_intervals;
  if (record.payload_digest) {
    value["digest"] = DigestToHex(*record.payload_digest);
  }
  return value;
}

Json AccuracyToJson(const AccuracyEntry& entry) {
  Json value;
  value["record"] = "accuracy";
  value["query"] = entry.query_id;
  value["sample"] = entry.sample_index;
  value["digest"] = DigestToHex(entry.digest);
  return value;
}

Json SummaryToJson(const RunLog& log) {
  Json value;
  value["record"] = "summary";
  value["duration_ns"] = log.duration.count();
  value["skipped_intervals"] = log.skipped_intervals;
  value["queries_with_skips"] = log.queries_with_skips;
  if (log.measured_accuracy) {
    value["measured_accuracy"] = *log.measured_accuracy;
  }
  value["aborted"] = log.aborted;
  if (log.aborted) {
    value["abort_reason"] = log.abort_reason;
  }
  return value;
}

}  // namespace

std::string RunLogToJsonLines(const RunLog& log) {
  std::string out;
  out += HeaderToJson(log).dump();
  out += '\n';
  for (const QueryRecord& record : log.records) {
    out += QueryToJson(record).dump();
    out += '\n';
  }
  for (const AccuracyEntry& entry : log.accuracy_entries) {
    out += AccuracyToJson(entry).dump();
    out += '\n';
  }
  out += SummaryToJson(log).dump();
  out += '\n';
  return out;
}

RunLog RunLogFromJsonLines(std::string_view text, std::string_view origin) {
  RunLog log;
  bool saw_header = false;
  bool saw_summary = false;
  size_t line_number = 0;
  size_t pos = 0;

  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (line.empty()) {
      continue;
    }

    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::exception& e) {
      throw LogParseError(origin, line_number, e.what());
    }
    if (!value.is_object() || !value.contains("record") ||
        !value["record"].is_string()) {
      throw LogParseError(origin, line_number,
                          "every line must be an object with a \"record\" key");
    }
    const std::string kind = value["record"].get<std::string>();
    if (saw_summary) {
      throw LogParseError(origin, line_number,
                          "records after the summary record");
    }

    try {
      if (kind == "header") {
        if (saw_header) {
          throw LogParseError(origin, line_number, "duplicate header record");
        }
        if (line_number != 1) {
          throw LogParseError(origin, line_number,
                              "header must be the first record");
        }
        const std::string version = value.at("version").get<std::string>();
        if (version != kLogFormatVersion) {
          throw LogParseError(origin, line_number,
                              "unsupported log version \"" + version + "\"");
        }
        log.settings = SettingsFromJson(value.at("settings"));
        log.profile = ProfileFromJson(value.at("profile"));
        if (value.contains("wall_started_at")) {
          log.wall_started_at =
              value["wall_started_at"].get<std::string>();
        }
        saw_header = true;
      } else if (kind == "query") {
        if (!saw_header) {
          throw LogParseError(origin, line_number,
                              "query record before the header");
        }
        QueryRecord record;
        record.query_id = value.at("id").get<int64_t>();
        record.scheduled_time = Duration(value.at("scheduled_ns").get<int64_t>());
        record.issue_time = Duration(value.at("issue_ns").get<int64_t>());
        record.completion_time =
            Duration(value.at("completion_ns").get<int64_t>());
        record.latency = Duration(value.at("latency_ns").get<int64_t>());
        record.sample_count = value.at("samples").get<int64_t>();
        record.skipped_intervals = value.at("skips").get<int64_t>();
        if (value.contains("digest")) {
          record.payload_digest = DigestFromHex(
              value["digest"].get<std::string>(), origin, line_number);
        }
        log.records.push_back(record);
      } else if (kind == "accuracy") {
        if (!saw_header) {
          throw LogParseError(origin, line_number,
                              "accuracy record before the header");
        }
        AccuracyEntry entry;
        entry.query_id = value.at("query").get<int64_t>();
        entry.sample_index = value.at("sample").get<uint64_t>();
        entry.digest = DigestFromHex(value.at("digest").get<std::string>(),
                                     origin, line_number);
        log.accuracy_entries.push_back(entry);
      } else if (kind == "summary") {
        if (!saw_header) {
          throw LogParseError(origin, line_number,
                              "summary record before the header");
        }
        log.duration = Duration(value.at("duration_ns").get<int64_t>());
        log.skipped_intervals = value.at("skipped_intervals").get<int64_t>();
        log.queries_with_skips =
            value.at("queries_with_skips").get<int64_t>();
        if (value.contains("measured_accuracy")) {
          log.measured_accuracy = value["measured_accuracy"].get<double>();
        }
        log.aborted = value.at("aborted").get<bool>();
        if (value.contains("abort_reason")) {
          log.abort_reason = value["abort_reason"].get<std::string>();
        }
        saw_summary = true;
      } else {
        throw LogParseError(origin, line_number,
                            "unknown record kind \"" + kind + "\"");
      }
    } catch (const Json::exception& e) {
      throw LogParseError(origin, line_number, e.what());
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const LogParseError*>(&e) != nullptr) {
        throw;
      }
      throw LogParseError(origin, line_number, e.what());
    }
  }

  if (!saw_header) {
    throw LogParseError(origin, line_number, "missing header record");
  }
  if (!saw_summary) {
    throw LogParseError(origin, line_number, "missing summary record");
  }
  return log;
}

void WriteRunLog(const RunLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  const std::string text = RunLogToJsonLines(log);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

RunLog ReadRunLog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return RunLogFromJsonLines(buffer.str(), path);
}

}  // namespace loadgauge
