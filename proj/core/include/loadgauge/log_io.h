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
/// \brief Run log serialization: JSON Lines, format version v0.
///
/// A log file is one header record, the query records in completion order
/// of their ids, any accuracy records, and one summary record, each on its
/// own line. Serialization is canonical: the same RunLog always produces
/// the same bytes, and parsing then re-serializing a valid file reproduces
/// it exactly. Wall-clock facts live in keys prefixed "wall_" and are the
/// only fields allowed to differ between otherwise identical runs.

#ifndef LOADGAUGE_LOG_IO_H_
#define LOADGAUGE_LOG_IO_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "loadgauge/run_log.h"

namespace loadgauge {

inline constexpr std::string_view kLogFormatVersion = "v0";

/// Parse failure, with the file (or origin label) and line number baked
/// into the message.
class LogParseError : public std::runtime_error {
 public:
  LogParseError(std::string_view origin, size_t line,
                const std::string& message)
      : std::runtime_error(std::string(origin) + ":" + std::to_string(line) +
                           ": " + message) {}
};

std::string RunLogToJsonLines(const RunLog& log);
RunLog RunLogFromJsonLines(std::string_view text, std::string_view origin);

void WriteRunLog(const RunLog& log, const std::string& path);
RunLog ReadRunLog(const std::string& path);

}  // namespace loadgauge

#endif  // LOADGAUGE_LOG_IO_H_
