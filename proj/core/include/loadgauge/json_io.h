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
/// \brief JSON codecs for configuration and result types. Parsing is
/// strict: unknown keys are errors, so typos fail loudly instead of
/// silently running with defaults.

#ifndef LOADGAUGE_JSON_IO_H_
#define LOADGAUGE_JSON_IO_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "loadgauge/audit.h"
#include "loadgauge/report.h"
#include "loadgauge/scenario.h"
#include "loadgauge/sim.h"

namespace loadgauge {

using Json = nlohmann::ordered_json;

Json ProfileToJson(const BenchmarkProfile& profile);
BenchmarkProfile ProfileFromJson(const Json& value);

/// Accepts either a bare array of profiles or {"profiles": [...]}.
std::vector<BenchmarkProfile> ProfilesFromJson(const Json& value);
Json ProfilesToJson(std::span<const BenchmarkProfile> profiles);

Json SettingsToJson(const TestSettings& settings);
TestSettings SettingsFromJson(const Json& value);

Json SimConfigToJson(const SimConfig& config);
SimConfig SimConfigFromJson(const Json& value);

Json RunResultToJson(const RunResult& result);
RunResult RunResultFromJson(const Json& value);

Json AccuracyResultToJson(const AccuracyResult& result);

Json AuditReportToJson(const AuditReport& report);

Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& value);

}  // namespace loadgauge

#endif  // LOADGAUGE_JSON_IO_H_
