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
/// \brief A SUT whose behavior is scripted per query, for driving the
/// harness into specific situations: exact service times, dropped
/// responses, duplicate responses, responses to queries never issued.

#ifndef LOADGAUGE_TESTS_SUPPORT_SCRIPTED_SUT_H_
#define LOADGAUGE_TESTS_SUPPORT_SCRIPTED_SUT_H_

#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "loadgauge/clock.h"
#include "loadgauge/sut.h"

namespace loadgauge::testing {

class ScriptedSut final : public SutInterface {
 public:
  explicit ScriptedSut(Clock& clock);
  ~ScriptedSut() override;

  std::string_view Name() const override { return "scripted"; }
  void OnRunStart(const RunContext& context) override;
  void OnRunEnd() override;
  void IssueQuery(const Query& query) override;
  void Flush() override {}

  /// Service time per query. Default 1 ms.
  std::function<Duration(int64_t query_id)> latency_fn;
  /// Digest reported per sample. Default: the reference digest.
  std::function<uint64_t(SampleIndex index)> digest_fn;
  /// Queries to never answer. Default: none.
  std::function<bool(int64_t query_id)> drop_fn;
  /// Queries to answer twice. Default: none.
  std::function<bool(int64_t query_id)> duplicate_fn;
  /// Report this query id instead of the real one (for one query).
  /// Negative = disabled.
  int64_t misreport_id_for = -1;
  int64_t misreport_id_as = 0;

  int64_t issued_count() const { return issued_count_; }

 private:
  void JoinThreads();

  Clock& clock_;
  VirtualClock* virtual_clock_ = nullptr;
  int64_t issued_count_ = 0;

  std::mutex mu_;
  std::vector<std::thread> threads_;
};

}  // namespace loadgauge::testing

#endif  // LOADGAUGE_TESTS_SUPPORT_SCRIPTED_SUT_H_
