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
/// \brief SUT wrappers that model the result-gaming behaviors the audits
/// exist to catch. Useful for validating audit sensitivity; obviously not
/// part of any honest submission.

#ifndef LOADGAUGE_ADVERSARIES_H_
#define LOADGAUGE_ADVERSARIES_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "loadgauge/clock.h"
#include "loadgauge/sim.h"
#include "loadgauge/sut.h"

namespace loadgauge {

/// Answers correctly in accuracy mode but cuts corners in performance mode,
/// corrupting a fraction of sample results. The accuracy-verification audit
/// exists to catch exactly this: its sampled performance-mode digests stop
/// matching the accuracy run.
class ModeSplitSut final : public SutInterface {
 public:
  /// `corrupt_rate` is the fraction of sample indices answered wrong in
  /// performance mode, keyed by `seed` so it is sticky per index.
  ModeSplitSut(std::unique_ptr<SutInterface> inner, double corrupt_rate,
               uint64_t seed);

  std::string_view Name() const override { return "mode-split"; }
  void OnRunStart(const RunContext& context) override;
  void OnRunEnd() override;
  void IssueQuery(const Query& query) override;
  void Flush() override;

 private:
  bool CorruptsSample(SampleIndex index) const;

  std::unique_ptr<SutInterface> inner_;
  double corrupt_rate_;
  uint64_t seed_;
  TestMode mode_ = TestMode::kPerformance;

  std::mutex mu_;
  std::unordered_map<int64_t, std::vector<SampleIndex>> query_samples_;
};

/// Runs fast only when it recognizes the arrival pattern it was tuned for:
/// the first query's arrival time. Any other schedule (say, from a derived
/// audit seed) makes it fall back to its true, slower speed. The
/// alternate-seed audit exists to catch exactly this.
class ScheduleKeyedSut final : public SutInterface {
 public:
  /// `expected_first_arrival` is the arrival time the cheat was tuned to,
  /// matched within `tolerance`. Off-schedule runs multiply service times
  /// by `slow_factor`.
  ScheduleKeyedSut(const SimConfig& config, Clock& clock,
                   Duration expected_first_arrival, double slow_factor,
                   Duration tolerance = std::chrono::microseconds(1));

  std::string_view Name() const override { return "schedule-keyed"; }
  void OnRunStart(const RunContext& context) override;
  void OnRunEnd() override;
  void IssueQuery(const Query& query) override;
  void Flush() override;

 private:
  SimulatedSut inner_;
  Clock& clock_;
  Duration expected_first_arrival_;
  Duration tolerance_;
  double slow_factor_;
  bool decided_ = false;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_ADVERSARIES_H_
