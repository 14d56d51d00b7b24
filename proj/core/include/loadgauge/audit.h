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
/// \brief Compliance audits: targeted experiments that catch SUTs gaming the
/// measurement rather than running the workload.

#ifndef LOADGAUGE_AUDIT_H_
#define LOADGAUGE_AUDIT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadgauge/clock.h"
#include "loadgauge/run_log.h"
#include "loadgauge/scenario.h"
#include "loadgauge/sut.h"

namespace loadgauge {

enum class AuditVerdict {
  kPass,
  kFail,
  /// The audit could not gather enough evidence either way (aborted probe
  /// run, nothing sampled). Never a pass.
  kInconclusive,
};

std::string_view ToString(AuditVerdict verdict);

/// One measured quantity backing a verdict. Every failing audit carries at
/// least one of these; a bare "fail" with no numbers is not actionable.
struct AuditEvidence {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct AuditReport {
  std::string audit_name;
  std::string task_name;
  AuditVerdict verdict = AuditVerdict::kInconclusive;
  std::vector<AuditEvidence> evidence;
};

struct AuditOptions {
  /// Queries per probe phase for the load-shaped audits.
  int64_t probe_query_count = 4096;

  /// Caching audit: size of the index subset the repeat phase cycles
  /// through, and how much faster the repeat phase must be before the
  /// verdict is fail. An honest SUT computes every sample and shows no
  /// speedup on repeats.
  int64_t caching_subset_size = 8;
  double caching_speedup_threshold = 0.10;

  /// Alternate-seed audit: relative throughput loss under a fresh seed that
  /// counts as evidence of schedule tuning.
  double seed_sensitivity_threshold = 0.05;

  /// Accuracy-verification audit: fraction of performance-mode queries
  /// whose result digests are collected for comparison.
  double digest_sampling_rate = 0.10;
};

/// Compares sampled performance-mode result digests against an
/// accuracy-mode run of the same SUT. A SUT that answers differently when
/// it thinks only speed is being watched fails. `accuracy_reference` must
/// be an accuracy-mode log of the same task with per-sample entries.
AuditReport AuditAccuracyVerification(SutInterface& sut,
                                      SampleLibrary& library,
                                      const ResolvedSettings& resolved,
                                      Clock& clock,
                                      const RunLog& accuracy_reference,
                                      const AuditOptions& options = {});

/// Runs two closed-loop phases of equal length: one over pairwise-distinct
/// sample indices, one cycling through a small subset. A SUT that recognizes
/// repeated inputs and short-circuits them speeds up on the second phase;
/// an honest one does not. Closed-loop issue is deliberate: under an
/// open-loop arrival process both phases would finish at the arrival rate
/// and hide the speedup.
AuditReport AuditCaching(SutInterface& sut, SampleLibrary& library,
                         const ResolvedSettings& resolved, Clock& clock,
                         const AuditOptions& options = {});

/// Repeats the configured run under fresh seeds and compares effective
/// throughput against the configured-seed baseline. A SUT tuned to the
/// official schedule or sample sequence slows down when the randomness
/// changes.
AuditReport AuditAlternateSeed(SutInterface& sut, SampleLibrary& library,
                               const ResolvedSettings& resolved, Clock& clock,
                               std::span<const uint64_t> alternate_seeds,
                               const AuditOptions& options = {});

}  // namespace loadgauge

#endif  // LOADGAUGE_AUDIT_H_
