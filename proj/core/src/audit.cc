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

#include "loadgauge/audit.h"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "loadgauge/harness.h"
#include "loadgauge/rng.h"
#include "loadgauge/schedule.h"

namespace loadgauge {
namespace {

constexpr std::string_view kCachingStream = "audit-caching";

double EffectiveThroughput(const RunLog& log) {
  const double seconds = ToSeconds(log.duration);
  if (seconds <= 0.0) {
    return 0.0;
  }
  return static_cast<double>(log.records.size()) / seconds;
}

Schedule SingleSamplePlan(std::span<const SampleIndex> indices) {
  Schedule plan;
  plan.issue_times.assign(indices.size(), Duration::zero());
  plan.sample_pool.assign(indices.begin(), indices.end());
  plan.sample_spans.reserve(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    plan.sample_spans.push_back({i, 1});
  }
  return plan;
}

ResolvedSettings ClosedLoopProbeSettings(const ResolvedSettings& resolved) {
  ResolvedSettings probe = resolved;
  probe.settings.scenario = Scenario::kSingleStream;
  probe.settings.mode = TestMode::kPerformance;
  probe.settings.samples_per_query = 1;
  return probe;
}

}  // namespace

std::string_view ToString(AuditVerdict verdict) {
  switch (verdict) {
    case AuditVerdict::kPass:
      return "pass";
    case AuditVerdict::kFail:
      return "fail";
    case AuditVerdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

AuditReport AuditAccuracyVerification(SutInterface& sut,
                                      SampleLibrary& library,
                                      const ResolvedSettings& resolved,
                                      Clock& clock,
                                      const RunLog& accuracy_reference,
                                      const AuditOptions& options) {
  AuditReport report;
  report.audit_name = "accuracy-verification";
  report.task_name = resolved.profile.task_name;

  if (accuracy_reference.accuracy_entries.empty()) {
    throw std::invalid_argument(
        "AuditAccuracyVerification: reference log has no per-sample entries");
  }
  std::unordered_map<SampleIndex, uint64_t> reference;
  reference.reserve(accuracy_reference.accuracy_entries.size());
  for (const AccuracyEntry& entry : accuracy_reference.accuracy_entries) {
    reference.emplace(entry.sample_index, entry.digest);
  }

  HarnessOptions harness_options;
  harness_options.accuracy_digest_sampling = options.digest_sampling_rate;
  const RunLog log =
      RunPerformance(sut, library, resolved, clock, harness_options);
  if (log.aborted) {
    report.verdict = AuditVerdict::kInconclusive;
    report.evidence.push_back(
        {"probe_run_aborted", 1.0, 0.0, log.abort_reason});
    return report;
  }

  int64_t checked = 0;
  int64_t mismatched = 0;
  int64_t unmatched = 0;
  for (const AccuracyEntry& entry : log.accuracy_entries) {
    const auto it = reference.find(entry.sample_index);
    if (it == reference.end()) {
      ++unmatched;
      continue;
    }
    ++checked;
    if (it->second != entry.digest) {
      ++mismatched;
    }
  }

  report.evidence.push_back(
      {"digests_checked", static_cast<double>(checked), 1.0,
       "sampled performance results compared against the accuracy run"});
  report.evidence.push_back({"digest_mismatches",
                             static_cast<double>(mismatched), 0.0,
                             "results that differ between modes"});
  if (unmatched > 0) {
    report.evidence.push_back(
        {"samples_missing_from_reference", static_cast<double>(unmatched),
         0.0, "performance samples absent from the accuracy log"});
  }

  if (checked == 0) {
    report.verdict = AuditVerdict::kInconclusive;
  } else if (mismatched > 0 || unmatched > 0) {
    report.verdict = AuditVerdict::kFail;
  } else {
    report.verdict = AuditVerdict::kPass;
  }
  return report;
}

AuditReport AuditCaching(SutInterface& sut, SampleLibrary& library,
                         const ResolvedSettings& resolved, Clock& clock,
                         const AuditOptions& options) {
  AuditReport report;
  report.audit_name = "caching";
  report.task_name = resolved.profile.task_name;

  const int64_t probe_count = options.probe_query_count;
  const int64_t subset_size = options.caching_subset_size;
  if (probe_count < 2 || subset_size < 1 || subset_size > probe_count) {
    throw std::invalid_argument(
        "AuditCaching: need probe_query_count >= 2 and 1 <= "
        "caching_subset_size <= probe_query_count");
  }
  const int64_t total = library.TotalSamples();
  if (total < probe_count + subset_size) {
    throw std::invalid_argument(
        "AuditCaching: library too small for a distinct-sample phase");
  }

  // One partial shuffle yields both index sets: the unique phase takes the
  // first probe_count positions, the repeat subset the next subset_size, so
  // the two phases share no indices.
  std::vector<SampleIndex> shuffled(static_cast<size_t>(total));
  std::iota(shuffled.begin(), shuffled.end(), SampleIndex{0});
  SeededRng rng(resolved.settings.sample_seed, kCachingStream);
  const int64_t need = probe_count + subset_size;
  for (int64_t i = 0; i < need; ++i) {
    const uint64_t j =
        static_cast<uint64_t>(i) +
        rng.NextBounded(static_cast<uint64_t>(total - i));
    std::swap(shuffled[static_cast<size_t>(i)],
              shuffled[static_cast<size_t>(j)]);
  }

  std::vector<SampleIndex> unique_indices(
      shuffled.begin(), shuffled.begin() + probe_count);
  std::vector<SampleIndex> repeat_indices;
  repeat_indices.reserve(static_cast<size_t>(probe_count));
  for (int64_t i = 0; i < probe_count; ++i) {
    repeat_indices.push_back(
        shuffled[static_cast<size_t>(probe_count + (i % subset_size))]);
  }

  const ResolvedSettings probe = ClosedLoopProbeSettings(resolved);
  const RunLog unique_log = RunWithSchedule(
      sut, library, probe, clock, SingleSamplePlan(unique_indices));
  const RunLog repeat_log = RunWithSchedule(
      sut, library, probe, clock, SingleSamplePlan(repeat_indices));

  if (unique_log.aborted || repeat_log.aborted) {
    report.verdict = AuditVerdict::kInconclusive;
    report.evidence.push_back(
        {"probe_run_aborted", 1.0, 0.0,
         unique_log.aborted ? unique_log.abort_reason
                            : repeat_log.abort_reason});
    return report;
  }

  const double unique_tput = EffectiveThroughput(unique_log);
  const double repeat_tput = EffectiveThroughput(repeat_log);
  const double speedup =
      unique_tput > 0.0 ? (repeat_tput - unique_tput) / unique_tput : 0.0;

  report.evidence.push_back({"unique_phase_throughput", unique_tput, 0.0,
                             "queries per second over distinct samples"});
  report.evidence.push_back({"repeat_phase_throughput", repeat_tput, 0.0,
                             "queries per second over a small repeated set"});
  report.evidence.push_back(
      {"repeat_speedup", speedup, options.caching_speedup_threshold,
       "relative gain on repeated samples; honest SUTs show none"});

  report.verdict = speedup > options.caching_speedup_threshold
                       ? AuditVerdict::kFail
                       : AuditVerdict::kPass;
  return report;
}

AuditReport AuditAlternateSeed(SutInterface& sut, SampleLibrary& library,
                               const ResolvedSettings& resolved, Clock& clock,
                               std::span<const uint64_t> alternate_seeds,
                               const AuditOptions& options) {
  AuditReport report;
  report.audit_name = "alternate-seed";
  report.task_name = resolved.profile.task_name;

  if (alternate_seeds.empty()) {
    throw std::invalid_argument(
        "AuditAlternateSeed: need at least one alternate seed");
  }

  const RunLog baseline = RunPerformance(sut, library, resolved, clock);
  if (baseline.aborted) {
    report.verdict = AuditVerdict::kInconclusive;
    report.evidence.push_back(
        {"baseline_run_aborted", 1.0, 0.0, baseline.abort_reason});
    return report;
  }
  const double baseline_tput = EffectiveThroughput(baseline);
  report.evidence.push_back({"baseline_throughput", baseline_tput, 0.0,
                             "queries per second under the configured seed"});

  double worst_slowdown = 0.0;
  uint64_t worst_seed = 0;
  for (const uint64_t seed : alternate_seeds) {
    ResolvedSettings alternate = resolved;
    alternate.settings.schedule_seed = seed;
    alternate.settings.sample_seed = seed;
    const RunLog log = RunPerformance(sut, library, alternate, clock);
    if (log.aborted) {
      report.verdict = AuditVerdict::kInconclusive;
      report.evidence.push_back(
          {"alternate_run_aborted", static_cast<double>(seed), 0.0,
           log.abort_reason});
      return report;
    }
    const double tput = EffectiveThroughput(log);
    const double slowdown =
        baseline_tput > 0.0 ? (baseline_tput - tput) / baseline_tput : 0.0;
    if (slowdown > worst_slowdown) {
      worst_slowdown = slowdown;
      worst_seed = seed;
    }
  }

  report.evidence.push_back(
      {"worst_alternate_slowdown", worst_slowdown,
       options.seed_sensitivity_threshold,
       "largest relative throughput loss under seed " +
           std::to_string(worst_seed)});

  report.verdict = worst_slowdown > options.seed_sensitivity_threshold
                       ? AuditVerdict::kFail
                       : AuditVerdict::kPass;
  return report;
}

}  // namespace loadgauge
