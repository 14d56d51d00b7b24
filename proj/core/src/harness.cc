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

#include "loadgauge/harness.h"

#include <algorithm>
#include <condition_variable>
#include <ctime>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "loadgauge/rng.h"

namespace loadgauge {
namespace {

constexpr std::string_view kDigestSamplingStream = "audit-sampling";
constexpr int64_t kSingleStreamExtensionBlock = 1024;
constexpr int64_t kOfficialServerRuns = 5;

Duration DefaultWatchdog(const ResolvedSettings& resolved) {
  constexpr Duration kFloor = std::chrono::seconds(60);
  switch (resolved.settings.scenario) {
    case Scenario::kServer:
      return std::max(kFloor, 10 * resolved.profile.server_qos_bound);
    case Scenario::kMultiStream:
      return std::max(kFloor,
                      10 * resolved.profile.multistream_arrival_interval);
    case Scenario::kSingleStream:
      return kFloor;
    case Scenario::kOffline:
      // One batch query holds the whole sample set and may be legitimately
      // slow, so give it far more rope.
      return std::chrono::minutes(10);
  }
  return kFloor;
}

std::string FormatUtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Run bookkeeping shared with the response callback. Held by shared_ptr so
// a response arriving from a SUT thread after the run tears down (possible
// on abort paths in wall mode) lands on live memory, sees active == false
// and is dropped.
struct RunState {
  std::mutex mu;
  std::condition_variable cv;

  bool active = true;
  bool aborted = false;
  std::string abort_reason;

  std::vector<QueryRecord> records;
  std::vector<uint8_t> digest_sampled;
  std::vector<uint8_t> completed_flag;
  // query_id -> the per-sample digests it reported, joined with the
  // schedule's sample indices after the run.
  std::vector<std::pair<int64_t, std::vector<uint64_t>>> sampled_digests;

  int64_t issued = 0;
  int64_t completed = 0;
  int64_t in_flight = 0;
  int64_t last_issued = -1;
  int64_t total_skips = 0;
  Duration progress_anchor = Duration::zero();

  void AbortLocked(std::string reason) {
    if (!aborted) {
      aborted = true;
      abort_reason = std::move(reason);
    }
    cv.notify_all();
  }
};

// Drives one run: issues queries per the scenario's arrival discipline,
// stamps completions and assembles the log. In virtual mode everything
// happens on the calling thread by pumping clock events; in wall mode
// completions arrive on SUT threads and meet the issue loop under the state
// lock.
class Runner {
 public:
  Runner(SutInterface& sut, SampleLibrary& library,
         const ResolvedSettings& resolved, Clock& clock,
         const HarnessOptions& options, ScheduleSource* source,
         const Schedule* external_plan)
      : sut_(sut),
        library_(library),
        resolved_(resolved),
        clock_(clock),
        options_(options),
        source_(source),
        schedule_(external_plan != nullptr ? external_plan
                                           : &source->schedule()),
        exact_plan_(external_plan != nullptr ||
                    resolved.settings.mode == TestMode::kAccuracy),
        digest_rng_(resolved.settings.sample_seed, kDigestSamplingStream),
        state_(std::make_shared<RunState>()) {
    watchdog_ = options.watchdog_timeout > Duration::zero()
                    ? options.watchdog_timeout
                    : DefaultWatchdog(resolved);
    if (clock_.IsVirtual()) {
      virtual_clock_ = dynamic_cast<VirtualClock*>(&clock_);
    } else {
      wall_clock_ = dynamic_cast<WallClock*>(&clock_);
    }
    if (virtual_clock_ == nullptr && wall_clock_ == nullptr) {
      throw std::invalid_argument(
          "Runner: clock must be a VirtualClock or a WallClock");
    }
  }

  RunLog Run() {
    Prepare();
    switch (resolved_.settings.scenario) {
      case Scenario::kSingleStream:
        RunSingleStream();
        break;
      case Scenario::kMultiStream:
        RunMultiStream();
        break;
      case Scenario::kServer:
        RunServer();
        break;
      case Scenario::kOffline:
        RunOffline();
        break;
    }
    return Finalize();
  }

 private:
  void Prepare() {
    // Everything before the clock restart is setup and deliberately
    // unmeasured: callback installation, SUT notification, sample
    // residency.
    std::shared_ptr<RunState> state = state_;
    Clock* clock = &clock_;
    sut_.SetResponseCallback([state, clock](QueryResponse response) {
      std::lock_guard<std::mutex> lock(state->mu);
      if (!state->active || state->aborted) {
        return;
      }
      const Duration now = clock->Now();
      const int64_t id = response.query_id;
      if (id < 0 || id >= state->issued) {
        state->AbortLocked("completion for unknown query_id " +
                           std::to_string(id));
        return;
      }
      const size_t idx = static_cast<size_t>(id);
      if (state->completed_flag[idx] != 0) {
        state->AbortLocked("duplicate completion for query_id " +
                           std::to_string(id));
        return;
      }
      QueryRecord& record = state->records[idx];
      record.completion_time = now;
      record.latency = now - record.issue_time;
      if (state->digest_sampled[idx] != 0) {
        record.payload_digest = response.payload_digest;
        if (!response.sample_digests.empty()) {
          state->sampled_digests.emplace_back(
              id, std::move(response.sample_digests));
        }
      }
      state->completed_flag[idx] = 1;
      ++state->completed;
      --state->in_flight;
      state->progress_anchor = std::max(state->progress_anchor, now);
      state->cv.notify_all();
    });

    RunContext context{resolved_.settings.scenario, resolved_.settings.mode};
    sut_.OnRunStart(context);

    const int64_t resident =
        resolved_.settings.mode == TestMode::kAccuracy
            ? library_.TotalSamples()
            : (source_ != nullptr ? source_->draw_pool_size()
                                  : library_.TotalSamples());
    loaded_.resize(static_cast<size_t>(resident));
    std::iota(loaded_.begin(), loaded_.end(), SampleIndex{0});
    library_.LoadSamples(loaded_);

    if (wall_clock_ != nullptr) {
      wall_started_at_ = FormatUtcNow();
    }
    clock_.Restart();
  }

  bool SamplesThisQuery() {
    if (resolved_.settings.mode == TestMode::kAccuracy) {
      return true;
    }
    if (options_.accuracy_digest_sampling <= 0.0) {
      return false;
    }
    return digest_rng_.NextUnitOpen() <= options_.accuracy_digest_sampling;
  }

  void Issue(size_t index) {
    Query query;
    query.query_id = static_cast<int64_t>(index);
    query.sample_indices = schedule_->SamplesFor(index);
    query.scheduled_time = schedule_->issue_times[index];

    {
      std::lock_guard<std::mutex> lock(state_->mu);
      QueryRecord record;
      record.query_id = query.query_id;
      record.scheduled_time = query.scheduled_time;
      record.issue_time = clock_.Now();
      record.sample_count = static_cast<int64_t>(query.sample_indices.size());
      state_->records.push_back(record);
      state_->digest_sampled.push_back(SamplesThisQuery() ? 1 : 0);
      state_->completed_flag.push_back(0);
      ++state_->issued;
      ++state_->in_flight;
      state_->last_issued = query.query_id;
      state_->progress_anchor =
          std::max(state_->progress_anchor, record.issue_time);
    }
    sut_.IssueQuery(query);
  }

  void Abort(std::string reason) {
    std::lock_guard<std::mutex> lock(state_->mu);
    state_->AbortLocked(std::move(reason));
  }

  bool Aborted() {
    std::lock_guard<std::mutex> lock(state_->mu);
    return state_->aborted;
  }

  /// Blocks until at least `target` queries have completed. Returns false
  /// if the run aborted instead: the SUT lost a query (nothing left that
  /// could complete) or made no progress past the watchdog.
  bool AwaitCompleted(int64_t target) {
    if (virtual_clock_ != nullptr) {
      while (true) {
        int64_t outstanding = 0;
        Duration anchor = Duration::zero();
        {
          std::lock_guard<std::mutex> lock(state_->mu);
          if (state_->aborted) return false;
          if (state_->completed >= target) return true;
          outstanding = target - state_->completed;
          anchor = state_->progress_anchor;
        }
        if (!virtual_clock_->HasPending()) {
          Abort("stalled: no pending events with " +
                std::to_string(outstanding) + " completions outstanding");
          return false;
        }
        if (*virtual_clock_->NextEventTime() > anchor + watchdog_) {
          Abort("watchdog: next event is more than " +
                std::to_string(ToSeconds(watchdog_)) +
                "s past the last progress");
          return false;
        }
        virtual_clock_->RunOne();
      }
    }

    std::unique_lock<std::mutex> lock(state_->mu);
    while (!state_->aborted && state_->completed < target) {
      const Duration deadline = state_->progress_anchor + watchdog_;
      if (state_->cv.wait_until(lock, wall_clock_->TimePointFor(deadline)) ==
          std::cv_status::timeout) {
        if (state_->completed >= target || state_->aborted) break;
        if (clock_.Now() >= state_->progress_anchor + watchdog_) {
          state_->AbortLocked("watchdog: no completions for " +
                              std::to_string(ToSeconds(watchdog_)) + "s");
          return false;
        }
      }
    }
    return !state_->aborted;
  }

  /// Moves the run timeline to `time`, delivering whatever completes on the
  /// way (virtual) or sleeping (wall).
  void AdvanceTo(Duration time) {
    if (virtual_clock_ != nullptr) {
      if (time > virtual_clock_->Now()) {
        virtual_clock_->AdvanceTo(time);
      }
    } else {
      wall_clock_->SleepUntil(time);
    }
  }

  void RunSingleStream() {
    const TestSettings& s = resolved_.settings;
    size_t i = 0;
    while (true) {
      if (exact_plan_) {
        if (i >= schedule_->size()) break;
      } else {
        const bool enough = static_cast<int64_t>(i) >= s.min_query_count;
        if (enough && clock_.Now() >= s.min_duration) break;
        if (i >= schedule_->size()) {
          source_->ExtendSingleStream(kSingleStreamExtensionBlock);
        }
      }
      Issue(i);
      if (!AwaitCompleted(static_cast<int64_t>(i) + 1)) return;
      ++i;
    }
    sut_.Flush();
  }

  void RunMultiStream() {
    const Duration interval = resolved_.profile.multistream_arrival_interval;
    const size_t n = schedule_->size();
    int64_t tick = 0;
    size_t next_query = 0;
    while (next_query < n) {
      const Duration slot = Duration(interval.count() * tick);
      ++tick;
      AdvanceTo(slot);
      bool busy = false;
      int64_t holder = -1;
      Duration holder_issue = Duration::zero();
      {
        std::lock_guard<std::mutex> lock(state_->mu);
        if (state_->aborted) return;
        busy = state_->in_flight > 0;
        if (busy) {
          holder = state_->last_issued;
          holder_issue =
              state_->records[static_cast<size_t>(holder)].issue_time;
        }
      }
      if (busy) {
        if (slot - holder_issue > watchdog_) {
          Abort("watchdog: query " + std::to_string(holder) +
                " still in flight after " +
                std::to_string(ToSeconds(slot - holder_issue)) + "s");
          return;
        }
        std::lock_guard<std::mutex> lock(state_->mu);
        state_->records[static_cast<size_t>(holder)].skipped_intervals += 1;
        ++state_->total_skips;
        continue;
      }
      Issue(next_query);
      ++next_query;
    }
    sut_.Flush();
    AwaitCompleted(static_cast<int64_t>(n));
  }

  void RunServer() {
    const size_t n = schedule_->size();
    for (size_t i = 0; i < n; ++i) {
      AdvanceTo(schedule_->issue_times[i]);
      if (Aborted()) return;
      Issue(i);
    }
    sut_.Flush();
    AwaitCompleted(static_cast<int64_t>(n));
  }

  void RunOffline() {
    const size_t n = schedule_->size();
    for (size_t i = 0; i < n; ++i) {
      Issue(i);
    }
    sut_.Flush();
    AwaitCompleted(static_cast<int64_t>(n));
  }

  RunLog Finalize() {
    RunLog log;
    log.settings = resolved_.settings;
    log.profile = resolved_.profile;
    log.wall_started_at = wall_started_at_;

    std::vector<std::pair<int64_t, std::vector<uint64_t>>> sampled_digests;
    {
      std::lock_guard<std::mutex> lock(state_->mu);
      state_->active = false;
      log.duration = std::max(clock_.Now(), state_->progress_anchor);
      log.aborted = state_->aborted;
      log.abort_reason = state_->abort_reason;
      log.skipped_intervals = state_->total_skips;

      log.records.reserve(state_->records.size());
      for (size_t i = 0; i < state_->records.size(); ++i) {
        // Queries that never completed are not results; the abort reason
        // already documents them.
        if (state_->completed_flag[i] == 0) continue;
        log.records.push_back(state_->records[i]);
        if (state_->records[i].skipped_intervals > 0) {
          ++log.queries_with_skips;
        }
      }
      sampled_digests = std::move(state_->sampled_digests);
    }

    for (auto& [query_id, digests] : sampled_digests) {
      const auto samples = schedule_->SamplesFor(static_cast<size_t>(query_id));
      if (digests.size() != samples.size()) {
        if (!log.aborted) {
          log.aborted = true;
          log.abort_reason = "query " + std::to_string(query_id) +
                             " reported " + std::to_string(digests.size()) +
                             " sample digests for " +
                             std::to_string(samples.size()) + " samples";
        }
        continue;
      }
      for (size_t j = 0; j < samples.size(); ++j) {
        log.accuracy_entries.push_back({query_id, samples[j], digests[j]});
      }
    }
    std::sort(log.accuracy_entries.begin(), log.accuracy_entries.end(),
              [](const AccuracyEntry& a, const AccuracyEntry& b) {
                if (a.query_id != b.query_id) return a.query_id < b.query_id;
                return a.sample_index < b.sample_index;
              });

    if (resolved_.settings.mode == TestMode::kAccuracy &&
        !log.accuracy_entries.empty()) {
      int64_t correct = 0;
      for (const AccuracyEntry& entry : log.accuracy_entries) {
        if (entry.digest == library_.ReferenceDigest(entry.sample_index)) {
          ++correct;
        }
      }
      const double fraction =
          static_cast<double>(correct) /
          static_cast<double>(log.accuracy_entries.size());
      log.measured_accuracy = fraction * resolved_.profile.accuracy_reference;
    }

    sut_.OnRunEnd();
    library_.UnloadSamples(loaded_);
    return log;
  }

  SutInterface& sut_;
  SampleLibrary& library_;
  ResolvedSettings resolved_;
  Clock& clock_;
  HarnessOptions options_;
  ScheduleSource* source_;
  const Schedule* schedule_;
  bool exact_plan_;
  SeededRng digest_rng_;
  std::shared_ptr<RunState> state_;
  VirtualClock* virtual_clock_ = nullptr;
  WallClock* wall_clock_ = nullptr;
  Duration watchdog_ = Duration::zero();
  std::string wall_started_at_;
  std::vector<SampleIndex> loaded_;
};

}  // namespace

RunLog RunPerformance(SutInterface& sut, SampleLibrary& library,
                      const ResolvedSettings& resolved, Clock& clock,
                      const HarnessOptions& options) {
  ResolvedSettings perf = resolved;
  perf.settings.mode = TestMode::kPerformance;
  ScheduleSource source(perf, library.TotalSamples());
  Runner runner(sut, library, perf, clock, options, &source, nullptr);
  return runner.Run();
}

RunLog RunAccuracy(SutInterface& sut, SampleLibrary& library,
                   const ResolvedSettings& resolved, Clock& clock,
                   const HarnessOptions& options) {
  ResolvedSettings acc = resolved;
  acc.settings.mode = TestMode::kAccuracy;
  ScheduleSource source(acc, library.TotalSamples());
  Runner runner(sut, library, acc, clock, options, &source, nullptr);
  return runner.Run();
}

RunLog RunWithSchedule(SutInterface& sut, SampleLibrary& library,
                       const ResolvedSettings& resolved, Clock& clock,
                       const Schedule& schedule,
                       const HarnessOptions& options) {
  Runner runner(sut, library, resolved, clock, options, nullptr, &schedule);
  return runner.Run();
}

OfficialServerResult RunServerOfficial(SutInterface& sut,
                                       SampleLibrary& library,
                                       const ResolvedSettings& resolved,
                                       Clock& clock,
                                       const HarnessOptions& options) {
  if (resolved.settings.scenario != Scenario::kServer) {
    throw std::invalid_argument(
        "RunServerOfficial: settings must use the server scenario");
  }
  OfficialServerResult result;
  for (int64_t run = 0; run < kOfficialServerRuns; ++run) {
    ResolvedSettings per_run = resolved;
    per_run.settings.schedule_seed = DeriveSeed(
        resolved.settings.schedule_seed, static_cast<uint64_t>(run));
    RunLog log = RunPerformance(sut, library, per_run, clock, options);
    result.runs.push_back(
        CheckValidity(log, per_run.profile, per_run.settings));
  }

  // The official number is the worst of the five runs, and it only stands
  // if every run was individually valid.
  RunResult official = result.runs.front();
  for (const RunResult& run : result.runs) {
    if (run.metric_value < official.metric_value) {
      official.metric_value = run.metric_value;
      official.duration = run.duration;
      official.query_count = run.query_count;
      official.overtime_fraction = run.overtime_fraction;
    }
  }
  official.valid = true;
  official.violations.clear();
  for (size_t i = 0; i < result.runs.size(); ++i) {
    if (!result.runs[i].valid) {
      official.valid = false;
      for (const Violation& v : result.runs[i].violations) {
        official.violations.push_back(
            {"run " + std::to_string(i) + ": " + v.rule, v.measured, v.limit});
      }
    }
  }
  result.official = std::move(official);
  return result;
}

namespace {

SearchProbe Probe(SutInterface& sut, SampleLibrary& library,
                  const ResolvedSettings& probe_settings, Clock& clock,
                  double value, const HarnessOptions& options) {
  RunLog log = RunPerformance(sut, library, probe_settings, clock, options);
  SearchProbe result;
  result.value = value;
  result.result =
      CheckValidity(log, probe_settings.profile, probe_settings.settings);
  result.valid = result.result.valid;
  return result;
}

}  // namespace

QpsSearchResult FindMaxQps(SutInterface& sut, SampleLibrary& library,
                           const ResolvedSettings& resolved, Clock& clock,
                           const QpsSearchParams& params,
                           const HarnessOptions& options) {
  if (!(params.lo > 0.0) || !(params.hi >= params.lo) ||
      !(params.resolution > 0.0)) {
    throw std::invalid_argument(
        "FindMaxQps: need 0 < lo <= hi and resolution > 0");
  }
  if (resolved.settings.scenario != Scenario::kServer) {
    throw std::invalid_argument(
        "FindMaxQps: settings must use the server scenario");
  }

  QpsSearchResult result;
  auto probe = [&](double rate) {
    ResolvedSettings per_probe = resolved;
    per_probe.settings.target_qps = rate;
    result.probes.push_back(
        Probe(sut, library, per_probe, clock, rate, options));
    return result.probes.back().valid;
  };

  if (!probe(params.lo)) {
    return result;
  }
  if (probe(params.hi)) {
    result.max_qps = params.hi;
    return result;
  }

  double good = params.lo;
  double bad = params.hi;
  while (bad - good > params.resolution) {
    const double mid = good + (bad - good) / 2.0;
    if (probe(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  result.max_qps = good;
  return result;
}

StreamsSearchResult FindMaxStreams(SutInterface& sut, SampleLibrary& library,
                                   const ResolvedSettings& resolved,
                                   Clock& clock, int64_t max_candidate,
                                   const HarnessOptions& options) {
  if (max_candidate < 1) {
    throw std::invalid_argument("FindMaxStreams: max_candidate must be >= 1");
  }
  if (resolved.settings.scenario != Scenario::kMultiStream) {
    throw std::invalid_argument(
        "FindMaxStreams: settings must use the multi_stream scenario");
  }

  StreamsSearchResult result;
  auto probe = [&](int64_t streams) {
    ResolvedSettings per_probe = resolved;
    per_probe.settings.samples_per_query = streams;
    result.probes.push_back(Probe(sut, library, per_probe, clock,
                                  static_cast<double>(streams), options));
    return result.probes.back().valid;
  };

  if (!probe(1)) {
    return result;
  }

  int64_t good = 1;
  int64_t bad = -1;
  int64_t candidate = 2;
  while (candidate <= max_candidate) {
    if (probe(candidate)) {
      good = candidate;
      candidate *= 2;
    } else {
      bad = candidate;
      break;
    }
  }
  if (bad < 0 && good < max_candidate) {
    if (probe(max_candidate)) {
      good = max_candidate;
    } else {
      bad = max_candidate;
    }
  }

  if (bad > 0) {
    while (bad - good > 1) {
      const int64_t mid = good + (bad - good) / 2;
      if (probe(mid)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
  }
  result.max_streams = good;
  return result;
}

}  // namespace loadgauge
