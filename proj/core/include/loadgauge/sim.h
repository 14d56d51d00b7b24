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
/// \brief A configurable simulated SUT, the built-in device every scenario
/// can be exercised against without hardware.

#ifndef LOADGAUGE_SIM_H_
#define LOADGAUGE_SIM_H_

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "loadgauge/clock.h"
#include "loadgauge/rng.h"
#include "loadgauge/sut.h"

namespace loadgauge {

struct JitterSpec {
  enum class Kind {
    kNone,
    kExponential,
  };
  Kind kind = Kind::kNone;
  /// Mean of the exponential jitter added to each batch's service time.
  Duration mean = Duration::zero();
};

/// Shape of the simulated device. Samples from all outstanding queries feed
/// one FIFO; executors take batches off the front.
struct SimConfig {
  std::string name = "sim";

  /// Service time of a batch of b samples:
  ///   fixed_overhead + base_latency_per_sample * (1 + batch_efficiency*(b-1))
  /// plus a jitter draw. batch_efficiency is the marginal cost of each
  /// additional sample relative to the first; below 1.0 batching pays off.
  Duration base_latency_per_sample = std::chrono::milliseconds(1);
  Duration fixed_overhead = Duration::zero();
  double batch_efficiency = 1.0;

  int64_t max_batch = 1;
  /// Number of batches that can be in service simultaneously.
  int64_t concurrency = 1;
  /// How long a partially filled batch may wait for more samples before the
  /// executor runs it anyway. Zero dispatches whatever is queued right away.
  Duration max_batch_wait = Duration::zero();

  JitterSpec jitter;

  /// When enabled, a sample index the device has already seen completes at
  /// cache_hit_latency without passing through the executors. This is the
  /// behavior performance rules forbid and the caching audit looks for.
  bool caching_enabled = false;
  Duration cache_hit_latency = Duration::zero();

  /// Fraction of sample indices this device consistently gets wrong. The
  /// wrong indices are a deterministic function of (seed, index), so the
  /// same sample is wrong in accuracy and performance mode alike.
  double accuracy_error_rate = 0.0;

  uint64_t seed = 1;
};

/// Service time for a batch of `batch_size` samples. Draws jitter from
/// `rng` when the config asks for it; pass nullptr for the deterministic
/// part alone.
Duration SimServiceTime(const SimConfig& config, int64_t batch_size,
                        SeededRng* rng = nullptr);

/// Whether the simulated device answers `index` incorrectly. Sticky per
/// (config.seed, index).
bool SimSampleIsWrong(const SimConfig& config, SampleIndex index);

/// The digest the simulated device reports for `index`: the reference
/// digest, or a deterministic wrong value for its error samples.
uint64_t SimSampleDigest(const SimConfig& config, SampleIndex index);

/// The simulated SUT. Works on either clock: against a VirtualClock it
/// schedules events and everything stays on one thread; against a WallClock
/// it runs `concurrency` worker threads that sleep for the service time.
class SimulatedSut final : public SutInterface {
 public:
  SimulatedSut(const SimConfig& config, Clock& clock);
  ~SimulatedSut() override;

  std::string_view Name() const override { return config_.name; }
  void OnRunStart(const RunContext& context) override;
  void OnRunEnd() override;
  void IssueQuery(const Query& query) override;
  void Flush() override;

  /// Multiplies subsequent service times by `scale`. Lets wrappers model
  /// devices whose speed depends on something they observed.
  void SetServiceTimeScale(double scale);

 private:
  struct Unit {
    int64_t query_id = 0;
    SampleIndex sample = 0;
    size_t slot = 0;
    Duration enqueued_at = Duration::zero();
    std::chrono::steady_clock::time_point enqueued_wall;
  };
  struct PendingQuery {
    int64_t remaining = 0;
    std::vector<uint64_t> digests;
  };

  Duration ScaledServiceTime(int64_t batch_size);
  void CompleteUnit(const Unit& unit,
                    std::vector<QueryResponse>& out_responses);
  void RespondAll(std::vector<QueryResponse>& responses);

  // Virtual clock backend.
  void VirtualIssue(const Query& query);
  void VirtualTryDispatch();
  void VirtualFinishBatch(const std::vector<Unit>& batch);

  // Wall clock backend.
  void WallIssue(const Query& query);
  void WallStartThreads();
  void WallStopThreads();
  void WorkerLoop();
  void CacheLaneLoop();

  SimConfig config_;
  Clock& clock_;
  VirtualClock* virtual_clock_ = nullptr;

  std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable cache_cv_;
  std::deque<Unit> fifo_;
  std::deque<Unit> cache_lane_;
  std::unordered_map<int64_t, PendingQuery> pending_;
  std::unordered_set<SampleIndex> seen_;
  std::unique_ptr<SeededRng> jitter_rng_;
  double service_scale_ = 1.0;
  int64_t free_executors_ = 0;
  bool dispatch_deadline_armed_ = false;
  bool flushed_ = false;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
  std::thread cache_thread_;
};

std::unique_ptr<SimulatedSut> MakeSimulatedSut(const SimConfig& config,
                                               Clock& clock);

}  // namespace loadgauge

#endif  // LOADGAUGE_SIM_H_
