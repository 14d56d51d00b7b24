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

#include "loadgauge/sim.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loadgauge {
namespace {

constexpr std::string_view kJitterStream = "sim-jitter";
constexpr uint64_t kErrorSalt = 0x77726f6e67616e73ull;
constexpr uint64_t kWrongResultMark = 0x8000000000000001ull;

void ValidateConfig(const SimConfig& config) {
  if (config.max_batch < 1) {
    throw std::invalid_argument("SimConfig: max_batch must be >= 1");
  }
  if (config.concurrency < 1) {
    throw std::invalid_argument("SimConfig: concurrency must be >= 1");
  }
  if (config.base_latency_per_sample < Duration::zero() ||
      config.fixed_overhead < Duration::zero() ||
      config.max_batch_wait < Duration::zero() ||
      config.cache_hit_latency < Duration::zero() ||
      config.jitter.mean < Duration::zero()) {
    throw std::invalid_argument("SimConfig: durations must be nonnegative");
  }
  if (config.batch_efficiency < 0.0) {
    throw std::invalid_argument("SimConfig: batch_efficiency must be >= 0");
  }
  if (config.accuracy_error_rate < 0.0 || config.accuracy_error_rate > 1.0) {
    throw std::invalid_argument(
        "SimConfig: accuracy_error_rate must be in [0, 1]");
  }
}

}  // namespace

Duration SimServiceTime(const SimConfig& config, int64_t batch_size,
                        SeededRng* rng) {
  if (batch_size < 1) {
    throw std::invalid_argument("SimServiceTime: batch_size must be >= 1");
  }
  const double base = static_cast<double>(config.base_latency_per_sample.count());
  const double marginal =
      config.batch_efficiency * static_cast<double>(batch_size - 1);
  int64_t ns =
      config.fixed_overhead.count() + std::llround(base * (1.0 + marginal));
  if (config.jitter.kind == JitterSpec::Kind::kExponential && rng != nullptr &&
      config.jitter.mean > Duration::zero()) {
    const double mean = static_cast<double>(config.jitter.mean.count());
    ns += std::llround(-std::log(rng->NextUnitOpen()) * mean);
  }
  return Duration(ns);
}

bool SimSampleIsWrong(const SimConfig& config, SampleIndex index) {
  const double rate = config.accuracy_error_rate;
  if (rate <= 0.0) return false;
  if (rate >= 1.0) return true;
  const uint64_t h = Mix64(config.seed ^ Mix64(index ^ kErrorSalt));
  const long double scaled = static_cast<long double>(rate) * 0x1.0p64L;
  const uint64_t threshold = scaled >= 0x1.0p64L - 1.0L
                                 ? UINT64_MAX
                                 : static_cast<uint64_t>(scaled);
  return h < threshold;
}

uint64_t SimSampleDigest(const SimConfig& config, SampleIndex index) {
  const uint64_t reference = ReferencePayloadDigest(index);
  return SimSampleIsWrong(config, index) ? reference ^ kWrongResultMark
                                         : reference;
}

SimulatedSut::SimulatedSut(const SimConfig& config, Clock& clock)
    : config_(config), clock_(clock) {
  ValidateConfig(config_);
  virtual_clock_ = dynamic_cast<VirtualClock*>(&clock_);
  if (virtual_clock_ == nullptr && dynamic_cast<WallClock*>(&clock_) == nullptr) {
    throw std::invalid_argument(
        "SimulatedSut: clock must be a VirtualClock or a WallClock");
  }
}

SimulatedSut::~SimulatedSut() { WallStopThreads(); }

void SimulatedSut::OnRunStart(const RunContext& context) {
  (void)context;
  WallStopThreads();
  {
    std::lock_guard<std::mutex> lock(mu_);
    fifo_.clear();
    cache_lane_.clear();
    pending_.clear();
    seen_.clear();
    jitter_rng_ = std::make_unique<SeededRng>(config_.seed, kJitterStream);
    service_scale_ = 1.0;
    free_executors_ = config_.concurrency;
    dispatch_deadline_armed_ = false;
    flushed_ = false;
    stopping_ = false;
  }
  if (virtual_clock_ == nullptr) {
    WallStartThreads();
  }
}

void SimulatedSut::OnRunEnd() { WallStopThreads(); }

void SimulatedSut::IssueQuery(const Query& query) {
  if (virtual_clock_ != nullptr) {
    VirtualIssue(query);
  } else {
    WallIssue(query);
  }
}

void SimulatedSut::Flush() {
  if (virtual_clock_ != nullptr) {
    flushed_ = true;
    VirtualTryDispatch();
  } else {
    {
      std::lock_guard<std::mutex> lock(mu_);
      flushed_ = true;
    }
    work_cv_.notify_all();
  }
}

void SimulatedSut::SetServiceTimeScale(double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("SetServiceTimeScale: scale must be > 0");
  }
  std::lock_guard<std::mutex> lock(mu_);
  service_scale_ = scale;
}

Duration SimulatedSut::ScaledServiceTime(int64_t batch_size) {
  const Duration raw = SimServiceTime(config_, batch_size, jitter_rng_.get());
  if (service_scale_ == 1.0) {
    return raw;
  }
  return Duration(
      std::llround(static_cast<double>(raw.count()) * service_scale_));
}

void SimulatedSut::CompleteUnit(const Unit& unit,
                                std::vector<QueryResponse>& out_responses) {
  const auto it = pending_.find(unit.query_id);
  if (it == pending_.end()) {
    return;
  }
  PendingQuery& pq = it->second;
  pq.digests[unit.slot] = SimSampleDigest(config_, unit.sample);
  if (--pq.remaining == 0) {
    QueryResponse response;
    response.query_id = unit.query_id;
    response.completion_time = clock_.Now();
    response.sample_digests = std::move(pq.digests);
    response.payload_digest = CombineDigests(response.sample_digests);
    pending_.erase(it);
    out_responses.push_back(std::move(response));
  }
}

void SimulatedSut::RespondAll(std::vector<QueryResponse>& responses) {
  for (QueryResponse& response : responses) {
    Respond(std::move(response));
  }
  responses.clear();
}

void SimulatedSut::VirtualIssue(const Query& query) {
  const Duration now = clock_.Now();
  PendingQuery& pq = pending_[query.query_id];
  pq.remaining = static_cast<int64_t>(query.sample_indices.size());
  pq.digests.resize(query.sample_indices.size());

  std::vector<Unit> hits;
  for (size_t j = 0; j < query.sample_indices.size(); ++j) {
    Unit unit;
    unit.query_id = query.query_id;
    unit.sample = query.sample_indices[j];
    unit.slot = j;
    unit.enqueued_at = now;
    if (config_.caching_enabled && seen_.contains(unit.sample)) {
      hits.push_back(unit);
      continue;
    }
    if (config_.caching_enabled) {
      seen_.insert(unit.sample);
    }
    fifo_.push_back(unit);
  }

  if (!hits.empty()) {
    virtual_clock_->ScheduleAt(
        now + config_.cache_hit_latency, [this, hits = std::move(hits)]() {
          std::vector<QueryResponse> responses;
          for (const Unit& unit : hits) {
            CompleteUnit(unit, responses);
          }
          RespondAll(responses);
        });
  }
  VirtualTryDispatch();
}

void SimulatedSut::VirtualTryDispatch() {
  const Duration now = clock_.Now();
  while (free_executors_ > 0 && !fifo_.empty()) {
    const size_t avail = fifo_.size();
    const bool full = avail >= static_cast<size_t>(config_.max_batch);
    if (!full && !flushed_ && config_.max_batch_wait > Duration::zero()) {
      const Duration deadline =
          fifo_.front().enqueued_at + config_.max_batch_wait;
      if (now < deadline) {
        // Let the batch fill; an alarm re-runs dispatch when patience runs
        // out, unless a fill-up or flush got there first.
        if (!dispatch_deadline_armed_) {
          dispatch_deadline_armed_ = true;
          virtual_clock_->ScheduleAt(deadline, [this]() {
            dispatch_deadline_armed_ = false;
            VirtualTryDispatch();
          });
        }
        break;
      }
    }
    const size_t k = std::min(avail, static_cast<size_t>(config_.max_batch));
    std::vector<Unit> batch(fifo_.begin(), fifo_.begin() + k);
    fifo_.erase(fifo_.begin(), fifo_.begin() + k);
    --free_executors_;
    const Duration service = ScaledServiceTime(static_cast<int64_t>(k));
    virtual_clock_->ScheduleAt(now + service,
                               [this, batch = std::move(batch)]() {
                                 VirtualFinishBatch(batch);
                               });
  }
}

void SimulatedSut::VirtualFinishBatch(const std::vector<Unit>& batch) {
  ++free_executors_;
  std::vector<QueryResponse> responses;
  for (const Unit& unit : batch) {
    CompleteUnit(unit, responses);
  }
  RespondAll(responses);
  VirtualTryDispatch();
}

void SimulatedSut::WallIssue(const Query& query) {
  const auto now_wall = std::chrono::steady_clock::now();
  bool has_hits = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    PendingQuery& pq = pending_[query.query_id];
    pq.remaining = static_cast<int64_t>(query.sample_indices.size());
    pq.digests.resize(query.sample_indices.size());
    for (size_t j = 0; j < query.sample_indices.size(); ++j) {
      Unit unit;
      unit.query_id = query.query_id;
      unit.sample = query.sample_indices[j];
      unit.slot = j;
      unit.enqueued_wall = now_wall;
      if (config_.caching_enabled && seen_.contains(unit.sample)) {
        cache_lane_.push_back(unit);
        has_hits = true;
        continue;
      }
      if (config_.caching_enabled) {
        seen_.insert(unit.sample);
      }
      fifo_.push_back(unit);
    }
  }
  work_cv_.notify_all();
  if (has_hits) {
    cache_cv_.notify_all();
  }
}

void SimulatedSut::WallStartThreads() {
  stopping_ = false;
  workers_.reserve(static_cast<size_t>(config_.concurrency));
  for (int64_t i = 0; i < config_.concurrency; ++i) {
    workers_.emplace_back([this]() { WorkerLoop(); });
  }
  if (config_.caching_enabled) {
    cache_thread_ = std::thread([this]() { CacheLaneLoop(); });
  }
}

void SimulatedSut::WallStopThreads() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (workers_.empty() && !cache_thread_.joinable()) {
      return;
    }
    stopping_ = true;
  }
  work_cv_.notify_all();
  cache_cv_.notify_all();
  for (std::thread& worker : workers_) {
    worker.join();
  }
  workers_.clear();
  if (cache_thread_.joinable()) {
    cache_thread_.join();
  }
}

void SimulatedSut::WorkerLoop() {
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    if (stopping_) return;
    if (fifo_.empty()) {
      work_cv_.wait(lock);
      continue;
    }
    const size_t avail = fifo_.size();
    const bool full = avail >= static_cast<size_t>(config_.max_batch);
    if (!full && !flushed_ && config_.max_batch_wait > Duration::zero()) {
      const auto deadline = fifo_.front().enqueued_wall +
                            std::chrono::duration_cast<
                                std::chrono::steady_clock::duration>(
                                config_.max_batch_wait);
      if (std::chrono::steady_clock::now() < deadline) {
        work_cv_.wait_until(lock, deadline);
        continue;
      }
    }
    const size_t k = std::min(avail, static_cast<size_t>(config_.max_batch));
    std::vector<Unit> batch(fifo_.begin(), fifo_.begin() + k);
    fifo_.erase(fifo_.begin(), fifo_.begin() + k);
    const Duration service = ScaledServiceTime(static_cast<int64_t>(k));

    lock.unlock();
    std::this_thread::sleep_for(service);

    std::vector<QueryResponse> responses;
    lock.lock();
    for (const Unit& unit : batch) {
      CompleteUnit(unit, responses);
    }
    lock.unlock();
    RespondAll(responses);
    lock.lock();
  }
}

void SimulatedSut::CacheLaneLoop() {
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    if (stopping_ && cache_lane_.empty()) return;
    if (cache_lane_.empty()) {
      cache_cv_.wait(lock);
      continue;
    }
    const auto due = cache_lane_.front().enqueued_wall +
                     std::chrono::duration_cast<
                         std::chrono::steady_clock::duration>(
                         config_.cache_hit_latency);
    if (std::chrono::steady_clock::now() < due) {
      cache_cv_.wait_until(lock, due);
      continue;
    }
    std::vector<QueryResponse> responses;
    const auto now = std::chrono::steady_clock::now();
    while (!cache_lane_.empty() &&
           cache_lane_.front().enqueued_wall +
                   std::chrono::duration_cast<
                       std::chrono::steady_clock::duration>(
                       config_.cache_hit_latency) <=
               now) {
      CompleteUnit(cache_lane_.front(), responses);
      cache_lane_.pop_front();
    }
    lock.unlock();
    RespondAll(responses);
    lock.lock();
  }
}

std::unique_ptr<SimulatedSut> MakeSimulatedSut(const SimConfig& config,
                                               Clock& clock) {
  return std::make_unique<SimulatedSut>(config, clock);
}

}  // namespace loadgauge
