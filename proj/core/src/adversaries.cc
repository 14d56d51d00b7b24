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

#include "loadgauge/adversaries.h"

#include <cmath>
#include <utility>

#include "loadgauge/rng.h"

namespace loadgauge {
namespace {

constexpr uint64_t kCorruptSalt = 0x636f726e65727321ull;
constexpr uint64_t kCorruptMark = 0x4000000000000002ull;

}  // namespace

ModeSplitSut::ModeSplitSut(std::unique_ptr<SutInterface> inner,
                           double corrupt_rate, uint64_t seed)
    : inner_(std::move(inner)), corrupt_rate_(corrupt_rate), seed_(seed) {
  inner_->SetResponseCallback([this](QueryResponse response) {
    if (mode_ == TestMode::kPerformance) {
      std::vector<SampleIndex> samples;
      {
        std::lock_guard<std::mutex> lock(mu_);
        const auto it = query_samples_.find(response.query_id);
        if (it != query_samples_.end()) {
          samples = std::move(it->second);
          query_samples_.erase(it);
        }
      }
      if (samples.size() == response.sample_digests.size()) {
        for (size_t j = 0; j < samples.size(); ++j) {
          if (CorruptsSample(samples[j])) {
            response.sample_digests[j] ^= kCorruptMark;
          }
        }
        response.payload_digest = CombineDigests(response.sample_digests);
      }
    }
    Respond(std::move(response));
  });
}

bool ModeSplitSut::CorruptsSample(SampleIndex index) const {
  if (corrupt_rate_ <= 0.0) return false;
  if (corrupt_rate_ >= 1.0) return true;
  const uint64_t h = Mix64(seed_ ^ Mix64(index ^ kCorruptSalt));
  const long double scaled =
      static_cast<long double>(corrupt_rate_) * 0x1.0p64L;
  const uint64_t threshold = scaled >= 0x1.0p64L - 1.0L
                                 ? UINT64_MAX
                                 : static_cast<uint64_t>(scaled);
  return h < threshold;
}

void ModeSplitSut::OnRunStart(const RunContext& context) {
  mode_ = context.mode;
  {
    std::lock_guard<std::mutex> lock(mu_);
    query_samples_.clear();
  }
  inner_->OnRunStart(context);
}

void ModeSplitSut::OnRunEnd() { inner_->OnRunEnd(); }

void ModeSplitSut::IssueQuery(const Query& query) {
  if (mode_ == TestMode::kPerformance) {
    std::lock_guard<std::mutex> lock(mu_);
    query_samples_[query.query_id].assign(query.sample_indices.begin(),
                                          query.sample_indices.end());
  }
  inner_->IssueQuery(query);
}

void ModeSplitSut::Flush() { inner_->Flush(); }

ScheduleKeyedSut::ScheduleKeyedSut(const SimConfig& config, Clock& clock,
                                   Duration expected_first_arrival,
                                   double slow_factor, Duration tolerance)
    : inner_(config, clock),
      clock_(clock),
      expected_first_arrival_(expected_first_arrival),
      tolerance_(tolerance),
      slow_factor_(slow_factor) {
  inner_.SetResponseCallback(
      [this](QueryResponse response) { Respond(std::move(response)); });
}

void ScheduleKeyedSut::OnRunStart(const RunContext& context) {
  decided_ = false;
  inner_.OnRunStart(context);
}

void ScheduleKeyedSut::OnRunEnd() { inner_.OnRunEnd(); }

void ScheduleKeyedSut::IssueQuery(const Query& query) {
  if (!decided_) {
    decided_ = true;
    const Duration delta = clock_.Now() - expected_first_arrival_;
    const Duration magnitude = delta < Duration::zero() ? -delta : delta;
    if (magnitude > tolerance_) {
      inner_.SetServiceTimeScale(slow_factor_);
    }
  }
  inner_.IssueQuery(query);
}

void ScheduleKeyedSut::Flush() { inner_.Flush(); }

}  // namespace loadgauge
