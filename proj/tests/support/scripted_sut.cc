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

#include "support/scripted_sut.h"

#include <utility>

namespace loadgauge::testing {

ScriptedSut::ScriptedSut(Clock& clock) : clock_(clock) {
  virtual_clock_ = dynamic_cast<VirtualClock*>(&clock);
  latency_fn = [](int64_t) { return DurationFromMillis(1); };
  digest_fn = [](SampleIndex index) { return ReferencePayloadDigest(index); };
  drop_fn = [](int64_t) { return false; };
  duplicate_fn = [](int64_t) { return false; };
}

ScriptedSut::~ScriptedSut() { JoinThreads(); }

void ScriptedSut::OnRunStart(const RunContext& /*context*/) {
  JoinThreads();
  issued_count_ = 0;
}

void ScriptedSut::OnRunEnd() { JoinThreads(); }

void ScriptedSut::IssueQuery(const Query& query) {
  ++issued_count_;
  if (drop_fn(query.query_id)) {
    return;
  }

  QueryResponse response;
  response.query_id = query.query_id == misreport_id_for ? misreport_id_as
                                                         : query.query_id;
  response.sample_digests.reserve(query.sample_indices.size());
  for (SampleIndex index : query.sample_indices) {
    response.sample_digests.push_back(digest_fn(index));
  }
  response.payload_digest = CombineDigests(response.sample_digests);

  const Duration latency = latency_fn(query.query_id);
  const bool duplicate = duplicate_fn(query.query_id);

  if (virtual_clock_ != nullptr) {
    virtual_clock_->ScheduleAt(
        clock_.Now() + latency, [this, response, duplicate] {
          Respond(response);
          if (duplicate) {
            Respond(response);
          }
        });
    return;
  }

  std::lock_guard<std::mutex> lock(mu_);
  threads_.emplace_back([this, response, latency, duplicate] {
    std::this_thread::sleep_for(latency);
    Respond(response);
    if (duplicate) {
      Respond(response);
    }
  });
}

void ScriptedSut::JoinThreads() {
  std::vector<std::thread> threads;
  {
    std::lock_guard<std::mutex> lock(mu_);
    threads.swap(threads_);
  }
  for (std::thread& t : threads) {
    t.join();
  }
}

}  // namespace loadgauge::testing
