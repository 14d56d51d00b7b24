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
/// \brief The system-under-test boundary and the sample library it draws
/// inputs from.

#ifndef LOADGAUGE_SUT_H_
#define LOADGAUGE_SUT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "loadgauge/query.h"
#include "loadgauge/scenario.h"

namespace loadgauge {

/// Canonical digest of the correct result for a sample. SUTs that compute
/// the right answer report this value; anything else is counted as an
/// accuracy error.
uint64_t ReferencePayloadDigest(SampleIndex index);

/// Folds per-sample digests into one query-level digest, order sensitive.
uint64_t CombineDigests(std::span<const uint64_t> digests);

/// What the SUT is told when a run begins.
struct RunContext {
  Scenario scenario = Scenario::kSingleStream;
  TestMode mode = TestMode::kPerformance;
};

/// A system under test. The harness calls IssueQuery according to the
/// scenario's arrival process; the SUT answers each query exactly once via
/// the response callback, from any thread in wall mode or from virtual clock
/// events in virtual mode.
class SutInterface {
 public:
  virtual ~SutInterface() = default;

  virtual std::string_view Name() const = 0;

  /// Called once before the clock restarts. `context` says which scenario
  /// and mode the coming run uses.
  virtual void OnRunStart(const RunContext& context) {}
  /// Called after the last completion has been collected.
  virtual void OnRunEnd() {}

  /// Hands one query to the SUT. Must not block on the query's own
  /// completion. The query's sample indices stay valid until its response
  /// callback has returned.
  virtual void IssueQuery(const Query& query) = 0;

  /// Tells the SUT no further queries are coming, so partially filled
  /// batches should be submitted now.
  virtual void Flush() = 0;

  void SetResponseCallback(std::function<void(QueryResponse)> callback) {
    callback_ = std::move(callback);
  }

 protected:
  /// Delivers a completion to the harness.
  void Respond(QueryResponse response) const {
    if (callback_) {
      callback_(std::move(response));
    }
  }

 private:
  std::function<void(QueryResponse)> callback_;
};

/// The pool of inputs queries refer to. The harness loads the samples a run
/// may touch before the clock starts, so loading and unloading are never
/// part of any measurement.
class SampleLibrary {
 public:
  virtual ~SampleLibrary() = default;

  virtual std::string_view Name() const = 0;
  virtual int64_t TotalSamples() const = 0;

  virtual void LoadSamples(std::span<const SampleIndex> indices) = 0;
  virtual void UnloadSamples(std::span<const SampleIndex> indices) = 0;

  /// Digest of the correct result for `index`, used in accuracy checks.
  virtual uint64_t ReferenceDigest(SampleIndex index) const = 0;
};

/// A library of synthetic samples whose reference digests follow the
/// canonical convention. Tracks what is loaded so tests can assert on it.
class InMemorySampleLibrary final : public SampleLibrary {
 public:
  explicit InMemorySampleLibrary(int64_t total_samples)
      : total_samples_(total_samples) {}

  std::string_view Name() const override { return "in-memory"; }
  int64_t TotalSamples() const override { return total_samples_; }

  void LoadSamples(std::span<const SampleIndex> indices) override;
  void UnloadSamples(std::span<const SampleIndex> indices) override;

  uint64_t ReferenceDigest(SampleIndex index) const override;

  int64_t loaded_count() const { return loaded_count_; }
  bool IsLoaded(SampleIndex index) const;

 private:
  int64_t total_samples_;
  int64_t loaded_count_ = 0;
  std::vector<bool> loaded_;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_SUT_H_
