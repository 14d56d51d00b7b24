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

#include "loadgauge/sut.h"

#include <stdexcept>

#include "loadgauge/rng.h"

namespace loadgauge {

uint64_t ReferencePayloadDigest(SampleIndex index) {
  // Tagged so a reference digest never collides with the raw index.
  return Mix64(index ^ 0x5eed5eed5eed5eedull);
}

uint64_t CombineDigests(std::span<const uint64_t> digests) {
  uint64_t combined = 0x9ae16a3b2f90404full;
  for (uint64_t d : digests) {
    combined = Mix64(combined ^ d);
  }
  return combined;
}

void InMemorySampleLibrary::LoadSamples(std::span<const SampleIndex> indices) {
  if (loaded_.empty()) {
    loaded_.resize(static_cast<size_t>(total_samples_), false);
  }
  for (SampleIndex index : indices) {
    if (index >= static_cast<SampleIndex>(total_samples_)) {
      throw std::out_of_range("LoadSamples: index past end of library");
    }
    if (!loaded_[index]) {
      loaded_[index] = true;
      ++loaded_count_;
    }
  }
}

void InMemorySampleLibrary::UnloadSamples(
    std::span<const SampleIndex> indices) {
  for (SampleIndex index : indices) {
    if (index >= static_cast<SampleIndex>(total_samples_)) {
      throw std::out_of_range("UnloadSamples: index past end of library");
    }
    if (!loaded_.empty() && loaded_[index]) {
      loaded_[index] = false;
      --loaded_count_;
    }
  }
}

uint64_t InMemorySampleLibrary::ReferenceDigest(SampleIndex index) const {
  if (index >= static_cast<SampleIndex>(total_samples_)) {
    throw std::out_of_range("ReferenceDigest: index past end of library");
  }
  return ReferencePayloadDigest(index);
}

bool InMemorySampleLibrary::IsLoaded(SampleIndex index) const {
  return index < loaded_.size() && loaded_[index];
}

}  // namespace loadgauge
