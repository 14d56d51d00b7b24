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
/// \brief Deterministic random number generation.
///
/// Every stream of randomness in a run is an xoshiro256** generator keyed by
/// a user-visible 64-bit seed and a short label naming the purpose of the
/// stream ("schedule", "samples", ...). Labeling keeps the streams
/// decorrelated: changing how many numbers one consumer draws never perturbs
/// another consumer, and the same seed reproduces the same run bit for bit.

#ifndef LOADGAUGE_RNG_H_
#define LOADGAUGE_RNG_H_

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace loadgauge {

/// Advances a splitmix64 state and returns the next output. Used for seeding
/// and for stateless hashing; not a substitute for SeededRng in hot paths.
uint64_t SplitMix64(uint64_t& state);

/// FNV-1a on the bytes of `text`. Used to fold stream labels into seeds.
uint64_t Fnv1a64(std::string_view text);

/// Maps (base_seed, index) to an independent seed. Successive indices give
/// the seeds for successive runs of a multi-run protocol.
uint64_t DeriveSeed(uint64_t base_seed, uint64_t index);

/// A 64-bit hash with good avalanche behavior (the splitmix64 finalizer).
uint64_t Mix64(uint64_t x);

/// xoshiro256** seeded from (seed ^ FNV-1a(label)) through splitmix64.
/// Satisfies UniformRandomBitGenerator so it can drive <random>
/// distributions, though the scheduler sticks to the explicit methods below
/// to keep outputs platform-independent.
class SeededRng {
 public:
  using result_type = uint64_t;

  SeededRng(uint64_t seed, std::string_view stream_label);

  uint64_t NextU64();
  result_type operator()() { return NextU64(); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<uint64_t>::max();
  }

  /// Uniform double in (0, 1]. The open lower end makes the value safe to
  /// pass to log() when drawing exponentials.
  double NextUnitOpen();

  /// Uniform integer in [0, bound). Unbiased (Lemire's multiply-shift with
  /// rejection). `bound` must be nonzero.
  uint64_t NextBounded(uint64_t bound);

 private:
  std::array<uint64_t, 4> state_;
};

}  // namespace loadgauge

#endif  // LOADGAUGE_RNG_H_
