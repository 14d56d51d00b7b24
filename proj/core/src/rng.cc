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

#include "loadgauge/rng.h"

#include <stdexcept>

namespace loadgauge {
namespace {

constexpr uint64_t RotL(uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

uint64_t SplitMix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t Fnv1a64(std::string_view text) {
  uint64_t hash = 0xcbf29ce484222325ull;
  for (char c : text) {
    hash ^= static_cast<uint8_t>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

uint64_t DeriveSeed(uint64_t base_seed, uint64_t index) {
  uint64_t state = base_seed;
  uint64_t out = 0;
  for (uint64_t i = 0; i <= index; ++i) {
    out = SplitMix64(state);
  }
  return out;
}

uint64_t Mix64(uint64_t x) {
  uint64_t state = x;
  return SplitMix64(state);
}

SeededRng::SeededRng(uint64_t seed, std::string_view stream_label) {
  uint64_t state = seed ^ Fnv1a64(stream_label);
  for (auto& word : state_) {
    word = SplitMix64(state);
  }
}

uint64_t SeededRng::NextU64() {
  const uint64_t result = RotL(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = RotL(state_[3], 45);
  return result;
}

double SeededRng::NextUnitOpen() {
  // 53-bit mantissa, shifted into (0, 1] by adding one ulp's worth before
  // scaling. Never returns 0, so log() of the result is always finite.
  const uint64_t bits = NextU64() >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

uint64_t SeededRng::NextBounded(uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("NextBounded: bound must be nonzero");
  }
  // Lemire's method: take the high word of a 128-bit product and reject the
  // small biased region at the bottom of the low word.
  uint64_t x = NextU64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = NextU64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

}  // namespace loadgauge
