// Copyright 2026 the staircase-dp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "staircase/random.hpp"

namespace staircase {

uint64_t split_mix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256ss::Xoshiro256ss(uint64_t seed) {
  uint64_t s = seed;
  for (auto& word : state_) word = split_mix64(s);
}

Xoshiro256ss Xoshiro256ss::for_stream(uint64_t seed, uint64_t stream) {
  // Mix the stream index through SplitMix64 before seeding so that
  // consecutive stream ids yield decorrelated states.
  uint64_t s = seed;
  uint64_t key = split_mix64(s) ^ (stream * 0xD1B54A32D192ED03ULL);
  return Xoshiro256ss(split_mix64(key));
}

uint64_t Xoshiro256ss::next_u64() {
  const uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Xoshiro256ss::next() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace staircase
