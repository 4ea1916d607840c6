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

#ifndef STAIRCASE_RANDOM_HPP_
#define STAIRCASE_RANDOM_HPP_

#include <array>
#include <cstdint>

namespace staircase {

// Source of independent uniforms on [0,1). All randomness in the library
// flows through this interface; there is no ambient global RNG.
class UniformSource {
 public:
  virtual ~UniformSource() = default;
  virtual double next() = 0;
};

// SplitMix64 step; used for seeding and stream derivation.
uint64_t split_mix64(uint64_t& state);

// xoshiro256** generator. Seeded deterministically from a 64-bit seed via
// SplitMix64; `for_stream` derives independent streams from (seed, stream)
// so that parallel sweeps do not perturb each other's draws.
class Xoshiro256ss final : public UniformSource {
 public:
  explicit Xoshiro256ss(uint64_t seed);
  static Xoshiro256ss for_stream(uint64_t seed, uint64_t stream);

  uint64_t next_u64();
  // 53-bit mantissa uniform in [0,1).
  double next() override;

 private:
  std::array<uint64_t, 4> state_;
};

}  // namespace staircase

#endif  // STAIRCASE_RANDOM_HPP_
