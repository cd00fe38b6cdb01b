// Copyright 2026 The Memtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace memtrack {

// Deterministic generator used for every piece of fixture randomness:
// xoshiro256** seeded through splitmix64. Gaussian draws go through an
// inverse-CDF transform of a single uniform, so the bit stream consumed per
// sample is fixed across platforms. The scheme is part of the memtrack/1
// format contract (see README).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derives an independent stream from (seed, stream_id). Used to give each
  // video / purpose its own generator while keeping a single root seed.
  static Rng derive(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform in (0, 1), never exactly 0 or 1; feeds the inverse CDF.
  double uniform_open();

  // Standard normal via Acklam's inverse-CDF approximation.
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  int uniform_int(int lo, int hi);

 private:
  std::uint64_t state_[4];
};

// Acklam's rational approximation of the standard normal inverse CDF.
// Absolute error below 1.2e-9 over (0, 1).
double inverse_normal_cdf(double p);

}  // namespace memtrack
