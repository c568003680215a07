// Copyright 2026 The noisybound Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef NOISYBOUND_RNG_H_
#define NOISYBOUND_RNG_H_

#include <cstdint>
#include <random>

namespace noisybound {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream, step). Used wherever results must
// not depend on execution order: per-iteration noise, per-client streams.
inline Rng DeriveRng(uint64_t seed, uint64_t stream, uint64_t step = 0) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32),
                    static_cast<uint32_t>(step), static_cast<uint32_t>(step >> 32)};
  return Rng(seq);
}

// Stream ids used by the training loops; kept apart so that switching e.g. the
// statistics mode never perturbs the noise draws.
namespace streams {
inline constexpr uint64_t kNoise = 1;
inline constexpr uint64_t kHoldOut = 2;
inline constexpr uint64_t kPairs = 3;
inline constexpr uint64_t kSchedule = 4;
inline constexpr uint64_t kInit = 5;
inline constexpr uint64_t kData = 6;
inline constexpr uint64_t kCorruption = 7;
inline constexpr uint64_t kClientSelect = 8;
inline constexpr uint64_t kClientNoiseBase = 1000;
}  // namespace streams

}  // namespace noisybound

#endif  // NOISYBOUND_RNG_H_
