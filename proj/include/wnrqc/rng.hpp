// Copyright 2026 The wnrqc Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace wnrqc {

using Rng = std::mt19937_64;

/// Independent, reproducible stream `stream` derived from a user seed.
/// Work is split into fixed batches, each owning one stream, so results do
/// not depend on how batches are scheduled onto threads.
inline Rng stream_rng(uint64_t seed, uint64_t stream) {
    std::seed_seq seq{
        static_cast<uint32_t>(seed),
        static_cast<uint32_t>(seed >> 32),
        static_cast<uint32_t>(stream),
        static_cast<uint32_t>(stream >> 32),
        0x9e3779b9u};
    return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound). Rejection keeps it unbiased.
inline uint64_t uniform_below(Rng &rng, uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    while (true) {
        uint64_t r = rng();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

inline bool bernoulli(Rng &rng, double p) {
    return uniform01(rng) < p;
}

}  // namespace wnrqc
