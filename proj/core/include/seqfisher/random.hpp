// Copyright 2026 The seqfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <random>

namespace seqfisher {

using Rng = std::mt19937_64;

// SplitMix64 finalizer: a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of trajectory `index` in a run. Pure function of its inputs, so the
// stream a trajectory sees never depends on scheduling. The base is whitened
// first: a bare base ^ index lets bases 1 and 2 share the same trajectories.
constexpr std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(mix64(base_seed) ^ index);
}

// Derives an independent sub-seed (e.g. for the two random initial states of
// a paired trajectory).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

Rng make_rng(std::uint64_t seed);

// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; independent of the standard library's
// distribution implementation so streams are portable.
double standard_normal(Rng& rng);

}  // namespace seqfisher
