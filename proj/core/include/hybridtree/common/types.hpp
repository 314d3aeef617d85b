/*
 * Copyright 2026 The HybridTree Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HYBRIDTREE_COMMON_TYPES_HPP_
#define HYBRIDTREE_COMMON_TYPES_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace hybridtree {

using InstanceId = std::uint64_t;
using FeatureId = std::uint32_t;

// Missing feature values are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

using Rng = std::mt19937_64;

// SplitMix64 finalizer; derives independent sub-seeds from one user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hybridtree

#endif  // HYBRIDTREE_COMMON_TYPES_HPP_
