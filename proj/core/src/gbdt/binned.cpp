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

#include "hybridtree/gbdt/binned.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

BinnedMatrix::BinnedMatrix(const Dataset& data, const BinCuts& cuts,
                           std::span<const FeatureId> features)
    : num_rows_(data.num_instances()) {
  std::vector<FeatureId> wanted(features.begin(), features.end());
  if (wanted.empty()) {
    wanted.assign(data.feature_ids().begin(), data.feature_ids().end());
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  for (FeatureId f : wanted) {
    auto col = data.column_of(f);
    if (!col) {
      throw ValidationError("dataset has no feature " + std::to_string(f));
    }
    auto c = cuts.of(f);
    if (c.empty()) continue;
    if (c.size() >= std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError("too many split candidates for feature " +
                            std::to_string(f));
    }
    std::vector<std::uint16_t> b(num_rows_);
    auto values = data.column(*col);
    for (std::size_t r = 0; r < num_rows_; ++r) {
      const double v = values[r];
      b[r] = is_missing(v)
                 ? 0
                 : static_cast<std::uint16_t>(
                       std::upper_bound(c.begin(), c.end(), v) - c.begin());
    }
    feature_ids_.push_back(f);
    cuts_.emplace_back(c.begin(), c.end());
    bins_.push_back(std::move(b));
  }
}

}  // namespace hybridtree
