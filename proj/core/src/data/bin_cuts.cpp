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

#include "hybridtree/data/bin_cuts.hpp"

#include <algorithm>
#include <string>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

std::span<const double> BinCuts::of(FeatureId feature) const {
  auto it = cuts.find(feature);
  if (it == cuts.end()) return {};
  return it->second;
}

std::size_t BinCuts::total() const {
  std::size_t n = 0;
  for (const auto& [f, c] : cuts) n += c.size();
  return n;
}

BinCuts compute_split_candidates(const Dataset& data,
                                 std::span<const FeatureId> features,
                                 std::size_t max_bins) {
  if (max_bins < 1) throw ValidationError("max_bins must be at least 1");
  if (data.empty()) {
    throw ValidationError("cannot compute split candidates on an empty dataset");
  }
  std::vector<FeatureId> wanted(features.begin(), features.end());
  if (wanted.empty()) {
    wanted.assign(data.feature_ids().begin(), data.feature_ids().end());
  }

  BinCuts out;
  std::vector<double> sorted;
  for (FeatureId f : wanted) {
    auto col = data.column_of(f);
    if (!col) {
      throw ValidationError("dataset has no feature " + std::to_string(f));
    }
    sorted.clear();
    for (double v : data.column(*col)) {
      if (!is_missing(v)) sorted.push_back(v);
    }
    std::vector<double>& cuts = out.cuts[f];
    const std::size_t m = sorted.size();
    if (m == 0) continue;
    std::sort(sorted.begin(), sorted.end());
    std::size_t below_last = 0;
    for (std::size_t k = 1; k < max_bins; ++k) {
      std::size_t j = (k * m + max_bins - 1) / max_bins;
      if (j == 0) continue;
      double cut = j < m ? sorted[j - 1] + (sorted[j] - sorted[j - 1]) / 2
                         : sorted[m - 1];
      // Keep a cut only if it moves at least one value to the left side
      // compared with the previous cut.
      auto below = static_cast<std::size_t>(
          std::lower_bound(sorted.begin(), sorted.end(), cut) - sorted.begin());
      if (below > below_last) {
        cuts.push_back(cut);
        below_last = below;
      }
    }
  }
  return out;
}

}  // namespace hybridtree
