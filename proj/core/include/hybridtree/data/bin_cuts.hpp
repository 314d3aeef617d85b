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

#ifndef HYBRIDTREE_DATA_BIN_CUTS_HPP_
#define HYBRIDTREE_DATA_BIN_CUTS_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "hybridtree/data/dataset.hpp"

namespace hybridtree {

// Split candidates: per feature, strictly increasing thresholds. A value v
// goes left of threshold t iff v < t (missing values always go left).
struct BinCuts {
  std::map<FeatureId, std::vector<double>> cuts;

  // Empty list for features without candidates or not present.
  std::span<const double> of(FeatureId feature) const;
  std::size_t total() const;
};

// Empirical quantiles k/max_bins (k = 1..max_bins-1) of the non-missing
// values of each requested feature (all features when `features` is empty).
// A quantile falling between sorted neighbours a < b becomes (a + b) / 2.
// Cuts that induce the same left/right partition of the column as the
// previous kept cut (or an empty left side) are dropped, so a constant column
// has no candidates. Computed on local data only.
BinCuts compute_split_candidates(const Dataset& data,
                                 std::span<const FeatureId> features,
                                 std::size_t max_bins);

}  // namespace hybridtree

#endif  // HYBRIDTREE_DATA_BIN_CUTS_HPP_
