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

#ifndef HYBRIDTREE_GBDT_BINNED_HPP_
#define HYBRIDTREE_GBDT_BINNED_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/data/dataset.hpp"

namespace hybridtree {

// Dataset columns quantized against split candidates. The bin of a value is
// the number of cuts <= value, so the value goes left of cut j iff its bin is
// <= j. Missing values land in bin 0 and therefore always go left.
class BinnedMatrix {
 public:
  // Features are taken in ascending id order; `features` empty means every
  // dataset feature. Features without cuts are left out.
  BinnedMatrix(const Dataset& data, const BinCuts& cuts,
               std::span<const FeatureId> features = {});

  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_features() const { return feature_ids_.size(); }
  FeatureId feature_id(std::size_t k) const { return feature_ids_[k]; }
  std::span<const double> cuts(std::size_t k) const { return cuts_[k]; }
  std::span<const std::uint16_t> bins(std::size_t k) const { return bins_[k]; }

 private:
  std::size_t num_rows_ = 0;
  std::vector<FeatureId> feature_ids_;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::vector<std::uint16_t>> bins_;
};

}  // namespace hybridtree

#endif  // HYBRIDTREE_GBDT_BINNED_HPP_
