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

#ifndef HYBRIDTREE_DATA_DATASET_HPP_
#define HYBRIDTREE_DATA_DATASET_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hybridtree/common/types.hpp"

namespace hybridtree {

// Column-oriented tabular data keyed by stable instance ids.
//
// Immutable after construction; copies share nothing mutable, so a Dataset
// may be read concurrently. The constructor validates that ids and feature
// ids are unique and that every column and the optional label vector have one
// slot per instance.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<InstanceId> instance_ids,
          std::vector<FeatureId> feature_ids,
          std::vector<std::vector<double>> columns,
          std::optional<std::vector<double>> labels = std::nullopt);

  std::size_t num_instances() const { return instance_ids_.size(); }
  std::size_t num_features() const { return feature_ids_.size(); }
  bool empty() const { return instance_ids_.empty(); }

  std::span<const InstanceId> instance_ids() const { return instance_ids_; }
  std::span<const FeatureId> feature_ids() const { return feature_ids_; }

  std::span<const double> column(std::size_t col) const {
    return columns_[col];
  }
  double value(std::size_t row, std::size_t col) const {
    return columns_[col][row];
  }

  bool has_labels() const { return labels_.has_value(); }
  // Throws ValidationError when the dataset is unlabeled.
  std::span<const double> labels() const;

  std::optional<std::size_t> row_of(InstanceId id) const;
  std::optional<std::size_t> column_of(FeatureId feature) const;
  bool has_feature(FeatureId feature) const {
    return column_of(feature).has_value();
  }

  // Rows in the given order (labels follow when present).
  Dataset select_rows(std::span<const std::size_t> rows) const;
  // Columns in the given order; every id must exist.
  Dataset select_features(std::span<const FeatureId> features) const;
  Dataset without_labels() const;
  Dataset with_labels(std::vector<double> labels) const;

 private:
  std::vector<InstanceId> instance_ids_;
  std::vector<FeatureId> feature_ids_;
  std::vector<std::vector<double>> columns_;
  std::optional<std::vector<double>> labels_;
  std::shared_ptr<const std::unordered_map<InstanceId, std::size_t>> row_index_;
  std::shared_ptr<const std::unordered_map<FeatureId, std::size_t>> col_index_;
};

// Feature accessor for one row of a dataset, used by tree routing.
class RowView {
 public:
  RowView(const Dataset& data, std::size_t row) : data_(&data), row_(row) {}
  // Throws ValidationError if the dataset lacks `feature`.
  double operator()(FeatureId feature) const;

 private:
  const Dataset* data_;
  std::size_t row_;
};

// Sorted intersection of the instance-id sets of two datasets.
std::vector<InstanceId> link_instances(const Dataset& host,
                                       const Dataset& guest);

// Reassembles a host dataset with guest feature slices over the host's rows.
// Guest columns are appended in ascending feature-id order. Values an instance
// has in no guest are missing; when several guests hold the same
// (instance, feature), the lowest guest index wins.
Dataset merge_parties(const Dataset& host, std::span<const Dataset> guests);

// Maps {-1, +1} labels to {0, 1}; other label sets are returned unchanged.
Dataset normalize_binary_labels(const Dataset& data);

}  // namespace hybridtree

#endif  // HYBRIDTREE_DATA_DATASET_HPP_
