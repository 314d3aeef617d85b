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

#include "hybridtree/data/dataset.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

Dataset::Dataset(std::vector<InstanceId> instance_ids,
                 std::vector<FeatureId> feature_ids,
                 std::vector<std::vector<double>> columns,
                 std::optional<std::vector<double>> labels)
    : instance_ids_(std::move(instance_ids)),
      feature_ids_(std::move(feature_ids)),
      columns_(std::move(columns)),
      labels_(std::move(labels)) {
  if (columns_.size() != feature_ids_.size()) {
    throw ValidationError("dataset has " + std::to_string(columns_.size()) +
                          " columns but " +
                          std::to_string(feature_ids_.size()) +
                          " feature ids");
  }
  const std::size_t n = instance_ids_.size();
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].size() != n) {
      throw ValidationError("feature " + std::to_string(feature_ids_[c]) +
                            " has " + std::to_string(columns_[c].size()) +
                            " values for " + std::to_string(n) +
                            " instances");
    }
  }
  if (labels_ && labels_->size() != n) {
    throw ValidationError("label count " + std::to_string(labels_->size()) +
                          " does not match instance count " +
                          std::to_string(n));
  }

  auto rows = std::make_shared<std::unordered_map<InstanceId, std::size_t>>();
  rows->reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows->emplace(instance_ids_[r], r).second) {
      throw ValidationError("duplicate instance id " +
                            std::to_string(instance_ids_[r]));
    }
  }
  auto cols = std::make_shared<std::unordered_map<FeatureId, std::size_t>>();
  for (std::size_t c = 0; c < feature_ids_.size(); ++c) {
    if (!cols->emplace(feature_ids_[c], c).second) {
      throw ValidationError("duplicate feature id " +
                            std::to_string(feature_ids_[c]));
    }
  }
  row_index_ = std::move(rows);
  col_index_ = std::move(cols);
}

std::span<const double> Dataset::labels() const {
  if (!labels_) throw ValidationError("dataset has no labels");
  return *labels_;
}

std::optional<std::size_t> Dataset::row_of(InstanceId id) const {
  if (!row_index_) return std::nullopt;
  auto it = row_index_->find(id);
  if (it == row_index_->end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dataset::column_of(FeatureId feature) const {
  if (!col_index_) return std::nullopt;
  auto it = col_index_->find(feature);
  if (it == col_index_->end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<InstanceId> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) ids.push_back(instance_ids_.at(r));
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    cols[c].reserve(rows.size());
    for (std::size_t r : rows) cols[c].push_back(columns_[c][r]);
  }
  std::optional<std::vector<double>> labels;
  if (labels_) {
    labels.emplace();
    labels->reserve(rows.size());
    for (std::size_t r : rows) labels->push_back((*labels_)[r]);
  }
  return Dataset(std::move(ids), feature_ids_, std::move(cols),
                 std::move(labels));
}

Dataset Dataset::select_features(std::span<const FeatureId> features) const {
  std::vector<std::vector<double>> cols;
  cols.reserve(features.size());
  for (FeatureId f : features) {
    auto c = column_of(f);
    if (!c) {
      throw ValidationError("dataset has no feature " + std::to_string(f));
    }
    cols.push_back(columns_[*c]);
  }
  return Dataset(instance_ids_,
                 std::vector<FeatureId>(features.begin(), features.end()),
                 std::move(cols), labels_);
}

Dataset Dataset::without_labels() const {
  return Dataset(instance_ids_, feature_ids_, columns_, std::nullopt);
}

Dataset Dataset::with_labels(std::vector<double> labels) const {
  return Dataset(instance_ids_, feature_ids_, columns_, std::move(labels));
}

double RowView::operator()(FeatureId feature) const {
  auto c = data_->column_of(feature);
  if (!c) {
    throw ValidationError("instance " +
                          std::to_string(data_->instance_ids()[row_]) +
                          " lacks feature " + std::to_string(feature));
  }
  return data_->value(row_, *c);
}

std::vector<InstanceId> link_instances(const Dataset& host,
                                       const Dataset& guest) {
  std::vector<InstanceId> shared;
  for (InstanceId id : guest.instance_ids()) {
    if (host.row_of(id)) shared.push_back(id);
  }
  std::sort(shared.begin(), shared.end());
  return shared;
}

Dataset merge_parties(const Dataset& host, std::span<const Dataset> guests) {
  // Feature id -> guests holding it, in guest order.
  std::map<FeatureId, std::vector<std::size_t>> holders;
  for (std::size_t g = 0; g < guests.size(); ++g) {
    for (FeatureId f : guests[g].feature_ids()) {
      if (host.has_feature(f)) {
        throw ValidationError("feature " + std::to_string(f) +
                              " is held by both host and guest " +
                              std::to_string(g));
      }
      holders[f].push_back(g);
    }
  }

  const std::size_t n = host.num_instances();
  std::vector<FeatureId> feature_ids(host.feature_ids().begin(),
                                     host.feature_ids().end());
  std::vector<std::vector<double>> columns;
  columns.reserve(host.num_features() + holders.size());
  for (std::size_t c = 0; c < host.num_features(); ++c) {
    auto col = host.column(c);
    columns.emplace_back(col.begin(), col.end());
  }
  for (const auto& [feature, owning] : holders) {
    std::vector<double> col(n, kMissing);
    for (std::size_t r = 0; r < n; ++r) {
      const InstanceId id = host.instance_ids()[r];
      for (std::size_t g : owning) {
        auto row = guests[g].row_of(id);
        if (row) {
          col[r] = guests[g].value(*row, *guests[g].column_of(feature));
          break;
        }
      }
    }
    feature_ids.push_back(feature);
    columns.push_back(std::move(col));
  }
  std::optional<std::vector<double>> labels;
  if (host.has_labels()) {
    labels.emplace(host.labels().begin(), host.labels().end());
  }
  return Dataset(std::vector<InstanceId>(host.instance_ids().begin(),
                                         host.instance_ids().end()),
                 std::move(feature_ids), std::move(columns),
                 std::move(labels));
}

Dataset normalize_binary_labels(const Dataset& data) {
  if (!data.has_labels()) return data;
  auto labels = data.labels();
  bool pm_one = std::all_of(labels.begin(), labels.end(),
                            [](double y) { return y == -1.0 || y == 1.0; });
  bool has_negative = std::any_of(labels.begin(), labels.end(),
                                  [](double y) { return y == -1.0; });
  if (!pm_one || !has_negative) return data;
  std::vector<double> mapped(labels.size());
  std::transform(labels.begin(), labels.end(), mapped.begin(),
                 [](double y) { return y > 0 ? 1.0 : 0.0; });
  return data.with_labels(std::move(mapped));
}

}  // namespace hybridtree
