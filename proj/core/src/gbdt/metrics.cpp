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

#include "hybridtree/gbdt/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

void check_sizes(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("label and score vectors differ in length");
  }
  if (a.empty()) throw ValidationError("metric of an empty label vector");
}

}  // namespace

double accuracy(std::span<const double> labels, std::span<const double> probs) {
  check_sizes(labels, probs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double predicted = probs[i] >= 0.5 ? 1.0 : 0.0;
    hits += predicted == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double auprc(std::span<const double> labels, std::span<const double> scores) {
  check_sizes(labels, scores);
  std::size_t positives = 0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw ValidationError("auprc needs 0/1 labels");
    positives += y == 1.0;
  }
  if (positives == 0 || positives == labels.size()) {
    throw ValidationError("auprc needs both classes present");
  }
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double area = 0;
  std::size_t tp = 0, seen = 0, prev_tp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      tp += labels[order[i]] == 1.0;
      ++seen;
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    area += static_cast<double>(tp - prev_tp) / static_cast<double>(positives) *
            precision;
    prev_tp = tp;
  }
  return area;
}

double mean_squared_error(std::span<const double> labels,
                          std::span<const double> preds) {
  check_sizes(labels, preds);
  double s = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double r = preds[i] - labels[i];
    s += r * r;
  }
  return s / static_cast<double>(labels.size());
}

double evaluate_metric(const std::string& name, std::span<const double> labels,
                       std::span<const double> outputs) {
  if (name == "accuracy") return accuracy(labels, outputs);
  if (name == "auprc") return auprc(labels, outputs);
  if (name == "mse") return mean_squared_error(labels, outputs);
  throw ConfigError("unknown metric \"" + name + "\"");
}

}  // namespace hybridtree
