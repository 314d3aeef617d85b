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

#include "hybridtree/gbdt/loss.hpp"

#include <cmath>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

std::string to_string(LossKind loss) {
  return loss == LossKind::kLogistic ? "logistic" : "squared_error";
}

LossKind parse_loss(const std::string& name) {
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "squared_error") return LossKind::kSquaredError;
  throw ConfigError("unknown loss \"" + name + "\"");
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_labels(std::span<const double> labels, LossKind loss) {
  if (loss != LossKind::kLogistic) return;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw ValidationError("logistic loss needs labels in {0, 1}; label " +
                            std::to_string(labels[i]) + " at position " +
                            std::to_string(i));
    }
  }
}

std::vector<double> compute_gradients(std::span<const double> labels,
                                      std::span<const double> y_p,
                                      LossKind loss) {
  if (labels.size() != y_p.size()) {
    throw ValidationError("label and prediction vectors differ in length");
  }
  check_labels(labels, loss);
  std::vector<double> g(labels.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = loss == LossKind::kLogistic ? sigmoid(y_p[i]) - labels[i]
                                       : y_p[i] - labels[i];
  }
  return g;
}

double total_loss(std::span<const double> labels, std::span<const double> y_p,
                  LossKind loss) {
  if (labels.size() != y_p.size()) {
    throw ValidationError("label and prediction vectors differ in length");
  }
  double sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (loss == LossKind::kSquaredError) {
      const double r = y_p[i] - labels[i];
      sum += 0.5 * r * r;
    } else {
      // log(1 + e^z) - y z, evaluated without overflow.
      const double z = y_p[i];
      sum += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) -
             labels[i] * z;
    }
  }
  return sum;
}

}  // namespace hybridtree
