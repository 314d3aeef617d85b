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

#ifndef HYBRIDTREE_GBDT_LOSS_HPP_
#define HYBRIDTREE_GBDT_LOSS_HPP_

#include <span>
#include <string>
#include <vector>

namespace hybridtree {

enum class LossKind { kLogistic, kSquaredError };

std::string to_string(LossKind loss);
LossKind parse_loss(const std::string& name);

double sigmoid(double x);

// Throws ValidationError when logistic labels fall outside {0, 1}.
void check_labels(std::span<const double> labels, LossKind loss);

// First-order gradients of the loss at the current raw predictions. The
// hessian is taken as 1 per instance throughout the library.
std::vector<double> compute_gradients(std::span<const double> labels,
                                      std::span<const double> y_p,
                                      LossKind loss);

// Sum of per-instance losses: 0.5 (y_p - y)^2 or the logistic log-loss.
double total_loss(std::span<const double> labels, std::span<const double> y_p,
                  LossKind loss);

}  // namespace hybridtree

#endif  // HYBRIDTREE_GBDT_LOSS_HPP_
