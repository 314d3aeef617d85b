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

#ifndef HYBRIDTREE_GBDT_METRICS_HPP_
#define HYBRIDTREE_GBDT_METRICS_HPP_

#include <span>
#include <string>

namespace hybridtree {

// Fraction of instances whose probability thresholded at 0.5 (p >= 0.5 is
// class 1) equals the label.
double accuracy(std::span<const double> labels, std::span<const double> probs);

// Area under the step-interpolated precision-recall curve (average
// precision): sum over distinct score thresholds, highest first, of
// (recall gain) * precision. Tied scores form one threshold. Throws
// ValidationError unless both classes are present.
double auprc(std::span<const double> labels, std::span<const double> scores);

double mean_squared_error(std::span<const double> labels,
                          std::span<const double> preds);

// Dispatches on "accuracy", "auprc" or "mse".
double evaluate_metric(const std::string& name, std::span<const double> labels,
                       std::span<const double> outputs);

}  // namespace hybridtree

#endif  // HYBRIDTREE_GBDT_METRICS_HPP_
