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

#ifndef HYBRIDTREE_TOOLS_CLI_COMMANDS_HPP_
#define HYBRIDTREE_TOOLS_CLI_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hybridtree::cli {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::filesystem::path output_dir = ".";
  std::string cipher = "passthrough";
  // Empty selects accuracy for logistic loss and mse for squared error.
  std::string metric;
};

struct PartitionFlags {
  std::string scheme = "random_hybrid";
  std::size_t guests = 5;
  double beta = 0.5;
  std::string guest_features = "shared";
};

struct PartitionCommand {
  std::filesystem::path data;
  PartitionFlags partition;
};

struct ModelFlags {
  std::string method = "hybridtree";
  std::size_t trees = 50;
  std::size_t depth = 7;
  std::optional<std::size_t> e_host;
  std::optional<std::size_t> e_guest;
  double lambda = 1.0;
  double eta = 0.1;
  std::size_t max_bins = 32;
  std::string mode = "assisted";
  std::string loss = "logistic";
  std::size_t hosts = 5;
};

struct TrainCommand {
  std::filesystem::path data;
  std::optional<std::filesystem::path> test;
  // Reuses a manifest written by `partition` instead of drawing a new one.
  std::optional<std::filesystem::path> manifest;
  PartitionFlags partition;
  ModelFlags model;
  std::filesystem::path model_out = "model.json";
};

struct PredictCommand {
  std::filesystem::path model;
  std::filesystem::path data;
  std::filesystem::path output = "predictions.csv";
};

struct AnalyzeCommand {
  std::filesystem::path model;
  std::filesystem::path data;
  std::size_t max_rule_length = 3;
  double tolerance = 0;
  double epsilon = 0.05;
  std::size_t min_support = 30;
  double min_prevalence = 0.5;
  std::size_t top = 10;
  bool guest_only = false;
  bool transform = false;
  // Regularizer for leaves recomputed by --transform.
  double lambda = 1.0;
  std::filesystem::path report = "analysis.json";
};

struct BenchmarkCommand {
  std::filesystem::path data;
  std::filesystem::path test;
  std::vector<std::size_t> guests{5};
  std::vector<std::string> methods{"solo", "allin", "tfl", "hybridtree"};
  PartitionFlags partition;
  ModelFlags model;
  std::filesystem::path report = "benchmark.json";
};

// Each returns the process exit code and throws hybridtree::Error on failure.
int run_partition(const GlobalOptions& g, const PartitionCommand& c);
int run_train(const GlobalOptions& g, const TrainCommand& c);
int run_predict(const GlobalOptions& g, const PredictCommand& c);
int run_analyze(const GlobalOptions& g, const AnalyzeCommand& c);
int run_benchmark(const GlobalOptions& g, const BenchmarkCommand& c);

}  // namespace hybridtree::cli

#endif  // HYBRIDTREE_TOOLS_CLI_COMMANDS_HPP_
