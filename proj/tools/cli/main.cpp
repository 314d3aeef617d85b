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

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hybridtree/common/error.hpp"

namespace {

using namespace hybridtree::cli;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void add_partition_flags(CLI::App* cmd, PartitionFlags& f) {
  cmd->add_option("--scheme", f.scheme, "random_hybrid, dirichlet or overlap_hetero")
      ->capture_default_str();
  cmd->add_option("--guests", f.guests, "Number of guests")->capture_default_str();
  cmd->add_option("--beta", f.beta, "Dirichlet concentration")->capture_default_str();
  cmd->add_option("--guest-features", f.guest_features, "shared or split")
      ->capture_default_str();
}

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--method", f.method, "allin, solo, hybridtree, tfl or multihost")
      ->capture_default_str();
  cmd->add_option("--trees", f.trees, "Boosting rounds")->capture_default_str();
  cmd->add_option("--depth", f.depth, "Total tree depth")->capture_default_str();
  cmd->add_option("--e-host", f.e_host, "Host layers (default depth - e-guest)");
  cmd->add_option("--e-guest", f.e_guest, "Guest layers (default 2)");
  cmd->add_option("--lambda", f.lambda, "L2 regularizer")->capture_default_str();
  cmd->add_option("--eta", f.eta, "Learning rate")->capture_default_str();
  cmd->add_option("--max-bins", f.max_bins, "Split candidates per feature")
      ->capture_default_str();
  cmd->add_option("--mode", f.mode, "assisted or surrogate")->capture_default_str();
  cmd->add_option("--loss", f.loss, "logistic or squared")->capture_default_str();
  cmd->add_option("--hosts", f.hosts, "Host shards for multihost")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated gradient boosted trees over hybrid data partitions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file; command-line flags take precedence");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Threads; more than one runs parties concurrently")
      ->capture_default_str();
  app.add_option("--output-dir", g.output_dir, "Directory for outputs")
      ->capture_default_str();
  app.add_option("--cipher", g.cipher, "passthrough, paillier or paillier:<bits>")
      ->capture_default_str();
  app.add_option("--metric", g.metric, "accuracy, auprc or mse");

  PartitionCommand part;
  CLI::App* part_cmd = app.add_subcommand("partition", "Split a dataset into parties");
  part_cmd->add_option("--data", part.data, "Input dataset")->required();
  add_partition_flags(part_cmd, part.partition);

  TrainCommand train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", train.data, "Training dataset")->required();
  train_cmd->add_option("--test", train.test, "Held-out dataset to predict");
  train_cmd->add_option("--manifest", train.manifest, "Partition manifest to reuse");
  train_cmd->add_option("--model-out", train.model_out, "Model file")
      ->capture_default_str();
  add_partition_flags(train_cmd, train.partition);
  add_model_flags(train_cmd, train.model);

  PredictCommand predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict with a trained model");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  predict_cmd->add_option("--data", predict.data, "Dataset")->required();
  predict_cmd->add_option("--output", predict.output, "Predictions file")
      ->capture_default_str();

  AnalyzeCommand analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Mine and test meta-rules");
  analyze_cmd->add_option("--model", analyze.model, "Model file")->required();
  analyze_cmd->add_option("--data", analyze.data, "Labeled dataset")->required();
  analyze_cmd->add_option("--max-rule-length", analyze.max_rule_length)
      ->capture_default_str();
  analyze_cmd->add_option("--tolerance", analyze.tolerance, "Threshold tolerance")
      ->capture_default_str();
  analyze_cmd->add_option("--epsilon", analyze.epsilon, "Meta-rule deviation bound")
      ->capture_default_str();
  analyze_cmd->add_option("--min-support", analyze.min_support)->capture_default_str();
  analyze_cmd->add_option("--min-prevalence", analyze.min_prevalence)
      ->capture_default_str();
  analyze_cmd->add_option("--top", analyze.top, "Rules to report; 0 keeps all")
      ->capture_default_str();
  analyze_cmd->add_flag("--guest-only", analyze.guest_only,
                        "Only rules with a guest feature condition");
  analyze_cmd->add_flag("--transform", analyze.transform,
                        "Reorder guest conditions and report leaf gaps");
  analyze_cmd->add_option("--lambda", analyze.lambda)->capture_default_str();
  analyze_cmd->add_option("--report", analyze.report, "Report file")
      ->capture_default_str();

  BenchmarkCommand bench;
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "Compare methods");
  bench_cmd->add_option("--data", bench.data, "Training dataset")->required();
  bench_cmd->add_option("--test", bench.test, "Test dataset")->required();
  bench_cmd->add_option("--guest-counts", bench.guests, "Guest counts to sweep")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--methods", bench.methods, "Methods to compare")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--report", bench.report, "Report file")->capture_default_str();
  add_partition_flags(bench_cmd, bench.partition);
  add_model_flags(bench_cmd, bench.model);

  for (CLI::App* cmd : app.get_subcommands({})) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*part_cmd) return run_partition(g, part);
    if (*train_cmd) return run_train(g, train);
    if (*predict_cmd) return run_predict(g, predict);
    if (*analyze_cmd) return run_analyze(g, analyze);
    if (*bench_cmd) return run_benchmark(g, bench);
  } catch (const hybridtree::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
