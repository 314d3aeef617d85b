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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "hybridtree/common/error.hpp"
#include "hybridtree/data/io.hpp"
#include "hybridtree/experiment/runner.hpp"
#include "hybridtree/gbdt/loss.hpp"
#include "hybridtree/gbdt/metrics.hpp"
#include "hybridtree/metarule/meta_rule.hpp"
#include "hybridtree/metarule/transform.hpp"

namespace hybridtree::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Dataset load(const fs::path& path, std::size_t min_features = 0,
             bool allow_empty = false) {
  return normalize_binary_labels(load_dataset(path, min_features, allow_empty));
}

fs::path output_path(const GlobalOptions& g, const fs::path& p) {
  fs::create_directories(g.output_dir);
  return p.is_absolute() ? p : g.output_dir / p;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void append_metrics(const GlobalOptions& g, json record) {
  record["seed"] = g.seed;
  std::ofstream out(output_path(g, "metrics.jsonl"), std::ios::app);
  out << record.dump() << '\n';
}

Execution execution_of(const GlobalOptions& g) {
  return g.threads > 1 ? Execution::kThreaded : Execution::kSequential;
}

std::string metric_name(const GlobalOptions& g, LossKind loss) {
  if (!g.metric.empty()) return g.metric;
  return loss == LossKind::kLogistic ? "accuracy" : "mse";
}

GuestFeatureMode parse_feature_mode(const std::string& name) {
  if (name == "shared") return GuestFeatureMode::kShared;
  if (name == "split") return GuestFeatureMode::kSplit;
  throw ConfigError("unknown guest feature mode '" + name + "'");
}

PartitionSpec partition_spec(const PartitionFlags& f, std::uint64_t seed) {
  if (f.guests == 0) throw ConfigError("--guests must be at least 1");
  if (!(f.beta > 0)) throw ConfigError("--beta must be positive");
  return {.scheme = parse_partition_scheme(f.scheme),
          .guests = f.guests,
          .seed = seed,
          .guest_features = parse_feature_mode(f.guest_features),
          .beta = f.beta};
}

RunSpec run_spec(const GlobalOptions& g, const ModelFlags& f) {
  RunSpec spec;
  spec.method = parse_method(f.method);
  spec.seed = g.seed;
  spec.hosts = f.hosts;
  spec.execution = execution_of(g);
  TrainParams& t = spec.params.train;
  t.n_trees = f.trees;
  t.max_depth = f.depth;
  t.lambda = f.lambda;
  t.learning_rate = f.eta;
  t.max_bins = f.max_bins;
  t.loss = parse_loss(f.loss);
  t.validate();

  const bool federated =
      spec.method == Method::kHybridTree || spec.method == Method::kMultiHost;
  if (federated) {
    std::size_t e_guest = 2;
    std::size_t e_host = 0;
    if (f.e_host && f.e_guest) {
      e_host = *f.e_host;
      e_guest = *f.e_guest;
    } else if (f.e_host) {
      e_host = *f.e_host;
      e_guest = f.depth > e_host ? f.depth - e_host : 0;
    } else {
      if (f.e_guest) e_guest = *f.e_guest;
      e_host = f.depth > e_guest ? f.depth - e_guest : 0;
    }
    spec.params.host_depth = e_host;
    spec.params.guest_depth = e_guest;
    spec.params.mode = parse_guest_split_mode(f.mode);
    spec.params.validate();
    spec.cipher = parse_cipher(g.cipher);
  }
  return spec;
}

// Feature columns a held-out file must provide for `manifest`.
std::size_t feature_width(const PartitionManifest& manifest) {
  std::size_t width = 0;
  auto widen = [&](const PartySlice& s) {
    for (FeatureId f : s.feature_ids) width = std::max<std::size_t>(width, f + 1);
  };
  widen(manifest.host);
  for (const PartySlice& s : manifest.guests) widen(s);
  return width;
}

void write_predictions(const fs::path& path, const Dataset& data,
                       const std::vector<double>& outputs) {
  std::ofstream out(path);
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "id,prediction\n";
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    out << data.instance_ids()[r] << ',' << outputs[r] << '\n';
  }
  if (!out) throw Error("cannot write " + path.string());
}

std::optional<double> score(const std::string& metric, const Dataset& data,
                            const std::vector<double>& outputs) {
  if (!data.has_labels() || data.empty()) return std::nullopt;
  return evaluate_metric(metric, data.labels(), outputs);
}

LossKind loss_of(const TrainedModel& m) {
  return m.ensemble ? m.ensemble->loss : m.federated.front().loss;
}

}  // namespace

int run_partition(const GlobalOptions& g, const PartitionCommand& c) {
  const PartitionSpec spec = partition_spec(c.partition, g.seed);
  const Dataset data = load(c.data);
  const HybridPartition p = make_partition(data, spec);
  write_csv(p.host, output_path(g, "host.csv"));
  for (std::size_t k = 0; k < p.guests.size(); ++k) {
    write_csv(p.guests[k], output_path(g, "guest_" + std::to_string(k) + ".csv"));
  }
  write_text(output_path(g, "manifest.json"), p.manifest.dump());
  json record{{"command", "partition"},
              {"scheme", to_string(spec.scheme)},
              {"guests", p.guests.size()},
              {"host_features", p.host.num_features()},
              {"instances", data.num_instances()}};
  append_metrics(g, record);
  std::cout << record.dump() << '\n';
  return 0;
}

int run_train(const GlobalOptions& g, const TrainCommand& c) {
  const RunSpec spec = run_spec(g, c.model);
  const PartitionSpec pspec = partition_spec(c.partition, g.seed);
  const Dataset data = load(c.data);
  const HybridPartition partition =
      c.manifest ? materialize(PartitionManifest::from_json(read_json(*c.manifest)),
                               data)
                 : make_partition(data, pspec);

  RunStats stats;
  const TrainedModel model = train_method(partition, spec, &stats);
  write_text(output_path(g, c.model_out), model.to_json().dump() + "\n");

  json record{{"command", "train"},
              {"method", to_string(spec.method)},
              {"trees", spec.params.train.n_trees},
              {"depth", spec.params.train.max_depth},
              {"cipher", g.cipher},
              {"guests", partition.guests.size()},
              {"stats", stats.to_json()}};
  if (c.test) {
    const Dataset test = load(*c.test, feature_width(model.manifest), true);
    const std::vector<double> outputs =
        predict_method(model, test, g.seed + 3, spec.execution);
    write_predictions(output_path(g, "predictions.csv"), test, outputs);
    const std::string metric = metric_name(g, spec.params.train.loss);
    if (auto v = score(metric, test, outputs)) record[metric] = *v;
  }
  for (const std::string& w : stats.warnings) std::cerr << "warning: " << w << '\n';
  append_metrics(g, record);
  std::cout << record.dump() << '\n';
  return 0;
}

int run_predict(const GlobalOptions& g, const PredictCommand& c) {
  const TrainedModel model = TrainedModel::from_json(read_json(c.model));
  const Dataset data = load(c.data, feature_width(model.manifest), true);
  const std::vector<double> outputs =
      predict_method(model, data, g.seed + 3, execution_of(g));
  write_predictions(output_path(g, c.output), data, outputs);
  json record{{"command", "predict"},
              {"method", to_string(model.method)},
              {"instances", data.num_instances()}};
  const std::string metric = metric_name(g, loss_of(model));
  if (auto v = score(metric, data, outputs)) record[metric] = *v;
  append_metrics(g, record);
  std::cout << record.dump() << '\n';
  return 0;
}

int run_analyze(const GlobalOptions& g, const AnalyzeCommand& c) {
  const TrainedModel model = TrainedModel::from_json(read_json(c.model));
  Ensemble ensemble;
  if (model.ensemble) {
    ensemble = *model.ensemble;
  } else if (model.method == Method::kHybridTree) {
    ensemble = model.federated.front().stitched();
  } else {
    throw ConfigError("analyze needs a single ensemble, not a bagged model");
  }
  const Dataset data = load(c.data, feature_width(model.manifest));
  if (!data.has_labels()) throw ValidationError("analyze needs labeled data");

  std::set<FeatureId> guest_features;
  for (const PartySlice& s : model.manifest.guests) {
    for (FeatureId f : s.feature_ids) {
      if (std::find(model.manifest.host.feature_ids.begin(),
                    model.manifest.host.feature_ids.end(),
                    f) == model.manifest.host.feature_ids.end()) {
        guest_features.insert(f);
      }
    }
  }

  AnalyzeOptions opts;
  opts.max_rule_length = c.max_rule_length;
  opts.threshold_tolerance = c.tolerance;
  opts.epsilon = c.epsilon;
  opts.min_support = c.min_support;
  opts.min_prevalence = c.min_prevalence;
  opts.top = c.top;
  if (c.guest_only) opts.guest_features = guest_features;
  const AnalysisReport report = analyze_ensemble(ensemble, data, opts);
  json out = report.to_json();

  if (c.transform) {
    json transforms = json::array();
    std::vector<double> y_p(data.num_instances(), ensemble.base_score);
    for (std::size_t t = 0; t < ensemble.trees.size(); ++t) {
      const Tree& tree = ensemble.trees[t];
      const std::vector<double> grads =
          compute_gradients(data.labels(), y_p, ensemble.loss);
      for (std::size_t r = 0; r < report.rules.size(); ++r) {
        const MetaRuleReport& rule = report.rules[r];
        if (!rule.present[t]) continue;
        const LeafRecompute recompute{&data, grads, c.lambda};
        Tree transformed;
        try {
          transformed = transform_tree(tree, rule.rule, guest_features, &recompute);
        } catch (const ValidationError&) {
          continue;  // no guest condition, or not in a movable position
        }
        const TransformationReport gaps =
            verify_transformation(tree, transformed, data, grads);
        transforms.push_back({{"tree", t},
                              {"rule", r},
                              {"meta_rule", rule.test && rule.test->passed()},
                              {"transformed", transformed.to_json()},
                              {"report", gaps.to_json()}});
      }
      const Ensemble single{ensemble.loss, ensemble.learning_rate, 0, {tree}};
      const std::vector<double> step = single.predict_raw(data);
      for (std::size_t i = 0; i < y_p.size(); ++i) y_p[i] += step[i];
    }
    out["transforms"] = std::move(transforms);
  }
  write_text(output_path(g, c.report), out.dump(2) + "\n");

  json record{{"command", "analyze"},
              {"trees", report.trees_analyzed},
              {"candidates", report.candidates},
              {"passing", report.passing},
              {"rules", report.rules.size()}};
  append_metrics(g, record);
  for (const MetaRuleReport& r : report.rules) {
    std::cout << r.rule.to_string() << "  prevalence=" << r.prevalence
              << "  " << (r.test ? to_string(r.test->outcome) : "untested") << '\n';
  }
  return 0;
}

int run_benchmark(const GlobalOptions& g, const BenchmarkCommand& c) {
  const Dataset data = load(c.data);
  const Dataset test = load(c.test, data.num_features());
  json rows = json::array();
  std::printf("%-12s %7s %10s %10s %14s\n", "method", "guests", "metric",
              "seconds", "comm_bytes");
  for (std::size_t k : c.guests) {
    PartitionFlags pf = c.partition;
    pf.guests = k;
    const HybridPartition partition = make_partition(data, partition_spec(pf, g.seed));
    for (const std::string& method : c.methods) {
      ModelFlags mf = c.model;
      mf.method = method;
      const RunSpec spec = run_spec(g, mf);
      RunStats stats;
      const TrainedModel model = train_method(partition, spec, &stats);
      const std::vector<double> outputs =
          predict_method(model, test, g.seed + 3, spec.execution);
      const std::string metric = metric_name(g, spec.params.train.loss);
      const double value = evaluate_metric(metric, test.labels(), outputs);
      json row{{"method", method},
               {"guests", k},
               {"metric", metric},
               {"value", value},
               {"train_seconds", stats.train_seconds}};
      const bool comm = spec.method == Method::kHybridTree;
      row["comm_bytes"] = comm ? json(stats.comm.bytes) : json(nullptr);
      std::printf("%-12s %7zu %10.4f %10.2f %14s\n", method.c_str(), k, value,
                  stats.train_seconds,
                  comm ? std::to_string(stats.comm.bytes).c_str() : "-");
      append_metrics(g, json{{"command", "benchmark"}, {"row", row}});
      rows.push_back(std::move(row));
    }
  }
  write_text(output_path(g, c.report), json{{"rows", rows}}.dump(2) + "\n");
  return 0;
}

}  // namespace hybridtree::cli
