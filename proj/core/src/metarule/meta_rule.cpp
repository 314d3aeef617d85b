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

#include "hybridtree/metarule/meta_rule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

namespace {

using ConditionKey = std::tuple<FeatureId, double, bool>;

ConditionKey key_of(const RuleCondition& c) {
  return {c.split.feature_id, c.split.threshold, c.left};
}

std::vector<ConditionKey> key_of(const SplitRule& r) {
  std::vector<ConditionKey> k;
  for (const auto& c : r.conditions) k.push_back(key_of(c));
  return k;
}

// Root-to-leaf condition lists of one tree.
std::vector<std::vector<RuleCondition>> paths_of(const Tree& tree) {
  std::vector<std::vector<RuleCondition>> out;
  for (const SplitRule& r : extract_rules(tree)) out.push_back(r.conditions);
  return out;
}

bool path_contains(std::span<const RuleCondition> path, const SplitRule& rule,
                   double tolerance) {
  for (const RuleCondition& c : rule.conditions) {
    const bool hit = std::any_of(path.begin(), path.end(), [&](const RuleCondition& p) {
      return p.matches(c, tolerance);
    });
    if (!hit) return false;
  }
  return true;
}

// Rows of `data` covered by `rule`.
std::vector<std::size_t> rows_covered(const Dataset& data, const SplitRule& rule) {
  std::vector<std::size_t> cols;
  for (const RuleCondition& c : rule.conditions) {
    auto col = data.column_of(c.split.feature_id);
    if (!col) {
      throw ValidationError("rule refers to feature " +
                            std::to_string(c.split.feature_id) +
                            " missing from the dataset");
    }
    cols.push_back(*col);
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < data.num_instances(); ++r) {
    bool in = true;
    for (std::size_t i = 0; i < cols.size() && in; ++i) {
      in = rule.conditions[i].holds(data.value(r, cols[i]));
    }
    if (in) rows.push_back(r);
  }
  return rows;
}

}  // namespace

bool RuleCondition::matches(const RuleCondition& other, double tolerance) const {
  return split.feature_id == other.split.feature_id && left == other.left &&
         std::abs(split.threshold - other.split.threshold) <= tolerance;
}

std::string RuleCondition::to_string() const {
  return "x[" + std::to_string(split.feature_id) + "] " + (left ? "< " : ">= ") +
         nlohmann::json(split.threshold).dump();
}

SplitRule SplitRule::canonical() const {
  SplitRule out;
  out.conditions = conditions;
  std::sort(out.conditions.begin(), out.conditions.end(),
            [](const RuleCondition& a, const RuleCondition& b) {
              return key_of(a) < key_of(b);
            });
  out.conditions.erase(std::unique(out.conditions.begin(), out.conditions.end()),
                       out.conditions.end());
  return out;
}

SplitRule SplitRule::simplified() const {
  std::map<std::pair<FeatureId, bool>, double> tightest;
  for (const auto& c : conditions) {
    auto [it, fresh] = tightest.try_emplace({c.split.feature_id, c.left}, c.split.threshold);
    if (!fresh) {
      it->second = c.left ? std::min(it->second, c.split.threshold)
                          : std::max(it->second, c.split.threshold);
    }
  }
  SplitRule out;
  for (const auto& [key, t] : tightest) out.conditions.push_back({{key.first, t}, key.second});
  return out.canonical();
}

std::string SplitRule::to_string() const {
  if (conditions.empty()) return "(always)";
  std::string s;
  for (const auto& c : conditions) {
    if (!s.empty()) s += " and ";
    s += c.to_string();
  }
  return s;
}

nlohmann::json SplitRule::to_json() const {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : conditions) {
    conds.push_back({{"feature", c.split.feature_id},
                     {"threshold", c.split.threshold},
                     {"left", c.left}});
  }
  nlohmann::json j{{"conditions", conds}, {"text", to_string()}};
  if (leaf) j["leaf"] = *leaf;
  if (leaf_value) j["leaf_value"] = *leaf_value;
  return j;
}

SplitRule SplitRule::from_json(const nlohmann::json& j) {
  try {
    SplitRule r;
    for (const auto& c : j.at("conditions")) {
      r.conditions.push_back({{c.at("feature").get<FeatureId>(),
                               c.at("threshold").get<double>()},
                              c.at("left").get<bool>()});
    }
    if (j.contains("leaf")) r.leaf = j.at("leaf").get<NodeId>();
    if (j.contains("leaf_value")) r.leaf_value = j.at("leaf_value").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid split rule: ") + e.what());
  }
}

std::vector<SplitRule> extract_rules(const Tree& tree) {
  std::vector<SplitRule> out;
  std::vector<RuleCondition> path;
  auto walk = [&](auto&& self, NodeId id) -> void {
    const TreeNode& n = tree.node(id);
    if (n.is_leaf) {
      SplitRule r;
      r.conditions = path;
      r.leaf = id;
      r.leaf_value = n.value;
      out.push_back(std::move(r));
      return;
    }
    path.push_back({n.split, true});
    self(self, n.left);
    path.back().left = false;
    self(self, n.right);
    path.pop_back();
  };
  walk(walk, 0);
  return out;
}

std::vector<RuleCondition> candidate_conditions(const BinCuts& cuts) {
  std::vector<RuleCondition> out;
  for (const auto& [f, ts] : cuts.cuts) {
    for (double t : ts) {
      out.push_back({{f, t}, true});
      out.push_back({{f, t}, false});
    }
  }
  return out;
}

std::string to_string(MetaRuleOutcome outcome) {
  switch (outcome) {
    case MetaRuleOutcome::kPass:
      return "pass";
    case MetaRuleOutcome::kFail:
      return "fail";
    case MetaRuleOutcome::kIndeterminate:
      return "indeterminate";
  }
  return "unknown";
}

nlohmann::json MetaRuleTest::to_json() const {
  nlohmann::json devs = nlohmann::json::array();
  for (const auto& d : deviations) {
    devs.push_back({{"condition", d.condition.to_string()},
                    {"support", d.support},
                    {"mean", d.mean},
                    {"deviation", d.deviation}});
  }
  return {{"outcome", hybridtree::to_string(outcome)},
          {"support", support},
          {"mean", mean},
          {"max_deviation", max_deviation},
          {"deviations", devs}};
}

MetaRuleTest test_meta_rule(const Dataset& data, const SplitRule& rule,
                            std::span<const RuleCondition> candidates,
                            double epsilon, std::size_t min_support) {
  if (!(epsilon >= 0)) throw ValidationError("epsilon must be non-negative");
  const auto labels = data.labels();
  const std::vector<std::size_t> rows = rows_covered(data, rule);
  MetaRuleTest out;
  out.support = rows.size();
  double sum = 0;
  for (std::size_t r : rows) sum += labels[r];
  out.mean = rows.empty() ? 0 : sum / static_cast<double>(rows.size());
  if (rows.size() < min_support || rows.empty()) return out;

  std::vector<double> values(rows.size());
  std::optional<FeatureId> loaded;
  for (const RuleCondition& c : candidates) {
    const bool in_rule = std::any_of(
        rule.conditions.begin(), rule.conditions.end(),
        [&](const RuleCondition& s) { return s.split == c.split; });
    if (in_rule) continue;
    if (loaded != c.split.feature_id) {
      auto col = data.column_of(c.split.feature_id);
      if (!col) {
        throw ValidationError("candidate refers to feature " +
                              std::to_string(c.split.feature_id) +
                              " missing from the dataset");
      }
      for (std::size_t i = 0; i < rows.size(); ++i) values[i] = data.value(rows[i], *col);
      loaded = c.split.feature_id;
    }
    std::size_t n = 0;
    double s = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (c.holds(values[i])) {
        ++n;
        s += labels[rows[i]];
      }
    }
    if (n < min_support || n == 0) continue;
    ConditionDeviation d;
    d.condition = c;
    d.support = n;
    d.mean = s / static_cast<double>(n);
    d.deviation = std::abs(out.mean - d.mean);
    out.max_deviation = std::max(out.max_deviation, d.deviation);
    out.deviations.push_back(d);
  }
  out.outcome = out.max_deviation <= epsilon ? MetaRuleOutcome::kPass
                                             : MetaRuleOutcome::kFail;
  return out;
}

bool tree_contains(const Tree& tree, const SplitRule& rule, double tolerance) {
  for (const auto& path : paths_of(tree)) {
    if (path_contains(path, rule, tolerance)) return true;
  }
  return false;
}

nlohmann::json MetaRuleReport::to_json() const {
  nlohmann::json j = rule.to_json();
  j["prevalence"] = prevalence;
  j["trees_present"] = static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
  if (test) j["test"] = test->to_json();
  return j;
}

MetaRuleReport meta_rule_prevalence(const Ensemble& ensemble, const SplitRule& rule,
                                    double threshold_tolerance) {
  MetaRuleReport out;
  out.rule = rule;
  std::size_t hits = 0;
  for (const Tree& t : ensemble.trees) {
    const bool in = tree_contains(t, rule, threshold_tolerance);
    out.present.push_back(in);
    hits += in;
  }
  out.prevalence = ensemble.trees.empty()
                       ? 0
                       : static_cast<double>(hits) /
                             static_cast<double>(ensemble.trees.size());
  return out;
}

nlohmann::json AnalysisReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rules) rs.push_back(r.to_json());
  return {{"trees_analyzed", trees_analyzed},
          {"candidates", candidates},
          {"passing", passing},
          {"rules", rs}};
}

AnalysisReport analyze_ensemble(const Ensemble& ensemble, const Dataset& data,
                                const AnalyzeOptions& options) {
  if (options.max_rule_length < 1) {
    throw ConfigError("max_rule_length must be at least 1");
  }
  std::vector<std::vector<std::vector<RuleCondition>>> paths;
  std::map<std::vector<ConditionKey>, SplitRule> unique;
  for (const Tree& t : ensemble.trees) {
    paths.push_back(paths_of(t));
    for (const auto& path : paths.back()) {
      const std::size_t longest = std::min(options.max_rule_length, path.size());
      for (std::size_t len = 1; len <= longest; ++len) {
        SplitRule r;
        r.conditions.assign(path.end() - static_cast<std::ptrdiff_t>(len), path.end());
        r = r.simplified();
        if (!options.guest_features.empty() &&
            std::none_of(r.conditions.begin(), r.conditions.end(), [&](const auto& c) {
              return options.guest_features.count(c.split.feature_id) > 0;
            })) {
          continue;
        }
        unique.emplace(key_of(r), std::move(r));
      }
    }
  }

  AnalysisReport out;
  out.trees_analyzed = ensemble.trees.size();
  out.candidates = unique.size();
  for (auto& [key, rule] : unique) {
    MetaRuleReport rep;
    rep.rule = rule;
    std::size_t hits = 0;
    for (const auto& tree_paths : paths) {
      const bool in = std::any_of(tree_paths.begin(), tree_paths.end(), [&](const auto& p) {
        return path_contains(p, rule, options.threshold_tolerance);
      });
      rep.present.push_back(in);
      hits += in;
    }
    rep.prevalence = static_cast<double>(hits) / static_cast<double>(paths.size());
    if (rep.prevalence >= options.min_prevalence) out.rules.push_back(std::move(rep));
  }
  std::stable_sort(out.rules.begin(), out.rules.end(),
                   [](const MetaRuleReport& a, const MetaRuleReport& b) {
                     if (a.prevalence != b.prevalence) return a.prevalence > b.prevalence;
                     return a.rule.size() < b.rule.size();
                   });
  if (!out.rules.empty()) {
    const auto candidates =
        candidate_conditions(compute_split_candidates(data, {}, options.max_bins));
    for (auto& rep : out.rules) {
      rep.test = test_meta_rule(data, rep.rule, candidates, options.epsilon,
                                options.min_support);
      out.passing += rep.test->passed();
    }
  }
  if (options.top > 0 && out.rules.size() > options.top) out.rules.resize(options.top);
  return out;
}

}  // namespace hybridtree
