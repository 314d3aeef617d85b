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

#ifndef HYBRIDTREE_METARULE_META_RULE_HPP_
#define HYBRIDTREE_METARULE_META_RULE_HPP_

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/data/dataset.hpp"
#include "hybridtree/gbdt/ensemble.hpp"
#include "hybridtree/gbdt/tree.hpp"

namespace hybridtree {

// A split condition with the branch taken: `left` true means the instance
// satisfies value < threshold (or is missing).
struct RuleCondition {
  SplitCondition split;
  bool left = true;

  bool holds(double value) const { return split.goes_left(value) == left; }
  // Same feature, same side, thresholds within `tolerance`.
  bool matches(const RuleCondition& other, double tolerance = 0) const;
  std::string to_string() const;
  bool operator==(const RuleCondition&) const = default;
};

// Conjunction of directed conditions, e.g. a root-to-leaf path.
struct SplitRule {
  std::vector<RuleCondition> conditions;
  // Leaf reached by the path, when extracted from a tree.
  std::optional<NodeId> leaf;
  std::optional<double> leaf_value;

  // A path of a single-leaf tree has no conditions.
  bool degenerate() const { return conditions.empty(); }
  std::size_t size() const { return conditions.size(); }

  template <typename Lookup>
  bool covers(const Lookup& x) const {
    for (const RuleCondition& c : conditions) {
      if (!c.holds(x(c.split.feature_id))) return false;
    }
    return true;
  }

  // Conditions sorted by (feature, threshold, side) without duplicates and
  // without leaf information; equal for rules naming the same conjunction.
  SplitRule canonical() const;
  // Canonical form keeping only the tightest threshold per feature and side.
  SplitRule simplified() const;
  std::string to_string() const;
  nlohmann::json to_json() const;
  static SplitRule from_json(const nlohmann::json& j);
  bool operator==(const SplitRule&) const = default;
};

// One rule per leaf, in leaf-id order, with conditions from the root down.
std::vector<SplitRule> extract_rules(const Tree& tree);

// Both sides of every split candidate, by feature then threshold.
std::vector<RuleCondition> candidate_conditions(const BinCuts& cuts);

enum class MetaRuleOutcome { kPass, kFail, kIndeterminate };
std::string to_string(MetaRuleOutcome outcome);

struct ConditionDeviation {
  RuleCondition condition;
  std::size_t support = 0;
  double mean = 0;
  // |mean(y | S) - mean(y | S and condition)|.
  double deviation = 0;
};

struct MetaRuleTest {
  MetaRuleOutcome outcome = MetaRuleOutcome::kIndeterminate;
  std::size_t support = 0;
  double mean = 0;
  // Every candidate with enough support inside the rule, in candidate order.
  std::vector<ConditionDeviation> deviations;
  double max_deviation = 0;

  bool passed() const { return outcome == MetaRuleOutcome::kPass; }
  nlohmann::json to_json() const;
};

inline constexpr double kDefaultMetaRuleEpsilon = 0.01;
inline constexpr std::size_t kDefaultMinSupport = 30;

// Conditional-mean form of the meta-rule property: passes when, for every
// candidate on a split not used by the rule whose intersection with the rule
// holds at least `min_support` labeled instances, the label mean moves by at
// most `epsilon`. Indeterminate when the rule itself has fewer than
// `min_support` instances.
MetaRuleTest test_meta_rule(const Dataset& data, const SplitRule& rule,
                            std::span<const RuleCondition> candidates,
                            double epsilon = kDefaultMetaRuleEpsilon,
                            std::size_t min_support = kDefaultMinSupport);

// True when some root-to-leaf path of `tree` includes every condition of
// `rule`, in any order, with thresholds matched within `tolerance`.
bool tree_contains(const Tree& tree, const SplitRule& rule, double tolerance = 0);

struct MetaRuleReport {
  SplitRule rule;
  // Fraction of trees containing the rule; 0 for an empty ensemble.
  double prevalence = 0;
  std::vector<bool> present;
  std::optional<MetaRuleTest> test;

  nlohmann::json to_json() const;
};

MetaRuleReport meta_rule_prevalence(const Ensemble& ensemble,
                                    const SplitRule& rule,
                                    double threshold_tolerance = 0);

struct AnalyzeOptions {
  // Candidate rules are the last 1..max_rule_length conditions of every
  // root-to-leaf path, simplified.
  std::size_t max_rule_length = 3;
  double threshold_tolerance = 0;
  double epsilon = 0.05;
  std::size_t min_support = kDefaultMinSupport;
  std::size_t max_bins = 32;
  // Only rules at least this prevalent are tested and reported.
  double min_prevalence = 0.5;
  // Reports kept after sorting; 0 keeps all.
  std::size_t top = 0;
  // When non-empty, only rules with a condition on one of these features.
  std::set<FeatureId> guest_features;
};

struct AnalysisReport {
  std::size_t trees_analyzed = 0;
  std::size_t candidates = 0;
  // Tested rules that passed, counted before `top` truncation.
  std::size_t passing = 0;
  // By prevalence descending, then shorter rules, then canonical order.
  std::vector<MetaRuleReport> rules;

  nlohmann::json to_json() const;
};

// Mines candidate rules (simplified path suffixes) from `ensemble`, measures
// their prevalence and tests those reaching `min_prevalence` on `data`
// against the candidate cut set of `data`.
AnalysisReport analyze_ensemble(const Ensemble& ensemble, const Dataset& data,
                                const AnalyzeOptions& options = {});

}  // namespace hybridtree

#endif  // HYBRIDTREE_METARULE_META_RULE_HPP_
