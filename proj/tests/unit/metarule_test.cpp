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

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hybridtree/common/error.hpp"
#include "hybridtree/common/types.hpp"
#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/gbdt/ensemble.hpp"
#include "hybridtree/gbdt/loss.hpp"
#include "hybridtree/metarule/meta_rule.hpp"
#include "hybridtree/metarule/transform.hpp"

namespace hybridtree {
namespace {

constexpr FeatureId kHost = 0;
constexpr FeatureId kGuest = 1;
constexpr FeatureId kHost2 = 2;
const std::set<FeatureId> kGuestSet{kGuest};

TreeNode split(FeatureId f, double t, NodeId l, NodeId r) {
  TreeNode n;
  n.is_leaf = false;
  n.split = {f, t};
  n.left = l;
  n.right = r;
  return n;
}

TreeNode leaf(double v) {
  TreeNode n;
  n.value = v;
  return n;
}

RuleCondition cond(FeatureId f, double t, bool left) { return {{f, t}, left}; }

// 10,000 grid instances: x0 = a/10, x2 = b/10, x1 = c/100 for
// i = a + 10 b + 100 c. Every (x0, x2) pair occurs once per value of x1.
// Inside x1 < 0.3 the label depends on c alone (exact meta-rule for
// "x1 < 0.3") unless `violate`, where it follows x0 instead.
Dataset grid(bool violate) {
  const std::size_t n = 10000;
  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i % 10, b = (i / 10) % 10, c = i / 100;
    cols[kHost][i] = a / 10.0;
    cols[kGuest][i] = c / 100.0;
    cols[kHost2][i] = b / 10.0;
    if (c < 30) {
      y[i] = violate ? (a < 5 ? 1.0 : 0.0) : (c % 4 == 0 ? 1.0 : 0.0);
    } else {
      y[i] = (a < 5) != (b >= 7) ? 1.0 : 0.0;
    }
  }
  std::vector<InstanceId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Dataset(ids, {0, 1, 2}, cols, y);
}

std::vector<double> gradients_at_zero(const Dataset& d) {
  return compute_gradients(d.labels(), std::vector<double>(d.num_instances(), 0.0),
                           LossKind::kLogistic);
}

// Leaves set to -sum g / (n + lambda) over the rows reaching them.
Tree fit_leaves(const Tree& shape, const Dataset& d, std::span<const double> g,
                double lambda) {
  const ColumnLookup lookup(d, shape.features_used());
  std::map<NodeId, std::pair<double, std::size_t>> acc;
  for (std::size_t r = 0; r < d.num_instances(); ++r) {
    auto& [s, c] = acc[shape.route(lookup.row(r))];
    s += g[r];
    ++c;
  }
  std::map<NodeId, double> values;
  for (const auto& [id, sc] : acc) {
    values[id] = -sc.first / (static_cast<double>(sc.second) + lambda);
  }
  return shape.with_leaf_values(values);
}

// Tree A: F_g at the root with a leaf on its true side and a host
// split below its false side.
Tree tree_a() {
  return Tree({split(kGuest, 0.295, 1, 2), leaf(1), split(kHost, 0.45, 3, 4),
               leaf(2), leaf(3)});
}

const SplitRule kFg{{cond(kGuest, 0.295, true)}, std::nullopt, std::nullopt};

Dataset random_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& c : cols) c[r] = std::round(u(rng) * 8) / 8;
    y[r] = cols[0][r] + 0.5 * cols[3][r] + 0.4 * u(rng) > 0 ? 1.0 : 0.0;
  }
  std::vector<InstanceId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Dataset(ids, {0, 1, 2, 3}, cols, y);
}

// ------------------------------------------------------------ extract_rules

TEST(ExtractRules, SingleLeafIsDegenerate) {
  const auto rules = extract_rules(Tree::leaf(0.7));
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_TRUE(rules[0].degenerate());
  EXPECT_EQ(rules[0].leaf_value, 0.7);
}

TEST(ExtractRules, CompleteDepthTwo) {
  const Tree t({split(0, 1, 1, 4), split(1, 2, 2, 3), leaf(1), leaf(2),
                split(2, 3, 5, 6), leaf(3), leaf(4)});
  const auto rules = extract_rules(t);
  ASSERT_EQ(rules.size(), 4u);
  for (const auto& r : rules) EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(rules[0].conditions[0], cond(0, 1, true));
  EXPECT_EQ(rules[3].conditions[1], cond(2, 3, false));
}

TEST(ExtractRules, PrunedDepthThreeHasFiveRules) {
  const Tree t({split(0, 1, 1, 6), split(1, 1, 2, 5), split(2, 1, 3, 4), leaf(1),
                leaf(2), leaf(3), split(3, 1, 7, 8), leaf(4), leaf(5)});
  EXPECT_EQ(t.depth(), 4u);
  EXPECT_EQ(extract_rules(t).size(), 5u);
}

// Every rule covers exactly the rows that reach its leaf.
TEST(ExtractRules, RulesCoverTheirLeafRows) {
  const Dataset d = random_data(300, 1);
  TrainParams p;
  p.n_trees = 5;
  p.max_depth = 4;
  for (const Tree& t : train_ensemble(d, p).trees) {
    const auto rules = extract_rules(t);
    EXPECT_EQ(rules.size(), t.num_leaves());
    for (std::size_t r = 0; r < d.num_instances(); ++r) {
      const RowView x(d, r);
      const NodeId reached = t.route(x);
      for (const auto& rule : rules) EXPECT_EQ(rule.covers(x), rule.leaf == reached);
    }
  }
}

TEST(SplitRule, CanonicalAndJson) {
  SplitRule r{{cond(2, 0.5, false), cond(1, 0.5, true), cond(2, 0.5, false)}, 3, 0.25};
  const SplitRule c = r.canonical();
  EXPECT_EQ(c.conditions, (std::vector<RuleCondition>{cond(1, 0.5, true), cond(2, 0.5, false)}));
  EXPECT_FALSE(c.leaf);
  EXPECT_EQ(SplitRule::from_json(r.to_json()), r);
  EXPECT_EQ(cond(1, 0.5, true).to_string(), "x[1] < 0.5");
  const SplitRule nested{{cond(0, 2, true), cond(0, 1, true), cond(0, -1, false),
                          cond(0, -3, false)},
                         std::nullopt, std::nullopt};
  EXPECT_EQ(nested.simplified().conditions,
            (std::vector<RuleCondition>{cond(0, -1, false), cond(0, 1, true)}));
}

// ----------------------------------------------------------- test_meta_rule

// Brute-force conditional label mean of rows satisfying every condition.
double brute_mean(const Dataset& d, const std::vector<RuleCondition>& cs,
                  std::size_t* support) {
  double s = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < d.num_instances(); ++r) {
    bool in = true;
    for (const auto& c : cs) in = in && c.holds(d.value(r, *d.column_of(c.split.feature_id)));
    if (in) {
      s += d.labels()[r];
      ++n;
    }
  }
  *support = n;
  return n ? s / n : 0;
}

Dataset threshold_data() {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t n = 2000;
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    cols[0][r] = u(rng);
    cols[1][r] = u(rng);
    y[r] = cols[0][r] < 0.5 ? 1.0 : 0.0;
  }
  std::vector<InstanceId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Dataset(ids, {0, 1}, cols, y);
}

TEST(MetaRuleTest, LabelDeterminedByRuleIsMetaRule) {
  const Dataset d = threshold_data();
  const SplitRule rule{{cond(0, 0.5, true)}, std::nullopt, std::nullopt};
  const std::vector<FeatureId> f1{1};
  const auto cands = candidate_conditions(compute_split_candidates(d, f1, 16));
  const auto t = test_meta_rule(d, rule, cands, 0.0, 30);
  EXPECT_EQ(t.outcome, MetaRuleOutcome::kPass);
  EXPECT_EQ(t.max_deviation, 0.0);
  EXPECT_EQ(t.deviations.size(), cands.size());
  for (const auto& dev : t.deviations) EXPECT_EQ(dev.deviation, 0.0);
}

TEST(MetaRuleTest, CorrelatedSliceFailsAndMatchesBruteForce) {
  const Dataset d = threshold_data();
  const SplitRule rule{{cond(1, 0.5, true)}, std::nullopt, std::nullopt};
  const auto cands = candidate_conditions(compute_split_candidates(d, {}, 8));
  const auto t = test_meta_rule(d, rule, cands, 0.05, 30);
  EXPECT_EQ(t.outcome, MetaRuleOutcome::kFail);
  std::size_t support = 0;
  const double mean = brute_mean(d, rule.conditions, &support);
  EXPECT_EQ(t.support, support);
  EXPECT_DOUBLE_EQ(t.mean, mean);
  for (const auto& dev : t.deviations) {
    std::size_t s = 0;
    const double m = brute_mean(d, {rule.conditions[0], dev.condition}, &s);
    EXPECT_EQ(dev.support, s);
    EXPECT_NEAR(dev.deviation, std::abs(m - mean), 1e-12);
    EXPECT_NE(dev.condition.split, rule.conditions[0].split);
  }
  // A vacuous bound passes whenever the support is sufficient.
  EXPECT_TRUE(test_meta_rule(d, rule, cands, 1.0, 30).passed());
}

TEST(MetaRuleTest, SmallSupportIsIndeterminate) {
  const Dataset d = threshold_data();
  const SplitRule rule{{cond(0, 0.001, true)}, std::nullopt, std::nullopt};
  const auto t = test_meta_rule(d, rule, {}, 0.01, 30);
  EXPECT_EQ(t.outcome, MetaRuleOutcome::kIndeterminate);
  EXPECT_LT(t.support, 30u);
  EXPECT_THROW(test_meta_rule(d, rule, {}, -1, 30), ValidationError);
  const SplitRule foreign{{cond(9, 0.5, true)}, std::nullopt, std::nullopt};
  EXPECT_THROW(test_meta_rule(d, foreign, {}, 0.01, 30), ValidationError);
}

// --------------------------------------------------------------- prevalence

TEST(Prevalence, CountsContainingTrees) {
  Ensemble one;
  one.trees.push_back(tree_a());
  EXPECT_EQ(meta_rule_prevalence(one, kFg).prevalence, 1.0);

  Ensemble fifty;
  for (int i = 0; i < 50; ++i) {
    fifty.trees.push_back(i < 45 ? tree_a()
                                 : Tree({split(kHost, 0.45, 1, 2), leaf(0), leaf(1)}));
  }
  const auto rep = meta_rule_prevalence(fifty, kFg);
  EXPECT_DOUBLE_EQ(rep.prevalence, 0.9);
  EXPECT_EQ(std::count(rep.present.begin(), rep.present.end(), true), 45);

  const SplitRule absent{{cond(7, 0.5, true)}, std::nullopt, std::nullopt};
  EXPECT_EQ(meta_rule_prevalence(fifty, absent).prevalence, 0.0);
  EXPECT_EQ(meta_rule_prevalence(Ensemble{}, kFg).prevalence, 0.0);
}

TEST(Prevalence, OrderFreeAndToleranceMonotone) {
  // x1 >= 0.295 and x0 < 0.45, listed in the opposite order of the path.
  const SplitRule rule{{cond(kHost, 0.45, true), cond(kGuest, 0.295, false)},
                       std::nullopt, std::nullopt};
  Ensemble e;
  e.trees.push_back(tree_a());
  EXPECT_EQ(meta_rule_prevalence(e, rule).prevalence, 1.0);
  const SplitRule shifted{{cond(kGuest, 0.3, true)}, std::nullopt, std::nullopt};
  EXPECT_EQ(meta_rule_prevalence(e, shifted, 0.001).prevalence, 0.0);
  EXPECT_EQ(meta_rule_prevalence(e, shifted, 0.01).prevalence, 1.0);

  const Dataset d = random_data(400, 2);
  TrainParams p;
  p.n_trees = 20;
  p.max_depth = 4;
  const Ensemble trained = train_ensemble(d, p);
  for (const Tree& t : trained.trees) {
    for (const auto& r : extract_rules(t)) {
      SplitRule moved = r;
      for (auto& c : moved.conditions) c.split.threshold += 0.01;
      double last = 2;
      for (double tol : {1.0, 0.1, 0.02, 0.011, 0.005, 0.0}) {
        const double pv = meta_rule_prevalence(trained, moved, tol).prevalence;
        EXPECT_LE(pv, last);
        last = pv;
      }
    }
  }
}

TEST(Analyze, SortedAndSingleTreeBinary) {
  const Dataset d = random_data(500, 4);
  TrainParams p;
  p.n_trees = 15;
  p.max_depth = 4;
  const Ensemble e = train_ensemble(d, p);
  AnalyzeOptions o;
  o.min_prevalence = 0;
  const auto rep = analyze_ensemble(e, d, o);
  EXPECT_EQ(rep.trees_analyzed, 15u);
  ASSERT_EQ(rep.rules.size(), rep.candidates);
  for (std::size_t i = 1; i < rep.rules.size(); ++i) {
    EXPECT_GE(rep.rules[i - 1].prevalence, rep.rules[i].prevalence);
  }
  for (const auto& r : rep.rules) {
    ASSERT_TRUE(r.test);
    EXPECT_LE(r.rule.size(), 3u);
    EXPECT_DOUBLE_EQ(r.prevalence, meta_rule_prevalence(e, r.rule).prevalence);
  }
  Ensemble single;
  single.trees.push_back(e.trees[0]);
  for (const auto& r : analyze_ensemble(single, d, o).rules) {
    EXPECT_TRUE(r.prevalence == 0.0 || r.prevalence == 1.0);
  }
  o.min_prevalence = 0.5;
  const auto floor = analyze_ensemble(e, d, o);
  for (const auto& r : floor.rules) EXPECT_GE(r.prevalence, 0.5);
  o.top = 2;
  EXPECT_LE(analyze_ensemble(e, d, o).rules.size(), 2u);
  o.top = 0;
  o.min_prevalence = 0;
  o.guest_features = {3};
  for (const auto& r : analyze_ensemble(e, d, o).rules) {
    bool has = false;
    for (const auto& c : r.rule.conditions) has = has || c.split.feature_id == 3;
    EXPECT_TRUE(has);
  }
}

// ---------------------------------------------------------------- transform

TEST(Transform, GuestSplitMovesBelowHostSplit) {
  const Tree b = transform_tree(tree_a(), kFg, kGuestSet);
  // Root F_h; F_g re-tested at the bottom of both branches.
  const Tree expected({split(kHost, 0.45, 1, 4), split(kGuest, 0.295, 2, 3), leaf(1),
                       leaf(2), split(kGuest, 0.295, 5, 6), leaf(1), leaf(3)});
  EXPECT_EQ(b, expected);
  EXPECT_LE(b.depth(), tree_a().depth() + 1);
}

TEST(Transform, NothingToReorderIsIdentity) {
  const Tree t({split(kHost, 0.45, 1, 4), split(kGuest, 0.295, 2, 3), leaf(1), leaf(2),
                leaf(3)});
  EXPECT_EQ(transform_tree(t, kFg, kGuestSet), t);
}

TEST(Transform, Errors) {
  const Tree host_only({split(kHost, 0.45, 1, 2), leaf(0), leaf(1)});
  EXPECT_THROW(transform_tree(host_only, kFg, kGuestSet), ValidationError);
  const SplitRule no_guest{{cond(kHost, 0.45, true)}, std::nullopt, std::nullopt};
  EXPECT_THROW(transform_tree(tree_a(), no_guest, kGuestSet), ValidationError);
  // The rule's host condition is not on the path to F_g.
  const SplitRule elsewhere{{cond(kHost2, 0.45, true), cond(kGuest, 0.295, true)},
                            std::nullopt, std::nullopt};
  EXPECT_THROW(transform_tree(tree_a(), elsewhere, kGuestSet), ValidationError);
}

TEST(Transform, ExactMetaRuleKeepsExpectations) {
  const Dataset d = grid(false);
  const auto g = gradients_at_zero(d);
  const Tree a = fit_leaves(tree_a(), d, g, 0);
  const LeafRecompute rc{&d, g, 0};
  const Tree b = transform_tree(a, kFg, kGuestSet, &rc);
  const auto rep = verify_transformation(a, b, d, g);
  EXPECT_LE(rep.mean_gap(), 1e-12);
  EXPECT_LE(rep.max_leaf_gap, 1e-12);
  EXPECT_EQ(rep.leaves.size(), 4u);
  // Pointwise agreement: each instance gets the same prediction.
  for (std::size_t r = 0; r < d.num_instances(); ++r) {
    EXPECT_NEAR(a.predict(RowView(d, r)), b.predict(RowView(d, r)), 1e-12);
  }
}

TEST(Transform, ViolatedMetaRuleShowsGap) {
  const Dataset d = grid(true);
  const auto g = gradients_at_zero(d);
  const Tree a = fit_leaves(tree_a(), d, g, 0);
  const LeafRecompute rc{&d, g, 0};
  const auto rep = verify_transformation(a, transform_tree(a, kFg, kGuestSet, &rc), d, g);
  EXPECT_GT(rep.max_leaf_gap, 0.1);
}

TEST(Transform, IdenticalTreesHaveNoGap) {
  const Dataset d = grid(true);
  const auto g = gradients_at_zero(d);
  const Tree a = fit_leaves(tree_a(), d, g, 1);
  const auto rep = verify_transformation(a, a, d, g);
  EXPECT_EQ(rep.mean_gap(), 0.0);
  EXPECT_EQ(rep.max_leaf_gap, 0.0);
}

// General form: not F_h1 and F_g, with a host subtree below F_g's false side.
TEST(Transform, NestedRuleMovesGuestSplitLast) {
  const Dataset d = grid(false);
  const auto g = gradients_at_zero(d);
  const Tree shape({split(kHost2, 0.45, 1, 2), leaf(0), split(kGuest, 0.295, 3, 4),
                    leaf(0), split(kHost, 0.45, 5, 6), leaf(0), leaf(0)});
  const Tree a = fit_leaves(shape, d, g, 0);
  const SplitRule rule{{cond(kHost2, 0.45, false), cond(kGuest, 0.295, true)},
                       std::nullopt, std::nullopt};
  std::vector<FeatureId> others{kHost, kHost2};
  const auto cands = candidate_conditions(compute_split_candidates(d, others, 32));
  ASSERT_TRUE(test_meta_rule(d, rule, cands, 0.0, 30).passed());
  const LeafRecompute rc{&d, g, 0};
  const Tree b = transform_tree(a, rule, kGuestSet, &rc);
  // Every path through a guest split ends right below it.
  for (const auto& r : extract_rules(b)) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      EXPECT_NE(r.conditions[i].split.feature_id, kGuest) << r.to_string();
    }
  }
  EXPECT_EQ(b.depth(), a.depth());
  const auto rep = verify_transformation(a, b, d, g);
  EXPECT_LE(rep.mean_gap(), 1e-12);
  EXPECT_LE(rep.max_leaf_gap, 1e-12);
}

// The transformation only regroups instances: each leaf of B holds exactly
// the rows sharing one (host route, F_g outcome) cell.
TEST(Transform, PreservesHostGuestCells) {
  const Dataset d = grid(true);
  const Tree a = tree_a();
  const Tree b = transform_tree(a, kFg, kGuestSet);
  const Tree host_part({split(kHost, 0.45, 1, 2), leaf(0), leaf(0)});
  std::map<std::pair<NodeId, bool>, std::set<NodeId>> cell_to_b;
  std::map<NodeId, std::set<std::pair<NodeId, bool>>> b_to_cell;
  for (std::size_t r = 0; r < d.num_instances(); ++r) {
    const RowView x(d, r);
    const std::pair<NodeId, bool> cell{host_part.route(x), kFg.covers(x)};
    const NodeId lb = b.route(x);
    cell_to_b[cell].insert(lb);
    b_to_cell[lb].insert(cell);
  }
  EXPECT_EQ(cell_to_b.size(), 4u);
  for (const auto& [c, ls] : cell_to_b) EXPECT_EQ(ls.size(), 1u);
  for (const auto& [l, cs] : b_to_cell) EXPECT_EQ(cs.size(), 1u);
}

// Property: whenever the rule passes at epsilon 0 on random grid labelings,
// the per-leaf expectation gaps vanish.
TEST(Transform, ZeroEpsilonImpliesZeroGaps) {
  Rng rng(11);
  const Dataset base = grid(false);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y(base.labels().begin(), base.labels().end());
    // Relabel whole x1 groups inside F_g (keeps the rule exact) and
    // arbitrary rows outside it.
    std::bernoulli_distribution coin(0.5);
    std::vector<bool> group(100);
    for (auto&& gbit : group) gbit = coin(rng);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = i / 100 < 30 ? (group[i / 100] ? 1.0 : 0.0) : (coin(rng) ? 1.0 : 0.0);
    }
    const Dataset d = base.with_labels(y);
    const std::vector<FeatureId> hosts{kHost, kHost2};
    const auto cands = candidate_conditions(compute_split_candidates(d, hosts, 32));
    if (!test_meta_rule(d, kFg, cands, 0.0, 1).passed()) continue;
    const auto g = gradients_at_zero(d);
    const Tree a = fit_leaves(tree_a(), d, g, 0);
    const LeafRecompute rc{&d, g, 0};
    const auto rep = verify_transformation(a, transform_tree(a, kFg, kGuestSet, &rc), d, g);
    EXPECT_LE(rep.max_leaf_gap, 1e-12) << "trial " << trial;
    EXPECT_LE(rep.mean_gap(), 1e-12) << "trial " << trial;
  }
}

}  // namespace
}  // namespace hybridtree
