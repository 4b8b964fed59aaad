// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The wifisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "wifisense/analysis.hpp"

using namespace wifisense;
using namespace wifisense::analysis;

namespace {

double gini(const std::vector<std::size_t> &counts) {
  double n = 0.0, acc = 0.0;
  for (auto c : counts) {
    n += static_cast<double>(c);
  }
  for (auto c : counts) {
    acc += (static_cast<double>(c) / n) * (static_cast<double>(c) / n);
  }
  return n > 0 ? 1.0 - acc : 0.0;
}

/// Exhaustive best single split: (feature, threshold, weighted gini).
struct Stump {
  std::size_t feature{0};
  double threshold{0.0};
  double score{1e9};
};

Stump brute_force_stump(const std::vector<std::vector<double>> &x, const std::vector<std::size_t> &y) {
  Stump best;
  for (std::size_t f = 0; f < x[0].size(); ++f) {
    std::vector<double> values;
    for (const auto &row : x) {
      values.push_back(row[f]);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double t = 0.5 * (values[i] + values[i + 1]);
      std::vector<std::size_t> l(5, 0), r(5, 0);
      double nl = 0, nr = 0;
      for (std::size_t s = 0; s < x.size(); ++s) {
        if (x[s][f] <= t) {
          ++l[y[s]];
          ++nl;
        } else {
          ++r[y[s]];
          ++nr;
        }
      }
      const double score = (nl * gini(l) + nr * gini(r)) / (nl + nr);
      if (score < best.score - 1e-12) {
        best = {f, t, score};
      }
    }
  }
  return best;
}

void random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed, std::vector<std::vector<double>> &x,
                    std::vector<std::size_t> &y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto &e : v) {
      e = std::round(g(rng) * 4.0) / 4.0;
    }
    const std::size_t k = (v[0] > 0.3 ? 1 : 0) + (v[1 % dim] > -0.2 ? 2 : 0) + (g(rng) > 1.2 ? 1 : 0);
    x.push_back(v);
    y.push_back(std::min<std::size_t>(k, 4));
  }
}

evidential::DirichletOutput out_with(std::vector<double> e) { return evidential::dirichlet_from_evidence(e); }

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("metrics example") {
  const std::vector<std::size_t> labels{0, 1, 1, 2, 2, 3, 3, 4};
  const std::vector<std::size_t> preds{0, 0, 1, 2, 2, 3, 4, 4};
  const auto r = compute_metrics(preds, labels);
  CHECK(r.total == 8);
  CHECK(r.accuracy == doctest::Approx(6.0 / 8.0));
  CHECK(r.confusion[1][0] == 1);
  CHECK(r.confusion[3][4] == 1);
  CHECK(r.per_class[0].precision == doctest::Approx(0.5));
  CHECK(r.per_class[0].recall == doctest::Approx(1.0));
  CHECK(r.per_class[0].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.per_class[1].precision == doctest::Approx(1.0));
  CHECK(r.per_class[1].recall == doctest::Approx(0.5));
  CHECK(r.per_class[2].f1 == doctest::Approx(1.0));
  CHECK(r.per_class[3].support == 2);
  CHECK(r.macro_precision == doctest::Approx((0.5 + 1 + 1 + 1 + 0.5) / 5));
  CHECK(r.macro_recall == doctest::Approx((1 + 0.5 + 1 + 0.5 + 1) / 5));
  CHECK(r.macro_f1 == doctest::Approx((2.0 / 3 + 2.0 / 3 + 1 + 2.0 / 3 + 2.0 / 3) / 5));

  const auto csv = confusion_csv(r);
  CHECK(csv.rfind("true\\predicted,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const auto j = to_json(r);
  CHECK(j.at("accuracy").get<double>() == r.accuracy);
  CHECK(j.at("per_class").size() == 5);
  const auto row = table_row("delayed-fusing", r);
  CHECK(row.find("0.75") != std::string::npos);
  CHECK(row.rfind("delayed-fusing", 0) == 0);
}

TEST_CASE("metrics reference cases") {
  const std::vector<std::size_t> y{0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
  const auto perfect = compute_metrics(y, y);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(perfect.confusion[t][k] == (t == k ? 2u : 0u));
    }
  }
  const auto constant = compute_metrics(std::vector<std::size_t>(10, 3), y);
  CHECK(constant.accuracy == doctest::Approx(0.2));

  const std::vector<std::size_t> y3{0, 0, 1, 2};
  const std::vector<std::size_t> p3{0, 1, 1, 2};
  const auto r3 = compute_metrics(p3, y3, 3);
  CHECK(r3.accuracy == 0.75);
  CHECK(r3.per_class[0].precision == 1.0);
  CHECK(r3.per_class[1].precision == 0.5);
  CHECK(r3.per_class[2].precision == 1.0);
}

TEST_CASE("metrics zero division and errors") {
  const std::vector<std::size_t> labels{0, 0, 1};
  const std::vector<std::size_t> preds{0, 0, 0};
  const auto r = compute_metrics(preds, labels);
  CHECK(r.per_class[1].zero_division);
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK(r.per_class[4].support == 0);
  CHECK_FALSE(r.per_class[0].zero_division);
  WS_CHECK_ERROR(compute_metrics(std::vector<std::size_t>{0}, labels), ErrorCode::contract);
  WS_CHECK_ERROR(compute_metrics(std::vector<std::size_t>{}, std::vector<std::size_t>{}), ErrorCode::precondition);
  WS_CHECK_ERROR(compute_metrics(std::vector<std::size_t>{5}, std::vector<std::size_t>{0}), ErrorCode::range);
}

TEST_CASE("property: accuracy equals the confusion trace over the total") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    std::vector<std::size_t> y(n), p(n);
    std::size_t same = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng() % 5;
      p[i] = rng() % 3 == 0 ? y[i] : rng() % 5;
      same += p[i] == y[i];
    }
    const auto r = compute_metrics(p, y);
    CHECK(r.accuracy == doctest::Approx(static_cast<double>(same) / static_cast<double>(n)));
    std::size_t total = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      total += r.per_class[k].support;
      CHECK(r.per_class[k].f1 <= std::max(r.per_class[k].precision, r.per_class[k].recall) + 1e-12);
    }
    CHECK(total == n);
  }
}

TEST_CASE("median") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  WS_CHECK_ERROR(median({}), ErrorCode::precondition);
}

TEST_CASE("strength threshold") {
  const std::vector<double> in{10, 12, 14, 16};
  const std::vector<double> ood{5, 6, 7};
  const auto c = choose_strength_threshold(in, ood);
  CHECK(c.balanced_accuracy == 1.0);
  CHECK(c.threshold == doctest::Approx(8.5));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(15);
    for (auto &x : a) {
      x = 10 + 2 * g(rng);
    }
    for (auto &x : b) {
      x = 8 + 2 * g(rng);
    }
    const auto best = choose_strength_threshold(a, b);
    // Brute force over every threshold on a fine grid.
    double oracle = 0.0;
    for (double t = 0.0; t <= 20.0; t += 1e-3) {
      const double tpr = static_cast<double>(std::count_if(b.begin(), b.end(), [t](double s) { return s < t; })) / 15.0;
      const double fpr = static_cast<double>(std::count_if(a.begin(), a.end(), [t](double s) { return s < t; })) / 20.0;
      oracle = std::max(oracle, 0.5 * (tpr + 1.0 - fpr));
    }
    CHECK(best.balanced_accuracy == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("OOD report") {
  std::vector<evidential::DirichletOutput> in, ood;
  for (int i = 0; i < 10; ++i) {
    in.push_back(out_with({20.0 + i, 0, 0, 0, 0}));
    ood.push_back(out_with({1.0, 1.0, 0.5, 0, 0}));
  }
  const auto r = ood_report(in, ood);
  CHECK(r.in_dist_log_pseudocounts.size() == 50);
  CHECK(r.ood_per_class[2].size() == 10);
  CHECK(r.mean_strength_in == doctest::Approx(5 + 24.5));
  CHECK(r.mean_strength_ood == doctest::Approx(7.5));
  CHECK(r.median_log_pseudocount_in == 0.0);
  CHECK(r.median_log_pseudocount_ood == doctest::Approx(std::log(1.5)));
  REQUIRE(r.threshold.has_value());
  CHECK(r.detection_rate_at_threshold == 1.0);
  CHECK(r.false_alarm_rate_at_threshold == 0.0);
  CHECK_FALSE(ood_report(in, ood, false).threshold.has_value());
  CHECK_FALSE(ood_report(std::span(in).first(1), ood).threshold.has_value());
  const auto j = to_json(r);
  CHECK(j.at("ood_samples").get<std::size_t>() == 50);
  WS_CHECK_ERROR(ood_report(in, std::vector<evidential::DirichletOutput>{}), ErrorCode::precondition);
  const std::vector<evidential::DirichletOutput> three{out_with({1, 2, 3})};
  WS_CHECK_ERROR(ood_report(in, three), ErrorCode::contract);

  const auto svg = ood_histogram_svg(r, 10);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("out-of-distribution") != std::string::npos);
  WS_CHECK_ERROR(ood_histogram_svg(r, 0), ErrorCode::precondition);
}

TEST_CASE("OOD report reference cases") {
  const std::vector<evidential::DirichletOutput> silent(8, out_with({0, 0, 0, 0, 0}));
  const auto r = ood_report(silent, silent);
  CHECK(r.mean_strength_in == 5.0);
  CHECK(r.mean_strength_ood == 5.0);
  for (double v : r.in_dist_log_pseudocounts) {
    CHECK(v == 0.0);
  }
  CHECK(r.median_log_pseudocount_ood == 0.0);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<evidential::DirichletOutput> mixed;
  for (int i = 0; i < 400; ++i) {
    mixed.push_back(out_with({u(rng), u(rng), u(rng), u(rng), u(rng)}));
  }
  const auto same = ood_report(mixed, mixed);
  CHECK(same.in_dist_log_pseudocounts == same.ood_log_pseudocounts);
  CHECK(same.mean_strength_in == same.mean_strength_ood);
  REQUIRE(same.threshold.has_value());
  CHECK(std::abs(same.detection_rate_at_threshold - same.false_alarm_rate_at_threshold) < 1e-12);
}

TEST_CASE("tree reference cases") {
  const std::vector<std::vector<double>> one_class{{0.1, 2.0}, {0.5, 1.0}, {0.9, 3.0}};
  const auto leaf = fit_surrogate_tree(one_class, std::vector<std::size_t>{2, 2, 2});
  CHECK(leaf.nodes.size() == 1);
  CHECK(leaf.nodes[0].leaf);
  CHECK(leaf.predict(std::vector<double>{7.0, 7.0}) == 2);

  const std::vector<std::vector<double>> toy{{0.0, 5.0}, {1.0, 3.0}, {2.0, 4.0}, {3.0, 3.5}};
  const std::vector<std::size_t> labels{0, 0, 1, 1};
  const auto stump = fit_surrogate_tree(toy, labels);
  CHECK(stump.depth() == 1);
  CHECK(stump.nodes[0].feature == 0);
  CHECK(stump.nodes[0].threshold == 1.5);
  for (std::size_t i = 0; i < toy.size(); ++i) {
    CHECK(stump.predict(toy[i]) == labels[i]);
  }
  CHECK(node_label(stump.nodes[0], delayed_fusing_feature_names()) == "μ₀¹ ≤ 1.5");
}

TEST_CASE("tree root matches an exhaustive stump search") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<std::vector<double>> x;
    std::vector<std::size_t> y;
    random_dataset(120, 4, seed, x, y);
    const auto tree = fit_surrogate_tree(x, y, 1);
    const auto stump = brute_force_stump(x, y);
    REQUIRE_FALSE(tree.nodes[0].leaf);
    CHECK(tree.nodes[0].feature == stump.feature);
    CHECK(tree.nodes[0].threshold == stump.threshold);
    CHECK(tree.depth() == 1);
    CHECK(tree.leaf_count() == 2);
  }
}

TEST_CASE("property: tree structure invariants") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<std::vector<double>> x;
    std::vector<std::size_t> y;
    random_dataset(80 + seed * 7, 3, seed, x, y);
    double prev_acc = 0.0;
    for (std::size_t depth = 0; depth <= 4; ++depth) {
      const auto tree = fit_surrogate_tree(x, y, depth, seed);
      CHECK(tree.depth() <= depth);
      CHECK(tree.leaf_count() <= (std::size_t{1} << depth));
      // Leaf counts reproduce the routed training labels.
      std::vector<std::vector<std::size_t>> routed(tree.nodes.size(), std::vector<std::size_t>(5, 0));
      std::size_t correct = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        int id = 0;
        while (!tree.nodes[id].leaf) {
          const auto &n = tree.nodes[id];
          id = x[i][n.feature] <= n.threshold ? n.left : n.right;
        }
        ++routed[id][y[i]];
        CHECK(tree.predict(x[i]) == tree.nodes[id].prediction);
        correct += tree.predict(x[i]) == y[i];
      }
      for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        if (tree.nodes[id].leaf) {
          CHECK(routed[id] == tree.nodes[id].class_counts);
        }
      }
      const double acc = static_cast<double>(correct) / static_cast<double>(x.size());
      CHECK(acc >= prev_acc - 1e-12);
      prev_acc = acc;
    }
    CHECK(fit_surrogate_tree(x, y, 3, 1) == fit_surrogate_tree(x, y, 3, 99));
    CHECK(fit_surrogate_tree(x, y, 3, 1, ImpurityCriterion::entropy).depth() <= 3);
  }
}

TEST_CASE("tree learns an axis-aligned rule exactly") {
  std::vector<std::vector<double>> x;
  std::vector<std::size_t> y;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      x.push_back({static_cast<double>(i), static_cast<double>(j)});
      y.push_back(i < 5 ? (j < 3 ? 0 : 1) : 2);
    }
  }
  const auto tree = fit_surrogate_tree(x, y, 3);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(tree.predict(x[i]) == y[i]);
  }
  CHECK(tree.leaf_count() == 3);
  WS_CHECK_ERROR(tree.predict(std::vector<double>{1.0}), ErrorCode::contract);
  WS_CHECK_ERROR(fit_surrogate_tree(x, std::vector<std::size_t>(x.size(), 5)), ErrorCode::precondition);
  WS_CHECK_ERROR(SurrogateTree{}.predict(std::vector<double>{}), ErrorCode::precondition);
}

TEST_CASE("feature names and labels") {
  const auto names = delayed_fusing_feature_names();
  REQUIRE(names.size() == 16);
  CHECK(names[0] == "μ₀¹");
  CHECK(names[1] == "μ₁¹");
  CHECK(names[2] == "σ₀¹");
  CHECK(names[15] == "σ₁⁴");
  TreeNode n;
  n.leaf = false;
  n.feature = 0;
  n.threshold = 0.1234;
  CHECK(node_label(n, names) == "μ₀¹ ≤ 0.1234");
}

TEST_CASE("tree export round trip") {
  std::vector<std::vector<double>> x;
  std::vector<std::size_t> y;
  random_dataset(200, 16, 5, x, y);
  const auto tree = fit_surrogate_tree(x, y, 3);
  const auto names = delayed_fusing_feature_names();
  const auto j = export_tree_json(tree, names);
  CHECK(parse_tree_json(nlohmann::json::parse(j.dump())) == tree);
  const auto text = export_tree_text(tree, names);
  CHECK(text.rfind("if ", 0) == 0);
  CHECK(text.find("->") != std::string::npos);

  auto broken = j;
  for (auto &node : broken["nodes"]) {
    if (!node["leaf"].get<bool>()) {
      node["left"] = 999;
      break;
    }
  }
  WS_CHECK_ERROR(parse_tree_json(broken), ErrorCode::format);
  WS_CHECK_ERROR(parse_tree_json(nlohmann::json{{"nodes", 1}}), ErrorCode::format);
}

TEST_CASE("latent scatter export") {
  wstest::TempDir dir("scatter");
  const std::vector<LatentCode> codes{{{0.5, -1.0}, {1, 1}}, {{1.5, 2.0}, {1, 1}}};
  const std::vector<ActivityLabel> labels{{Activity::walk}, {Activity::squat}};
  const auto stem = (dir.path() / "latent").string();
  const auto ex = export_latent_scatter(codes, labels, stem, "antenna 1");
  CHECK(ex.rows == 2);
  CHECK(ex.plot_written);
  std::ifstream csv(stem + ".csv");
  std::stringstream ss;
  ss << csv.rdbuf();
  CHECK(ss.str() == "mu0,mu1,label\n0.5,-1,walk\n1.5,2,squat\n");
  std::ifstream svg(stem + ".svg");
  CHECK(svg.good());

  const auto empty = export_latent_scatter(std::vector<LatentCode>{}, std::vector<ActivityLabel>{},
                                           (dir.path() / "empty").string());
  CHECK(empty.rows == 0);
  CHECK_FALSE(empty.plot_written);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "empty.svg"));

  const std::vector<LatentCode> one{{{0.5}, {1}}};
  WS_CHECK_ERROR(latent_scatter_csv(one, std::span(labels).first(1)), ErrorCode::dimension);
  WS_CHECK_ERROR(latent_scatter_csv(codes, std::span(labels).first(1)), ErrorCode::contract);
}

} // TEST_SUITE
