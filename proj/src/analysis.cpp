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

#include "wifisense/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "wifisense/architectures.hpp"
#include "wifisense/error.hpp"

namespace wifisense::analysis {

// ---------------------------------------------------------------------------
// Metrics

MetricsReport compute_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                              std::size_t num_classes) {
  require(predictions.size() == labels.size(), ErrorCode::contract, "predictions and labels differ in length");
  require(!labels.empty(), ErrorCode::precondition, "no predictions to score");
  MetricsReport r;
  r.total = labels.size();
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] < num_classes && predictions[i] < num_classes, ErrorCode::range, "class index out of range");
    ++r.confusion[labels[i]][predictions[i]];
  }
  std::size_t correct = 0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    correct += r.confusion[k][k];
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);

  r.per_class.resize(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    auto &c = r.per_class[k];
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < num_classes; ++t) {
      predicted += r.confusion[t][k];
      c.support += r.confusion[k][t];
    }
    const double tp = static_cast<double>(r.confusion[k][k]);
    if (predicted > 0) {
      c.precision = tp / static_cast<double>(predicted);
    } else {
      c.zero_division = true;
    }
    if (c.support > 0) {
      c.recall = tp / static_cast<double>(c.support);
    } else {
      c.zero_division = true;
    }
    if (c.precision + c.recall > 0.0) {
      c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
    } else {
      c.zero_division = true;
    }
    r.macro_precision += c.precision;
    r.macro_recall += c.recall;
    r.macro_f1 += c.f1;
  }
  const double k = static_cast<double>(num_classes);
  r.macro_precision /= k;
  r.macro_recall /= k;
  r.macro_f1 /= k;
  return r;
}

nlohmann::json to_json(const MetricsReport &r) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto &c = r.per_class[k];
    per.push_back({{"class", k < kNumClasses ? std::string(label_from_class_index(k).name()) : std::to_string(k)},
                   {"precision", c.precision},
                   {"recall", c.recall},
                   {"f1", c.f1},
                   {"support", c.support},
                   {"zero_division", c.zero_division}});
  }
  return {{"accuracy", r.accuracy},   {"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall}, {"macro_f1", r.macro_f1},
          {"total", r.total},         {"confusion_matrix", r.confusion},
          {"per_class", per}};
}

std::string confusion_csv(const MetricsReport &r) {
  const std::size_t n = r.confusion.size();
  auto name = [n](std::size_t k) {
    return n == kNumClasses ? std::string(label_from_class_index(k).name()) : std::to_string(k);
  };
  std::ostringstream os;
  os << "true\\predicted";
  for (std::size_t k = 0; k < n; ++k) {
    os << ',' << name(k);
  }
  os << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    os << name(t);
    for (std::size_t k = 0; k < n; ++k) {
      os << ',' << r.confusion[t][k];
    }
    os << '\n';
  }
  return os.str();
}

std::string table_row(const std::string &name, const MetricsReport &r) {
  std::ostringstream os;
  os << std::left << std::setw(18) << name << std::right << std::fixed << std::setprecision(2) << std::setw(8)
     << r.accuracy << std::setw(8) << r.macro_precision << std::setw(8) << r.macro_recall << std::setw(8)
     << r.macro_f1;
  return os.str();
}

// ---------------------------------------------------------------------------
// OOD

double median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::precondition, "median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) {
    return hi;
  }
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

ThresholdChoice choose_strength_threshold(std::span<const double> in_strengths, std::span<const double> ood_strengths) {
  require(!in_strengths.empty() && !ood_strengths.empty(), ErrorCode::precondition, "threshold needs both sets");
  std::vector<double> all(in_strengths.begin(), in_strengths.end());
  all.insert(all.end(), ood_strengths.begin(), ood_strengths.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> candidates{all.front() - 1.0};
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    candidates.push_back(0.5 * (all[i] + all[i + 1]));
  }
  candidates.push_back(all.back() + 1.0);

  std::vector<double> in_sorted(in_strengths.begin(), in_strengths.end());
  std::vector<double> ood_sorted(ood_strengths.begin(), ood_strengths.end());
  std::sort(in_sorted.begin(), in_sorted.end());
  std::sort(ood_sorted.begin(), ood_sorted.end());
  ThresholdChoice best{candidates.front(), -1.0};
  for (double t : candidates) {
    const auto ood_below = std::lower_bound(ood_sorted.begin(), ood_sorted.end(), t) - ood_sorted.begin();
    const auto in_below = std::lower_bound(in_sorted.begin(), in_sorted.end(), t) - in_sorted.begin();
    const double tpr = static_cast<double>(ood_below) / static_cast<double>(ood_sorted.size());
    const double tnr = 1.0 - static_cast<double>(in_below) / static_cast<double>(in_sorted.size());
    const double bal = 0.5 * (tpr + tnr);
    if (bal > best.balanced_accuracy + 1e-12) {
      best = {t, bal};
    }
  }
  return best;
}

OodReport ood_report(std::span<const evidential::DirichletOutput> in_dist,
                     std::span<const evidential::DirichletOutput> ood, bool choose_threshold) {
  require(!in_dist.empty() && !ood.empty(), ErrorCode::precondition, "OOD report needs non-empty sample sets");
  OodReport r;
  const std::size_t k = in_dist.front().num_classes();
  r.in_dist_per_class.assign(k, {});
  r.ood_per_class.assign(k, {});
  auto collect = [k](std::span<const evidential::DirichletOutput> outs, std::vector<double> &pooled,
                     std::vector<std::vector<double>> &per_class, double &mean_strength) {
    double s = 0.0;
    for (const auto &o : outs) {
      require(o.num_classes() == k, ErrorCode::contract, "mixed class counts in OOD report");
      for (std::size_t c = 0; c < k; ++c) {
        const double la = std::log(o.alpha[c]);
        pooled.push_back(la);
        per_class[c].push_back(la);
      }
      s += o.strength;
    }
    mean_strength = s / static_cast<double>(outs.size());
  };
  collect(in_dist, r.in_dist_log_pseudocounts, r.in_dist_per_class, r.mean_strength_in);
  collect(ood, r.ood_log_pseudocounts, r.ood_per_class, r.mean_strength_ood);
  r.median_log_pseudocount_in = median(r.in_dist_log_pseudocounts);
  r.median_log_pseudocount_ood = median(r.ood_log_pseudocounts);

  if (choose_threshold && in_dist.size() >= 2 && ood.size() >= 2) {
    std::vector<double> in_val, in_eval, ood_val, ood_eval;
    for (std::size_t i = 0; i < in_dist.size(); ++i) {
      (i % 2 == 0 ? in_val : in_eval).push_back(in_dist[i].strength);
    }
    for (std::size_t i = 0; i < ood.size(); ++i) {
      (i % 2 == 0 ? ood_val : ood_eval).push_back(ood[i].strength);
    }
    const auto choice = choose_strength_threshold(in_val, ood_val);
    r.threshold = choice.threshold;
    auto below = [t = choice.threshold](const std::vector<double> &v) {
      return static_cast<double>(std::count_if(v.begin(), v.end(), [t](double s) { return s < t; })) /
             static_cast<double>(v.size());
    };
    r.detection_rate_at_threshold = below(ood_eval);
    r.false_alarm_rate_at_threshold = below(in_eval);
  }
  return r;
}

OodReport ood_report(const ClassifierModel &model, std::span<const CsiWindow> in_dist, std::span<const CsiWindow> ood,
                     bool choose_threshold) {
  require(!in_dist.empty() && !ood.empty(), ErrorCode::precondition, "OOD report needs non-empty window sets");
  for (const auto &w : ood) {
    require(!w.label.in_distribution(), ErrorCode::precondition, "OOD windows must carry an out-of-distribution label");
  }
  const auto a = predict(model, in_dist);
  const auto b = predict(model, ood);
  return ood_report(a, b, choose_threshold);
}

nlohmann::json to_json(const OodReport &r) {
  nlohmann::json j{{"mean_strength_in", r.mean_strength_in},
                   {"mean_strength_ood", r.mean_strength_ood},
                   {"median_log_pseudocount_in", r.median_log_pseudocount_in},
                   {"median_log_pseudocount_ood", r.median_log_pseudocount_ood},
                   {"in_dist_samples", r.in_dist_log_pseudocounts.size()},
                   {"ood_samples", r.ood_log_pseudocounts.size()},
                   {"detection_rate_at_threshold", r.detection_rate_at_threshold},
                   {"false_alarm_rate_at_threshold", r.false_alarm_rate_at_threshold}};
  j["threshold"] = r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Surrogate tree

namespace {

double impurity(std::span<const std::size_t> counts, std::size_t n, ImpurityCriterion criterion) {
  if (n == 0) {
    return 0.0;
  }
  const double total = static_cast<double>(n);
  double acc = 0.0;
  for (auto c : counts) {
    if (c == 0) {
      continue;
    }
    const double p = static_cast<double>(c) / total;
    acc += criterion == ImpurityCriterion::gini ? p * p : -p * std::log2(p);
  }
  return criterion == ImpurityCriterion::gini ? 1.0 - acc : acc;
}

std::size_t argmax_counts(const std::vector<std::size_t> &counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct Builder {
  std::span<const std::vector<double>> x;
  std::span<const std::size_t> y;
  SurrogateTree &tree;

  int build(std::vector<std::size_t> idx, std::size_t depth) {
    const std::size_t k = tree.num_classes;
    TreeNode node;
    node.depth = depth;
    node.class_counts.assign(k, 0);
    for (auto i : idx) {
      ++node.class_counts[y[i]];
    }
    node.prediction = argmax_counts(node.class_counts);
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    const double parent = impurity(node.class_counts, idx.size(), tree.criterion);
    if (depth >= tree.max_depth || parent <= 0.0 || idx.size() < 2) {
      return id;
    }

    double best = parent - 1e-12;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;
    std::vector<std::size_t> order = idx;
    std::vector<std::size_t> left(k), right(k);
    for (std::size_t f = 0; f < tree.num_features; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a][f] < x[b][f] || (x[a][f] == x[b][f] && a < b);
      });
      std::fill(left.begin(), left.end(), 0);
      right = node.class_counts;
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        ++left[y[order[p]]];
        --right[y[order[p]]];
        const double v = x[order[p]][f];
        const double next = x[order[p + 1]][f];
        if (!(v < next)) {
          continue;
        }
        const std::size_t nl = p + 1;
        const std::size_t nr = order.size() - nl;
        const double w = (static_cast<double>(nl) * impurity(left, nl, tree.criterion) +
                          static_cast<double>(nr) * impurity(right, nr, tree.criterion)) /
                         static_cast<double>(order.size());
        if (w < best - 1e-12) {
          best = w;
          best_feature = f;
          best_threshold = 0.5 * (v + next);
          found = true;
        }
      }
    }
    if (!found) {
      return id;
    }
    std::vector<std::size_t> li, ri;
    for (auto i : idx) {
      (x[i][best_feature] <= best_threshold ? li : ri).push_back(i);
    }
    tree.nodes[id].leaf = false;
    tree.nodes[id].feature = best_feature;
    tree.nodes[id].threshold = best_threshold;
    const int l = build(std::move(li), depth + 1);
    const int r = build(std::move(ri), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

std::string class_name(std::size_t k, std::size_t num_classes) {
  return num_classes == kNumClasses ? std::string(label_from_class_index(k).name()) : "class " + std::to_string(k);
}

std::string format_threshold(double t) {
  std::ostringstream os;
  os << std::setprecision(4) << t;
  return os.str();
}

} // namespace

std::size_t SurrogateTree::predict(std::span<const double> x) const {
  require(!nodes.empty(), ErrorCode::precondition, "tree is not fitted");
  require(x.size() == num_features, ErrorCode::contract, "feature vector has the wrong length");
  std::size_t i = 0;
  while (!nodes[i].leaf) {
    i = static_cast<std::size_t>(x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
  }
  return nodes[i].prediction;
}

std::size_t SurrogateTree::depth() const {
  std::size_t d = 0;
  for (const auto &n : nodes) {
    d = std::max(d, n.depth);
  }
  return d;
}

std::size_t SurrogateTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode &n) { return n.leaf; }));
}

SurrogateTree fit_surrogate_tree(std::span<const std::vector<double>> features, std::span<const std::size_t> labels,
                                 std::size_t max_depth, std::uint64_t seed, ImpurityCriterion criterion,
                                 std::size_t num_classes) {
  (void)seed;
  require(!features.empty() && features.size() == labels.size(), ErrorCode::precondition,
          "tree fit needs aligned, non-empty features and labels");
  SurrogateTree tree;
  tree.num_features = features.front().size();
  tree.num_classes = num_classes;
  tree.max_depth = max_depth;
  tree.criterion = criterion;
  for (std::size_t i = 0; i < features.size(); ++i) {
    require(features[i].size() == tree.num_features, ErrorCode::contract, "ragged feature matrix");
    require(labels[i] < num_classes, ErrorCode::precondition, "tree labels must be in-distribution class indices");
  }
  std::vector<std::size_t> idx(features.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Builder{features, labels, tree}.build(std::move(idx), 0);
  return tree;
}

std::vector<std::string> latent_feature_names(std::size_t vars_per_code, std::span<const std::string> code_tags) {
  static const char *const kSub[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  auto sub = [](std::size_t v) {
    std::string digits = std::to_string(v);
    std::string out;
    for (char c : digits) {
      out += kSub[c - '0'];
    }
    return out;
  };
  std::vector<std::string> names;
  for (const auto &tag : code_tags) {
    for (std::size_t j = 0; j < vars_per_code; ++j) {
      names.push_back("μ" + sub(j) + tag);
    }
    for (std::size_t j = 0; j < vars_per_code; ++j) {
      names.push_back("σ" + sub(j) + tag);
    }
  }
  return names;
}

std::vector<std::string> delayed_fusing_feature_names() {
  const std::string tags[] = {"¹", "²", "³", "⁴"};
  return latent_feature_names(2, tags);
}

std::string node_label(const TreeNode &node, std::span<const std::string> feature_names) {
  if (node.leaf) {
    return "leaf";
  }
  const std::string name =
      node.feature < feature_names.size() ? feature_names[node.feature] : "x" + std::to_string(node.feature);
  return name + " ≤ " + format_threshold(node.threshold);
}

nlohmann::json export_tree_json(const SurrogateTree &tree, std::span<const std::string> feature_names) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto &n = tree.nodes[i];
    nlohmann::json j{{"id", i},
                     {"leaf", n.leaf},
                     {"depth", n.depth},
                     {"class_counts", n.class_counts},
                     {"prediction", n.prediction},
                     {"prediction_name", class_name(n.prediction, tree.num_classes)}};
    if (!n.leaf) {
      j["feature"] = n.feature;
      j["feature_name"] = n.feature < feature_names.size() ? feature_names[n.feature] : "";
      j["threshold"] = n.threshold;
      j["left"] = n.left;
      j["right"] = n.right;
      j["label"] = node_label(n, feature_names);
    }
    nodes.push_back(std::move(j));
  }
  return {{"num_features", tree.num_features},
          {"num_classes", tree.num_classes},
          {"max_depth", tree.max_depth},
          {"criterion", tree.criterion == ImpurityCriterion::gini ? "gini" : "entropy"},
          {"feature_names", std::vector<std::string>(feature_names.begin(), feature_names.end())},
          {"nodes", nodes}};
}

SurrogateTree parse_tree_json(const nlohmann::json &j) {
  SurrogateTree t;
  try {
    t.num_features = j.at("num_features").get<std::size_t>();
    t.num_classes = j.at("num_classes").get<std::size_t>();
    t.max_depth = j.at("max_depth").get<std::size_t>();
    t.criterion = j.at("criterion").get<std::string>() == "entropy" ? ImpurityCriterion::entropy : ImpurityCriterion::gini;
    for (const auto &n : j.at("nodes")) {
      TreeNode node;
      node.leaf = n.at("leaf").get<bool>();
      node.depth = n.at("depth").get<std::size_t>();
      node.class_counts = n.at("class_counts").get<std::vector<std::size_t>>();
      node.prediction = n.at("prediction").get<std::size_t>();
      if (!node.leaf) {
        node.feature = n.at("feature").get<std::size_t>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
      }
      t.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::format, std::string("tree JSON: ") + e.what());
  }
  for (const auto &n : t.nodes) {
    if (!n.leaf) {
      require(n.left > 0 && n.right > 0 && static_cast<std::size_t>(n.left) < t.nodes.size() &&
                  static_cast<std::size_t>(n.right) < t.nodes.size(),
              ErrorCode::format, "tree JSON has dangling child indices");
    }
  }
  return t;
}

std::string export_tree_text(const SurrogateTree &tree, std::span<const std::string> feature_names) {
  std::ostringstream os;
  std::function<void(int, const std::string &)> walk = [&](int id, const std::string &indent) {
    const auto &n = tree.nodes[static_cast<std::size_t>(id)];
    std::size_t total = std::accumulate(n.class_counts.begin(), n.class_counts.end(), std::size_t{0});
    if (n.leaf) {
      os << indent << "-> " << class_name(n.prediction, tree.num_classes) << "  [";
      for (std::size_t k = 0; k < n.class_counts.size(); ++k) {
        os << (k ? " " : "") << n.class_counts[k];
      }
      os << "] n=" << total << '\n';
      return;
    }
    os << indent << "if " << node_label(n, feature_names) << "  (n=" << total << ")\n";
    walk(n.left, indent + "  ");
    os << indent << "else\n";
    walk(n.right, indent + "  ");
  };
  if (!tree.nodes.empty()) {
    walk(0, "");
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Exports

namespace {

const char *activity_colour(std::size_t k) {
  static const char *const kColours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  return kColours[k % 6];
}

} // namespace

std::string latent_scatter_csv(std::span<const LatentCode> codes, std::span<const ActivityLabel> labels) {
  require(codes.size() == labels.size(), ErrorCode::contract, "codes and labels differ in length");
  std::ostringstream os;
  os << "mu0,mu1,label\n" << std::setprecision(9);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    require(codes[i].size() >= 2, ErrorCode::dimension, "latent scatter needs at least 2 latent variables");
    os << codes[i].mu[0] << ',' << codes[i].mu[1] << ',' << labels[i].name() << '\n';
  }
  return os.str();
}

ScatterExport export_latent_scatter(std::span<const LatentCode> codes, std::span<const ActivityLabel> labels,
                                    const std::string &stem, const std::string &title) {
  const std::string csv = latent_scatter_csv(codes, labels);
  {
    std::ofstream out(stem + ".csv");
    require(static_cast<bool>(out), ErrorCode::io, "cannot write " + stem + ".csv");
    out << csv;
  }
  ScatterExport ex;
  ex.rows = codes.size();
  if (codes.empty()) {
    return ex;
  }
  double x0 = codes[0].mu[0], x1 = x0, y0 = codes[0].mu[1], y1 = y0;
  for (const auto &c : codes) {
    x0 = std::min(x0, c.mu[0]);
    x1 = std::max(x1, c.mu[0]);
    y0 = std::min(y0, c.mu[1]);
    y1 = std::max(y1, c.mu[1]);
  }
  const double dx = x1 > x0 ? x1 - x0 : 1.0;
  const double dy = y1 > y0 ? y1 - y0 : 1.0;
  constexpr double W = 520, H = 440, M = 50;
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << M << "\" y=\"" << M - 20 << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"12\">μ₀</text>\n";
  os << "<text x=\"15\" y=\"" << H / 2 << "\" font-size=\"12\">μ₁</text>\n";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const double px = M + (codes[i].mu[0] - x0) / dx * (W - 2 * M);
    const double py = H - M - 20 - (codes[i].mu[1] - y0) / dy * (H - 2 * M);
    os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2\" fill=\""
       << activity_colour(static_cast<std::size_t>(labels[i].activity)) << "\" fill-opacity=\"0.6\"/>\n";
  }
  double ly = M;
  for (auto a : kAllActivities) {
    os << "<circle cx=\"" << W - M + 8 << "\" cy=\"" << ly << "\" r=\"4\" fill=\""
       << activity_colour(static_cast<std::size_t>(a)) << "\"/>";
    os << "<text x=\"" << W - M + 14 << "\" y=\"" << ly + 4 << "\" font-size=\"10\">" << activity_name(a)
       << "</text>\n";
    ly += 14;
  }
  os << "</svg>\n";
  std::ofstream out(stem + ".svg");
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + stem + ".svg");
  out << os.str();
  ex.plot_written = true;
  return ex;
}

std::string ood_histogram_svg(const OodReport &report, std::size_t bins) {
  require(bins >= 1, ErrorCode::precondition, "histogram needs at least one bin");
  const auto &a = report.in_dist_log_pseudocounts;
  const auto &b = report.ood_log_pseudocounts;
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (const auto *v : {&a, &b}) {
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!(hi > lo)) {
    hi = lo + 1.0;
  }
  auto hist = [&](const std::vector<double> &v) {
    std::vector<double> h(bins, 0.0);
    for (double x : v) {
      auto i = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
      h[std::min(i, bins - 1)] += 1.0 / static_cast<double>(v.size());
    }
    return h;
  };
  const auto ha = hist(a);
  const auto hb = hist(b);
  const double top = std::max(*std::max_element(ha.begin(), ha.end()), *std::max_element(hb.begin(), hb.end()));
  constexpr double W = 560, H = 360, M = 50;
  const double bw = (W - 2 * M) / static_cast<double>(bins);
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto bars = [&](const std::vector<double> &h, const char *colour) {
    for (std::size_t i = 0; i < bins; ++i) {
      const double bh = top > 0 ? h[i] / top * (H - 2 * M) : 0.0;
      os << "<rect x=\"" << M + static_cast<double>(i) * bw << "\" y=\"" << H - M - bh << "\" width=\"" << bw
         << "\" height=\"" << bh << "\" fill=\"" << colour << "\" fill-opacity=\"0.5\"/>\n";
    }
  };
  bars(ha, "#1f77b4");
  bars(hb, "#d62728");
  os << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << M << "\" y=\"" << H - M + 16 << "\" font-size=\"11\">" << lo << "</text>\n";
  os << "<text x=\"" << W - M << "\" y=\"" << H - M + 16 << "\" font-size=\"11\" text-anchor=\"end\">" << hi
     << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">log pseudo-count"
     << "</text>\n";
  os << "<text x=\"" << W - M << "\" y=\"30\" text-anchor=\"end\" font-size=\"12\" fill=\"#1f77b4\">in-distribution"
     << "</text>\n";
  os << "<text x=\"" << W - M << "\" y=\"46\" text-anchor=\"end\" font-size=\"12\" fill=\"#d62728\">out-of-distribution"
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

} // namespace wifisense::analysis
