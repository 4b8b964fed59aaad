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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wifisense/activity.hpp"
#include "wifisense/evidential.hpp"
#include "wifisense/vae.hpp"

namespace wifisense {
class ClassifierModel;
}

namespace wifisense::analysis {

// ---------------------------------------------------------------------------
// Classification metrics

struct ClassMetrics {
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};
  std::size_t support{0};
  /// True when a denominator was zero and the metric was reported as 0.
  bool zero_division{false};
};

struct MetricsReport {
  double accuracy{0.0};
  double macro_precision{0.0};
  double macro_recall{0.0};
  double macro_f1{0.0};
  std::size_t total{0};
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<ClassMetrics> per_class;
};

MetricsReport compute_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                              std::size_t num_classes = kNumClasses);

nlohmann::json to_json(const MetricsReport &report);
std::string confusion_csv(const MetricsReport &report);
/// "name  acc  prec  rec  f1" with two decimals.
std::string table_row(const std::string &name, const MetricsReport &report);

// ---------------------------------------------------------------------------
// Out-of-distribution report

struct OodReport {
  std::vector<double> in_dist_log_pseudocounts; // log(alpha), all K coordinates pooled
  std::vector<double> ood_log_pseudocounts;
  std::vector<std::vector<double>> in_dist_per_class; // [k] -> log(alpha_k)
  std::vector<std::vector<double>> ood_per_class;
  double mean_strength_in{0.0};
  double mean_strength_ood{0.0};
  double median_log_pseudocount_in{0.0};
  double median_log_pseudocount_ood{0.0};
  /// Strength below which a sample is flagged OOD.
  std::optional<double> threshold;
  double detection_rate_at_threshold{0.0};
  double false_alarm_rate_at_threshold{0.0};
};

struct ThresholdChoice {
  double threshold{0.0};
  double balanced_accuracy{0.5};
};

/// Threshold on Dirichlet strength (S < t means OOD) maximizing balanced
/// accuracy; ties go to the lowest threshold.
ThresholdChoice choose_strength_threshold(std::span<const double> in_strengths, std::span<const double> ood_strengths);

/// Even-indexed samples of each set pick the threshold; odd-indexed samples
/// measure detection. No threshold when either set has fewer than 2 samples.
OodReport ood_report(std::span<const evidential::DirichletOutput> in_dist,
                     std::span<const evidential::DirichletOutput> ood, bool choose_threshold = true);
OodReport ood_report(const ClassifierModel &model, std::span<const CsiWindow> in_dist,
                     std::span<const CsiWindow> ood, bool choose_threshold = true);

nlohmann::json to_json(const OodReport &report);
double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Surrogate decision tree

enum class ImpurityCriterion { gini, entropy };

struct TreeNode {
  bool leaf{true};
  std::size_t feature{0};
  double threshold{0.0};
  int left{-1};  // feature <= threshold
  int right{-1}; // feature > threshold
  std::size_t depth{0};
  std::vector<std::size_t> class_counts;
  std::size_t prediction{0};

  friend bool operator==(const TreeNode &, const TreeNode &) = default;
};

class SurrogateTree {
public:
  std::vector<TreeNode> nodes; // nodes[0] is the root
  std::size_t num_features{0};
  std::size_t num_classes{kNumClasses};
  std::size_t max_depth{3};
  ImpurityCriterion criterion{ImpurityCriterion::gini};

  [[nodiscard]] std::size_t predict(std::span<const double> x) const;
  [[nodiscard]] std::size_t depth() const;
  [[nodiscard]] std::size_t leaf_count() const;

  friend bool operator==(const SurrogateTree &, const SurrogateTree &) = default;
};

/// Greedy CART fit. Candidate thresholds are midpoints between consecutive
/// distinct values; ties go to the lowest feature index, then the lowest
/// threshold. A node becomes a leaf when pure, at max_depth, or when no split
/// lowers the impurity. The fit is fully deterministic; `seed` is recorded only.
SurrogateTree fit_surrogate_tree(std::span<const std::vector<double>> features, std::span<const std::size_t> labels,
                                 std::size_t max_depth = 3, std::uint64_t seed = 0,
                                 ImpurityCriterion criterion = ImpurityCriterion::gini,
                                 std::size_t num_classes = kNumClasses);

/// Names for concatenated [mu, sigma] code features: "μ₀¹", "σ₁³", ...
/// `code_tags` supplies the superscript of each code (antenna number).
std::vector<std::string> latent_feature_names(std::size_t vars_per_code, std::span<const std::string> code_tags);
std::vector<std::string> delayed_fusing_feature_names();

nlohmann::json export_tree_json(const SurrogateTree &tree, std::span<const std::string> feature_names);
SurrogateTree parse_tree_json(const nlohmann::json &j);
std::string export_tree_text(const SurrogateTree &tree, std::span<const std::string> feature_names);
/// "μ₀¹ ≤ 0.1234" for a split node.
std::string node_label(const TreeNode &node, std::span<const std::string> feature_names);

// ---------------------------------------------------------------------------
// Exports

std::string latent_scatter_csv(std::span<const LatentCode> codes, std::span<const ActivityLabel> labels);

struct ScatterExport {
  std::size_t rows{0};
  bool plot_written{false};
};

/// Writes `<stem>.csv` (mu0, mu1, label) and, for non-empty input, `<stem>.svg`.
ScatterExport export_latent_scatter(std::span<const LatentCode> codes, std::span<const ActivityLabel> labels,
                                    const std::string &stem, const std::string &title = "");

/// Overlaid histograms of pooled log-pseudocounts.
std::string ood_histogram_svg(const OodReport &report, std::size_t bins = 40);

} // namespace wifisense::analysis
