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
#include <span>
#include <vector>

namespace wifisense::evidential {

/// Subjective-logic opinion derived from a non-negative evidence vector:
/// alpha = e + 1, S = sum(alpha), b = e / S, u = K / S.
struct DirichletOutput {
  std::vector<double> evidence;
  std::vector<double> alpha;
  std::vector<double> belief;
  double uncertainty{1.0};
  double strength{0.0};

  [[nodiscard]] std::size_t num_classes() const { return evidence.size(); }
  /// argmax of the belief masses; ties go to the lowest index.
  [[nodiscard]] std::size_t predicted_class() const;
};

struct EdlLossConfig {
  std::size_t annealing_step{22};
  std::size_t num_classes{5};
};

DirichletOutput dirichlet_from_evidence(std::span<const double> evidence);

/// One-hot vector for class `k` among `num_classes`.
std::vector<double> one_hot(std::size_t k, std::size_t num_classes);

/// log S - log alpha_j for the true class j.
double edl_log_loss(const DirichletOutput &output, std::span<const double> y);

/// alpha with the true-class coordinate reset to 1.
std::vector<double> misleading_alpha(const DirichletOutput &output, std::span<const double> y);

/// KL( Dir(alpha_tilde) || Dir(1, ..., 1) ) in closed form.
double kl_to_uniform(std::span<const double> alpha_tilde);

/// min(1, t / annealing_step).
double annealing_coefficient(std::size_t epoch, std::size_t annealing_step);

/// Sum of log losses plus the annealed KL penalty over a batch.
double total_edl_loss(std::span<const DirichletOutput> outputs, std::span<const std::vector<double>> labels,
                      std::size_t epoch, const EdlLossConfig &config);

/// Per-sample loss and its gradient with respect to the evidence vector,
/// for KL weight `lambda`.
double edl_sample_loss_and_grad(std::span<const double> evidence, std::span<const double> y, double lambda,
                                std::span<double> grad_evidence);

} // namespace wifisense::evidential
