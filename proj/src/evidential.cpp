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

#include "wifisense/evidential.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "wifisense/error.hpp"

namespace wifisense::evidential {

namespace {

std::size_t true_class(std::span<const double> y, std::size_t k) {
  require(y.size() == k, ErrorCode::contract, "label length does not match the number of classes");
  std::size_t hot = k;
  for (std::size_t i = 0; i < k; ++i) {
    if (y[i] == 1.0) {
      require(hot == k, ErrorCode::contract, "label is not one-hot");
      hot = i;
    } else {
      require(y[i] == 0.0, ErrorCode::contract, "label is not one-hot");
    }
  }
  require(hot < k, ErrorCode::contract, "label is not one-hot");
  return hot;
}

} // namespace

std::size_t DirichletOutput::predicted_class() const {
  return static_cast<std::size_t>(std::max_element(belief.begin(), belief.end()) - belief.begin());
}

DirichletOutput dirichlet_from_evidence(std::span<const double> evidence) {
  require(!evidence.empty(), ErrorCode::domain, "evidence vector is empty");
  DirichletOutput out;
  out.evidence.assign(evidence.begin(), evidence.end());
  out.alpha.resize(evidence.size());
  double s = 0.0;
  for (std::size_t k = 0; k < evidence.size(); ++k) {
    require(std::isfinite(evidence[k]) && evidence[k] >= 0.0, ErrorCode::domain,
            "evidence must be finite and non-negative");
    out.alpha[k] = evidence[k] + 1.0;
    s += out.alpha[k];
  }
  out.strength = s;
  out.belief.resize(evidence.size());
  for (std::size_t k = 0; k < evidence.size(); ++k) {
    out.belief[k] = evidence[k] / s;
  }
  out.uncertainty = static_cast<double>(evidence.size()) / s;
  return out;
}

std::vector<double> one_hot(std::size_t k, std::size_t num_classes) {
  require(k < num_classes, ErrorCode::range, "class index out of range");
  std::vector<double> y(num_classes, 0.0);
  y[k] = 1.0;
  return y;
}

double edl_log_loss(const DirichletOutput &output, std::span<const double> y) {
  const std::size_t j = true_class(y, output.num_classes());
  return std::log(output.strength) - std::log(output.alpha[j]);
}

std::vector<double> misleading_alpha(const DirichletOutput &output, std::span<const double> y) {
  (void)true_class(y, output.num_classes());
  std::vector<double> a(output.alpha.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = y[k] + (1.0 - y[k]) * output.alpha[k];
  }
  return a;
}

double kl_to_uniform(std::span<const double> alpha_tilde) {
  require(!alpha_tilde.empty(), ErrorCode::domain, "empty Dirichlet parameter vector");
  const double k = static_cast<double>(alpha_tilde.size());
  double s = 0.0;
  double sum_lgamma = 0.0;
  for (double a : alpha_tilde) {
    require(std::isfinite(a) && a >= 1.0, ErrorCode::domain, "alpha-tilde entries must be >= 1");
    s += a;
    sum_lgamma += std::lgamma(a);
  }
  const double psi_s = boost::math::digamma(s);
  double acc = std::lgamma(s) - std::lgamma(k) - sum_lgamma;
  for (double a : alpha_tilde) {
    if (a != 1.0) {
      acc += (a - 1.0) * (boost::math::digamma(a) - psi_s);
    }
  }
  return std::max(0.0, acc);
}

double annealing_coefficient(std::size_t epoch, std::size_t annealing_step) {
  require(annealing_step >= 1, ErrorCode::precondition, "annealing step must be >= 1");
  return std::min(1.0, static_cast<double>(epoch) / static_cast<double>(annealing_step));
}

double total_edl_loss(std::span<const DirichletOutput> outputs, std::span<const std::vector<double>> labels,
                      std::size_t epoch, const EdlLossConfig &config) {
  require(outputs.size() == labels.size(), ErrorCode::contract, "batch outputs and labels are misaligned");
  const double lambda = annealing_coefficient(epoch, config.annealing_step);
  double log_loss = 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    require(outputs[i].num_classes() == config.num_classes, ErrorCode::contract, "output has the wrong class count");
    log_loss += edl_log_loss(outputs[i], labels[i]);
    if (lambda > 0.0) {
      kl += kl_to_uniform(misleading_alpha(outputs[i], labels[i]));
    }
  }
  return log_loss + lambda * kl;
}

double edl_sample_loss_and_grad(std::span<const double> evidence, std::span<const double> y, double lambda,
                                std::span<double> grad_evidence) {
  const DirichletOutput out = dirichlet_from_evidence(evidence);
  const std::size_t k = out.num_classes();
  const std::size_t j = true_class(y, k);
  require(grad_evidence.size() == k, ErrorCode::contract, "gradient buffer has the wrong length");

  double loss = std::log(out.strength) - std::log(out.alpha[j]);
  for (std::size_t m = 0; m < k; ++m) {
    grad_evidence[m] = 1.0 / out.strength - (m == j ? 1.0 / out.alpha[j] : 0.0);
  }
  if (lambda > 0.0) {
    const auto at = misleading_alpha(out, y);
    loss += lambda * kl_to_uniform(at);
    double st = 0.0;
    for (double a : at) {
      st += a;
    }
    // d KL / d at_m = (at_m - 1) psi'(at_m) - (St - K) psi'(St)
    const double tail = (st - static_cast<double>(k)) * boost::math::trigamma(st);
    for (std::size_t m = 0; m < k; ++m) {
      if (m == j) {
        continue;
      }
      const double d = (at[m] - 1.0) * boost::math::trigamma(at[m]) - tail;
      grad_evidence[m] += lambda * d;
    }
  }
  return loss;
}

} // namespace wifisense::evidential
