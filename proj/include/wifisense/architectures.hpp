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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wifisense/checkpoint.hpp"
#include "wifisense/csi_data.hpp"
#include "wifisense/evidential.hpp"
#include "wifisense/nn.hpp"
#include "wifisense/vae.hpp"

namespace wifisense {

enum class ArchitectureKind { no_fusing, early_fusing, early_fusing_3d, delayed_fusing };

inline constexpr std::size_t kDelayedAntennas = 4;

/// Hyperparameters of one end-to-end architecture. `for_kind` fills in the
/// published settings; fields may be overridden afterwards.
struct ArchitectureSpec {
  ArchitectureKind kind{ArchitectureKind::delayed_fusing};
  std::size_t antenna_index{0}; // 0-based; only meaningful for no_fusing
  std::size_t mlp_input_dim{16};
  std::pair<std::size_t, std::size_t> hidden_dims{16, 8};
  std::size_t output_dim{kNumClasses};
  std::size_t epochs{50};
  std::size_t batch_size{128};
  double learning_rate{0.01};
  std::size_t annealing_step{3};
  std::uint64_t seed{0};

  static ArchitectureSpec for_kind(ArchitectureKind kind, std::size_t antenna_index = 0, std::uint64_t seed = 0);
  /// "no-fusing-1" .. "no-fusing-4", "early-fusing", "early-fusing-3d", "delayed-fusing".
  [[nodiscard]] std::string name() const;
  /// Latent size J of the VAE(s) this architecture consumes.
  [[nodiscard]] std::size_t vae_latent_dim() const;
  [[nodiscard]] std::size_t vae_count() const;
};

ArchitectureSpec parse_architecture(const std::string &name, std::uint64_t seed = 0);
std::vector<ArchitectureSpec> all_architectures(std::uint64_t seed = 0);

nlohmann::json to_json(const ArchitectureSpec &spec);
ArchitectureSpec architecture_spec_from_json(const nlohmann::json &j);

/// Concatenates [mu, sigma] of each code in the given (antenna) order.
std::vector<double> latent_features(std::span<const LatentCode> codes);

/// Frozen VAE(s) feeding an evidential MLP:
/// input -> ReLU(h1) -> ReLU(h2) -> softplus(K) evidence.
class ClassifierModel {
public:
  ClassifierModel(ArchitectureSpec spec, std::vector<VaeModel> vaes);

  [[nodiscard]] const ArchitectureSpec &spec() const { return spec_; }
  [[nodiscard]] const std::vector<VaeModel> &vaes() const { return vaes_; }

  /// Encodes with the posterior means/stds (no sampling) and builds the MLP input.
  /// Accepts a stacked multi-antenna window; no-fusing models also accept the
  /// single-channel window of their antenna.
  [[nodiscard]] std::vector<double> features(const CsiWindow &window) const;
  [[nodiscard]] std::vector<double> evidence(std::span<const double> features) const;
  [[nodiscard]] evidential::DirichletOutput predict_features(std::span<const double> features) const;
  [[nodiscard]] evidential::DirichletOutput predict(const CsiWindow &window) const;

  std::vector<nn::Param *> mlp_parameters();
  [[nodiscard]] std::vector<const nn::Param *> mlp_parameters() const;
  [[nodiscard]] const std::vector<double> &loss_trace() const { return loss_trace_; }

  /// Trains the MLP only; VAE parameters are never touched.
  void train(std::span<const std::vector<double>> features, std::span<const std::size_t> labels);

  [[nodiscard]] Archive to_archive() const;
  static ClassifierModel from_archive(const Archive &archive);

private:
  ArchitectureSpec spec_;
  std::vector<VaeModel> vaes_;
  nn::Dense hidden1_;
  nn::Dense hidden2_;
  nn::Dense output_;
  std::vector<double> loss_trace_;
};

/// Validates the VAE wiring for `spec` and returns an untrained classifier.
ClassifierModel build_architecture(const ArchitectureSpec &spec, std::vector<VaeModel> vaes);

void train_classifier(ClassifierModel &model, std::span<const CsiWindow> windows);
void train_classifier(ClassifierModel &model, std::span<const std::vector<double>> features,
                      std::span<const std::size_t> labels);

std::vector<evidential::DirichletOutput> predict(const ClassifierModel &model, std::span<const CsiWindow> windows);

} // namespace wifisense
