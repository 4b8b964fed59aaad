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
#include <span>
#include <vector>

#include "wifisense/checkpoint.hpp"
#include "wifisense/csi_data.hpp"
#include "wifisense/nn.hpp"

namespace wifisense {

/// One encoder convolution; stride equals the kernel.
struct ConvSpec {
  std::size_t kernel_h{1};
  std::size_t kernel_w{1};
  std::size_t filters{32};

  friend bool operator==(const ConvSpec &, const ConvSpec &) = default;
};

struct VaeConfig {
  std::size_t frames{450};
  std::size_t subcarriers{2048};
  std::size_t channels{1};
  /// Number of latent parameters J (mean and std of J/2 Gaussians).
  std::size_t latent_dim{4};
  std::vector<ConvSpec> conv_spec{{5, 8, 32}, {5, 8, 32}, {2, 4, 32}};
  std::size_t dense_width{16};
  std::size_t mc_samples{1};
  double obs_variance{1.0};
  std::size_t epochs{50};
  std::size_t batch_size{128};
  double learning_rate{1e-3};
  std::uint64_t seed{0};

  /// Full-resolution 450 x 2048 configuration.
  static VaeConfig paper(std::size_t channels = 1, std::size_t latent_dim = 4);
  /// 40 x 64 configuration with strides (5,8), (4,4), (2,2) and a
  /// resolution-scaled observation variance.
  static VaeConfig desk(std::size_t channels = 1, std::size_t latent_dim = 4);

  [[nodiscard]] std::size_t latent_vars() const { return latent_dim / 2; }
  /// (height, width) of the input followed by every conv output.
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> shape_chain() const;
  [[nodiscard]] std::size_t flatten_dim() const;
  void validate() const;

  friend bool operator==(const VaeConfig &, const VaeConfig &) = default;
};

/// Observation variance that keeps the per-window likelihood weight of a
/// frames x subcarriers input equal to that of a 450 x 2048 input at variance 1.
double resolution_scaled_variance(std::size_t frames, std::size_t subcarriers);

nlohmann::json to_json(const VaeConfig &config);
VaeConfig vae_config_from_json(const nlohmann::json &j);

/// Diagonal-Gaussian posterior parameters.
struct LatentCode {
  std::vector<double> mu;
  std::vector<double> sigma;

  [[nodiscard]] std::size_t size() const { return mu.size(); }
  void validate() const;
};

std::vector<double> sample_latent(const LatentCode &code, std::span<const double> epsilon);

/// KL(N(mu, sigma^2) || N(0, I)) = -1/2 sum(1 + log sigma^2 - mu^2 - sigma^2).
double gaussian_kl(const LatentCode &code);

struct ElboTerms {
  double kl{0.0};
  double reconstruction{0.0};
  [[nodiscard]] double total() const { return kl + reconstruction; }
};

nn::Tensor3 window_tensor(const CsiWindow &window);

class VaeModel {
public:
  VaeModel(VaeConfig config, double norm_constant);

  [[nodiscard]] LatentCode encode(const CsiWindow &window) const;
  [[nodiscard]] LatentCode encode(const nn::Tensor3 &x) const;
  [[nodiscard]] nn::Tensor3 decode(std::span<const double> z) const;

  /// Negated lower bound for one window given L standard-normal draws.
  [[nodiscard]] ElboTerms elbo_loss(const CsiWindow &window, std::span<const std::vector<double>> epsilon) const;
  [[nodiscard]] ElboTerms elbo_loss(const nn::Tensor3 &x, std::span<const std::vector<double>> epsilon) const;
  /// Same as elbo_loss, additionally accumulating parameter gradients.
  ElboTerms accumulate_gradient(const nn::Tensor3 &x, std::span<const std::vector<double>> epsilon);

  [[nodiscard]] const VaeConfig &config() const { return config_; }
  [[nodiscard]] double norm_constant() const { return norm_constant_; }
  [[nodiscard]] const std::vector<double> &loss_trace() const { return loss_trace_; }
  void set_loss_trace(std::vector<double> trace) { loss_trace_ = std::move(trace); }

  std::vector<nn::Param *> parameters();
  [[nodiscard]] std::vector<const nn::Param *> parameters() const;

  [[nodiscard]] Archive to_archive(const std::string &prefix = "") const;
  /// Appends this model's arrays (name-prefixed) and returns its header block.
  nlohmann::json append_to(Archive &archive, const std::string &prefix) const;
  static VaeModel from_archive(const Archive &archive, const std::string &prefix = "");
  static VaeModel from_archive(const Archive &archive, const nlohmann::json &block, const std::string &prefix);

private:
  struct EncoderTrace;
  struct DecoderTrace;

  void check_input(const nn::Tensor3 &x) const;
  void run_encoder(const nn::Tensor3 &x, EncoderTrace &trace) const;
  void run_decoder(std::span<const double> z, DecoderTrace &trace) const;
  ElboTerms evaluate(const nn::Tensor3 &x, std::span<const std::vector<double>> epsilon, bool with_grad);

  VaeConfig config_;
  double norm_constant_{1.0};
  std::vector<nn::PatchConv2d> enc_conv_;
  nn::Dense enc_dense_;
  nn::Dense enc_mu_;
  nn::Dense enc_logvar_;
  nn::Dense dec_dense_;
  std::vector<nn::PatchConvTranspose2d> dec_conv_;
  std::vector<double> loss_trace_;
};

/// Minimizes the mean negated ELBO with Adam. Deterministic given config.seed.
VaeModel train_vae(std::span<const CsiWindow> windows, const VaeConfig &config, double norm_constant);

std::vector<LatentCode> encode_dataset(const VaeModel &model, std::span<const CsiWindow> windows);

} // namespace wifisense
