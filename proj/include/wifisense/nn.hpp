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
#include <random>
#include <span>
#include <string>
#include <vector>

namespace wifisense::nn {

/// Dense height x width x channels activation map, row-major (HWC).
struct Tensor3 {
  std::size_t h{0};
  std::size_t w{0};
  std::size_t c{0};
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(std::size_t h_, std::size_t w_, std::size_t c_) : h(h_), w(w_), c(c_), v(h_ * w_ * c_, 0.0) {}

  [[nodiscard]] std::size_t size() const { return v.size(); }
  double &at(std::size_t i, std::size_t j, std::size_t k) { return v[(i * w + j) * c + k]; }
  [[nodiscard]] const double &at(std::size_t i, std::size_t j, std::size_t k) const { return v[(i * w + j) * c + k]; }
};

/// A named trainable array with its gradient accumulator.
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> s);
  [[nodiscard]] std::size_t size() const { return value.size(); }
  void zero_grad();
};

using Rng = std::mt19937_64;

/// Glorot-uniform kernel init with zero bias.
void glorot_uniform(Param &kernel, std::size_t fan_in, std::size_t fan_out, Rng &rng);

void relu_inplace(std::span<double> x);
/// grad *= (activation > 0), using the post-activation values.
void relu_backward(std::span<const double> activation, std::span<double> grad);
double softplus(double x);
double sigmoid(double x);

class Dense {
public:
  Dense() = default;
  Dense(std::string name, std::size_t in, std::size_t out);

  void init(Rng &rng);
  [[nodiscard]] std::vector<double> forward(std::span<const double> x) const;
  /// Accumulates parameter gradients; returns dL/dx.
  std::vector<double> backward(std::span<const double> x, std::span<const double> grad_out);

  [[nodiscard]] std::size_t in_dim() const { return in_; }
  [[nodiscard]] std::size_t out_dim() const { return out_; }
  Param kernel;
  Param bias;

private:
  std::size_t in_{0};
  std::size_t out_{0};
};

/// Convolution whose stride equals its kernel and which uses no padding:
/// each output pixel sees one disjoint (kh x kw) input patch.
class PatchConv2d {
public:
  PatchConv2d() = default;
  PatchConv2d(std::string name, std::size_t kh, std::size_t kw, std::size_t in_c, std::size_t out_c);

  void init(Rng &rng);
  [[nodiscard]] Tensor3 forward(const Tensor3 &x) const;
  /// Returns dL/dx, or an empty tensor when `input_grad` is false.
  Tensor3 backward(const Tensor3 &x, const Tensor3 &grad_out, bool input_grad = true);

  Param kernel; // [kh][kw][in_c][out_c]
  Param bias;

private:
  std::size_t kh_{1}, kw_{1}, in_c_{1}, out_c_{1};
};

/// Transpose of PatchConv2d: every input pixel expands to a (kh x kw) patch.
class PatchConvTranspose2d {
public:
  PatchConvTranspose2d() = default;
  PatchConvTranspose2d(std::string name, std::size_t kh, std::size_t kw, std::size_t in_c, std::size_t out_c);

  void init(Rng &rng);
  [[nodiscard]] Tensor3 forward(const Tensor3 &x) const;
  Tensor3 backward(const Tensor3 &x, const Tensor3 &grad_out);

  Param kernel; // [kh][kw][out_c][in_c]
  Param bias;

private:
  std::size_t kh_{1}, kw_{1}, in_c_{1}, out_c_{1};
};

struct AdamConfig {
  double learning_rate{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-7};
};

class Adam {
public:
  Adam(std::vector<Param *> params, AdamConfig config);

  /// Applies one update using each parameter's grad scaled by `grad_scale`.
  void step(double grad_scale = 1.0);
  [[nodiscard]] std::int64_t steps() const { return t_; }

private:
  std::vector<Param *> params_;
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::int64_t t_{0};
};

void zero_grads(std::span<Param *const> params);

} // namespace wifisense::nn
