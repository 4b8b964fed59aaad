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

#include "wifisense/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wifisense/error.hpp"

namespace wifisense::nn {

Param::Param(std::string n, std::vector<std::size_t> s) : name(std::move(n)), shape(std::move(s)) {
  const std::size_t count = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  value.assign(count, 0.0);
  grad.assign(count, 0.0);
}

void Param::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void zero_grads(std::span<Param *const> params) {
  for (auto *p : params) {
    p->zero_grad();
  }
}

void glorot_uniform(Param &kernel, std::size_t fan_in, std::size_t fan_out, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto &w : kernel.value) {
    w = dist(rng);
  }
}

void relu_inplace(std::span<double> x) {
  for (auto &v : x) {
    v = v > 0.0 ? v : 0.0;
  }
}

void relu_backward(std::span<const double> activation, std::span<double> grad) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(activation[i] > 0.0)) {
      grad[i] = 0.0;
    }
  }
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------

Dense::Dense(std::string name, std::size_t in, std::size_t out)
    : kernel(name + ".kernel", {in, out}), bias(name + ".bias", {out}), in_(in), out_(out) {}

void Dense::init(Rng &rng) {
  glorot_uniform(kernel, in_, out_, rng);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

std::vector<double> Dense::forward(std::span<const double> x) const {
  require(x.size() == in_, ErrorCode::contract, kernel.name + ": input length mismatch");
  std::vector<double> y(bias.value);
  const double *w = kernel.value.data();
  for (std::size_t i = 0; i < in_; ++i) {
    const double xi = x[i];
    if (xi == 0.0) {
      continue;
    }
    const double *row = w + i * out_;
    for (std::size_t o = 0; o < out_; ++o) {
      y[o] += xi * row[o];
    }
  }
  return y;
}

std::vector<double> Dense::backward(std::span<const double> x, std::span<const double> grad_out) {
  std::vector<double> gx(in_, 0.0);
  for (std::size_t o = 0; o < out_; ++o) {
    bias.grad[o] += grad_out[o];
  }
  for (std::size_t i = 0; i < in_; ++i) {
    const double xi = x[i];
    const double *row = kernel.value.data() + i * out_;
    double *grow = kernel.grad.data() + i * out_;
    double acc = 0.0;
    for (std::size_t o = 0; o < out_; ++o) {
      grow[o] += xi * grad_out[o];
      acc += row[o] * grad_out[o];
    }
    gx[i] = acc;
  }
  return gx;
}

// ---------------------------------------------------------------------------

PatchConv2d::PatchConv2d(std::string name, std::size_t kh, std::size_t kw, std::size_t in_c, std::size_t out_c)
    : kernel(name + ".kernel", {kh, kw, in_c, out_c}), bias(name + ".bias", {out_c}), kh_(kh), kw_(kw), in_c_(in_c),
      out_c_(out_c) {}

void PatchConv2d::init(Rng &rng) {
  glorot_uniform(kernel, kh_ * kw_ * in_c_, kh_ * kw_ * out_c_, rng);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

Tensor3 PatchConv2d::forward(const Tensor3 &x) const {
  require(x.c == in_c_ && x.h % kh_ == 0 && x.w % kw_ == 0, ErrorCode::contract,
          kernel.name + ": input shape incompatible with kernel");
  Tensor3 y(x.h / kh_, x.w / kw_, out_c_);
  for (std::size_t oi = 0; oi < y.h; ++oi) {
    for (std::size_t oj = 0; oj < y.w; ++oj) {
      double *out = &y.at(oi, oj, 0);
      std::copy(bias.value.begin(), bias.value.end(), out);
      const double *w = kernel.value.data();
      for (std::size_t a = 0; a < kh_; ++a) {
        const double *in_row = &x.at(oi * kh_ + a, oj * kw_, 0);
        // kw_ * in_c_ contiguous inputs per kernel row.
        for (std::size_t p = 0; p < kw_ * in_c_; ++p, w += out_c_) {
          const double xi = in_row[p];
          if (xi == 0.0) {
            continue;
          }
          for (std::size_t o = 0; o < out_c_; ++o) {
            out[o] += xi * w[o];
          }
        }
      }
    }
  }
  return y;
}

Tensor3 PatchConv2d::backward(const Tensor3 &x, const Tensor3 &grad_out, bool input_grad) {
  if (!input_grad) {
    for (std::size_t oi = 0; oi < grad_out.h; ++oi) {
      for (std::size_t oj = 0; oj < grad_out.w; ++oj) {
        const double *g = &grad_out.at(oi, oj, 0);
        for (std::size_t o = 0; o < out_c_; ++o) {
          bias.grad[o] += g[o];
        }
        double *gw = kernel.grad.data();
        for (std::size_t a = 0; a < kh_; ++a) {
          const double *in_row = &x.at(oi * kh_ + a, oj * kw_, 0);
          for (std::size_t p = 0; p < kw_ * in_c_; ++p, gw += out_c_) {
            const double xi = in_row[p];
            if (xi == 0.0) {
              continue;
            }
            for (std::size_t o = 0; o < out_c_; ++o) {
              gw[o] += xi * g[o];
            }
          }
        }
      }
    }
    return {};
  }
  Tensor3 gx(x.h, x.w, x.c);
  for (std::size_t oi = 0; oi < grad_out.h; ++oi) {
    for (std::size_t oj = 0; oj < grad_out.w; ++oj) {
      const double *g = &grad_out.at(oi, oj, 0);
      for (std::size_t o = 0; o < out_c_; ++o) {
        bias.grad[o] += g[o];
      }
      const double *w = kernel.value.data();
      double *gw = kernel.grad.data();
      for (std::size_t a = 0; a < kh_; ++a) {
        const double *in_row = &x.at(oi * kh_ + a, oj * kw_, 0);
        double *gin_row = &gx.at(oi * kh_ + a, oj * kw_, 0);
        for (std::size_t p = 0; p < kw_ * in_c_; ++p, w += out_c_, gw += out_c_) {
          const double xi = in_row[p];
          double acc = 0.0;
          for (std::size_t o = 0; o < out_c_; ++o) {
            gw[o] += xi * g[o];
            acc += w[o] * g[o];
          }
          gin_row[p] = acc;
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------

PatchConvTranspose2d::PatchConvTranspose2d(std::string name, std::size_t kh, std::size_t kw, std::size_t in_c,
                                           std::size_t out_c)
    : kernel(name + ".kernel", {kh, kw, out_c, in_c}), bias(name + ".bias", {out_c}), kh_(kh), kw_(kw), in_c_(in_c),
      out_c_(out_c) {}

void PatchConvTranspose2d::init(Rng &rng) {
  glorot_uniform(kernel, kh_ * kw_ * in_c_, kh_ * kw_ * out_c_, rng);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

Tensor3 PatchConvTranspose2d::forward(const Tensor3 &x) const {
  require(x.c == in_c_, ErrorCode::contract, kernel.name + ": input channel mismatch");
  Tensor3 y(x.h * kh_, x.w * kw_, out_c_);
  for (std::size_t i = 0; i < x.h; ++i) {
    for (std::size_t j = 0; j < x.w; ++j) {
      const double *in = &x.at(i, j, 0);
      const double *w = kernel.value.data();
      for (std::size_t a = 0; a < kh_; ++a) {
        double *out_row = &y.at(i * kh_ + a, j * kw_, 0);
        for (std::size_t p = 0; p < kw_ * out_c_; ++p, w += in_c_) {
          double acc = bias.value[p % out_c_];
          for (std::size_t c = 0; c < in_c_; ++c) {
            acc += in[c] * w[c];
          }
          out_row[p] = acc;
        }
      }
    }
  }
  return y;
}

Tensor3 PatchConvTranspose2d::backward(const Tensor3 &x, const Tensor3 &grad_out) {
  Tensor3 gx(x.h, x.w, x.c);
  for (std::size_t i = 0; i < x.h; ++i) {
    for (std::size_t j = 0; j < x.w; ++j) {
      const double *in = &x.at(i, j, 0);
      double *gin = &gx.at(i, j, 0);
      const double *w = kernel.value.data();
      double *gw = kernel.grad.data();
      for (std::size_t a = 0; a < kh_; ++a) {
        const double *g_row = &grad_out.at(i * kh_ + a, j * kw_, 0);
        for (std::size_t p = 0; p < kw_ * out_c_; ++p, w += in_c_, gw += in_c_) {
          const double g = g_row[p];
          bias.grad[p % out_c_] += g;
          if (g == 0.0) {
            continue;
          }
          for (std::size_t c = 0; c < in_c_; ++c) {
            gw[c] += g * in[c];
            gin[c] += g * w[c];
          }
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------

Adam::Adam(std::vector<Param *> params, AdamConfig config) : params_(std::move(params)), config_(config) {
  for (auto *p : params_) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

void Adam::step(double grad_scale) {
  ++t_;
  const double b1t = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double b2t = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const double lr = config_.learning_rate * std::sqrt(b2t) / b1t;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto &p = *params_[k];
    auto &m = m_[k];
    auto &v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i] * grad_scale;
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      p.value[i] -= lr * m[i] / (std::sqrt(v[i]) + config_.epsilon);
    }
  }
}

} // namespace wifisense::nn
