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

#include "wifisense/vae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wifisense/error.hpp"

namespace wifisense {

using nn::Tensor3;

// ---------------------------------------------------------------------------
// Configuration

VaeConfig VaeConfig::paper(std::size_t channels, std::size_t latent_dim) {
  VaeConfig c;
  c.channels = channels;
  c.latent_dim = latent_dim;
  return c;
}

double resolution_scaled_variance(std::size_t frames, std::size_t subcarriers) {
  return static_cast<double>(frames * subcarriers) / (450.0 * 2048.0);
}

VaeConfig VaeConfig::desk(std::size_t channels, std::size_t latent_dim) {
  VaeConfig c;
  c.frames = 40;
  c.subcarriers = 64;
  c.channels = channels;
  c.latent_dim = latent_dim;
  c.conv_spec = {{5, 8, 32}, {4, 4, 32}, {2, 2, 32}};
  c.obs_variance = resolution_scaled_variance(c.frames, c.subcarriers);
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> VaeConfig::shape_chain() const {
  std::vector<std::pair<std::size_t, std::size_t>> chain{{frames, subcarriers}};
  for (const auto &c : conv_spec) {
    const auto [h, w] = chain.back();
    require(c.kernel_h >= 1 && c.kernel_w >= 1 && h % c.kernel_h == 0 && w % c.kernel_w == 0,
            ErrorCode::configuration, "conv stride must divide its input dimensions exactly");
    chain.emplace_back(h / c.kernel_h, w / c.kernel_w);
  }
  return chain;
}

std::size_t VaeConfig::flatten_dim() const {
  const auto [h, w] = shape_chain().back();
  return h * w * conv_spec.back().filters;
}

void VaeConfig::validate() const {
  require(frames >= 1 && subcarriers >= 1 && channels >= 1, ErrorCode::configuration, "input shape must be positive");
  require(latent_dim >= 2 && latent_dim % 2 == 0, ErrorCode::configuration, "latent dimension must be even");
  require(!conv_spec.empty(), ErrorCode::configuration, "at least one convolution is required");
  for (const auto &c : conv_spec) {
    require(c.filters >= 1, ErrorCode::configuration, "conv filters must be positive");
  }
  require(dense_width >= 1 && mc_samples >= 1 && batch_size >= 1, ErrorCode::configuration,
          "dense width, MC samples and batch size must be positive");
  require(obs_variance > 0.0 && learning_rate > 0.0, ErrorCode::configuration,
          "observation variance and learning rate must be positive");
  (void)shape_chain();
}

nlohmann::json to_json(const VaeConfig &c) {
  nlohmann::json convs = nlohmann::json::array();
  for (const auto &s : c.conv_spec) {
    convs.push_back({s.kernel_h, s.kernel_w, s.filters});
  }
  return {{"input_shape", {c.frames, c.subcarriers, c.channels}},
          {"latent_dim", c.latent_dim},
          {"conv_spec", convs},
          {"dense_width", c.dense_width},
          {"mc_samples", c.mc_samples},
          {"obs_variance", c.obs_variance},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed}};
}

VaeConfig vae_config_from_json(const nlohmann::json &j) {
  VaeConfig c;
  try {
    const auto shape = j.at("input_shape").get<std::vector<std::size_t>>();
    require(shape.size() == 3, ErrorCode::format, "input_shape must have 3 entries");
    c.frames = shape[0];
    c.subcarriers = shape[1];
    c.channels = shape[2];
    c.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.conv_spec.clear();
    for (const auto &s : j.at("conv_spec")) {
      c.conv_spec.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()});
    }
    c.dense_width = j.at("dense_width").get<std::size_t>();
    c.mc_samples = j.at("mc_samples").get<std::size_t>();
    c.obs_variance = j.at("obs_variance").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::format, std::string("VAE config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Latent algebra

void LatentCode::validate() const {
  require(mu.size() == sigma.size() && !mu.empty(), ErrorCode::contract, "latent mu/sigma length mismatch");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    require(std::isfinite(mu[i]) && std::isfinite(sigma[i]), ErrorCode::numeric, "non-finite latent code");
    require(sigma[i] > 0.0, ErrorCode::numeric, "latent sigma must be strictly positive");
  }
}

std::vector<double> sample_latent(const LatentCode &code, std::span<const double> epsilon) {
  require(epsilon.size() == code.size(), ErrorCode::contract, "epsilon length must equal the latent size");
  std::vector<double> z(code.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = code.mu[j] + code.sigma[j] * epsilon[j];
  }
  return z;
}

double gaussian_kl(const LatentCode &code) {
  code.validate();
  double acc = 0.0;
  for (std::size_t j = 0; j < code.size(); ++j) {
    const double s2 = code.sigma[j] * code.sigma[j];
    acc += 1.0 + std::log(s2) - code.mu[j] * code.mu[j] - s2;
  }
  return std::max(0.0, -0.5 * acc);
}

Tensor3 window_tensor(const CsiWindow &window) {
  Tensor3 t(window.frames, window.subcarriers, window.channels);
  require(window.values.size() == t.size(), ErrorCode::contract, "window value count does not match its shape");
  std::copy(window.values.begin(), window.values.end(), t.v.begin());
  return t;
}

// ---------------------------------------------------------------------------
// Model

struct VaeModel::EncoderTrace {
  std::vector<Tensor3> acts; // post-ReLU output of each conv
  std::vector<double> hidden;
  std::vector<double> mu;
  std::vector<double> logvar;
};

struct VaeModel::DecoderTrace {
  std::vector<double> hidden; // post-ReLU dense output
  std::vector<Tensor3> acts;  // acts[0] = reshaped hidden, then each deconv output
};

VaeModel::VaeModel(VaeConfig config, double norm_constant) : config_(std::move(config)), norm_constant_(norm_constant) {
  config_.validate();
  require(norm_constant_ > 0.0, ErrorCode::precondition, "norm constant must be positive");
  const auto &cs = config_.conv_spec;
  std::size_t in_c = config_.channels;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    enc_conv_.emplace_back("enc.conv" + std::to_string(i + 1), cs[i].kernel_h, cs[i].kernel_w, in_c, cs[i].filters);
    in_c = cs[i].filters;
  }
  const std::size_t flat = config_.flatten_dim();
  const std::size_t vars = config_.latent_vars();
  enc_dense_ = nn::Dense("enc.dense", flat, config_.dense_width);
  enc_mu_ = nn::Dense("enc.mu", config_.dense_width, vars);
  enc_logvar_ = nn::Dense("enc.logvar", config_.dense_width, vars);
  dec_dense_ = nn::Dense("dec.dense", vars, flat);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const std::size_t i = cs.size() - 1 - k;
    const std::size_t out_c = i == 0 ? config_.channels : cs[i - 1].filters;
    dec_conv_.emplace_back("dec.deconv" + std::to_string(k + 1), cs[i].kernel_h, cs[i].kernel_w, cs[i].filters, out_c);
  }

  nn::Rng rng(config_.seed);
  for (auto &c : enc_conv_) {
    c.init(rng);
  }
  enc_dense_.init(rng);
  enc_mu_.init(rng);
  enc_logvar_.init(rng);
  dec_dense_.init(rng);
  for (auto &c : dec_conv_) {
    c.init(rng);
  }
}

std::vector<nn::Param *> VaeModel::parameters() {
  std::vector<nn::Param *> out;
  for (auto &c : enc_conv_) {
    out.push_back(&c.kernel);
    out.push_back(&c.bias);
  }
  for (auto *d : {&enc_dense_, &enc_mu_, &enc_logvar_, &dec_dense_}) {
    out.push_back(&d->kernel);
    out.push_back(&d->bias);
  }
  for (auto &c : dec_conv_) {
    out.push_back(&c.kernel);
    out.push_back(&c.bias);
  }
  return out;
}

std::vector<const nn::Param *> VaeModel::parameters() const {
  auto ps = const_cast<VaeModel *>(this)->parameters();
  return {ps.begin(), ps.end()};
}

void VaeModel::check_input(const Tensor3 &x) const {
  if (x.h != config_.frames || x.w != config_.subcarriers || x.c != config_.channels) {
    std::ostringstream msg;
    msg << "window shape " << x.h << "x" << x.w << "x" << x.c << " does not match model input " << config_.frames
        << "x" << config_.subcarriers << "x" << config_.channels;
    fail(ErrorCode::contract, msg.str());
  }
}

void VaeModel::run_encoder(const Tensor3 &x, EncoderTrace &trace) const {
  check_input(x);
  trace.acts.clear();
  const Tensor3 *in = &x;
  for (const auto &conv : enc_conv_) {
    trace.acts.push_back(conv.forward(*in));
    nn::relu_inplace(trace.acts.back().v);
    in = &trace.acts.back();
  }
  trace.hidden = enc_dense_.forward(trace.acts.back().v);
  nn::relu_inplace(trace.hidden);
  trace.mu = enc_mu_.forward(trace.hidden);
  trace.logvar = enc_logvar_.forward(trace.hidden);
  for (std::size_t j = 0; j < trace.mu.size(); ++j) {
    require(std::isfinite(trace.mu[j]) && std::isfinite(trace.logvar[j]), ErrorCode::numeric,
            "encoder produced non-finite activations");
  }
}

void VaeModel::run_decoder(std::span<const double> z, DecoderTrace &trace) const {
  require(z.size() == config_.latent_vars(), ErrorCode::contract, "latent vector length mismatch");
  trace.hidden = dec_dense_.forward(z);
  nn::relu_inplace(trace.hidden);
  const auto [h, w] = config_.shape_chain().back();
  Tensor3 t(h, w, config_.conv_spec.back().filters);
  t.v = trace.hidden;
  trace.acts.clear();
  trace.acts.push_back(std::move(t));
  for (std::size_t k = 0; k < dec_conv_.size(); ++k) {
    Tensor3 y = dec_conv_[k].forward(trace.acts.back());
    if (k + 1 < dec_conv_.size()) {
      nn::relu_inplace(y.v);
    }
    trace.acts.push_back(std::move(y));
  }
}

LatentCode VaeModel::encode(const Tensor3 &x) const {
  EncoderTrace trace;
  run_encoder(x, trace);
  LatentCode code;
  code.mu = trace.mu;
  code.sigma.resize(trace.logvar.size());
  for (std::size_t j = 0; j < code.sigma.size(); ++j) {
    code.sigma[j] = std::exp(0.5 * trace.logvar[j]);
  }
  code.validate();
  return code;
}

LatentCode VaeModel::encode(const CsiWindow &window) const { return encode(window_tensor(window)); }

Tensor3 VaeModel::decode(std::span<const double> z) const {
  DecoderTrace trace;
  run_decoder(z, trace);
  return std::move(trace.acts.back());
}

ElboTerms VaeModel::elbo_loss(const CsiWindow &window, std::span<const std::vector<double>> epsilon) const {
  return elbo_loss(window_tensor(window), epsilon);
}

ElboTerms VaeModel::elbo_loss(const Tensor3 &x, std::span<const std::vector<double>> epsilon) const {
  return const_cast<VaeModel *>(this)->evaluate(x, epsilon, false);
}

ElboTerms VaeModel::accumulate_gradient(const Tensor3 &x, std::span<const std::vector<double>> epsilon) {
  return evaluate(x, epsilon, true);
}

ElboTerms VaeModel::evaluate(const Tensor3 &x, std::span<const std::vector<double>> epsilon, bool with_grad) {
  require(!epsilon.empty(), ErrorCode::precondition, "at least one Monte-Carlo draw is required");
  EncoderTrace enc;
  run_encoder(x, enc);
  const std::size_t vars = config_.latent_vars();

  ElboTerms terms;
  std::vector<double> sigma(vars);
  std::vector<double> d_mu(vars);
  std::vector<double> d_logvar(vars);
  double kl = 0.0;
  for (std::size_t j = 0; j < vars; ++j) {
    const double s2 = std::exp(enc.logvar[j]);
    sigma[j] = std::sqrt(s2);
    kl += 1.0 + enc.logvar[j] - enc.mu[j] * enc.mu[j] - s2;
    d_mu[j] = enc.mu[j];
    d_logvar[j] = 0.5 * (s2 - 1.0);
  }
  terms.kl = -0.5 * kl;

  const double L = static_cast<double>(epsilon.size());
  const double inv_var = 1.0 / config_.obs_variance;
  DecoderTrace dec;
  std::vector<double> z(vars);
  for (const auto &eps : epsilon) {
    require(eps.size() == vars, ErrorCode::contract, "epsilon length must equal the latent size");
    for (std::size_t j = 0; j < vars; ++j) {
      z[j] = enc.mu[j] + sigma[j] * eps[j];
    }
    run_decoder(z, dec);
    Tensor3 &out = dec.acts.back();
    double sq = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = out.v[i] - x.v[i];
      sq += d * d;
      out.v[i] = d * inv_var / L; // reuse as dL/d(out)
    }
    terms.reconstruction += 0.5 * sq * inv_var / L;
    if (!with_grad) {
      continue;
    }
    Tensor3 g = std::move(out);
    for (std::size_t k = dec_conv_.size(); k-- > 0;) {
      g = dec_conv_[k].backward(dec.acts[k], g);
      if (k > 0) {
        nn::relu_backward(dec.acts[k].v, g.v);
      }
    }
    nn::relu_backward(dec.hidden, g.v);
    const auto dz = dec_dense_.backward(z, g.v);
    for (std::size_t j = 0; j < vars; ++j) {
      d_mu[j] += dz[j];
      d_logvar[j] += dz[j] * 0.5 * sigma[j] * eps[j];
    }
  }
  if (!std::isfinite(terms.total())) {
    fail(ErrorCode::numeric, "ELBO evaluated to a non-finite value");
  }
  if (!with_grad) {
    return terms;
  }

  auto dh = enc_mu_.backward(enc.hidden, d_mu);
  const auto dh2 = enc_logvar_.backward(enc.hidden, d_logvar);
  for (std::size_t i = 0; i < dh.size(); ++i) {
    dh[i] += dh2[i];
  }
  nn::relu_backward(enc.hidden, dh);
  const auto dflat = enc_dense_.backward(enc.acts.back().v, dh);
  Tensor3 g = enc.acts.back();
  g.v = dflat;
  for (std::size_t k = enc_conv_.size(); k-- > 0;) {
    nn::relu_backward(enc.acts[k].v, g.v);
    const Tensor3 &in = k == 0 ? x : enc.acts[k - 1];
    g = enc_conv_[k].backward(in, g, k > 0);
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::json VaeModel::append_to(Archive &archive, const std::string &prefix) const {
  for (const auto *p : parameters()) {
    NamedArray a;
    a.name = prefix + p->name;
    a.shape = p->shape;
    a.data.assign(p->value.begin(), p->value.end());
    archive.arrays.push_back(std::move(a));
  }
  return {{"config", to_json(config_)}, {"norm_constant", norm_constant_}, {"loss_trace", loss_trace_}};
}

Archive VaeModel::to_archive(const std::string &prefix) const {
  Archive a;
  a.meta = append_to(a, prefix);
  a.meta["kind"] = "vae";
  return a;
}

VaeModel VaeModel::from_archive(const Archive &archive, const std::string &prefix) {
  require(archive.meta.value("kind", std::string()) == "vae", ErrorCode::format, "checkpoint is not a VAE");
  return from_archive(archive, archive.meta, prefix);
}

VaeModel VaeModel::from_archive(const Archive &archive, const nlohmann::json &block, const std::string &prefix) {
  VaeModel m(vae_config_from_json(block.at("config")), block.at("norm_constant").get<double>());
  for (auto *p : m.parameters()) {
    const auto &a = archive.array(prefix + p->name);
    require(a.shape == p->shape, ErrorCode::corruption, "array '" + a.name + "' has the wrong shape");
    std::copy(a.data.begin(), a.data.end(), p->value.begin());
  }
  if (block.contains("loss_trace")) {
    m.loss_trace_ = block.at("loss_trace").get<std::vector<double>>();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Training

VaeModel train_vae(std::span<const CsiWindow> windows, const VaeConfig &config, double norm_constant) {
  require(!windows.empty(), ErrorCode::precondition, "training set is empty");
  VaeModel model(config, norm_constant);
  for (const auto &w : windows) {
    require(w.frames == config.frames && w.subcarriers == config.subcarriers && w.channels == config.channels,
            ErrorCode::contract, "training windows must match the configured input shape");
  }
  auto params = model.parameters();
  nn::Adam adam(params, nn::AdamConfig{config.learning_rate});
  nn::Rng rng(config.seed ^ 0x5eedc0ffeeULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<double>> eps(config.mc_samples, std::vector<double>(config.latent_vars()));
  std::vector<double> trace;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      nn::zero_grads(params);
      for (std::size_t b = start; b < stop; ++b) {
        for (auto &e : eps) {
          for (auto &v : e) {
            v = normal(rng);
          }
        }
        ElboTerms t;
        try {
          t = model.accumulate_gradient(window_tensor(windows[order[b]]), eps);
        } catch (const Error &e) {
          std::ostringstream msg;
          msg << "VAE training diverged at epoch " << epoch << " (" << e.what() << "); epoch loss trace:";
          for (double l : trace) {
            msg << ' ' << l;
          }
          fail(ErrorCode::numeric, msg.str());
        }
        epoch_loss += t.total();
      }
      adam.step(1.0 / static_cast<double>(stop - start));
    }
    trace.push_back(epoch_loss / static_cast<double>(windows.size()));
  }
  model.set_loss_trace(std::move(trace));
  return model;
}

std::vector<LatentCode> encode_dataset(const VaeModel &model, std::span<const CsiWindow> windows) {
  std::vector<LatentCode> out;
  out.reserve(windows.size());
  for (const auto &w : windows) {
    out.push_back(model.encode(w));
  }
  return out;
}

} // namespace wifisense
