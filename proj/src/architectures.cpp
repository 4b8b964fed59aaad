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

#include "wifisense/architectures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wifisense/error.hpp"

namespace wifisense {

// ---------------------------------------------------------------------------
// Specs

ArchitectureSpec ArchitectureSpec::for_kind(ArchitectureKind kind, std::size_t antenna_index, std::uint64_t seed) {
  ArchitectureSpec s;
  s.kind = kind;
  s.seed = seed;
  s.epochs = 50;
  s.batch_size = 128;
  s.output_dim = kNumClasses;
  switch (kind) {
  case ArchitectureKind::no_fusing:
    require(antenna_index < kDelayedAntennas, ErrorCode::configuration, "no-fusing antenna must be 1..4");
    s.antenna_index = antenna_index;
    s.mlp_input_dim = 4;
    s.hidden_dims = {4, 8};
    s.learning_rate = 0.01;
    s.annealing_step = 22;
    break;
  case ArchitectureKind::early_fusing:
    s.mlp_input_dim = 4;
    s.hidden_dims = {4, 8};
    s.learning_rate = 0.001;
    s.annealing_step = 22;
    break;
  case ArchitectureKind::early_fusing_3d:
    s.mlp_input_dim = 6;
    s.hidden_dims = {4, 8};
    s.learning_rate = 0.001;
    s.annealing_step = 22;
    break;
  case ArchitectureKind::delayed_fusing:
    s.mlp_input_dim = 16;
    s.hidden_dims = {16, 8};
    s.learning_rate = 0.01;
    s.annealing_step = 3;
    break;
  }
  return s;
}

std::string ArchitectureSpec::name() const {
  switch (kind) {
  case ArchitectureKind::no_fusing: return "no-fusing-" + std::to_string(antenna_index + 1);
  case ArchitectureKind::early_fusing: return "early-fusing";
  case ArchitectureKind::early_fusing_3d: return "early-fusing-3d";
  case ArchitectureKind::delayed_fusing: return "delayed-fusing";
  }
  return "unknown";
}

std::size_t ArchitectureSpec::vae_latent_dim() const { return kind == ArchitectureKind::early_fusing_3d ? 6 : 4; }

std::size_t ArchitectureSpec::vae_count() const { return kind == ArchitectureKind::delayed_fusing ? kDelayedAntennas : 1; }

ArchitectureSpec parse_architecture(const std::string &name, std::uint64_t seed) {
  for (std::size_t a = 0; a < kDelayedAntennas; ++a) {
    if (name == "no-fusing-" + std::to_string(a + 1)) {
      return ArchitectureSpec::for_kind(ArchitectureKind::no_fusing, a, seed);
    }
  }
  if (name == "early-fusing") {
    return ArchitectureSpec::for_kind(ArchitectureKind::early_fusing, 0, seed);
  }
  if (name == "early-fusing-3d") {
    return ArchitectureSpec::for_kind(ArchitectureKind::early_fusing_3d, 0, seed);
  }
  if (name == "delayed-fusing") {
    return ArchitectureSpec::for_kind(ArchitectureKind::delayed_fusing, 0, seed);
  }
  fail(ErrorCode::configuration, "unknown architecture '" + name + "'");
}

std::vector<ArchitectureSpec> all_architectures(std::uint64_t seed) {
  std::vector<ArchitectureSpec> out;
  for (std::size_t a = 0; a < kDelayedAntennas; ++a) {
    out.push_back(ArchitectureSpec::for_kind(ArchitectureKind::no_fusing, a, seed));
  }
  out.push_back(ArchitectureSpec::for_kind(ArchitectureKind::early_fusing, 0, seed));
  out.push_back(ArchitectureSpec::for_kind(ArchitectureKind::early_fusing_3d, 0, seed));
  out.push_back(ArchitectureSpec::for_kind(ArchitectureKind::delayed_fusing, 0, seed));
  return out;
}

nlohmann::json to_json(const ArchitectureSpec &s) {
  return {{"architecture", s.name()},
          {"mlp_input_dim", s.mlp_input_dim},
          {"hidden_dims", {s.hidden_dims.first, s.hidden_dims.second}},
          {"output_dim", s.output_dim},
          {"hidden_activation", "relu"},
          {"output_activation", "softplus"},
          {"epochs", s.epochs},
          {"batch_size", s.batch_size},
          {"learning_rate", s.learning_rate},
          {"annealing_step", s.annealing_step},
          {"seed", s.seed}};
}

ArchitectureSpec architecture_spec_from_json(const nlohmann::json &j) {
  try {
    ArchitectureSpec s = parse_architecture(j.at("architecture").get<std::string>(), j.at("seed").get<std::uint64_t>());
    s.mlp_input_dim = j.at("mlp_input_dim").get<std::size_t>();
    const auto h = j.at("hidden_dims").get<std::vector<std::size_t>>();
    require(h.size() == 2, ErrorCode::format, "hidden_dims must have two entries");
    s.hidden_dims = {h[0], h[1]};
    s.output_dim = j.at("output_dim").get<std::size_t>();
    s.epochs = j.at("epochs").get<std::size_t>();
    s.batch_size = j.at("batch_size").get<std::size_t>();
    s.learning_rate = j.at("learning_rate").get<double>();
    s.annealing_step = j.at("annealing_step").get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::format, std::string("architecture spec: ") + e.what());
  }
}

std::vector<double> latent_features(std::span<const LatentCode> codes) {
  require(!codes.empty(), ErrorCode::contract, "no latent codes");
  std::vector<double> f;
  for (const auto &c : codes) {
    require(c.mu.size() == c.sigma.size(), ErrorCode::contract, "latent mu/sigma length mismatch");
    f.insert(f.end(), c.mu.begin(), c.mu.end());
    f.insert(f.end(), c.sigma.begin(), c.sigma.end());
  }
  return f;
}

// ---------------------------------------------------------------------------
// Classifier

ClassifierModel::ClassifierModel(ArchitectureSpec spec, std::vector<VaeModel> vaes)
    : spec_(std::move(spec)), vaes_(std::move(vaes)), hidden1_("mlp.dense1", spec_.mlp_input_dim, spec_.hidden_dims.first),
      hidden2_("mlp.dense2", spec_.hidden_dims.first, spec_.hidden_dims.second),
      output_("mlp.output", spec_.hidden_dims.second, spec_.output_dim) {
  nn::Rng rng(spec_.seed ^ 0xc1a55ULL);
  hidden1_.init(rng);
  hidden2_.init(rng);
  output_.init(rng);
}

ClassifierModel build_architecture(const ArchitectureSpec &spec, std::vector<VaeModel> vaes) {
  const std::string name = spec.name();
  if (vaes.size() != spec.vae_count()) {
    std::ostringstream msg;
    msg << name << " needs " << spec.vae_count() << " VAE(s), got " << vaes.size();
    fail(ErrorCode::configuration, msg.str());
  }
  std::size_t input = 0;
  for (const auto &v : vaes) {
    const auto &c = v.config();
    require(c.latent_dim == spec.vae_latent_dim(), ErrorCode::configuration,
            name + ": VAE latent size " + std::to_string(c.latent_dim) + " but architecture expects " +
                std::to_string(spec.vae_latent_dim()));
    const bool stacked = spec.kind == ArchitectureKind::early_fusing || spec.kind == ArchitectureKind::early_fusing_3d;
    require(stacked ? c.channels == kDelayedAntennas : c.channels == 1, ErrorCode::configuration,
            name + ": VAE has the wrong number of input channels");
    require(c.frames == vaes.front().config().frames && c.subcarriers == vaes.front().config().subcarriers,
            ErrorCode::configuration, name + ": VAEs disagree on the input resolution");
    input += c.latent_dim;
  }
  require(input == spec.mlp_input_dim, ErrorCode::configuration, name + ": MLP input does not match the latent sizes");
  return ClassifierModel(spec, std::move(vaes));
}

std::vector<double> ClassifierModel::features(const CsiWindow &window) const {
  switch (spec_.kind) {
  case ArchitectureKind::no_fusing: {
    const LatentCode code = window.channels == 1 ? vaes_[0].encode(window)
                                                 : vaes_[0].encode(select_channel(window, spec_.antenna_index));
    return latent_features(std::span(&code, 1));
  }
  case ArchitectureKind::early_fusing:
  case ArchitectureKind::early_fusing_3d: {
    const LatentCode code = vaes_[0].encode(window);
    return latent_features(std::span(&code, 1));
  }
  case ArchitectureKind::delayed_fusing: {
    require(window.channels == kDelayedAntennas, ErrorCode::contract, "delayed fusing needs a 4-antenna window");
    std::vector<LatentCode> codes;
    for (std::size_t a = 0; a < kDelayedAntennas; ++a) {
      codes.push_back(vaes_[a].encode(select_channel(window, a)));
    }
    return latent_features(codes);
  }
  }
  return {};
}

std::vector<double> ClassifierModel::evidence(std::span<const double> x) const {
  auto h1 = hidden1_.forward(x);
  nn::relu_inplace(h1);
  auto h2 = hidden2_.forward(h1);
  nn::relu_inplace(h2);
  auto o = output_.forward(h2);
  for (auto &v : o) {
    v = nn::softplus(v);
  }
  return o;
}

evidential::DirichletOutput ClassifierModel::predict_features(std::span<const double> x) const {
  return evidential::dirichlet_from_evidence(evidence(x));
}

evidential::DirichletOutput ClassifierModel::predict(const CsiWindow &window) const {
  return predict_features(features(window));
}

std::vector<nn::Param *> ClassifierModel::mlp_parameters() {
  return {&hidden1_.kernel, &hidden1_.bias, &hidden2_.kernel, &hidden2_.bias, &output_.kernel, &output_.bias};
}

std::vector<const nn::Param *> ClassifierModel::mlp_parameters() const {
  auto ps = const_cast<ClassifierModel *>(this)->mlp_parameters();
  return {ps.begin(), ps.end()};
}

void ClassifierModel::train(std::span<const std::vector<double>> features, std::span<const std::size_t> labels) {
  require(!features.empty() && features.size() == labels.size(), ErrorCode::precondition,
          "training features and labels must be non-empty and aligned");
  for (std::size_t i = 0; i < features.size(); ++i) {
    require(features[i].size() == spec_.mlp_input_dim, ErrorCode::contract, "feature vector has the wrong length");
    require(labels[i] < spec_.output_dim, ErrorCode::contract, "training label out of range");
  }
  auto params = mlp_parameters();
  nn::Adam adam(params, nn::AdamConfig{spec_.learning_rate});
  nn::Rng rng(spec_.seed ^ 0x7a11ULL);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<double>> eye;
  for (std::size_t k = 0; k < spec_.output_dim; ++k) {
    eye.push_back(evidential::one_hot(k, spec_.output_dim));
  }
  std::vector<double> grad_e(spec_.output_dim);
  loss_trace_.clear();

  for (std::size_t epoch = 0; epoch < spec_.epochs; ++epoch) {
    const double lambda = evidential::annealing_coefficient(epoch, spec_.annealing_step);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += spec_.batch_size) {
      const std::size_t stop = std::min(order.size(), start + spec_.batch_size);
      nn::zero_grads(params);
      for (std::size_t b = start; b < stop; ++b) {
        const auto &x = features[order[b]];
        auto h1 = hidden1_.forward(x);
        nn::relu_inplace(h1);
        auto h2 = hidden2_.forward(h1);
        nn::relu_inplace(h2);
        const auto o = output_.forward(h2);
        std::vector<double> e(o.size());
        for (std::size_t k = 0; k < o.size(); ++k) {
          e[k] = nn::softplus(o[k]);
        }
        const double loss = evidential::edl_sample_loss_and_grad(e, eye[labels[order[b]]], lambda, grad_e);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << spec_.name() << " training diverged at epoch " << epoch << "; epoch loss trace:";
          for (double l : loss_trace_) {
            msg << ' ' << l;
          }
          fail(ErrorCode::numeric, msg.str());
        }
        epoch_loss += loss;
        std::vector<double> go(o.size());
        for (std::size_t k = 0; k < o.size(); ++k) {
          go[k] = grad_e[k] * nn::sigmoid(o[k]);
        }
        auto g2 = output_.backward(h2, go);
        nn::relu_backward(h2, g2);
        auto g1 = hidden2_.backward(h1, g2);
        nn::relu_backward(h1, g1);
        (void)hidden1_.backward(x, g1);
      }
      adam.step(1.0 / static_cast<double>(stop - start));
    }
    loss_trace_.push_back(epoch_loss / static_cast<double>(features.size()));
  }
}

Archive ClassifierModel::to_archive() const {
  Archive a;
  a.meta["kind"] = "classifier";
  a.meta["spec"] = to_json(spec_);
  a.meta["loss_trace"] = loss_trace_;
  a.meta["vaes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < vaes_.size(); ++i) {
    a.meta["vaes"].push_back(vaes_[i].append_to(a, "vae" + std::to_string(i) + "/"));
  }
  for (const auto *p : mlp_parameters()) {
    a.arrays.push_back(NamedArray{p->name, p->shape, std::vector<float>(p->value.begin(), p->value.end())});
  }
  return a;
}

ClassifierModel ClassifierModel::from_archive(const Archive &archive) {
  require(archive.meta.value("kind", std::string()) == "classifier", ErrorCode::format,
          "checkpoint is not a classifier");
  const ArchitectureSpec spec = architecture_spec_from_json(archive.meta.at("spec"));
  std::vector<VaeModel> vaes;
  const auto &blocks = archive.meta.at("vaes");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    vaes.push_back(VaeModel::from_archive(archive, blocks[i], "vae" + std::to_string(i) + "/"));
  }
  ClassifierModel m = build_architecture(spec, std::move(vaes));
  for (auto *p : m.mlp_parameters()) {
    const auto &a = archive.array(p->name);
    require(a.shape == p->shape, ErrorCode::corruption, "array '" + a.name + "' has the wrong shape");
    std::copy(a.data.begin(), a.data.end(), p->value.begin());
  }
  m.loss_trace_ = archive.meta.value("loss_trace", std::vector<double>{});
  return m;
}

// ---------------------------------------------------------------------------

void train_classifier(ClassifierModel &model, std::span<const std::vector<double>> features,
                      std::span<const std::size_t> labels) {
  model.train(features, labels);
}

void train_classifier(ClassifierModel &model, std::span<const CsiWindow> windows) {
  std::vector<std::vector<double>> feats;
  std::vector<std::size_t> labels;
  feats.reserve(windows.size());
  for (const auto &w : windows) {
    require(w.label.in_distribution(), ErrorCode::precondition, "classifier training labels must be in-distribution");
    feats.push_back(model.features(w));
    labels.push_back(w.label.class_index());
  }
  model.train(feats, labels);
}

std::vector<evidential::DirichletOutput> predict(const ClassifierModel &model, std::span<const CsiWindow> windows) {
  std::vector<evidential::DirichletOutput> out;
  out.reserve(windows.size());
  for (const auto &w : windows) {
    out.push_back(model.predict(w));
  }
  return out;
}

} // namespace wifisense
