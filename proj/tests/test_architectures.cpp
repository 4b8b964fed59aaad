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

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "wifisense/architectures.hpp"
#include "wifisense/checkpoint.hpp"

using namespace wifisense;

namespace {

std::vector<VaeModel> tiny_vaes(std::size_t count, std::size_t channels, std::size_t latent) {
  std::vector<VaeModel> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto c = wstest::miniature_config(11 + i);
    c.channels = channels;
    c.latent_dim = latent;
    out.emplace_back(c, 1.0);
  }
  return out;
}

ClassifierModel tiny_model(const std::string &name, std::uint64_t seed = 0) {
  const auto spec = parse_architecture(name, seed);
  const bool stacked = spec.kind == ArchitectureKind::early_fusing || spec.kind == ArchitectureKind::early_fusing_3d;
  return build_architecture(spec, tiny_vaes(spec.vae_count(), stacked ? 4 : 1, spec.vae_latent_dim()));
}

std::vector<double> manual_mlp(const ClassifierModel &m, std::span<const double> x) {
  const auto ps = m.mlp_parameters();
  std::vector<double> h(x.begin(), x.end());
  for (std::size_t layer = 0; layer < 3; ++layer) {
    const auto &w = *ps[2 * layer];
    const auto &b = *ps[2 * layer + 1];
    const std::size_t in = w.shape[0], out = w.shape[1];
    std::vector<double> next(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b.value[o];
      for (std::size_t i = 0; i < in; ++i) {
        acc += h[i] * w.value[i * out + o];
      }
      next[o] = layer < 2 ? std::max(0.0, acc) : std::log1p(std::exp(acc));
    }
    h = next;
  }
  return h;
}

/// Five well-separated Gaussian clusters in `dim` dimensions.
void clusters(std::size_t dim, std::size_t per_class, std::uint64_t seed, std::vector<std::vector<double>> &x,
              std::vector<std::size_t> &y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.15);
  for (std::size_t i = 0; i < per_class * kNumClasses; ++i) {
    const std::size_t k = i % kNumClasses;
    std::vector<double> v(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = (d % kNumClasses == k ? 1.0 : 0.0) + n(rng);
    }
    x.push_back(v);
    y.push_back(k);
  }
}

} // namespace

TEST_SUITE("architectures") {

TEST_CASE("published hyperparameters") {
  struct Row {
    const char *name;
    std::size_t in, h1, h2;
    double lr;
    std::size_t step, latent, vaes;
  };
  const Row rows[] = {{"no-fusing-1", 4, 4, 8, 0.01, 22, 4, 1},    {"no-fusing-4", 4, 4, 8, 0.01, 22, 4, 1},
                      {"early-fusing", 4, 4, 8, 0.001, 22, 4, 1},  {"early-fusing-3d", 6, 4, 8, 0.001, 22, 6, 1},
                      {"delayed-fusing", 16, 16, 8, 0.01, 3, 4, 4}};
  for (const auto &r : rows) {
    CAPTURE(r.name);
    const auto s = parse_architecture(r.name);
    CHECK(s.name() == r.name);
    CHECK(s.mlp_input_dim == r.in);
    CHECK(s.hidden_dims.first == r.h1);
    CHECK(s.hidden_dims.second == r.h2);
    CHECK(s.output_dim == 5);
    CHECK(s.learning_rate == r.lr);
    CHECK(s.annealing_step == r.step);
    CHECK(s.epochs == 50);
    CHECK(s.batch_size == 128);
    CHECK(s.vae_latent_dim() == r.latent);
    CHECK(s.vae_count() == r.vaes);
  }
  CHECK(parse_architecture("no-fusing-3").antenna_index == 2);
  CHECK(all_architectures().size() == 7);
  WS_CHECK_ERROR(parse_architecture("no-fusing-5"), ErrorCode::configuration);
  WS_CHECK_ERROR(parse_architecture("late-fusing"), ErrorCode::configuration);
}

TEST_CASE("spec JSON round trip") {
  for (const auto &s : all_architectures(9)) {
    auto copy = s;
    copy.epochs = 7;
    const auto back = architecture_spec_from_json(to_json(copy));
    CHECK(back.name() == copy.name());
    CHECK(back.epochs == 7);
    CHECK(back.learning_rate == copy.learning_rate);
    CHECK(back.annealing_step == copy.annealing_step);
    CHECK(back.seed == 9);
    CHECK(back.hidden_dims == copy.hidden_dims);
  }
  WS_CHECK_ERROR(architecture_spec_from_json(nlohmann::json{{"architecture", "delayed-fusing"}, {"hidden_dims", {1}}}),
                 ErrorCode::format);
}

TEST_CASE("wiring validation") {
  const auto delayed = parse_architecture("delayed-fusing");
  WS_CHECK_ERROR(build_architecture(delayed, tiny_vaes(3, 1, 4)), ErrorCode::configuration);
  WS_CHECK_ERROR(build_architecture(delayed, tiny_vaes(4, 1, 6)), ErrorCode::configuration);
  WS_CHECK_ERROR(build_architecture(delayed, tiny_vaes(4, 4, 4)), ErrorCode::configuration);
  const auto early = parse_architecture("early-fusing");
  WS_CHECK_ERROR(build_architecture(early, tiny_vaes(1, 1, 4)), ErrorCode::configuration);
  const auto early3d = parse_architecture("early-fusing-3d");
  WS_CHECK_ERROR(build_architecture(early3d, tiny_vaes(1, 4, 4)), ErrorCode::configuration);
  CHECK_NOTHROW((void)build_architecture(early3d, tiny_vaes(1, 4, 6)));

  auto mixed = tiny_vaes(4, 1, 4);
  auto other = wstest::miniature_config(3);
  other.frames = 20;
  mixed[3] = VaeModel(other, 1.0);
  WS_CHECK_ERROR(build_architecture(delayed, std::move(mixed)), ErrorCode::configuration);
}

TEST_CASE("latent features concatenate mu then sigma per code") {
  const std::vector<LatentCode> codes{{{1, 2}, {3, 4}}, {{5, 6}, {7, 8}}};
  CHECK(latent_features(codes) == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  WS_CHECK_ERROR(latent_features(std::vector<LatentCode>{}), ErrorCode::contract);
}

TEST_CASE("delayed fusing encodes each antenna with its own VAE") {
  const auto model = tiny_model("delayed-fusing", 1);
  const auto w = wstest::random_window(10, 16, 4, 5);
  std::vector<double> expected;
  for (std::size_t a = 0; a < 4; ++a) {
    const auto code = model.vaes()[a].encode(select_channel(w, a));
    expected.insert(expected.end(), code.mu.begin(), code.mu.end());
    expected.insert(expected.end(), code.sigma.begin(), code.sigma.end());
  }
  CHECK(model.features(w) == expected);
  WS_CHECK_ERROR(model.features(wstest::random_window(10, 16, 1, 5)), ErrorCode::contract);
}

TEST_CASE("no fusing reads its own antenna") {
  const auto model = tiny_model("no-fusing-3");
  const auto w = wstest::random_window(10, 16, 4, 6);
  CHECK(model.features(w) == model.features(select_channel(w, 2)));
  CHECK(model.features(w).size() == 4);
}

TEST_CASE("early fusing encodes the stacked window") {
  const auto model = tiny_model("early-fusing-3d");
  const auto w = wstest::random_window(10, 16, 4, 7);
  CHECK(model.features(w).size() == 6);
}

TEST_CASE("evidence matches a hand-written forward pass") {
  const auto model = tiny_model("delayed-fusing", 2);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(16);
    for (auto &v : x) {
      v = n(rng);
    }
    const auto e = model.evidence(x);
    const auto ref = manual_mlp(model, x);
    REQUIRE(e.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(e[k] >= 0.0);
      CHECK(e[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    }
    const auto out = model.predict_features(x);
    CHECK(out.uncertainty == doctest::Approx(5.0 / out.strength));
  }
}

TEST_CASE("training separates clustered features and is deterministic") {
  std::vector<std::vector<double>> x, xt;
  std::vector<std::size_t> y, yt;
  clusters(16, 100, 1, x, y);
  clusters(16, 40, 2, xt, yt);
  auto a = tiny_model("delayed-fusing", 4);
  auto b = tiny_model("delayed-fusing", 4);
  train_classifier(a, x, y);
  train_classifier(b, x, y);
  REQUIRE(a.loss_trace().size() == 50);
  CHECK(a.loss_trace() == b.loss_trace());
  CHECK(a.loss_trace().back() < a.loss_trace().front());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xt.size(); ++i) {
    correct += a.predict_features(xt[i]).predicted_class() == yt[i];
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(xt.size()) > 0.95);

  WS_CHECK_ERROR(train_classifier(a, std::vector<std::vector<double>>{{1.0}}, std::vector<std::size_t>{0}),
                 ErrorCode::contract);
  WS_CHECK_ERROR(train_classifier(a, std::vector<std::vector<double>>(1, std::vector<double>(16)),
                                  std::vector<std::size_t>{5}),
                 ErrorCode::contract);
}

TEST_CASE("training from windows leaves the VAEs frozen") {
  auto spec = parse_architecture("no-fusing-1", 3);
  spec.epochs = 3;
  auto model = build_architecture(spec, tiny_vaes(1, 1, 4));
  std::vector<std::vector<double>> before;
  for (const auto *p : model.vaes()[0].parameters()) {
    before.push_back(p->value);
  }
  std::vector<CsiWindow> windows;
  for (std::size_t i = 0; i < 20; ++i) {
    windows.push_back(wstest::random_window(10, 16, 4, 100 + i, label_from_class_index(i % 5).activity));
  }
  train_classifier(model, windows);
  std::size_t i = 0;
  for (const auto *p : model.vaes()[0].parameters()) {
    CHECK(p->value == before[i++]);
  }
  windows.push_back(wstest::random_window(10, 16, 4, 1, Activity::squat));
  WS_CHECK_ERROR(train_classifier(model, windows), ErrorCode::precondition);
}

TEST_CASE("archive round trip") {
  auto spec = parse_architecture("delayed-fusing", 5);
  spec.epochs = 4;
  auto model = build_architecture(spec, tiny_vaes(4, 1, 4));
  std::vector<std::vector<double>> x;
  std::vector<std::size_t> y;
  clusters(16, 10, 3, x, y);
  train_classifier(model, x, y);

  const auto once = ClassifierModel::from_archive(deserialize(serialize(model.to_archive())));
  const auto twice = ClassifierModel::from_archive(deserialize(serialize(once.to_archive())));
  CHECK(serialize(once.to_archive()) == serialize(twice.to_archive()));
  CHECK(once.spec().name() == "delayed-fusing");
  CHECK(once.spec().epochs == 4);
  CHECK(once.loss_trace() == model.loss_trace());
  const auto w = wstest::random_window(10, 16, 4, 9);
  const auto p0 = model.predict(w);
  const auto p1 = once.predict(w);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(p1.alpha[k] == doctest::Approx(p0.alpha[k]).epsilon(1e-5));
  }

  Archive vae_only = model.vaes()[0].to_archive();
  WS_CHECK_ERROR(ClassifierModel::from_archive(vae_only), ErrorCode::format);
  auto broken = model.to_archive();
  for (auto &a : broken.arrays) {
    if (a.name == "mlp.output.kernel") {
      a.shape = {4, 5};
      a.data.resize(20);
    }
  }
  WS_CHECK_ERROR(ClassifierModel::from_archive(broken), ErrorCode::corruption);
}

} // TEST_SUITE
