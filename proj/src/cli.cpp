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

#include "wifisense/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wifisense/analysis.hpp"
#include "wifisense/architectures.hpp"
#include "wifisense/checkpoint.hpp"
#include "wifisense/csi_data.hpp"
#include "wifisense/csi_synth.hpp"
#include "wifisense/error.hpp"
#include "wifisense/vae.hpp"

namespace wifisense {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

void write_text(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::io, "write failed for " + path.string());
}

void write_json(const fs::path &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path &path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    fail(ErrorCode::format, path.string() + ": " + e.what());
  }
}

// Arguments of the invocation being served, recorded in every manifest.
std::vector<std::string> g_command;

json base_manifest(const std::string &stage) {
  std::vector<std::string> command{"wifisense"};
  command.insert(command.end(), g_command.begin(), g_command.end());
  return {{"stage", stage}, {"tool", "wifisense"}, {"tool_version", kToolVersion}, {"command", command}};
}

fs::path sidecar(const fs::path &artifact) { return fs::path(artifact.string() + ".manifest.json"); }

std::string superscript(std::size_t n) {
  static const char *const kSup[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string out;
  for (char c : std::to_string(n)) {
    out += kSup[c - '0'];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split file and windows

struct Prepared {
  fs::path data_dir;
  json split;
  std::vector<CsiWindow> train;
  std::vector<CsiWindow> test;
  std::vector<CsiWindow> ood;
};

fs::path resolve_data(const std::string &flag) {
  if (!flag.empty()) {
    return flag;
  }
  if (const char *env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0') {
    return env;
  }
  fail(ErrorCode::precondition, std::string("no data directory: pass --data or set ") + kDataRootEnv);
}

Prepared prepare(const std::string &split_path, const std::string &data_flag) {
  Prepared p;
  p.split = read_json(split_path);
  p.data_dir = data_flag.empty() ? fs::path(p.split.at("data").get<std::string>()) : fs::path(data_flag);
  const std::string hash = dataset_hash(p.data_dir);
  require(hash == p.split.at("dataset_hash").get<std::string>(), ErrorCode::precondition,
          "dataset content changed since ingest (hash " + hash + ")");
  const auto manifest = read_manifest(p.data_dir);
  require(manifest.norm_constant.has_value(), ErrorCode::precondition, "dataset has not been ingested");
  const std::size_t win = p.split.at("window_frames").get<std::size_t>();
  const auto &classes = p.split.at("classes");
  for (const auto &rec : load_recordings(p.data_dir)) {
    const auto norm = normalize(rec, *manifest.norm_constant);
    const std::string name(rec.activity().name());
    if (!rec.activity().in_distribution()) {
      for (auto off : p.split.at("ood").value(name, std::vector<std::size_t>{})) {
        p.ood.push_back(extract_window(norm, off, win));
      }
      continue;
    }
    if (!classes.contains(name)) {
      continue;
    }
    for (auto off : classes.at(name).at("train").get<std::vector<std::size_t>>()) {
      p.train.push_back(extract_window(norm, off, win));
    }
    for (auto off : classes.at(name).at("test").get<std::vector<std::size_t>>()) {
      p.test.push_back(extract_window(norm, off, win));
    }
  }
  require(!p.train.empty(), ErrorCode::insufficient_data, "split has no training windows");
  return p;
}

std::vector<CsiWindow> channel_view(std::span<const CsiWindow> windows, std::optional<std::size_t> channel) {
  std::vector<CsiWindow> out;
  out.reserve(windows.size());
  for (const auto &w : windows) {
    out.push_back(channel ? select_channel(w, *channel) : w);
  }
  return out;
}

json dataset_block(const Prepared &p, const std::string &split_path) {
  return {{"path", fs::absolute(p.data_dir).lexically_normal().string()},
          {"hash", p.split.at("dataset_hash")},
          {"split", fs::absolute(split_path).lexically_normal().string()}};
}

const std::vector<CsiWindow> &select_set(const Prepared &p, const std::string &set) {
  if (set == "train") {
    return p.train;
  }
  if (set == "test") {
    return p.test;
  }
  if (set == "ood") {
    return p.ood;
  }
  fail(ErrorCode::precondition, "unknown window set '" + set + "'");
}

std::optional<std::size_t> vae_input_antenna(const Archive &archive) {
  const auto a = archive.meta.value("input_antenna", 0);
  return a > 0 ? std::optional<std::size_t>(static_cast<std::size_t>(a - 1)) : std::nullopt;
}

// ---------------------------------------------------------------------------
// Stages

struct SynthArgs {
  std::string out;
  double duration{80.0};
  double fps{150.0};
  std::size_t subcarriers{2048};
  std::size_t antennas{4};
  std::uint64_t seed{1};
  std::optional<double> noise_std;
  std::optional<double> scatter;
};

int do_synth(const SynthArgs &a, std::ostream &out) {
  auto cfg = synth::default_channel_config(a.subcarriers, a.antennas, a.seed);
  if (a.noise_std) {
    cfg.noise_std = *a.noise_std;
  }
  if (a.scatter) {
    cfg.scatter_coefficient = *a.scatter;
  }
  const auto recs = synth::standard_suite(cfg, a.duration, a.fps);
  fs::create_directories(a.out);
  write_dataset(a.out, recs);
  auto m = base_manifest("synth");
  m["parameters"] = {{"duration_s", a.duration},        {"frame_rate_hz", a.fps},
                     {"subcarriers", a.subcarriers},     {"antennas", a.antennas},
                     {"noise_std", cfg.noise_std},       {"scatter_coefficient", cfg.scatter_coefficient},
                     {"carrier_hz", cfg.carrier_hz},     {"bandwidth_hz", cfg.bandwidth_hz}};
  m["seeds"] = {{"synth", a.seed}};
  m["artifacts"] = {{"dataset", fs::absolute(a.out).lexically_normal().string()}};
  m["dataset_hash"] = dataset_hash(a.out);
  write_json(fs::path(a.out) / "synth.manifest.json", m);
  out << "wrote " << recs.size() << " recordings (" << recs.front().shape().frames << " frames x "
      << a.subcarriers << " subcarriers x " << a.antennas << " antennas) to " << a.out << "\n";
  return 0;
}

struct IngestArgs {
  std::string data;
  std::string out;
  double window_sec{3.0};
  std::size_t stride{1};
  double test_fraction{0.2};
  std::string policy{"chronological-tail"};
  std::uint64_t seed{0};
};

int do_ingest(const IngestArgs &a, std::ostream &out) {
  const fs::path dir = resolve_data(a.data);
  const auto policy = parse_split_policy(a.policy);
  require(a.stride >= 1, ErrorCode::precondition, "stride must be at least 1");
  auto recs = load_recordings(dir);
  const double norm = compute_norm_constant(recs);
  auto manifest = read_manifest(dir);
  manifest.norm_constant = norm;
  write_manifest(dir, manifest);

  std::optional<std::size_t> win;
  json classes = json::object();
  json ood = json::object();
  std::size_t n_train = 0, n_test = 0, n_ood = 0;
  for (const auto &rec : recs) {
    const std::size_t w = window_frames(rec.frame_rate_hz(), a.window_sec);
    require(!win || *win == w, ErrorCode::precondition, "recordings disagree on frame rate");
    win = w;
    const std::size_t n = window_count(rec.shape().frames, w, a.stride);
    const auto label = rec.activity();
    const std::string name(label.name());
    if (!label.in_distribution()) {
      std::vector<std::size_t> offs(n);
      for (std::size_t i = 0; i < n; ++i) {
        offs[i] = i * a.stride;
      }
      n_ood += n;
      ood[name] = offs;
      continue;
    }
    const auto idx = split_indices(n, a.test_fraction, policy, a.seed + kGolden * label.class_index());
    std::vector<std::size_t> tr, te;
    for (auto i : idx.train) {
      tr.push_back(i * a.stride);
    }
    for (auto i : idx.test) {
      te.push_back(i * a.stride);
    }
    n_train += tr.size();
    n_test += te.size();
    classes[name] = {{"train", tr}, {"test", te}};
  }
  require(win.has_value(), ErrorCode::insufficient_data, "dataset has no recordings");

  json split = base_manifest("ingest");
  split["data"] = fs::absolute(dir).lexically_normal().string();
  split["dataset_hash"] = dataset_hash(dir);
  split["norm_constant"] = norm;
  split["window_seconds"] = a.window_sec;
  split["window_frames"] = *win;
  split["stride_frames"] = a.stride;
  split["test_fraction"] = a.test_fraction;
  split["split_policy"] = to_string(policy);
  split["seeds"] = {{"split", a.seed}};
  split["classes"] = classes;
  split["ood"] = ood;
  const fs::path split_path = a.out.empty() ? dir / "split.json" : fs::path(a.out);
  write_json(split_path, split);
  out << "norm constant " << std::setprecision(9) << norm << "; windows: " << n_train << " train, " << n_test
      << " test, " << n_ood << " ood -> " << split_path.string() << "\n";
  return 0;
}

std::vector<ConvSpec> parse_conv(const std::string &text) {
  std::vector<ConvSpec> specs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ConvSpec c;
    char x1 = 0, x2 = 0;
    std::istringstream is(item);
    require(static_cast<bool>(is >> c.kernel_h >> x1 >> c.kernel_w >> x2 >> c.filters) && x1 == 'x' && x2 == 'x',
            ErrorCode::configuration, "conv layer must look like KHxKWxFILTERS, got '" + item + "'");
    specs.push_back(c);
  }
  require(!specs.empty(), ErrorCode::configuration, "empty conv specification");
  return specs;
}

struct TrainVaeArgs {
  std::string split;
  std::string data;
  std::string out;
  std::size_t antenna{0};
  std::size_t latent_dim{4};
  std::size_t epochs{50};
  std::size_t batch{128};
  double lr{1e-3};
  std::size_t mc_samples{1};
  std::size_t dense{16};
  std::optional<double> obs_variance;
  std::string conv;
  std::uint64_t seed{0};
};

int do_train_vae(const TrainVaeArgs &a, std::ostream &out) {
  const auto p = prepare(a.split, a.data);
  const auto &first = p.train.front();
  std::optional<std::size_t> channel;
  if (a.antenna > 0) {
    require(a.antenna <= first.channels, ErrorCode::range, "antenna out of range");
    channel = a.antenna - 1;
  }
  const std::size_t channels = channel ? 1 : first.channels;
  VaeConfig cfg;
  if (!a.conv.empty()) {
    cfg.frames = first.frames;
    cfg.subcarriers = first.subcarriers;
    cfg.conv_spec = parse_conv(a.conv);
    cfg.obs_variance = resolution_scaled_variance(cfg.frames, cfg.subcarriers);
  } else if (first.frames == 450 && first.subcarriers == 2048) {
    cfg = VaeConfig::paper();
  } else if (first.frames == 40 && first.subcarriers == 64) {
    cfg = VaeConfig::desk();
  } else {
    fail(ErrorCode::configuration, "no preset for " + std::to_string(first.frames) + "x" +
                                       std::to_string(first.subcarriers) + " windows; pass --conv");
  }
  cfg.channels = channels;
  cfg.latent_dim = a.latent_dim;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.mc_samples = a.mc_samples;
  cfg.dense_width = a.dense;
  cfg.seed = a.seed;
  if (a.obs_variance) {
    cfg.obs_variance = *a.obs_variance;
  }
  cfg.validate();

  const auto windows = channel_view(p.train, channel);
  const double norm = p.split.at("norm_constant").get<double>();
  const auto model = train_vae(windows, cfg, norm);
  auto archive = model.to_archive();
  archive.meta["input_antenna"] = a.antenna;
  write_archive(a.out, archive);

  auto m = base_manifest("train-vae");
  m["dataset"] = dataset_block(p, a.split);
  m["input"] = a.antenna > 0 ? json("antenna-" + std::to_string(a.antenna)) : json("all-antennas");
  m["hyperparameters"] = to_json(cfg);
  m["seeds"] = {{"vae", a.seed}};
  m["training_windows"] = windows.size();
  m["loss_trace"] = model.loss_trace();
  m["artifacts"] = {{"checkpoint", fs::absolute(a.out).lexically_normal().string()}};
  write_json(sidecar(a.out), m);
  out << "trained VAE on " << windows.size() << " windows; final loss " << std::setprecision(6)
      << model.loss_trace().back() << " -> " << a.out << "\n";
  return 0;
}

struct EncodeArgs {
  std::string split;
  std::string data;
  std::string vae;
  std::string set{"all"};
  std::string out;
};

int do_encode(const EncodeArgs &a, std::ostream &out) {
  const auto p = prepare(a.split, a.data);
  const auto archive = read_archive(a.vae);
  const auto model = VaeModel::from_archive(archive);
  const auto channel = vae_input_antenna(archive);
  std::ostringstream csv;
  csv << std::setprecision(9) << "set,label,offset";
  for (std::size_t j = 0; j < model.config().latent_vars(); ++j) {
    csv << ",mu" << j;
  }
  for (std::size_t j = 0; j < model.config().latent_vars(); ++j) {
    csv << ",sigma" << j;
  }
  csv << "\n";
  std::size_t rows = 0;
  for (const std::string set : {"train", "test", "ood"}) {
    if (a.set != "all" && a.set != set) {
      continue;
    }
    for (const auto &w : select_set(p, set)) {
      const auto code = model.encode(channel ? select_channel(w, *channel) : w);
      csv << set << ',' << w.label.name() << ',' << w.source_offset;
      for (double v : code.mu) {
        csv << ',' << v;
      }
      for (double v : code.sigma) {
        csv << ',' << v;
      }
      csv << "\n";
      ++rows;
    }
  }
  write_text(a.out, csv.str());
  auto m = base_manifest("encode");
  m["dataset"] = dataset_block(p, a.split);
  m["vae"] = fs::absolute(a.vae).lexically_normal().string();
  m["set"] = a.set;
  m["artifacts"] = {{"codes", fs::absolute(a.out).lexically_normal().string()}};
  write_json(sidecar(a.out), m);
  out << "encoded " << rows << " windows -> " << a.out << "\n";
  return 0;
}

struct TrainClfArgs {
  std::string split;
  std::string data;
  std::string arch;
  std::vector<std::string> vaes;
  std::string out;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<double> lr;
  std::optional<std::size_t> annealing_step;
  std::uint64_t seed{0};
};

int do_train_clf(const TrainClfArgs &a, std::ostream &out) {
  const auto p = prepare(a.split, a.data);
  auto spec = parse_architecture(a.arch, a.seed);
  if (a.epochs) {
    spec.epochs = *a.epochs;
  }
  if (a.batch) {
    spec.batch_size = *a.batch;
  }
  if (a.lr) {
    spec.learning_rate = *a.lr;
  }
  if (a.annealing_step) {
    spec.annealing_step = *a.annealing_step;
  }
  std::vector<VaeModel> vaes;
  json vae_paths = json::array();
  for (const auto &path : a.vaes) {
    vaes.push_back(VaeModel::from_archive(read_archive(path)));
    vae_paths.push_back(fs::absolute(path).lexically_normal().string());
  }
  auto model = build_architecture(spec, std::move(vaes));
  train_classifier(model, p.train);
  write_archive(a.out, model.to_archive());

  auto m = base_manifest("train-clf");
  m["dataset"] = dataset_block(p, a.split);
  m["architecture"] = spec.name();
  m["hyperparameters"] = to_json(spec);
  m["seeds"] = {{"classifier", a.seed}};
  m["vaes"] = vae_paths;
  m["loss_trace"] = model.loss_trace();
  m["artifacts"] = {{"checkpoint", fs::absolute(a.out).lexically_normal().string()}};
  write_json(sidecar(a.out), m);
  out << "trained " << spec.name() << " on " << p.train.size() << " windows (lr " << spec.learning_rate
      << ", annealing step " << spec.annealing_step << ") -> " << a.out << "\n";
  return 0;
}

struct ModelArgs {
  std::string split;
  std::string data;
  std::string model;
  std::string out_dir{"."};
};

std::vector<std::size_t> predicted_classes(std::span<const evidential::DirichletOutput> outs) {
  std::vector<std::size_t> v;
  for (const auto &o : outs) {
    v.push_back(o.predicted_class());
  }
  return v;
}

std::vector<std::size_t> class_labels(std::span<const CsiWindow> windows) {
  std::vector<std::size_t> v;
  for (const auto &w : windows) {
    v.push_back(w.label.class_index());
  }
  return v;
}

int do_eval(const ModelArgs &a, std::ostream &out) {
  const auto p = prepare(a.split, a.data);
  require(!p.test.empty(), ErrorCode::insufficient_data, "split has no test windows");
  const auto model = ClassifierModel::from_archive(read_archive(a.model));
  const auto outs = predict(model, p.test);
  const auto report = analysis::compute_metrics(predicted_classes(outs), class_labels(p.test));
  const fs::path dir(a.out_dir);
  write_json(dir / "metrics.json", analysis::to_json(report));
  write_text(dir / "confusion.csv", analysis::confusion_csv(report));
  auto m = base_manifest("eval");
  m["dataset"] = dataset_block(p, a.split);
  m["architecture"] = model.spec().name();
  m["model"] = fs::absolute(a.model).lexically_normal().string();
  m["artifacts"] = {{"metrics", (dir / "metrics.json").string()}, {"confusion", (dir / "confusion.csv").string()}};
  write_json(dir / "eval.manifest.json", m);
  out << std::left << std::setw(18) << "model" << std::right << std::setw(8) << "acc" << std::setw(8) << "prec"
      << std::setw(8) << "rec" << std::setw(8) << "f1" << "\n";
  out << analysis::table_row(model.spec().name(), report) << "\n";
  return 0;
}

struct OodArgs : ModelArgs {
  std::size_t bins{40};
  bool no_threshold{false};
};

int do_ood(const OodArgs &a, std::ostream &out) {
  const auto p = prepare(a.split, a.data);
  require(!p.test.empty() && !p.ood.empty(), ErrorCode::insufficient_data, "OOD needs test and ood windows");
  const auto model = ClassifierModel::from_archive(read_archive(a.model));
  const auto report = analysis::ood_report(model, p.test, p.ood, !a.no_threshold);
  const fs::path dir(a.out_dir);
  write_json(dir / "ood.json", analysis::to_json(report));
  write_text(dir / "ood_hist.svg", analysis::ood_histogram_svg(report, a.bins));
  auto m = base_manifest("ood");
  m["dataset"] = dataset_block(p, a.split);
  m["architecture"] = model.spec().name();
  m["model"] = fs::absolute(a.model).lexically_normal().string();
  m["artifacts"] = {{"report", (dir / "ood.json").string()}, {"histogram", (dir / "ood_hist.svg").string()}};
  write_json(dir / "ood.manifest.json", m);
  out << std::setprecision(4) << "mean strength in " << report.mean_strength_in << ", ood "
      << report.mean_strength_ood << "; median log pseudo-count in " << report.median_log_pseudocount_in << ", ood "
      << report.median_log_pseudocount_ood << "\n";
  if (report.threshold) {
    out << "threshold S < " << *report.threshold << ": detection " << report.detection_rate_at_threshold
        << ", false alarm " << report.false_alarm_rate_at_threshold << "\n";
  }
  return 0;
}

std::vector<std::string> feature_names_for(const ClassifierModel &model) {
  const auto &spec = model.spec();
  const std::size_t vars = spec.vae_latent_dim() / 2;
  switch (spec.kind) {
  case ArchitectureKind::delayed_fusing: {
    std::vector<std::string> tags;
    for (std::size_t i = 1; i <= kDelayedAntennas; ++i) {
      tags.push_back(superscript(i));
    }
    return analysis::latent_feature_names(vars, tags);
  }
  case ArchitectureKind::no_fusing: {
    const std::string tags[] = {superscript(spec.antenna_index + 1)};
    return analysis::latent_feature_names(vars, tags);
  }
  default: {
    const std::string tags[] = {""};
    return analysis::latent_feature_names(vars, tags);
  }
  }
}

struct TreeArgs : ModelArgs {
  std::size_t max_depth{3};
  std::string criterion{"gini"};
  std::uint64_t seed{0};
};

int do_tree(const TreeArgs &a, std::ostream &out) {
  const auto p = prepare(a.split, a.data);
  require(!p.test.empty(), ErrorCode::insufficient_data, "split has no test windows");
  require(a.criterion == "gini" || a.criterion == "entropy", ErrorCode::precondition,
          "criterion must be gini or entropy");
  const auto model = ClassifierModel::from_archive(read_archive(a.model));
  std::vector<std::vector<double>> train_x, test_x;
  for (const auto &w : p.train) {
    train_x.push_back(model.features(w));
  }
  for (const auto &w : p.test) {
    test_x.push_back(model.features(w));
  }
  const auto tree = analysis::fit_surrogate_tree(
      train_x, class_labels(p.train), a.max_depth, a.seed,
      a.criterion == "gini" ? analysis::ImpurityCriterion::gini : analysis::ImpurityCriterion::entropy);
  std::vector<std::size_t> tree_pred, mlp_pred;
  for (const auto &x : test_x) {
    tree_pred.push_back(tree.predict(x));
    mlp_pred.push_back(model.predict_features(x).predicted_class());
  }
  const auto labels = class_labels(p.test);
  const auto tree_report = analysis::compute_metrics(tree_pred, labels);
  const auto mlp_report = analysis::compute_metrics(mlp_pred, labels);
  const auto names = feature_names_for(model);
  const fs::path dir(a.out_dir);
  auto tj = analysis::export_tree_json(tree, names);
  tj["test_metrics"] = analysis::to_json(tree_report);
  write_json(dir / "tree.json", tj);
  write_text(dir / "tree.txt", analysis::export_tree_text(tree, names));
  auto m = base_manifest("tree");
  m["dataset"] = dataset_block(p, a.split);
  m["architecture"] = model.spec().name();
  m["model"] = fs::absolute(a.model).lexically_normal().string();
  m["hyperparameters"] = {{"max_depth", a.max_depth}, {"criterion", a.criterion}};
  m["seeds"] = {{"tree", a.seed}};
  m["artifacts"] = {{"tree_json", (dir / "tree.json").string()}, {"tree_text", (dir / "tree.txt").string()}};
  write_json(dir / "tree.manifest.json", m);
  out << analysis::export_tree_text(tree, names);
  out << std::fixed << std::setprecision(3) << "tree accuracy " << tree_report.accuracy << " (depth " << tree.depth()
      << ", " << tree.leaf_count() << " leaves); MLP accuracy " << mlp_report.accuracy << "\n";
  return 0;
}

struct PlotArgs {
  std::string split;
  std::string data;
  std::string model;
  std::string vae;
  std::string set{"test"};
  std::string out_dir{"."};
};

int do_plot(const PlotArgs &a, std::ostream &out) {
  require(a.model.empty() != a.vae.empty(), ErrorCode::precondition, "pass exactly one of --model or --vae");
  const auto p = prepare(a.split, a.data);
  std::vector<CsiWindow> windows = select_set(p, a.set);
  if (a.set != "ood") {
    windows.insert(windows.end(), p.ood.begin(), p.ood.end());
  }
  struct Job {
    std::string stem;
    const VaeModel *vae;
    std::optional<std::size_t> channel;
  };
  std::vector<Job> jobs;
  std::optional<ClassifierModel> clf;
  std::optional<VaeModel> single;
  if (!a.model.empty()) {
    clf.emplace(ClassifierModel::from_archive(read_archive(a.model)));
    const auto &spec = clf->spec();
    for (std::size_t i = 0; i < clf->vaes().size(); ++i) {
      std::optional<std::size_t> ch;
      std::string tag = "fused";
      if (spec.kind == ArchitectureKind::delayed_fusing) {
        ch = i;
      } else if (spec.kind == ArchitectureKind::no_fusing) {
        ch = spec.antenna_index;
      }
      if (ch) {
        tag = "antenna" + std::to_string(*ch + 1);
      }
      jobs.push_back({"latent_" + tag, &clf->vaes()[i], ch});
    }
  } else {
    const auto archive = read_archive(a.vae);
    single.emplace(VaeModel::from_archive(archive));
    const auto ch = vae_input_antenna(archive);
    jobs.push_back({ch ? "latent_antenna" + std::to_string(*ch + 1) : "latent_fused", &*single, ch});
  }
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  json artifacts = json::array();
  for (const auto &job : jobs) {
    std::vector<LatentCode> codes;
    std::vector<ActivityLabel> labels;
    for (const auto &w : windows) {
      codes.push_back(job.vae->encode(job.channel ? select_channel(w, *job.channel) : w));
      labels.push_back(w.label);
    }
    const std::string stem = (dir / job.stem).string();
    const auto ex = analysis::export_latent_scatter(codes, labels, stem, job.stem);
    artifacts.push_back(stem + ".csv");
    if (ex.plot_written) {
      artifacts.push_back(stem + ".svg");
    }
    out << "wrote " << ex.rows << " points -> " << stem << (ex.plot_written ? ".csv/.svg" : ".csv") << "\n";
  }
  auto m = base_manifest("plot");
  m["dataset"] = dataset_block(p, a.split);
  m["source"] = fs::absolute(a.model.empty() ? a.vae : a.model).lexically_normal().string();
  m["set"] = a.set;
  m["artifacts"] = artifacts;
  write_json(dir / "plot.manifest.json", m);
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Wi-Fi CSI activity recognition with VAE latents and evidential classifiers", "wifisense"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  g_command = args;

  SynthArgs synth_a;
  auto *synth = app.add_subcommand("synth", "Generate a synthetic multi-antenna CSI dataset");
  synth->add_option("--out", synth_a.out, "Output dataset directory")->required();
  synth->add_option("--duration", synth_a.duration, "Seconds per activity")->capture_default_str();
  synth->add_option("--fps", synth_a.fps, "Frames per second")->capture_default_str();
  synth->add_option("--subcarriers", synth_a.subcarriers, "Subcarriers")->capture_default_str();
  synth->add_option("--antennas", synth_a.antennas, "Receive antennas")->capture_default_str();
  synth->add_option("--seed", synth_a.seed, "Synthesis seed")->capture_default_str();
  synth->add_option("--noise-std", synth_a.noise_std, "Magnitude noise standard deviation");
  synth->add_option("--scatter", synth_a.scatter, "Moving scatterer coefficient");

  IngestArgs ingest_a;
  auto *ingest = app.add_subcommand("ingest", "Normalize a dataset and write the window split");
  ingest->add_option("--data", ingest_a.data, "Dataset directory (default $WIFISENSE_DATA_ROOT)");
  ingest->add_option("--out", ingest_a.out, "Split file (default <data>/split.json)");
  ingest->add_option("--window-sec", ingest_a.window_sec, "Window length in seconds")->capture_default_str();
  ingest->add_option("--stride", ingest_a.stride, "Window stride in frames")->capture_default_str();
  ingest->add_option("--test-fraction", ingest_a.test_fraction, "Per-class test fraction")->capture_default_str();
  ingest->add_option("--split", ingest_a.policy, "chronological-tail or random")->capture_default_str();
  ingest->add_option("--seed", ingest_a.seed, "Split seed")->capture_default_str();

  TrainVaeArgs vae_a;
  auto *train_vae_cmd = app.add_subcommand("train-vae", "Train one VAE on the training windows");
  train_vae_cmd->add_option("--split", vae_a.split, "Split file from ingest")->required();
  train_vae_cmd->add_option("--data", vae_a.data, "Override the dataset directory");
  train_vae_cmd->add_option("--out", vae_a.out, "Checkpoint path")->required();
  train_vae_cmd->add_option("--antenna", vae_a.antenna, "1-based antenna; 0 stacks all antennas")
      ->capture_default_str();
  train_vae_cmd->add_option("--latent-dim", vae_a.latent_dim, "Latent parameter count J")->capture_default_str();
  train_vae_cmd->add_option("--epochs", vae_a.epochs)->capture_default_str();
  train_vae_cmd->add_option("--batch", vae_a.batch)->capture_default_str();
  train_vae_cmd->add_option("--lr", vae_a.lr)->capture_default_str();
  train_vae_cmd->add_option("--mc-samples", vae_a.mc_samples, "Draws per ELBO estimate")->capture_default_str();
  train_vae_cmd->add_option("--dense", vae_a.dense, "Bottleneck dense width")->capture_default_str();
  train_vae_cmd->add_option("--obs-variance", vae_a.obs_variance, "Gaussian observation variance");
  train_vae_cmd->add_option("--conv", vae_a.conv, "Encoder convs, e.g. 5x8x32,5x8x32,2x4x32");
  train_vae_cmd->add_option("--seed", vae_a.seed)->capture_default_str();

  EncodeArgs enc_a;
  auto *encode = app.add_subcommand("encode", "Write latent codes of windows as CSV");
  encode->add_option("--split", enc_a.split)->required();
  encode->add_option("--data", enc_a.data);
  encode->add_option("--vae", enc_a.vae, "VAE checkpoint")->required();
  encode->add_option("--set", enc_a.set, "train, test, ood or all")->capture_default_str();
  encode->add_option("--out", enc_a.out, "CSV path")->required();

  TrainClfArgs clf_a;
  auto *train_clf = app.add_subcommand("train-clf", "Train an evidential classifier on frozen VAEs");
  train_clf->add_option("--split", clf_a.split)->required();
  train_clf->add_option("--data", clf_a.data);
  train_clf->add_option("--arch", clf_a.arch, "Architecture name")->required();
  train_clf->add_option("--vae", clf_a.vaes, "VAE checkpoints in antenna order")->required();
  train_clf->add_option("--out", clf_a.out, "Checkpoint path")->required();
  train_clf->add_option("--epochs", clf_a.epochs);
  train_clf->add_option("--batch", clf_a.batch);
  train_clf->add_option("--lr", clf_a.lr);
  train_clf->add_option("--annealing-step", clf_a.annealing_step);
  train_clf->add_option("--seed", clf_a.seed)->capture_default_str();

  ModelArgs eval_a;
  auto *eval = app.add_subcommand("eval", "Score a classifier on the test windows");
  eval->add_option("--split", eval_a.split)->required();
  eval->add_option("--data", eval_a.data);
  eval->add_option("--model", eval_a.model, "Classifier checkpoint")->required();
  eval->add_option("--out-dir", eval_a.out_dir)->capture_default_str();

  OodArgs ood_a;
  auto *ood = app.add_subcommand("ood", "Compare evidence on in-distribution and unseen activities");
  ood->add_option("--split", ood_a.split)->required();
  ood->add_option("--data", ood_a.data);
  ood->add_option("--model", ood_a.model)->required();
  ood->add_option("--out-dir", ood_a.out_dir)->capture_default_str();
  ood->add_option("--bins", ood_a.bins)->capture_default_str();
  ood->add_flag("--no-threshold", ood_a.no_threshold, "Skip threshold selection");

  TreeArgs tree_a;
  auto *tree = app.add_subcommand("tree", "Fit a shallow decision tree on classifier features");
  tree->add_option("--split", tree_a.split)->required();
  tree->add_option("--data", tree_a.data);
  tree->add_option("--model", tree_a.model)->required();
  tree->add_option("--out-dir", tree_a.out_dir)->capture_default_str();
  tree->add_option("--max-depth", tree_a.max_depth)->capture_default_str();
  tree->add_option("--criterion", tree_a.criterion, "gini or entropy")->capture_default_str();
  tree->add_option("--seed", tree_a.seed)->capture_default_str();

  PlotArgs plot_a;
  auto *plot = app.add_subcommand("plot", "Export latent scatter plots");
  plot->add_option("--split", plot_a.split)->required();
  plot->add_option("--data", plot_a.data);
  plot->add_option("--model", plot_a.model, "Classifier checkpoint (one plot per VAE)");
  plot->add_option("--vae", plot_a.vae, "Single VAE checkpoint");
  plot->add_option("--set", plot_a.set, "train, test or ood; squat windows are always added")->capture_default_str();
  plot->add_option("--out-dir", plot_a.out_dir)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return do_synth(synth_a, out);
    }
    if (ingest->parsed()) {
      return do_ingest(ingest_a, out);
    }
    if (train_vae_cmd->parsed()) {
      return do_train_vae(vae_a, out);
    }
    if (encode->parsed()) {
      return do_encode(enc_a, out);
    }
    if (train_clf->parsed()) {
      return do_train_clf(clf_a, out);
    }
    if (eval->parsed()) {
      return do_eval(eval_a, out);
    }
    if (ood->parsed()) {
      return do_ood(ood_a, out);
    }
    if (tree->parsed()) {
      return do_tree(tree_a, out);
    }
    if (plot->parsed()) {
      return do_plot(plot_a, out);
    }
  } catch (const Error &e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(int argc, const char *const *argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run_cli(args, std::cout, std::cerr);
}

} // namespace wifisense
