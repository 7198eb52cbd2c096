/*
 * Copyright 2026 The ecc-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ecc/checkpoint.hpp"

#include <fstream>
#include <json.hpp>

namespace ecc {

using nlohmann::ordered_json;

namespace {

ordered_json layer_json(const DenseLayer<double>& l) {
  ordered_json j;
  j["in"] = l.in_dim();
  j["out"] = l.out_dim();
  j["activation"] = to_string(l.activation);
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(l.weights.size()));
  for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
  j["weights"] = w;
  j["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
  return j;
}

DenseLayer<double> layer_from(const ordered_json& j) {
  const auto in = j.at("in").get<Eigen::Index>();
  const auto out = j.at("out").get<Eigen::Index>();
  const auto act = j.at("activation").get<std::string>();
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  if (in < 1 || out < 1 || static_cast<Eigen::Index>(w.size()) != in * out || static_cast<Eigen::Index>(b.size()) != out)
    throw ParseError("checkpoint: layer parameter count does not match its shape");
  if (act != "relu" && act != "identity") throw ParseError("checkpoint: unknown activation '" + act + "'");
  DenseLayer<double> l{MatXd(out, in), VecXd(out), act == "relu" ? Activation::Relu : Activation::Identity};
  for (Eigen::Index r = 0; r < out; ++r)
    for (Eigen::Index c = 0; c < in; ++c) l.weights(r, c) = w[static_cast<std::size_t>(r * in + c)];
  for (Eigen::Index i = 0; i < out; ++i) l.bias(i) = b[static_cast<std::size_t>(i)];
  return l;
}

ordered_json lif_json(const LifConfig<double>& c) {
  return {{"tau", c.tau},
          {"v_threshold", c.v_threshold},
          {"v_reset", c.v_reset},
          {"surrogate_width", c.surrogate_width},
          {"time_steps", c.time_steps},
          {"surrogate", to_string(c.mode)}};
}

LifConfig<double> lif_from(const ordered_json& j) {
  LifConfig<double> c;
  c.tau = j.at("tau").get<double>();
  c.v_threshold = j.at("v_threshold").get<double>();
  c.v_reset = j.at("v_reset").get<double>();
  c.surrogate_width = j.at("surrogate_width").get<double>();
  c.time_steps = j.at("time_steps").get<int>();
  const auto mode = j.at("surrogate").get<std::string>();
  if (mode != "hard" && mode != "soft") throw ParseError("checkpoint: unknown surrogate mode '" + mode + "'");
  c.mode = mode == "hard" ? SurrogateMode::Hard : SurrogateMode::Soft;
  return c;
}

// Temp file plus rename: a crash never leaves a truncated checkpoint behind.
void write(const ordered_json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("save_checkpoint: cannot write " + tmp.string());
    out << j.dump(1) << '\n';
    if (!out.flush()) throw ArgumentError("save_checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ordered_json read(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_checkpoint: cannot open " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("version")) throw ParseError(path.string() + ": missing version tag");
  if (j["version"] != kCheckpointVersion)
    throw ParseError(path.string() + ": unsupported checkpoint version " + j["version"].dump());
  if (j.value("kind", std::string()) != kind)
    throw ParseError(path.string() + ": expected a '" + kind + "' checkpoint");
  return j;
}

template <typename Fn>
auto guarded(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_checkpoint(const MlpModel<double>& model, std::uint64_t seed, const std::filesystem::path& path) {
  ordered_json j;
  j["version"] = kCheckpointVersion;
  j["kind"] = "mlp";
  j["seed"] = seed;
  j["arch"] = model.arch();
  j["feature_tap_index"] = model.feature_tap_index;
  j["layers"] = ordered_json::array();
  for (const auto& l : model.layers) j["layers"].push_back(layer_json(l));
  write(j, path);
}

void save_checkpoint(const EdgeClassifier& edge, std::uint64_t seed, const std::filesystem::path& path) {
  const auto& m = edge.snn;
  ordered_json j;
  j["version"] = kCheckpointVersion;
  j["kind"] = "snn";
  j["seed"] = seed;
  std::vector<Eigen::Index> arch{m.input_dim()};
  for (const auto& l : m.layers) arch.push_back(l.synapses.out_dim());
  arch.push_back(m.num_classes());
  j["arch"] = arch;
  j["tap_layer_index"] = m.tap_layer_index;
  j["classes"] = edge.classes;
  j["lif"] = lif_json(m.layers.front().lif);
  j["layers"] = ordered_json::array();
  for (const auto& l : m.layers) j["layers"].push_back(layer_json(l.synapses));
  j["readout"] = layer_json(m.readout);
  write(j, path);
}

MlpCheckpoint load_mlp_checkpoint(const std::filesystem::path& path) {
  const auto j = read(path, "mlp");
  return guarded(path, [&] {
    MlpCheckpoint c;
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& l : j.at("layers")) c.model.layers.push_back(layer_from(l));
    if (c.model.layers.empty()) throw ParseError("checkpoint: no layers");
    c.model.feature_tap_index = j.at("feature_tap_index").get<std::size_t>();
    if (c.model.feature_tap_index >= c.model.layers.size()) throw ParseError("checkpoint: tap index out of range");
    if (j.at("arch").get<std::vector<Eigen::Index>>() != c.model.arch())
      throw ParseError("checkpoint: arch does not match the stored layers");
    for (std::size_t i = 1; i < c.model.layers.size(); ++i)
      if (c.model.layers[i].in_dim() != c.model.layers[i - 1].out_dim())
        throw ParseError("checkpoint: layer widths do not chain");
    return c;
  });
}

EdgeCheckpoint load_edge_checkpoint(const std::filesystem::path& path) {
  const auto j = read(path, "snn");
  return guarded(path, [&] {
    EdgeCheckpoint c;
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto lif = lif_from(j.at("lif"));
    for (const auto& l : j.at("layers")) c.model.snn.layers.push_back({layer_from(l), lif});
    c.model.snn.readout = layer_from(j.at("readout"));
    c.model.snn.tap_layer_index = j.at("tap_layer_index").get<std::size_t>();
    c.model.classes = j.at("classes").get<std::vector<int>>();
    c.model.snn.validate();
    if (static_cast<Eigen::Index>(c.model.classes.size()) != c.model.snn.num_classes())
      throw ParseError("checkpoint: class list does not match the readout width");
    std::vector<Eigen::Index> arch{c.model.snn.input_dim()};
    for (const auto& l : c.model.snn.layers) arch.push_back(l.synapses.out_dim());
    arch.push_back(c.model.snn.num_classes());
    if (j.at("arch").get<std::vector<Eigen::Index>>() != arch)
      throw ParseError("checkpoint: arch does not match the stored layers");
    return c;
  });
}

}  // namespace ecc
