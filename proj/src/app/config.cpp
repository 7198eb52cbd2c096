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

#include "ecc/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ecc::app {

namespace {

class Section {
 public:
  Section(const YAML::Node& node, std::string path, const std::string& origin)
      : node_(node), path_(std::move(path)), origin_(origin) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, "must be a mapping");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v || v.IsNull()) return;
    try {
      out = v.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(v, std::string("has the wrong type for '") + key + "'");
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    if (v.IsNull()) {
      out.reset();
      return;
    }
    T value{};
    try {
      value = v.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(v, std::string("has the wrong type for '") + key + "'");
    }
    out = value;
  }

  YAML::Node child(const char* key) {
    seen_.insert(key);
    return node_ && !node_.IsNull() ? node_[key] : YAML::Node();
  }

  bool has(const char* key) const { return node_ && node_.IsMap() && node_[key]; }

  /// Rejects keys never requested through get/child.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, "unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    std::ostringstream o;
    o << origin_ << ":" << at.Mark().line + 1 << ": " << path_ << ": " << msg;
    throw ConfigError(o.str());
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

OptimizerKind parse_optimizer(const std::string& s, const Section& sec, const YAML::Node& at) {
  if (s == "sgd") return OptimizerKind::SgdMomentum;
  if (s == "adam") return OptimizerKind::Adam;
  sec.fail(at, "optimizer must be 'sgd' or 'adam'");
}

const char* optimizer_name(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd"; }

/// Runs `check`, re-throwing its ArgumentError as a ConfigError located at `at`.
template <typename Fn>
void located(const Section& sec, const YAML::Node& at, Fn&& check) {
  try {
    check();
  } catch (const ArgumentError& e) {
    sec.fail(at, e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (data.source != "blobs" && data.source != "csv") bad("data.source must be 'blobs' or 'csv'");
  if (data.source == "csv" && data.csv_path.empty()) bad("data.csv_path is required when data.source is 'csv'");
  if (!(data.test_fraction > 0 && data.test_fraction < 1)) bad("data.test_fraction must lie in (0,1)");
  if (cloud.hidden.empty() && cloud.tap_layer != 0) bad("cloud.tap_layer needs at least one hidden layer");
  if (!cloud.hidden.empty() && cloud.tap_layer >= cloud.hidden.size()) bad("cloud.tap_layer must index a hidden layer");
  if (edge.hidden.empty()) bad("edge.hidden needs at least one spiking population");
  if (edge.tap_layer && *edge.tap_layer >= edge.hidden.size()) bad("edge.tap_layer must index a spiking population");
  if (!(cloud.oracle_logit > 0)) bad("cloud.oracle_logit must be positive");
  if (cloud.epochs < 0) bad("cloud.epochs must be >= 0");
  for (double d : deltas)
    if (!(d >= 0 && d <= 1)) bad("filter.deltas entries must lie in [0,1]");
  if (seeds.empty()) bad("train.seeds must not be empty");
  try {
    edge.lif.validate();
    filter.validate();
    train.validate();
    costs.validate();
  } catch (const ArgumentError& e) {
    bad(e.what());
  }
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream o;
    o << origin << ":" << e.mark.line + 1 << ": YAML syntax error: " << e.msg;
    throw ConfigError(o.str());
  }
  ExperimentConfig c;
  Section top(root, "config", origin);

  {
    Section s(top.child("data"), "data", origin);
    s.get("source", c.data.source);
    s.get("csv_path", c.data.csv_path);
    s.get("num_classes", c.data.num_classes);
    s.get("dim", c.data.dim);
    s.get("n_per_class", c.data.n_per_class);
    s.get("spread", c.data.spread);
    s.get("base_classes", c.data.base_classes);
    s.get("increment_classes", c.data.increment_classes);
    s.get("test_fraction", c.data.test_fraction);
    s.finish();
  }
  {
    Section s(top.child("edge"), "edge", origin);
    s.get("hidden", c.edge.hidden);
    s.get_optional("tap_layer", c.edge.tap_layer);
    s.get("encoding_gain", c.edge.encoding_gain);
    Section lif(s.child("lif"), "edge.lif", origin);
    lif.get("tau", c.edge.lif.tau);
    lif.get("v_threshold", c.edge.lif.v_threshold);
    lif.get("v_reset", c.edge.lif.v_reset);
    lif.get("surrogate_width", c.edge.lif.surrogate_width);
    lif.get("time_steps", c.edge.lif.time_steps);
    std::string mode = to_string(c.edge.lif.mode);
    lif.get("surrogate", mode);
    if (mode != "hard" && mode != "soft") lif.fail(lif.node()["surrogate"], "surrogate must be 'hard' or 'soft'");
    c.edge.lif.mode = mode == "hard" ? SurrogateMode::Hard : SurrogateMode::Soft;
    if (lif.node()) located(lif, lif.node(), [&] { c.edge.lif.validate(); });
    lif.finish();
    s.finish();
  }
  {
    Section s(top.child("cloud"), "cloud", origin);
    s.get("hidden", c.cloud.hidden);
    s.get("tap_layer", c.cloud.tap_layer);
    s.get("epochs", c.cloud.epochs);
    s.get("learning_rate", c.cloud.learning_rate);
    s.get("perfect_oracle", c.cloud.perfect_oracle);
    s.get("oracle_logit", c.cloud.oracle_logit);
    s.finish();
  }
  {
    Section s(top.child("losses"), "losses", origin);
    s.get("lambda1", c.train.weights.lambda1);
    s.get("lambda2", c.train.weights.lambda2);
    s.get("lambda3", c.train.weights.lambda3);
    s.get("temperature", c.train.weights.temperature);
    if (s.node()) located(s, s.node(), [&] { c.train.weights.validate(); });
    s.finish();
  }
  {
    Section s(top.child("filter"), "filter", origin);
    s.get("delta", c.filter.delta);
    s.get("deltas", c.deltas);
    if (s.has("delta")) located(s, s.node()["delta"], [&] { c.filter.validate(); });
    s.finish();
  }
  {
    Section s(top.child("train"), "train", origin);
    s.get("epochs", c.train.epochs);
    s.get("update_epochs", c.train.update_epochs);
    s.get("batch_size", c.train.batch_size);
    s.get("learning_rate", c.train.optimizer.learning_rate);
    s.get("momentum", c.train.optimizer.momentum);
    std::string opt = optimizer_name(c.train.optimizer.kind);
    s.get("optimizer", opt);
    if (s.has("optimizer")) c.train.optimizer.kind = parse_optimizer(opt, s, s.node()["optimizer"]);
    s.get("update_lr_scale", c.train.update_lr_scale);
    s.get("seed", c.train.seed);
    s.get("seeds", c.seeds);
    s.get_optional("buffer_capacity", c.buffer_capacity);
    if (s.node()) located(s, s.node(), [&] { c.train.validate(); });
    s.finish();
  }
  {
    Section s(top.child("costs"), "costs", origin);
    s.get("e_mac_pj", c.costs.e_mac_pj);
    s.get("e_ac_pj", c.costs.e_ac_pj);
    s.get("e_byte_pj", c.costs.e_byte_pj);
    s.get("bandwidth_bytes_per_s", c.costs.bandwidth_bytes_per_s);
    s.get("rtt_ms", c.costs.rtt_ms);
    s.get("edge_throughput_ops_per_s", c.costs.edge_throughput_ops_per_s);
    s.get("cloud_throughput_macs_per_s", c.costs.cloud_throughput_macs_per_s);
    s.get("bytes_per_feature", c.costs.bytes_per_feature);
    if (s.node()) located(s, s.node(), [&] { c.costs.validate(); });
    s.finish();
  }
  {
    Section s(top.child("output"), "output", origin);
    s.get("directory", c.output.directory);
    s.get("outcomes", c.output.outcomes);
    s.get("checkpoints", c.output.checkpoints);
    s.finish();
  }
  top.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["data"] = {{"source", c.data.source},
               {"csv_path", c.data.csv_path},
               {"num_classes", c.data.num_classes},
               {"dim", c.data.dim},
               {"n_per_class", c.data.n_per_class},
               {"spread", c.data.spread},
               {"base_classes", c.data.base_classes},
               {"increment_classes", c.data.increment_classes},
               {"test_fraction", c.data.test_fraction}};
  j["edge"] = {{"hidden", c.edge.hidden},
               {"tap_layer", c.edge.tap_layer ? ordered_json(*c.edge.tap_layer) : ordered_json(nullptr)},
               {"encoding_gain", c.edge.encoding_gain},
               {"lif",
                {{"tau", c.edge.lif.tau},
                 {"v_threshold", c.edge.lif.v_threshold},
                 {"v_reset", c.edge.lif.v_reset},
                 {"surrogate_width", c.edge.lif.surrogate_width},
                 {"time_steps", c.edge.lif.time_steps},
                 {"surrogate", to_string(c.edge.lif.mode)}}}};
  j["cloud"] = {{"hidden", c.cloud.hidden},
                {"tap_layer", c.cloud.tap_layer},
                {"epochs", c.cloud.epochs},
                {"learning_rate", c.cloud.learning_rate},
                {"perfect_oracle", c.cloud.perfect_oracle},
                {"oracle_logit", c.cloud.oracle_logit}};
  j["losses"] = {{"lambda1", c.train.weights.lambda1},
                 {"lambda2", c.train.weights.lambda2},
                 {"lambda3", c.train.weights.lambda3},
                 {"temperature", c.train.weights.temperature}};
  j["filter"] = {{"delta", c.filter.delta}, {"deltas", c.deltas}};
  j["train"] = {{"epochs", c.train.epochs},
                {"update_epochs", c.train.update_epochs},
                {"batch_size", c.train.batch_size},
                {"learning_rate", c.train.optimizer.learning_rate},
                {"momentum", c.train.optimizer.momentum},
                {"optimizer", optimizer_name(c.train.optimizer.kind)},
                {"update_lr_scale", c.train.update_lr_scale},
                {"seed", c.train.seed},
                {"seeds", c.seeds},
                {"buffer_capacity", c.buffer_capacity ? ordered_json(*c.buffer_capacity) : ordered_json(nullptr)}};
  j["costs"] = {{"e_mac_pj", c.costs.e_mac_pj},
                {"e_ac_pj", c.costs.e_ac_pj},
                {"e_byte_pj", c.costs.e_byte_pj},
                {"bandwidth_bytes_per_s", c.costs.bandwidth_bytes_per_s},
                {"rtt_ms", c.costs.rtt_ms},
                {"edge_throughput_ops_per_s", c.costs.edge_throughput_ops_per_s},
                {"cloud_throughput_macs_per_s", c.costs.cloud_throughput_macs_per_s},
                {"bytes_per_feature", c.costs.bytes_per_feature}};
  j["output"] = {{"directory", c.output.directory}, {"outcomes", c.output.outcomes}, {"checkpoints", c.output.checkpoints}};
  return j;
}

}  // namespace ecc::app
