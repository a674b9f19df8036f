/* Copyright 2026 The sddkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Run configuration for the command-line tool, read from a JSON file.
// Relative paths are resolved against the directory holding the config.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddkit/aim.hpp"
#include "sddkit/analytics.hpp"
#include "sddkit/preprocess.hpp"
#include "sddkit/registry.hpp"

namespace sddkit {

enum class ExportFormat { kCsv, kJsonl };

struct RunConfig {
  std::string dataset = "sdd";
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path registry;  // empty: built-in default path
  std::filesystem::path sdd_split;  // optional user-supplied split file
  std::filesystem::path store;
  std::filesystem::path output;
  ExportFormat format = ExportFormat::kCsv;
  PreprocessConfig preprocess;
  RhoConfig rho;
  double delta = 0.98;
  MiConfig mi;
  BufferRule buffer;
  SplitGates split_gates;
  std::vector<std::string> videos;      // "scene/video" filter for aim and eval
  std::optional<Split> eval_split;      // restrict eval to one split

  void validate() const {
    if (dataset != "sdd" && dataset != "ind") throw ConfigError("dataset must be 'sdd' or 'ind'");
    preprocess.validate();
    rho.validate();
    mi.validate();
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must be in (0, 1]");
  }
};

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  using detail::read_opt;
  detail::check_keys(j,
                     {"dataset", "inputs", "registry", "sdd_split", "store", "output",
                      "export_format", "preprocess", "rho", "delta", "mi", "buffer_offset",
                      "split_gates", "videos", "eval_split"},
                     "config");
  RunConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  read_opt(j, "dataset", cfg.dataset, "config");
  cfg.dataset = to_lower(cfg.dataset);
  cfg.rho.window = default_window(cfg.dataset);
  if (j.contains("inputs")) {
    std::vector<std::string> inputs;
    read_opt(j, "inputs", inputs, "config");
    for (const auto& p : inputs) cfg.inputs.push_back(resolve(p));
  }
  for (auto [key, dest] : {std::pair{"registry", &cfg.registry}, std::pair{"sdd_split", &cfg.sdd_split},
                           std::pair{"store", &cfg.store}, std::pair{"output", &cfg.output}}) {
    std::string s;
    read_opt(j, key, s, "config");
    if (!s.empty()) *dest = resolve(s);
  }
  std::string format = "csv";
  read_opt(j, "export_format", format, "config");
  if (format == "csv") cfg.format = ExportFormat::kCsv;
  else if (format == "jsonl") cfg.format = ExportFormat::kJsonl;
  else throw ConfigError("export_format must be 'csv' or 'jsonl'");

  if (j.contains("preprocess")) {
    const auto& p = j.at("preprocess");
    detail::check_keys(p, {"lost_policy", "drop_generated", "target_rate", "observe_len",
                           "predict_len", "stride"},
                       "config.preprocess");
    std::string policy;
    read_opt(p, "lost_policy", policy, "config.preprocess");
    if (!policy.empty()) cfg.preprocess.lost_policy = parse_lost_policy(policy);
    read_opt(p, "drop_generated", cfg.preprocess.drop_generated, "config.preprocess");
    read_opt(p, "target_rate", cfg.preprocess.target_rate, "config.preprocess");
    read_opt(p, "observe_len", cfg.preprocess.observe_len, "config.preprocess");
    read_opt(p, "predict_len", cfg.preprocess.predict_len, "config.preprocess");
    read_opt(p, "stride", cfg.preprocess.stride, "config.preprocess");
  }
  if (j.contains("rho")) {
    const auto& r = j.at("rho");
    detail::check_keys(r, {"alpha", "window", "velocity_scale", "distance_scale",
                           "acceleration_scale", "use_velocity", "use_distance", "use_heading",
                           "use_acceleration"},
                       "config.rho");
    read_opt(r, "alpha", cfg.rho.alpha, "config.rho");
    read_opt(r, "window", cfg.rho.window, "config.rho");
    read_opt(r, "velocity_scale", cfg.rho.velocity_scale, "config.rho");
    read_opt(r, "distance_scale", cfg.rho.distance_scale, "config.rho");
    read_opt(r, "acceleration_scale", cfg.rho.acceleration_scale, "config.rho");
    read_opt(r, "use_velocity", cfg.rho.use_velocity, "config.rho");
    read_opt(r, "use_distance", cfg.rho.use_distance, "config.rho");
    read_opt(r, "use_heading", cfg.rho.use_heading, "config.rho");
    read_opt(r, "use_acceleration", cfg.rho.use_acceleration, "config.rho");
  }
  read_opt(j, "delta", cfg.delta, "config");
  if (j.contains("mi")) {
    const auto& m = j.at("mi");
    detail::check_keys(m, {"bandwidths", "weights", "n_min", "weighting"}, "config.mi");
    read_opt(m, "bandwidths", cfg.mi.bandwidths, "config.mi");
    read_opt(m, "weights", cfg.mi.weights, "config.mi");
    read_opt(m, "n_min", cfg.mi.n_min, "config.mi");
    std::string weighting = "joint";
    read_opt(m, "weighting", weighting, "config.mi");
    if (weighting == "joint") cfg.mi.weighting = MiWeighting::kJoint;
    else if (weighting == "product") cfg.mi.weighting = MiWeighting::kProduct;
    else throw ConfigError("config.mi.weighting must be 'joint' or 'product'");
  }
  cfg.buffer.n_min = cfg.mi.n_min;
  read_opt(j, "buffer_offset", cfg.buffer.offset, "config");
  if (j.contains("split_gates")) {
    const auto& g = j.at("split_gates");
    detail::check_keys(g, {"max_frame_gap", "max_spatial_gap", "overlap_slack"}, "config.split_gates");
    read_opt(g, "max_frame_gap", cfg.split_gates.max_frame_gap, "config.split_gates");
    read_opt(g, "max_spatial_gap", cfg.split_gates.max_spatial_gap, "config.split_gates");
    read_opt(g, "overlap_slack", cfg.split_gates.overlap_slack, "config.split_gates");
  }
  read_opt(j, "videos", cfg.videos, "config");
  if (j.contains("eval_split")) {
    std::string s;
    read_opt(j, "eval_split", s, "config");
    s = to_lower(s);
    if (s == "train") cfg.eval_split = Split::kTrain;
    else if (s == "validation") cfg.eval_split = Split::kValidation;
    else if (s == "test") cfg.eval_split = Split::kTest;
    else throw ConfigError("eval_split must be train, validation or test");
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

}  // namespace sddkit
