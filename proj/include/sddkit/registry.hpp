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

// Static dataset metadata: frame rates, split assignment, intersection
// groups, and the curated per-scene overlap table. Loaded from a JSON file
// (data/registry.json); the schema is documented in README.md.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddkit/common.hpp"

namespace sddkit {

enum class OverlapLevel { kNone, kPartial, kFull };
enum class Split { kTrain, kValidation, kTest };

inline std::string_view to_string(OverlapLevel l) {
  switch (l) {
    case OverlapLevel::kNone: return "None";
    case OverlapLevel::kPartial: return "Partial";
    case OverlapLevel::kFull: return "Full";
  }
  return "?";
}

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

// Parses "6,10-14" into {6,10,11,12,13,14}. "none" and "" give {}.
inline std::vector<int> parse_video_ranges(std::string_view text) {
  std::vector<int> out;
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty() || iequals(s, "none")) return out;
  std::string_view rest = s;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    auto dash = item.find('-');
    auto lo = parse_number<int>(item.substr(0, dash));
    auto hi = dash == std::string_view::npos ? lo : parse_number<int>(item.substr(dash + 1));
    if (!lo || !hi || *hi < *lo || *lo < 0) {
      throw ConfigError("bad video range '" + std::string(item) + "' in '" + std::string(text) + "'");
    }
    for (int v = *lo; v <= *hi; ++v) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct VideoGroup {
  std::string label;  // as written in the registry, e.g. "6,10-14"
  std::vector<int> videos;

  friend bool operator==(const VideoGroup&, const VideoGroup&) = default;
};

struct SceneInfo {
  std::string key;           // directory-style name, e.g. "deathCircle"
  std::string display_name;  // e.g. "DeathCircle"
  std::vector<int> videos;
  OverlapLevel location_overlap = OverlapLevel::kNone;
  OverlapLevel time_overlap = OverlapLevel::kNone;
  std::vector<VideoGroup> simultaneous_groups;
};

// scene is empty for datasets whose videos are numbered globally (inD).
struct VideoKey {
  std::string scene;
  int video = 0;

  friend auto operator<=>(const VideoKey&, const VideoKey&) = default;
};

struct DatasetInfo {
  std::string id;
  double frame_rate = 0.0;
  std::map<std::string, SceneInfo> scenes;  // keyed by lower-case scene key
  std::vector<int> recordings;              // global video ids (inD)
  std::map<VideoKey, Split> splits;
  std::vector<VideoGroup> intersections;    // inD recording ranges per location
  std::map<int, double> meters_per_pixel;   // optional overrides

  const SceneInfo* find_scene(std::string_view name) const {
    auto it = scenes.find(to_lower(name));
    return it == scenes.end() ? nullptr : &it->second;
  }

  bool has_video(const VideoKey& key) const {
    if (key.scene.empty()) {
      return std::binary_search(recordings.begin(), recordings.end(), key.video);
    }
    const SceneInfo* s = find_scene(key.scene);
    return s && std::binary_search(s->videos.begin(), s->videos.end(), key.video);
  }

  std::optional<Split> split_of(const VideoKey& key) const {
    VideoKey k{to_lower(key.scene), key.video};
    auto it = splits.find(k);
    if (it == splits.end()) return std::nullopt;
    return it->second;
  }

  // Label of the intersection group containing an inD recording.
  std::optional<std::string> intersection_of(int recording) const {
    for (const auto& g : intersections) {
      if (std::binary_search(g.videos.begin(), g.videos.end(), recording)) return g.label;
    }
    return std::nullopt;
  }
};

class DatasetRegistry {
 public:
  int version = 0;
  std::map<std::string, DatasetInfo> datasets;
  // Invariant findings that do not block loading (e.g. curated overlap groups
  // that reference missing videos).
  Diagnostics diagnostics;

  const DatasetInfo& dataset(std::string_view id) const {
    auto it = datasets.find(to_lower(id));
    if (it == datasets.end()) throw ConfigError("registry has no dataset '" + std::string(id) + "'");
    return it->second;
  }

  const SceneInfo& scene(std::string_view dataset_id, std::string_view name) const {
    const SceneInfo* s = dataset(dataset_id).find_scene(name);
    if (!s) throw ConfigError("registry has no scene '" + std::string(name) + "'");
    return *s;
  }
};

namespace detail {

inline OverlapLevel parse_overlap(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": overlap level must be a string");
  const std::string s = to_lower(j.get<std::string>());
  if (s == "none") return OverlapLevel::kNone;
  if (s == "partial") return OverlapLevel::kPartial;
  if (s == "full") return OverlapLevel::kFull;
  throw ConfigError(where + ": unknown overlap level '" + j.get<std::string>() + "'");
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + ": missing required field '" + key + "'");
  }
  return obj.at(key);
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline std::vector<VideoGroup> parse_groups(const nlohmann::json& arr, const std::string& where) {
  std::vector<VideoGroup> out;
  if (!arr.is_array()) throw ConfigError(where + ": expected an array of range strings");
  for (const auto& g : arr) {
    if (!g.is_string()) throw ConfigError(where + ": group must be a range string");
    out.push_back({g.get<std::string>(), parse_video_ranges(g.get<std::string>())});
  }
  return out;
}

inline void validate_groups(const DatasetInfo& ds, const SceneInfo& scene, Diagnostics& diag) {
  std::map<int, std::string> owner;
  for (const auto& g : scene.simultaneous_groups) {
    for (int v : g.videos) {
      if (!std::binary_search(scene.videos.begin(), scene.videos.end(), v)) {
        diag.warn(ds.id + "/" + scene.key + ": group '" + g.label + "' references video " +
                  std::to_string(v) + " which is not in the scene");
      }
      auto [it, inserted] = owner.emplace(v, g.label);
      if (!inserted) {
        diag.warn(ds.id + "/" + scene.key + ": video " + std::to_string(v) + " appears in groups '" +
                  it->second + "' and '" + g.label + "'");
      }
    }
  }
}

}  // namespace detail

inline constexpr int kRegistrySchemaVersion = 1;

// Split entries are range strings; for scene-organised datasets each entry is
// prefixed with its scene, e.g. "coupa/0-2".
inline void add_splits(DatasetInfo& ds, const nlohmann::json& splits, const std::string& where) {
  if (!splits.is_object()) throw ConfigError(where + ": splits must be an object");
  for (const auto& [name, entries] : splits.items()) {
    Split split;
    const std::string n = to_lower(name);
    if (n == "train") split = Split::kTrain;
    else if (n == "validation" || n == "val") split = Split::kValidation;
    else if (n == "test") split = Split::kTest;
    else throw ConfigError(where + ": unknown split '" + name + "'");
    std::vector<std::string> items;
    if (entries.is_string()) items.push_back(entries.get<std::string>());
    else if (entries.is_array()) {
      for (const auto& e : entries) {
        if (!e.is_string()) throw ConfigError(where + "." + name + ": entries must be strings");
        items.push_back(e.get<std::string>());
      }
    } else {
      throw ConfigError(where + "." + name + ": expected a string or array");
    }
    for (const auto& item : items) {
      std::string scene;
      std::string_view ranges = item;
      if (auto slash = item.find('/'); slash != std::string::npos) {
        scene = to_lower(item.substr(0, slash));
        ranges = std::string_view(item).substr(slash + 1);
      }
      for (int v : parse_video_ranges(ranges)) {
        VideoKey key{scene, v};
        if (!ds.has_video(key)) {
          throw ConfigError(where + "." + name + ": video " + (scene.empty() ? "" : scene + "/") +
                            std::to_string(v) + " is not in the registry");
        }
        auto [it, inserted] = ds.splits.emplace(key, split);
        if (!inserted && it->second != split) {
          throw ConfigError(where + ": video " + (scene.empty() ? "" : scene + "/") +
                            std::to_string(v) + " assigned to both " +
                            std::string(to_string(it->second)) + " and " +
                            std::string(to_string(split)));
        }
      }
    }
  }
}

inline DatasetRegistry parse_registry(const nlohmann::json& root) {
  using detail::require;
  DatasetRegistry reg;
  const auto& ver = require(root, "version", "registry");
  if (!ver.is_number_integer()) throw ConfigError("registry.version must be an integer");
  reg.version = ver.get<int>();
  if (reg.version != kRegistrySchemaVersion) {
    throw ConfigError("unsupported registry version " + std::to_string(reg.version));
  }
  const auto& datasets = require(root, "datasets", "registry");
  if (!datasets.is_object()) throw ConfigError("registry.datasets must be an object");
  for (const auto& [id, body] : datasets.items()) {
    const std::string where = "registry.datasets." + id;
    DatasetInfo ds;
    ds.id = to_lower(id);
    const auto& rate = require(body, "frame_rate", where);
    if (!rate.is_number() || !(rate.get<double>() > 0.0)) {
      throw ConfigError(where + ".frame_rate must be a positive number");
    }
    ds.frame_rate = rate.get<double>();
    if (body.contains("scenes")) {
      for (const auto& [key, s] : body.at("scenes").items()) {
        const std::string sw = where + ".scenes." + key;
        SceneInfo scene;
        scene.key = key;
        scene.display_name = s.value("display_name", key);
        scene.videos = parse_video_ranges(detail::require_string(s, "videos", sw));
        scene.location_overlap = detail::parse_overlap(require(s, "location_overlap", sw), sw);
        scene.time_overlap = detail::parse_overlap(require(s, "time_overlap", sw), sw);
        scene.simultaneous_groups =
            detail::parse_groups(s.value("simultaneous_groups", nlohmann::json::array()), sw);
        ds.scenes.emplace(to_lower(key), std::move(scene));
      }
    }
    if (body.contains("recordings")) {
      ds.recordings = parse_video_ranges(detail::require_string(body, "recordings", where));
    }
    if (body.contains("intersections")) {
      ds.intersections = detail::parse_groups(body.at("intersections"), where + ".intersections");
      for (const auto& g : ds.intersections)
        for (int v : g.videos)
          if (!ds.has_video({"", v}))
            throw ConfigError(where + ".intersections: recording " + std::to_string(v) +
                              " is not in the registry");
    }
    if (body.contains("meters_per_pixel")) {
      for (const auto& [rec, f] : body.at("meters_per_pixel").items()) {
        auto r = parse_number<int>(rec);
        if (!r || !f.is_number() || !(f.get<double>() > 0.0)) {
          throw ConfigError(where + ".meters_per_pixel: bad entry '" + rec + "'");
        }
        ds.meters_per_pixel[*r] = f.get<double>();
      }
    }
    if (body.contains("splits")) add_splits(ds, body.at("splits"), where + ".splits");
    for (const auto& [k, scene] : ds.scenes) detail::validate_groups(ds, scene, reg.diagnostics);
    reg.datasets.emplace(ds.id, std::move(ds));
  }
  return reg;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline DatasetRegistry load_registry(const std::filesystem::path& path) {
  return parse_registry(read_json_file(path));
}

// Merges a user-supplied split file ({"train": [...], ...}) into a dataset,
// e.g. the TrajNet split for SDD.
inline void merge_split_file(DatasetRegistry& reg, std::string_view dataset_id,
                             const std::filesystem::path& path) {
  auto it = reg.datasets.find(to_lower(dataset_id));
  if (it == reg.datasets.end()) throw ConfigError("registry has no dataset '" + std::string(dataset_id) + "'");
  add_splits(it->second, read_json_file(path), path.string());
}

}  // namespace sddkit
