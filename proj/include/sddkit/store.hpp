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

// On-disk trajectory store written by `ingest`: one JSON-lines file per
// video (one trajectory per line) plus manifest.json.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddkit/dataset_io.hpp"

namespace sddkit {

inline constexpr int kStoreVersion = 1;

inline nlohmann::json trajectory_to_json(const Trajectory& t) {
  nlohmann::json j;
  j["track_id"] = t.track_id;
  j["segment"] = t.segment;
  j["class"] = std::string(to_string(t.label));
  auto& frames = j["frames"] = nlohmann::json::array();
  auto& xs = j["x"] = nlohmann::json::array();
  auto& ys = j["y"] = nlohmann::json::array();
  std::string lost, occluded, generated;
  for (const auto& p : t.points) {
    frames.push_back(p.frame);
    xs.push_back(p.pos.x);
    ys.push_back(p.pos.y);
    lost += p.lost ? '1' : '0';
    occluded += p.occluded ? '1' : '0';
    generated += p.generated ? '1' : '0';
  }
  // Flags are stored as 0/1 strings, one character per point.
  j["lost"] = lost;
  j["occluded"] = occluded;
  j["generated"] = generated;
  return j;
}

inline Trajectory trajectory_from_json(const nlohmann::json& j, const SourceRef& source,
                                       std::size_t line_no = 0) {
  try {
    Trajectory t;
    t.track_id = j.at("track_id").get<std::int64_t>();
    t.segment = j.value("segment", 0);
    auto cls = parse_agent_class(j.at("class").get<std::string>());
    if (!cls) throw ParseError("unknown class " + j.at("class").get<std::string>(), line_no);
    t.label = *cls;
    t.source = source;
    const auto& frames = j.at("frames");
    const auto& xs = j.at("x");
    const auto& ys = j.at("y");
    const auto lost = j.at("lost").get<std::string>();
    const auto occluded = j.at("occluded").get<std::string>();
    const auto generated = j.at("generated").get<std::string>();
    const std::size_t n = frames.size();
    if (xs.size() != n || ys.size() != n || lost.size() != n || occluded.size() != n ||
        generated.size() != n) {
      throw ParseError("trajectory arrays differ in length", line_no);
    }
    t.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& p = t.points[i];
      p.frame = frames[i].get<std::int64_t>();
      p.pos = {xs[i].get<double>(), ys[i].get<double>()};
      p.lost = lost[i] == '1';
      p.occluded = occluded[i] == '1';
      p.generated = generated[i] == '1';
      if (i > 0 && p.frame <= t.points[i - 1].frame) {
        throw ParseError("trajectory frames must strictly increase", line_no);
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("store record: ") + e.what(), line_no);
  }
}

struct VideoEntry {
  SourceRef source;
  std::string file;  // relative to the store root
  std::vector<std::string> inputs;
  std::size_t trajectories = 0;
  std::size_t points = 0;
  std::vector<std::string> diagnostics;
};

struct StoreManifest {
  std::string dataset;
  double frame_rate = 0.0;
  std::vector<VideoEntry> videos;
};

inline std::string video_file_name(const SourceRef& s) {
  return "videos/" + s.dataset + "_" + s.scene + "_" + std::to_string(s.video) + ".jsonl";
}

inline nlohmann::json manifest_to_json(const StoreManifest& m) {
  nlohmann::json j;
  j["format"] = "sddkit-store";
  j["version"] = kStoreVersion;
  j["dataset"] = m.dataset;
  j["frame_rate"] = m.frame_rate;
  auto& vids = j["videos"] = nlohmann::json::array();
  for (const auto& v : m.videos) {
    vids.push_back({{"scene", v.source.scene},
                    {"video", v.source.video},
                    {"file", v.file},
                    {"inputs", v.inputs},
                    {"trajectories", v.trajectories},
                    {"points", v.points},
                    {"diagnostics", v.diagnostics}});
  }
  return j;
}

inline StoreManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "sddkit-store") throw ConfigError("not an sddkit store");
    if (j.at("version").get<int>() != kStoreVersion) throw ConfigError("unsupported store version");
    StoreManifest m;
    m.dataset = j.at("dataset").get<std::string>();
    m.frame_rate = j.at("frame_rate").get<double>();
    for (const auto& v : j.at("videos")) {
      VideoEntry e;
      e.source = {m.dataset, v.at("scene").get<std::string>(), v.at("video").get<int>()};
      e.file = v.at("file").get<std::string>();
      e.inputs = v.value("inputs", std::vector<std::string>{});
      e.trajectories = v.at("trajectories").get<std::size_t>();
      e.points = v.at("points").get<std::size_t>();
      e.diagnostics = v.value("diagnostics", std::vector<std::string>{});
      m.videos.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("store manifest: ") + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

class TrajectoryStore {
 public:
  explicit TrajectoryStore(std::filesystem::path root) : root_(std::move(root)) {
    const auto manifest_path = root_ / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("no store manifest at " + manifest_path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(manifest_path.string() + ": " + e.what());
    }
    manifest_ = manifest_from_json(j);
  }

  const StoreManifest& manifest() const { return manifest_; }
  const std::filesystem::path& root() const { return root_; }

  std::vector<Trajectory> load(const VideoEntry& entry) const {
    const auto path = root_ / entry.file;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open store file " + path.string());
    std::vector<Trajectory> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::is_blank(line)) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), line_no);
      }
      out.push_back(trajectory_from_json(j, entry.source, line_no));
    }
    return out;
  }

  static void write_video(const std::filesystem::path& root, const VideoEntry& entry,
                          std::span<const Trajectory> trajectories) {
    std::string text;
    for (const auto& t : trajectories) text += trajectory_to_json(t).dump() + "\n";
    write_text_file(root / entry.file, text);
  }

  static void write_manifest(const std::filesystem::path& root, const StoreManifest& m) {
    write_text_file(root / "manifest.json", manifest_to_json(m).dump(2) + "\n");
  }

 private:
  std::filesystem::path root_;
  StoreManifest manifest_;
};

}  // namespace sddkit
