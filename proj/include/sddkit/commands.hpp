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

// The four command-line operations as library calls: ingest raw annotations
// into a store, then stats, aim and eval over that store. Every command
// throws on error; warnings are collected in a Diagnostics sink.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddkit/aim.hpp"
#include "sddkit/analytics.hpp"
#include "sddkit/config.hpp"
#include "sddkit/dataset_io.hpp"
#include "sddkit/eval.hpp"
#include "sddkit/registry.hpp"
#include "sddkit/report.hpp"
#include "sddkit/store.hpp"

#ifndef SDDKIT_DEFAULT_REGISTRY
#define SDDKIT_DEFAULT_REGISTRY "data/registry.json"
#endif

namespace sddkit {

namespace fs = std::filesystem;

inline DatasetRegistry load_configured_registry(const RunConfig& cfg) {
  DatasetRegistry reg =
      load_registry(cfg.registry.empty() ? fs::path(SDDKIT_DEFAULT_REGISTRY) : cfg.registry);
  if (!cfg.sdd_split.empty()) merge_split_file(reg, "sdd", cfg.sdd_split);
  return reg;
}

// ---------------------------------------------------------------------------
// ingest

struct SddVideoInput {
  std::string scene;
  int video = 0;
  fs::path file;
};

struct IndRecordingInput {
  fs::path tracks;
  fs::path tracks_meta;
  fs::path recording_meta;
};

namespace detail {

// <root>/<scene>/video<k>/annotations.txt
inline std::optional<SddVideoInput> sdd_input_from_path(const fs::path& file) {
  if (file.filename() != "annotations.txt") return std::nullopt;
  const fs::path video_dir = file.parent_path();
  const std::string vname = video_dir.filename().string();
  if (vname.rfind("video", 0) != 0) return std::nullopt;
  auto k = parse_number<int>(std::string_view(vname).substr(5));
  if (!k) return std::nullopt;
  const std::string scene = video_dir.parent_path().filename().string();
  if (scene.empty()) return std::nullopt;
  return SddVideoInput{scene, *k, file};
}

inline std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  return in;
}

}  // namespace detail

inline std::vector<SddVideoInput> discover_sdd_inputs(std::span<const fs::path> inputs) {
  std::vector<SddVideoInput> out;
  for (const auto& in : inputs) {
    if (!fs::exists(in)) throw ConfigError("input not found: " + in.string());
    std::vector<fs::path> files = fs::is_directory(in) ? detail::sorted_files(in) : std::vector{in};
    std::size_t found = 0;
    for (const auto& f : files) {
      if (auto v = detail::sdd_input_from_path(f)) {
        out.push_back(*v);
        ++found;
      }
    }
    if (!found) {
      throw ConfigError("no <scene>/video<k>/annotations.txt found under " + in.string());
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.scene, a.video, a.file) < std::tie(b.scene, b.video, b.file);
  });
  return out;
}

// Every <prefix>_tracks.csv needs <prefix>_tracksMeta.csv and
// <prefix>_recordingMeta.csv next to it.
inline std::vector<IndRecordingInput> discover_ind_inputs(std::span<const fs::path> inputs) {
  std::vector<IndRecordingInput> out;
  for (const auto& in : inputs) {
    if (!fs::exists(in)) throw ConfigError("input not found: " + in.string());
    std::vector<fs::path> files = fs::is_directory(in) ? detail::sorted_files(in) : std::vector{in};
    std::size_t found = 0;
    for (const auto& f : files) {
      const std::string name = f.filename().string();
      if (!detail::ends_with(name, "_tracks.csv")) continue;
      const std::string prefix = name.substr(0, name.size() - std::string("_tracks.csv").size());
      IndRecordingInput r{f, f.parent_path() / (prefix + "_tracksMeta.csv"),
                          f.parent_path() / (prefix + "_recordingMeta.csv")};
      for (const auto& p : {r.tracks_meta, r.recording_meta}) {
        if (!fs::exists(p)) throw ConfigError("missing file " + p.string() + " for " + f.string());
      }
      out.push_back(std::move(r));
      ++found;
    }
    if (!found) throw ConfigError("no *_tracks.csv found under " + in.string());
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.tracks < b.tracks; });
  return out;
}

namespace detail {

inline void add_video(StoreManifest& m, std::set<SourceRef>& seen, const fs::path& root,
                      const SourceRef& src, std::vector<std::string> inputs,
                      const std::vector<Trajectory>& trajs, const Diagnostics& diag) {
  if (!seen.insert(src).second) {
    throw StructuralError("video " + src.scene + "/" + std::to_string(src.video) +
                          " supplied more than once");
  }
  VideoEntry e;
  e.source = src;
  e.file = video_file_name(src);
  e.inputs = std::move(inputs);
  e.trajectories = trajs.size();
  for (const auto& t : trajs) e.points += t.points.size();
  e.diagnostics = diag.messages;
  TrajectoryStore::write_video(root, e, trajs);
  m.videos.push_back(std::move(e));
}

template <typename F>
auto with_file_context(const fs::path& file, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw e.in_file(file.string());
  } catch (const StructuralError& e) {
    throw StructuralError(file.string() + ": " + e.what());
  }
}

}  // namespace detail

// Parses every input and writes <store>/videos/*.jsonl plus manifest.json.
inline StoreManifest cmd_ingest(const RunConfig& cfg, const fs::path& store_root,
                                Diagnostics* diag = nullptr) {
  if (cfg.inputs.empty()) throw ConfigError("ingest needs at least one input path");
  const DatasetRegistry reg = load_configured_registry(cfg);
  const DatasetInfo& info = reg.dataset(cfg.dataset);
  for (const auto& m : reg.diagnostics.messages) {
    if (m.rfind(info.id + "/", 0) == 0) warn(diag, "registry: " + m);
  }

  StoreManifest manifest;
  manifest.dataset = info.id;
  manifest.frame_rate = info.frame_rate;
  std::set<SourceRef> seen;

  if (info.id == "sdd") {
    for (const auto& v : discover_sdd_inputs(cfg.inputs)) {
      Diagnostics local;
      if (!info.find_scene(v.scene)) local.warn("scene '" + v.scene + "' is not in the registry");
      const SourceRef src{"sdd", v.scene, v.video};
      auto in = detail::open_input(v.file);
      const auto trajs = detail::with_file_context(v.file, [&] {
        const auto records = parse_sdd_annotations(in);
        return assemble_trajectories(records, src, &local);
      });
      for (const auto& m : local.messages) warn(diag, v.file.string() + ": " + m);
      detail::add_video(manifest, seen, store_root, src, {v.file.string()}, trajs, local);
    }
  } else {
    for (const auto& r : discover_ind_inputs(cfg.inputs)) {
      Diagnostics local;
      auto rec_in = detail::open_input(r.recording_meta);
      IndRecordingInfo rec =
          detail::with_file_context(r.recording_meta, [&] { return parse_ind_recording_meta(rec_in); });
      if (auto it = info.meters_per_pixel.find(rec.recording_id); it != info.meters_per_pixel.end()) {
        rec.meters_per_pixel = it->second;
      }
      if (std::abs(rec.frame_rate - info.frame_rate) > 1e-9) {
        local.warn("recording frame rate " + fixed(rec.frame_rate, 2) + " differs from registry " +
                   fixed(info.frame_rate, 2));
      }
      auto tracks_in = detail::open_input(r.tracks);
      auto meta_in = detail::open_input(r.tracks_meta);
      const auto trajs = detail::with_file_context(
          r.tracks, [&] { return parse_ind_tracks(tracks_in, meta_in, rec); });
      const SourceRef src = trajs.empty()
                                ? SourceRef{"ind", std::to_string(rec.location_id), rec.recording_id}
                                : trajs.front().source;
      if (!info.has_video({"", rec.recording_id})) {
        local.warn("recording " + std::to_string(rec.recording_id) + " is not in the registry");
      }
      for (const auto& m : local.messages) warn(diag, r.tracks.string() + ": " + m);
      detail::add_video(manifest, seen, store_root, src,
                        {r.tracks.string(), r.tracks_meta.string(), r.recording_meta.string()}, trajs,
                        local);
    }
  }
  std::sort(manifest.videos.begin(), manifest.videos.end(),
            [](const auto& a, const auto& b) { return a.source < b.source; });
  TrajectoryStore::write_manifest(store_root, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// shared store helpers

namespace detail {

inline std::string video_label(const SourceRef& s) { return s.scene + "/" + std::to_string(s.video); }

inline std::vector<const VideoEntry*> select_videos(const StoreManifest& m,
                                                    std::span<const std::string> filter) {
  std::vector<const VideoEntry*> out;
  std::set<std::string> wanted;
  for (const auto& f : filter) wanted.insert(to_lower(f));
  std::set<std::string> matched;
  for (const auto& v : m.videos) {
    const std::string label = to_lower(video_label(v.source));
    if (wanted.empty() || wanted.count(label)) {
      out.push_back(&v);
      matched.insert(label);
    }
  }
  for (const auto& w : wanted) {
    if (!matched.count(w)) throw ConfigError("video '" + w + "' is not in the store");
  }
  return out;
}

inline std::vector<Trajectory> apply_lost_policy(std::span<const Trajectory> trajs, LostPolicy policy,
                                                 Diagnostics* diag) {
  std::vector<Trajectory> out;
  for (const auto& t : trajs) {
    auto pieces = filter_lost(t, policy, diag);
    for (auto& p : pieces) out.push_back(std::move(p));
  }
  return out;
}

inline std::string scene_display(const DatasetInfo& info, const std::string& scene) {
  const SceneInfo* s = info.find_scene(scene);
  return s ? s->display_name : scene;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// stats

struct StatsResult {
  std::vector<LostStatsRow> lost;
  std::vector<ClassDistributionRow> classes;
  std::vector<OverlapRow> overlap;
  Table split_candidates = split_candidates_table();
};

// Lost-annotation and class statistics pooled per scene (SDD) or per
// intersection (inD), plus split-trajectory candidates per video.
inline StatsResult compute_stats(const TrajectoryStore& store, const RunConfig& cfg,
                                 const DatasetRegistry& reg, Diagnostics* diag = nullptr) {
  const StoreManifest& m = store.manifest();
  std::size_t total = 0;
  for (const auto& v : m.videos) total += v.trajectories;
  if (m.videos.empty() || total == 0) throw InsufficientDataError("store is empty");
  const DatasetInfo& info = reg.dataset(m.dataset);

  StatsResult r;
  std::map<std::string, std::vector<Trajectory>> by_scene;
  std::vector<Trajectory> all;
  for (const auto& v : m.videos) {
    auto trajs = store.load(v);
    const auto filtered = detail::apply_lost_policy(trajs, cfg.preprocess.lost_policy, diag);
    append_split_candidates(r.split_candidates, detail::video_label(v.source),
                            detect_split_candidates(filtered, cfg.split_gates));
    auto& bucket = by_scene[detail::scene_display(info, v.source.scene)];
    for (auto& t : trajs) {
      if (m.dataset == "ind") all.push_back(t);
      bucket.push_back(std::move(t));
    }
  }
  if (m.dataset == "sdd") {
    r.lost = lost_stats(by_scene);
    r.classes = class_distribution(by_scene, kSddClasses);
    r.overlap = overlap_report(reg, "sdd");
  } else {
    // Registry order; intersections without ingested recordings are omitted.
    const auto groups = group_by_intersection(all, info, diag);
    for (const auto& g : info.intersections) {
      const auto& trajs = groups.at(g.label);
      if (trajs.empty()) continue;
      r.lost.push_back(lost_stats_row(g.label, trajs));
      r.classes.push_back(class_distribution_row(g.label, trajs, kIndClasses));
    }
  }
  return r;
}

inline StatsResult cmd_stats(const RunConfig& cfg, const fs::path& out_dir,
                             Diagnostics* diag = nullptr) {
  const TrajectoryStore store(cfg.store);
  const DatasetRegistry reg = load_configured_registry(cfg);
  StatsResult r = compute_stats(store, cfg, reg, diag);
  const std::string ext = extension(cfg.format);
  const bool sdd = store.manifest().dataset == "sdd";
  write_text_file(out_dir / ("lost_stats" + ext), render(lost_stats_table(r.lost), cfg.format));
  write_text_file(out_dir / ("class_distribution" + ext),
                  render(sdd ? class_distribution_table(r.classes, kSddClasses)
                             : class_distribution_table(r.classes, kIndClasses),
                         cfg.format));
  if (sdd) write_text_file(out_dir / ("overlap_report" + ext), render(overlap_table(r.overlap), cfg.format));
  write_text_file(out_dir / ("split_candidates" + ext), render(r.split_candidates, cfg.format));
  return r;
}

// ---------------------------------------------------------------------------
// aim

struct AimOptions {
  std::optional<std::pair<std::string, std::string>> pair;  // I, J track ids
  std::optional<std::string> video;                         // "scene/video"
  std::size_t top_k = 5;
  std::vector<double> sweep_delta;
  std::vector<int> sweep_n;
};

struct AimOutput {
  fs::path file;
  MeasureSeries series;
};

namespace detail {

inline std::string series_stem(const MeasureSeries& s, bool tagged) {
  std::string stem = s.source.scene + "_" + std::to_string(s.source.video) + "_" + s.agent + "_" + s.other;
  if (tagged) stem += "_d" + shortest(s.delta) + "_n" + std::to_string(s.window);
  return stem;
}

inline nlohmann::json series_sidecar(const MeasureSeries& s, const InteractionPair& pair,
                                     const RhoConfig& rho, const MiConfig& mi, const BufferRule& rule) {
  nlohmann::json j;
  j["dataset"] = s.source.dataset;
  j["scene"] = s.source.scene;
  j["video"] = s.source.video;
  j["agent"] = s.agent;
  j["other"] = s.other;
  j["agent_class"] = std::string(to_string(pair.agent_class));
  j["other_class"] = std::string(to_string(pair.other_class));
  j["delta"] = s.delta;
  j["window"] = s.window;
  j["alpha"] = rho.alpha;
  j["velocity_scale"] = rho.velocity_scale;
  j["distance_scale"] = rho.distance_scale;
  j["acceleration_scale"] = rho.acceleration_scale;
  j["use_velocity"] = rho.use_velocity;
  j["use_distance"] = rho.use_distance;
  j["use_heading"] = rho.use_heading;
  j["use_acceleration"] = rho.use_acceleration;
  j["mi_bandwidths"] = mi.bandwidths;
  j["mi_weights"] = mi.resolved_weights();
  j["mi_n_min"] = mi.n_min;
  j["mi_weighting"] = mi.weighting == MiWeighting::kJoint ? "joint" : "product";
  j["buffer_offset"] = rule.offset;
  j["buffer_frame"] = s.frames.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.frames.front());
  j["copresent_frames"] = pair.size();
  j["evaluated_frames"] = s.frames.size();
  j["final_aim"] = fixed(s.final_aim(), kSeriesDecimals);
  return j;
}

}  // namespace detail

// Exports MI, rho and AIM per frame for one named pair or for the top-k
// pairs by final AIM. Sweep values give one series per (delta, N).
inline std::vector<AimOutput> cmd_aim(const RunConfig& cfg, const AimOptions& opts, const fs::path& out_dir,
                                      Diagnostics* diag = nullptr) {
  const TrajectoryStore store(cfg.store);
  std::vector<std::string> filter = cfg.videos;
  if (opts.video) filter = {*opts.video};
  const auto videos = detail::select_videos(store.manifest(), filter);
  if (videos.empty()) throw InsufficientDataError("no videos selected");
  if (opts.pair && videos.size() != 1) {
    throw ConfigError("--pair needs exactly one video; pass --video scene/video");
  }

  const int n = cfg.rho.window;
  std::vector<Trajectory> pooled;
  std::vector<std::vector<Trajectory>> per_video;
  for (const auto* v : videos) {
    per_video.push_back(detail::apply_lost_policy(store.load(*v), cfg.preprocess.lost_policy, diag));
    pooled.insert(pooled.end(), per_video.back().begin(), per_video.back().end());
  }
  std::vector<InteractionPair> pairs;
  for (const auto& trajs : per_video) {
    auto p = extract_interactions(trajs, n, cfg.buffer);
    pairs.insert(pairs.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  const RhoConfig rho = calibrate_rho(cfg.rho, pairs, scene_diagonal(pooled));

  std::vector<InteractionPair> selected;
  if (opts.pair) {
    const auto& trajs = per_video.front();
    auto find = [&](const std::string& id) -> const Trajectory& {
      for (const auto& t : trajs) {
        if (t.id_string() == id) return t;
      }
      throw ConfigError("unknown track id " + id + " in video " + detail::video_label(videos.front()->source));
    };
    const Trajectory& a = find(opts.pair->first);
    const Trajectory& b = find(opts.pair->second);
    auto p = make_interaction(a, b, n, cfg.buffer);
    if (!p) {
      throw InsufficientDataError("tracks " + a.id_string() + " and " + b.id_string() +
                                  " share too few frames (need more than " +
                                  std::to_string(cfg.buffer.index(n)) + ")");
    }
    selected.push_back(std::move(*p));
  } else {
    if (opts.top_k == 0) throw ConfigError("--top-k must be positive");
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      ranked.emplace_back(compute_measure_series(pairs[i], rho, cfg.mi, cfg.delta).final_aim(), i);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      const auto& px = pairs[x.second];
      const auto& py = pairs[y.second];
      return std::tie(px.source, px.agent, px.other) < std::tie(py.source, py.agent, py.other);
    });
    if (ranked.size() < opts.top_k) {
      warn(diag, "only " + std::to_string(ranked.size()) + " interacting pairs available");
    }
    for (std::size_t i = 0; i < std::min(opts.top_k, ranked.size()); ++i) {
      selected.push_back(pairs[ranked[i].second]);
    }
  }

  const bool tagged = !opts.sweep_delta.empty() || !opts.sweep_n.empty();
  const std::vector<double> deltas = opts.sweep_delta.empty() ? std::vector{cfg.delta} : opts.sweep_delta;
  const std::vector<int> windows = opts.sweep_n.empty() ? std::vector{n} : opts.sweep_n;
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 1.0)) throw ConfigError("sweep delta must be in (0, 1]");
  }
  for (int w : windows) {
    if (w < 2) throw ConfigError("sweep N must be at least 2");
  }

  std::vector<AimOutput> out;
  const std::string ext = extension(cfg.format);
  for (const auto& pair : selected) {
    const auto series = sweep(pair, deltas, windows, rho, cfg.mi, cfg.buffer);
    if (series.size() < deltas.size() * windows.size()) {
      warn(diag, "pair " + pair.agent + "->" + pair.other + " is too short for some sweep windows");
    }
    for (const auto& s : series) {
      const fs::path file = out_dir / "aim" / (detail::series_stem(s, tagged) + ext);
      RhoConfig used = rho;
      used.window = s.window;
      write_text_file(file, render(series_table(s), cfg.format));
      fs::path sidecar = file;
      sidecar.replace_extension(".meta.json");
      write_text_file(sidecar, detail::series_sidecar(s, pair, used, cfg.mi, cfg.buffer).dump(2) + "\n");
      out.push_back({file, s});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string predictor = "cv";  // "cv" or a predictions file
  std::vector<LostPolicy> policies;  // empty: the configured policy
};

inline std::vector<TrajectoryWindow> build_windows(const TrajectoryStore& store, const RunConfig& cfg,
                                                   const PreprocessConfig& pre,
                                                   const DatasetRegistry& reg, Diagnostics* diag) {
  const StoreManifest& m = store.manifest();
  const auto videos = detail::select_videos(m, cfg.videos);
  const DatasetInfo& info = reg.dataset(m.dataset);
  std::vector<TrajectoryWindow> out;
  for (const auto* v : videos) {
    if (cfg.eval_split) {
      const VideoKey key{m.dataset == "ind" ? "" : v->source.scene, v->source.video};
      const auto split = info.split_of(key);
      if (!split) warn(diag, "video " + detail::video_label(v->source) + " has no split assignment");
      if (split != cfg.eval_split) continue;
    }
    for (const auto& t : store.load(*v)) {
      auto w = preprocess(t, pre, m.frame_rate, diag);
      out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    }
  }
  return out;
}

// ADE/FDE of the chosen predictor for each lost-annotation policy.
inline std::vector<EvalReport> cmd_eval(const RunConfig& cfg, const EvalOptions& opts,
                                        const fs::path& out_dir, Diagnostics* diag = nullptr) {
  const TrajectoryStore store(cfg.store);
  const DatasetRegistry reg = load_configured_registry(cfg);
  std::vector<LostPolicy> policies = opts.policies;
  if (policies.empty()) policies.push_back(cfg.preprocess.lost_policy);

  std::optional<std::map<std::string, Prediction>> external;
  if (opts.predictor != "cv") {
    auto in = detail::open_input(opts.predictor);
    external = detail::with_file_context(opts.predictor, [&] { return parse_predictions(in); });
  }

  std::vector<std::vector<TrajectoryWindow>> per_policy;
  std::set<std::string> known;
  for (LostPolicy policy : policies) {
    PreprocessConfig pre = cfg.preprocess;
    pre.lost_policy = policy;
    per_policy.push_back(build_windows(store, cfg, pre, reg, diag));
    for (const auto& w : per_policy.back()) known.insert(w.id);
  }
  if (external) {
    for (const auto& [id, p] : *external) {
      if (!known.count(id)) throw ParseError("predictions: unknown window id " + id, 0);
    }
  }

  std::vector<EvalReport> reports;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    auto& windows = per_policy[i];
    Predictor predictor = constant_velocity_predict;
    if (external) {
      // Window ids depend on the policy; serve each policy its own subset.
      std::map<std::string, Prediction> mine;
      for (const auto& w : windows) {
        if (auto it = external->find(w.id); it != external->end()) mine.emplace(*it);
      }
      predictor = external_predictor(std::move(mine), windows, diag);
    }
    auto r = evaluate(windows, predictor, std::string(to_string(policies[i])), diag);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  write_text_file(out_dir / ("eval_report" + extension(cfg.format)), render(eval_table(reports), cfg.format));
  return reports;
}

}  // namespace sddkit
