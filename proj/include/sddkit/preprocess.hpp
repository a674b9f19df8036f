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

// Lost-annotation filtering, frame-rate resampling, and splitting
// trajectories into observation/prediction windows.

#pragma once

#include <vector>

#include "sddkit/dataset_io.hpp"

namespace sddkit {

enum class LostPolicy {
  kFilterKeepFirst,  // drop lost points, keep the first surviving run
  kFilterKeepAll,    // drop lost points, keep every run as its own trajectory
  kKeepLost,         // leave the trajectory untouched
};

inline std::string_view to_string(LostPolicy p) {
  switch (p) {
    case LostPolicy::kFilterKeepFirst: return "filter_keep_first";
    case LostPolicy::kFilterKeepAll: return "filter_keep_all";
    case LostPolicy::kKeepLost: return "keep_lost";
  }
  return "?";
}

inline LostPolicy parse_lost_policy(std::string_view s) {
  for (auto p : {LostPolicy::kFilterKeepFirst, LostPolicy::kFilterKeepAll, LostPolicy::kKeepLost}) {
    if (iequals(s, to_string(p))) return p;
  }
  throw ConfigError("unknown lost policy '" + std::string(s) +
                    "' (expected filter_keep_first, filter_keep_all or keep_lost)");
}

struct PreprocessConfig {
  LostPolicy lost_policy = LostPolicy::kFilterKeepFirst;
  bool drop_generated = false;
  double target_rate = 2.5;
  int observe_len = 8;
  int predict_len = 12;
  // Points between consecutive window starts; 0 means one full window.
  int stride = 0;

  int window_len() const { return observe_len + predict_len; }
  int effective_stride() const { return stride > 0 ? stride : window_len(); }

  void validate() const {
    if (!(target_rate > 0.0)) throw ConfigError("target_rate must be positive");
    if (observe_len < 2) throw ConfigError("observe_len must be at least 2");
    if (predict_len < 1) throw ConfigError("predict_len must be at least 1");
    if (stride < 0) throw ConfigError("stride must be non-negative");
  }
};

struct TrajectoryWindow {
  std::string id;  // dataset/scene/video/track[.segment]/start_frame
  SourceRef source;
  std::int64_t track_id = 0;
  int segment = 0;
  AgentClass label = AgentClass::kPedestrian;
  std::int64_t start_frame = 0;
  std::vector<TrackPoint> observed;
  std::vector<TrackPoint> future;
};

// Drops points matching `excluded` and returns the surviving runs; only the
// first run unless `keep_all`. Runs after the first get segment ids 1, 2, ...
template <typename Pred>
std::vector<Trajectory> split_on_excluded(const Trajectory& traj, Pred excluded, bool keep_all) {
  std::vector<Trajectory> out;
  Trajectory current;
  auto flush = [&] {
    if (current.points.empty()) return;
    current.segment = traj.segment + static_cast<int>(out.size());
    out.push_back(std::move(current));
    current = Trajectory{};
  };
  for (const auto& p : traj.points) {
    if (excluded(p)) {
      flush();
      if (!keep_all && !out.empty()) break;
      continue;
    }
    if (current.points.empty()) {
      current.track_id = traj.track_id;
      current.label = traj.label;
      current.source = traj.source;
    }
    current.points.push_back(p);
  }
  flush();
  if (!keep_all && out.size() > 1) out.resize(1);
  return out;
}

inline std::vector<Trajectory> filter_lost(const Trajectory& traj, LostPolicy policy,
                                           Diagnostics* diag = nullptr) {
  if (policy == LostPolicy::kKeepLost) return {traj};
  auto out = split_on_excluded(traj, [](const TrackPoint& p) { return p.lost; },
                               policy == LostPolicy::kFilterKeepAll);
  if (out.empty() && !traj.points.empty()) {
    warn(diag, "track " + traj.id_string() + " is entirely lost; dropped");
  }
  return out;
}

struct LostPositions {
  bool start = false;
  bool middle = false;
  bool end = false;

  friend bool operator==(const LostPositions&, const LostPositions&) = default;
};

// start/end: first/last point lost. middle: some maximal lost run has a
// present point on both sides.
inline LostPositions classify_lost_positions(const Trajectory& traj) {
  LostPositions r;
  const auto& pts = traj.points;
  if (pts.empty()) return r;
  r.start = pts.front().lost;
  r.end = pts.back().lost;
  bool seen_present = false;
  bool in_run_after_present = false;
  for (const auto& p : pts) {
    if (p.lost) {
      if (seen_present) in_run_after_present = true;
    } else {
      if (in_run_after_present) r.middle = true;
      in_run_after_present = false;
      seen_present = true;
    }
  }
  return r;
}

// Integer decimation factor native/target; throws unless it is a whole number.
inline int resample_factor(double native_rate, double target_rate) {
  if (!(native_rate > 0.0) || !(target_rate > 0.0)) {
    throw ConfigError("frame rates must be positive");
  }
  const double k = native_rate / target_rate;
  const double rounded = std::round(k);
  if (rounded < 1.0 || std::abs(k - rounded) > 1e-9 * k) {
    throw ConfigError("target rate " + fixed(target_rate, 3) + " does not divide native rate " +
                      fixed(native_rate, 3));
  }
  return static_cast<int>(rounded);
}

// Keeps every k-th point counting from the first one.
inline Trajectory resample(const Trajectory& traj, double native_rate, double target_rate) {
  const int k = resample_factor(native_rate, target_rate);
  Trajectory out = traj;
  out.points.clear();
  for (std::size_t i = 0; i < traj.points.size(); i += static_cast<std::size_t>(k)) {
    out.points.push_back(traj.points[i]);
  }
  return out;
}

inline std::string window_id(const Trajectory& traj, std::int64_t start_frame) {
  return traj.source.dataset + "/" + traj.source.scene + "/" + std::to_string(traj.source.video) +
         "/" + traj.id_string() + "/" + std::to_string(start_frame);
}

// Cuts a resampled trajectory into windows of observe_len + predict_len
// points, stepping `stride` points (a full window by default). A trailing
// remainder shorter than one window is discarded.
inline std::vector<TrajectoryWindow> window(const Trajectory& traj, const PreprocessConfig& cfg) {
  cfg.validate();
  std::vector<TrajectoryWindow> out;
  const std::size_t len = static_cast<std::size_t>(cfg.window_len());
  const std::size_t step = static_cast<std::size_t>(cfg.effective_stride());
  for (std::size_t s = 0; s + len <= traj.points.size(); s += step) {
    TrajectoryWindow w;
    w.source = traj.source;
    w.track_id = traj.track_id;
    w.segment = traj.segment;
    w.label = traj.label;
    w.start_frame = traj.points[s].frame;
    w.id = window_id(traj, w.start_frame);
    auto first = traj.points.begin() + static_cast<std::ptrdiff_t>(s);
    w.observed.assign(first, first + cfg.observe_len);
    w.future.assign(first + cfg.observe_len, first + static_cast<std::ptrdiff_t>(len));
    out.push_back(std::move(w));
  }
  return out;
}

// Full pipeline for one raw trajectory: lost handling (generated points are
// treated like lost ones when drop_generated is set), resampling, windowing.
inline std::vector<TrajectoryWindow> preprocess(const Trajectory& traj, const PreprocessConfig& cfg,
                                                double native_rate, Diagnostics* diag = nullptr) {
  cfg.validate();
  std::vector<Trajectory> kept;
  if (cfg.drop_generated) {
    const bool drop_lost = cfg.lost_policy != LostPolicy::kKeepLost;
    kept = split_on_excluded(
        traj, [&](const TrackPoint& p) { return p.generated || (drop_lost && p.lost); },
        cfg.lost_policy != LostPolicy::kFilterKeepFirst);
  } else {
    kept = filter_lost(traj, cfg.lost_policy, diag);
  }
  std::vector<TrajectoryWindow> out;
  for (const auto& piece : kept) {
    auto windows = window(resample(piece, native_rate, cfg.target_rate), cfg);
    std::move(windows.begin(), windows.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace sddkit
