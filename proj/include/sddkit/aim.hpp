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

// Adaptive Interaction Measure (AIM) for directed agent pairs:
//
//   AIM_T = sum_{t=T'}^{T} delta^(T-t) * rho_t * MI(X^I_{1:t}; X^J_{1:t})
//
// where rho_t = (alpha + V*) * D* * (1 + H*) is a kinematic attention weight
// over the last N frames (V: summed speed, D: separation, H: angle between
// I's heading and the bearing to J), each mapped through a normalizer.

#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "sddkit/dataset_io.hpp"
#include "sddkit/mi_edge.hpp"

namespace sddkit {

struct Kinematics {
  double velocity = 0.0;      // V, pixels/frame, both agents summed
  double distance = 0.0;      // D, pixels
  double heading = 0.0;       // H, radians in [0, pi]
  double acceleration = 0.0;  // mean |speed change| of both agents, pixels/frame^2
};

struct RhoConfig {
  double alpha = 0.3;
  int window = 30;  // N, frames (30 for SDD, 25 for inD)
  // Normalizer scales. Non-positive values are resolved by calibrate_rho.
  double velocity_scale = 0.0;      // v0 in V* = V / (V + v0)
  double distance_scale = 0.0;      // sigma_D in D* = exp(-D / sigma_D)
  double acceleration_scale = 0.0;  // a0 in A* = A / (A + a0)
  bool use_velocity = true;
  bool use_distance = true;
  bool use_heading = true;
  bool use_acceleration = false;

  void validate() const {
    if (window < 2) throw ConfigError("rho window N must be at least 2");
    if (!(alpha >= 0.0)) throw ConfigError("rho alpha must be non-negative");
  }

  bool resolved() const {
    return velocity_scale > 0.0 && distance_scale > 0.0 &&
           (!use_acceleration || acceleration_scale > 0.0);
  }
};

inline int default_window(std::string_view dataset) { return iequals(dataset, "ind") ? 25 : 30; }

// Frames where both agents are present, with I's and J's positions aligned.
// Direction matters: H looks along I's heading toward J.
struct InteractionPair {
  std::string agent;  // I, trajectory id string
  std::string other;  // J
  AgentClass agent_class = AgentClass::kPedestrian;
  AgentClass other_class = AgentClass::kPedestrian;
  SourceRef source;
  std::vector<std::int64_t> frames;
  std::vector<Point2> agent_pos;
  std::vector<Point2> other_pos;
  std::size_t buffer_index = 0;  // index into frames of T'

  std::size_t size() const { return frames.size(); }
  std::int64_t buffer_frame() const { return frames.at(buffer_index); }
};

// Accumulation starts at index max(offset, N, n_min - 1) of the co-present
// frames, so rho has a full window and MI at least n_min samples. offset < 0
// means N.
struct BufferRule {
  int offset = -1;
  std::size_t n_min = 10;

  std::size_t index(int window) const {
    const std::size_t base = static_cast<std::size_t>(offset < 0 ? window : offset);
    return std::max({base, static_cast<std::size_t>(window), n_min > 0 ? n_min - 1 : 0});
  }
};

// Builds I->J over the co-present frames, or nullopt when the pair has no
// frame at or past T'.
inline std::optional<InteractionPair> make_interaction(const Trajectory& agent, const Trajectory& other,
                                                       int window, const BufferRule& rule = {}) {
  InteractionPair p;
  p.agent = agent.id_string();
  p.other = other.id_string();
  p.agent_class = agent.label;
  p.other_class = other.label;
  p.source = agent.source;
  const auto& a = agent.points;
  const auto& b = other.points;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].frame < b[j].frame) {
      ++i;
    } else if (b[j].frame < a[i].frame) {
      ++j;
    } else {
      p.frames.push_back(a[i].frame);
      p.agent_pos.push_back(a[i].pos);
      p.other_pos.push_back(b[j].pos);
      ++i;
      ++j;
    }
  }
  p.buffer_index = rule.index(window);
  if (p.frames.size() <= p.buffer_index) return std::nullopt;
  return p;
}

// Both directions of every pair of trajectories that are co-present past T'.
inline std::vector<InteractionPair> extract_interactions(std::span<const Trajectory> trajectories,
                                                         int window, const BufferRule& rule = {}) {
  std::vector<InteractionPair> out;
  for (std::size_t a = 0; a < trajectories.size(); ++a) {
    const auto& ta = trajectories[a];
    if (ta.points.empty()) continue;
    for (std::size_t b = a + 1; b < trajectories.size(); ++b) {
      const auto& tb = trajectories[b];
      if (tb.points.empty()) continue;
      if (tb.first_frame() > ta.last_frame() || ta.first_frame() > tb.last_frame()) continue;
      auto forward = make_interaction(ta, tb, window, rule);
      if (!forward) continue;
      out.push_back(*forward);
      out.push_back(*make_interaction(tb, ta, window, rule));
    }
  }
  return out;
}

// Kinematics over the N steps ending at index t (points t-N .. t).
inline Kinematics compute_kinematics(const InteractionPair& pair, std::size_t t, int window) {
  if (window < 1) throw ConfigError("kinematics window must be positive");
  const std::size_t n = static_cast<std::size_t>(window);
  if (t >= pair.size()) throw std::out_of_range("compute_kinematics: t beyond interaction");
  if (t < n) {
    throw std::out_of_range("compute_kinematics: window starts before the interaction (t=" +
                            std::to_string(t) + ", N=" + std::to_string(n) + ")");
  }
  const auto& xi = pair.agent_pos;
  const auto& xj = pair.other_pos;
  Kinematics k;

  double speed_sum = 0.0;
  double heading_mean = 0.0;  // running mean: exact when every step agrees
  std::size_t heading_steps = 0;
  double accel_sum = 0.0;
  double prev_si = 0.0, prev_sj = 0.0;
  for (std::size_t s = t - n + 1; s <= t; ++s) {
    const Point2 step = xi[s] - xi[s - 1];
    const double si = norm(step);
    const double sj = norm(xj[s] - xj[s - 1]);
    speed_sum += si + sj;
    if (s > t - n + 1) accel_sum += std::abs(si - prev_si) + std::abs(sj - prev_sj);
    prev_si = si;
    prev_sj = sj;

    const Point2 bearing = xj[s - 1] - xi[s - 1];
    if (si > 0.0 && norm(bearing) > 0.0) {
      const double angle = std::atan2(std::abs(cross(bearing, step)), dot(bearing, step));
      ++heading_steps;
      heading_mean += (angle - heading_mean) / static_cast<double>(heading_steps);
    }
  }
  k.velocity = speed_sum / static_cast<double>(n);
  k.heading = heading_mean;
  k.acceleration = n > 1 ? accel_sum / static_cast<double>(n - 1) : 0.0;

  double dist_sum = 0.0;
  for (std::size_t s = t - n; s <= t; ++s) dist_sum += distance(xi[s], xj[s]);
  k.distance = dist_sum / static_cast<double>(n + 1);
  return k;
}

inline double normalize_velocity(double v, double scale) { return v > 0.0 ? v / (v + scale) : 0.0; }
inline double normalize_distance(double d, double scale) { return std::exp(-d / scale); }
inline double normalize_heading(double h) {
  return std::clamp(1.0 - 2.0 * h / std::numbers::pi, -1.0, 1.0);
}

inline double compute_rho(const Kinematics& kin, const RhoConfig& cfg) {
  cfg.validate();
  if (!cfg.resolved()) throw ConfigError("rho normalizer scales are not set; run calibrate_rho");
  double velocity_factor = 1.0;
  if (cfg.use_velocity) {
    double v = normalize_velocity(kin.velocity, cfg.velocity_scale);
    if (cfg.use_acceleration) {
      v = 0.5 * (v + normalize_velocity(kin.acceleration, cfg.acceleration_scale));
    }
    velocity_factor = cfg.alpha + v;
  }
  const double distance_factor =
      cfg.use_distance ? normalize_distance(kin.distance, cfg.distance_scale) : 1.0;
  const double heading_factor = cfg.use_heading ? 1.0 + normalize_heading(kin.heading) : 1.0;
  return velocity_factor * distance_factor * heading_factor;
}

// Diagonal of the image region spanned by the annotations, taking the pixel
// origin as the top-left corner.
inline double scene_diagonal(std::span<const Trajectory> trajectories) {
  double max_x = 0.0, max_y = 0.0;
  for (const auto& t : trajectories) {
    for (const auto& p : t.points) {
      max_x = std::max(max_x, p.pos.x);
      max_y = std::max(max_y, p.pos.y);
    }
  }
  return std::hypot(max_x, max_y);
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

}  // namespace detail

// Fills unset normalizer scales: v0 and a0 are medians of the windowed V and
// A over every pair (sampled every N frames), sigma_D is diagonal / 8.
inline RhoConfig calibrate_rho(RhoConfig cfg, std::span<const InteractionPair> pairs,
                               double diagonal) {
  cfg.validate();
  if (cfg.velocity_scale <= 0.0 || cfg.acceleration_scale <= 0.0) {
    std::vector<double> vs, as;
    const std::size_t n = static_cast<std::size_t>(cfg.window);
    for (const auto& p : pairs) {
      for (std::size_t t = n; t < p.size(); t += n) {
        const Kinematics k = compute_kinematics(p, t, cfg.window);
        vs.push_back(k.velocity);
        as.push_back(k.acceleration);
      }
    }
    if (cfg.velocity_scale <= 0.0) {
      const double m = detail::median(std::move(vs));
      cfg.velocity_scale = m > 0.0 ? m : 1.0;
    }
    if (cfg.acceleration_scale <= 0.0) {
      const double m = detail::median(std::move(as));
      cfg.acceleration_scale = m > 0.0 ? m : 1.0;
    }
  }
  if (cfg.distance_scale <= 0.0) {
    cfg.distance_scale = diagonal > 0.0 ? diagonal / 8.0 : 1.0;
  }
  return cfg;
}

// AIM_t = delta * AIM_{t-1} + rho_t * MI_t, AIM_{T'-1} = 0.
inline std::vector<double> accumulate_aim(std::span<const double> mi, std::span<const double> rho,
                                          double delta) {
  if (mi.size() != rho.size()) {
    throw StructuralError("accumulate_aim: MI series has " + std::to_string(mi.size()) +
                          " values but rho has " + std::to_string(rho.size()));
  }
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("decay delta must be in (0, 1]");
  std::vector<double> out(mi.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mi.size(); ++i) {
    acc = delta * acc + rho[i] * mi[i];
    out[i] = acc;
  }
  return out;
}

struct MeasureSeries {
  std::string agent;
  std::string other;
  SourceRef source;
  double delta = 0.98;
  int window = 30;
  double alpha = 0.3;
  std::vector<std::int64_t> frames;  // T' .. T
  std::vector<Point2> agent_pos;
  std::vector<Point2> other_pos;
  std::vector<double> mi;
  std::vector<double> rho;
  std::vector<double> aim;

  double final_aim() const { return aim.empty() ? 0.0 : aim.back(); }
};

namespace detail {

struct MiRho {
  std::vector<double> mi;
  std::vector<double> rho;
};

inline MiRho mi_and_rho(const InteractionPair& pair, const RhoConfig& rho_cfg,
                        const MiConfig& mi_cfg) {
  if (pair.buffer_index < static_cast<std::size_t>(rho_cfg.window)) {
    throw ConfigError("interaction buffer T' precedes the first full rho window");
  }
  std::vector<SamplePair> samples(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) samples[i] = {pair.agent_pos[i], pair.other_pos[i]};
  std::vector<std::size_t> prefixes;
  for (std::size_t t = pair.buffer_index; t < pair.size(); ++t) prefixes.push_back(t + 1);
  MiRho r;
  for (const auto& m : mi_prefix_series(samples, prefixes, mi_cfg)) r.mi.push_back(m.value);
  for (std::size_t t = pair.buffer_index; t < pair.size(); ++t) {
    r.rho.push_back(compute_rho(compute_kinematics(pair, t, rho_cfg.window), rho_cfg));
  }
  return r;
}

inline MeasureSeries make_series(const InteractionPair& pair, const RhoConfig& rho_cfg,
                                 double delta, const MiRho& parts) {
  MeasureSeries s;
  s.agent = pair.agent;
  s.other = pair.other;
  s.source = pair.source;
  s.delta = delta;
  s.window = rho_cfg.window;
  s.alpha = rho_cfg.alpha;
  const auto first = static_cast<std::ptrdiff_t>(pair.buffer_index);
  s.frames.assign(pair.frames.begin() + first, pair.frames.end());
  s.agent_pos.assign(pair.agent_pos.begin() + first, pair.agent_pos.end());
  s.other_pos.assign(pair.other_pos.begin() + first, pair.other_pos.end());
  s.mi = parts.mi;
  s.rho = parts.rho;
  s.aim = accumulate_aim(s.mi, s.rho, delta);
  return s;
}

}  // namespace detail

// MI, rho and AIM at every frame from T' to the end of the interaction.
inline MeasureSeries compute_measure_series(const InteractionPair& pair, const RhoConfig& rho_cfg,
                                            const MiConfig& mi_cfg, double delta) {
  return detail::make_series(pair, rho_cfg, delta, detail::mi_and_rho(pair, rho_cfg, mi_cfg));
}

// One series per (delta, N). MI and rho are shared across deltas; windows for
// which the pair is too short are skipped.
inline std::vector<MeasureSeries> sweep(const InteractionPair& pair, std::span<const double> deltas,
                                        std::span<const int> windows, const RhoConfig& rho_cfg,
                                        const MiConfig& mi_cfg, const BufferRule& rule = {}) {
  std::vector<MeasureSeries> out;
  if (deltas.empty()) return out;
  for (int n : windows) {
    RhoConfig cfg = rho_cfg;
    cfg.window = n;
    InteractionPair p = pair;
    p.buffer_index = rule.index(n);
    if (p.buffer_index >= p.size()) continue;
    const auto parts = detail::mi_and_rho(p, cfg, mi_cfg);
    for (double d : deltas) out.push_back(detail::make_series(p, cfg, d, parts));
  }
  return out;
}

}  // namespace sddkit
