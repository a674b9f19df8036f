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

// ADE/FDE scoring of predicted future trajectories, in pixels.

#pragma once

#include <functional>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddkit/preprocess.hpp"

namespace sddkit {

inline void require_same_length(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("prediction has " + std::to_string(a.size()) +
                                " points but ground truth has " + std::to_string(b.size()));
  }
  if (a.empty()) throw std::invalid_argument("empty trajectory");
}

// Mean Euclidean distance over all points.
inline double ade(std::span<const Point2> prediction, std::span<const Point2> truth) {
  require_same_length(prediction, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) sum += distance(prediction[i], truth[i]);
  return sum / static_cast<double>(prediction.size());
}

// Euclidean distance at the final point.
inline double fde(std::span<const Point2> prediction, std::span<const Point2> truth) {
  require_same_length(prediction, truth);
  return distance(prediction.back(), truth.back());
}

inline std::vector<Point2> positions(std::span<const TrackPoint> pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.pos);
  return out;
}

struct Prediction {
  std::string window_id;
  std::vector<Point2> future;
};

using Predictor = std::function<Prediction(const TrajectoryWindow&)>;

// Repeats the mean observed step for every future point.
inline Prediction constant_velocity_predict(const TrajectoryWindow& w) {
  if (w.observed.size() < 2) throw std::invalid_argument("constant velocity needs >= 2 observed points");
  const Point2 first = w.observed.front().pos;
  const Point2 last = w.observed.back().pos;
  const double steps = static_cast<double>(w.observed.size() - 1);
  const Point2 v{(last.x - first.x) / steps, (last.y - first.y) / steps};
  Prediction p;
  p.window_id = w.id;
  p.future.reserve(w.future.size());
  for (std::size_t k = 1; k <= w.future.size(); ++k) {
    p.future.push_back(last + static_cast<double>(k) * v);
  }
  return p;
}

struct EvalReport {
  std::string config;  // preprocessing configuration label
  std::string group;   // "all" or a class name
  std::size_t windows = 0;
  double ade = 0.0;
  double fde = 0.0;
};

// Mean ADE/FDE over all windows and per class. Classes without windows are
// omitted (noted in diag).
inline std::vector<EvalReport> evaluate(std::span<const TrajectoryWindow> windows,
                                        const Predictor& predictor, const std::string& config,
                                        Diagnostics* diag = nullptr) {
  struct Acc {
    std::size_t n = 0;
    double ade = 0.0;
    double fde = 0.0;
  };
  Acc all;
  std::map<AgentClass, Acc> per_class;
  for (const auto& w : windows) {
    const Prediction pred = predictor(w);
    const auto truth = positions(w.future);
    const double a = ade(pred.future, truth);
    const double f = fde(pred.future, truth);
    for (Acc* acc : {&all, &per_class[w.label]}) {
      ++acc->n;
      acc->ade += a;
      acc->fde += f;
    }
  }
  std::vector<EvalReport> out;
  auto emit = [&](const std::string& group, const Acc& acc) {
    if (acc.n == 0) {
      warn(diag, config + ": no windows for group " + group);
      return;
    }
    const double n = static_cast<double>(acc.n);
    out.push_back({config, group, acc.n, acc.ade / n, acc.fde / n});
  };
  emit("all", all);
  for (AgentClass c : kAllClasses) {
    auto it = per_class.find(c);
    if (it != per_class.end()) emit(std::string(to_string(c)), it->second);
  }
  return out;
}

// External predictions: one JSON object per line,
//   {"window_id": "...", "future": [[x, y], ...]}
inline std::map<std::string, Prediction> parse_predictions(std::istream& in) {
  std::map<std::string, Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("predictions: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("window_id") || !j["window_id"].is_string() ||
        !j.contains("future") || !j["future"].is_array()) {
      throw ParseError("predictions: record needs string window_id and array future", line_no);
    }
    Prediction p;
    p.window_id = j["window_id"].get<std::string>();
    for (const auto& pt : j["future"]) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw ParseError("predictions: future points must be [x, y] pairs", line_no);
      }
      p.future.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (!out.emplace(p.window_id, p).second) {
      throw ParseError("predictions: duplicate window_id " + p.window_id, line_no);
    }
  }
  return out;
}

// Restricts `windows` to those with an external prediction and returns a
// predictor that serves them. Unknown ids and wrong lengths are errors.
inline Predictor external_predictor(std::map<std::string, Prediction> predictions,
                                    std::vector<TrajectoryWindow>& windows,
                                    Diagnostics* diag = nullptr) {
  std::map<std::string, const TrajectoryWindow*> by_id;
  for (const auto& w : windows) by_id[w.id] = &w;
  for (const auto& [id, p] : predictions) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ParseError("predictions: unknown window id " + id, 0);
    if (p.future.size() != it->second->future.size()) {
      throw ParseError("predictions: window " + id + " has " + std::to_string(p.future.size()) +
                           " points, expected " + std::to_string(it->second->future.size()),
                       0);
    }
  }
  std::size_t missing = 0;
  std::erase_if(windows, [&](const TrajectoryWindow& w) {
    const bool drop = !predictions.count(w.id);
    missing += drop;
    return drop;
  });
  if (missing) warn(diag, std::to_string(missing) + " windows have no external prediction; skipped");
  return [preds = std::move(predictions)](const TrajectoryWindow& w) { return preds.at(w.id); };
}

}  // namespace sddkit
