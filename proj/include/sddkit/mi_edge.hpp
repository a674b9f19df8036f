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

// Hash-based (grid quantization) estimator of the mutual-information
// functional E[g(dP_XY / dP_X P_Y)] with g(t) = (t-1)^2 / (2(t+1)), using an
// ensemble of grid bandwidths and incremental count updates.
//
// For one bandwidth eps, x and y are hashed to the cells floor(x/eps) and
// floor(y/eps). With N_i, M_j the marginal cell counts, N_ij the joint count
// and n the sample count, the plug-in estimate over occupied joint cells is
//
//   kJoint:   sum_ij (N_ij / n)           * g(N_ij n / (N_i M_j))
//   kProduct: sum_ij (N_i M_j / n^2)      * g(N_ij n / (N_i M_j))
//
// and the ensemble value is sum_k w_k * MI_{eps_k}.

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "sddkit/common.hpp"

namespace sddkit {

// g(t) = (t-1)^2 / (2(t+1)), t >= 0.
inline double g_divergence(double t) {
  if (!(t >= 0.0)) throw std::domain_error("g_divergence: t must be >= 0");
  const double d = t - 1.0;
  return d * d / (2.0 * (t + 1.0));
}

struct SamplePair {
  Point2 x;
  Point2 y;
};

enum class MiWeighting {
  kJoint,    // weight each occupied joint cell by its empirical joint mass
  kProduct,  // weight by the product of marginal masses (EDGE form)
};

struct MiConfig {
  std::vector<double> bandwidths{8.0, 16.0, 32.0, 64.0};  // pixels
  std::vector<double> weights;  // empty: uniform
  std::size_t n_min = 10;
  MiWeighting weighting = MiWeighting::kJoint;

  std::vector<double> resolved_weights() const {
    if (weights.empty()) {
      return std::vector<double>(bandwidths.size(), 1.0 / static_cast<double>(bandwidths.size()));
    }
    return weights;
  }

  void validate() const {
    if (bandwidths.empty()) throw ConfigError("MI bandwidth set is empty");
    for (double b : bandwidths)
      if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("MI bandwidths must be positive");
    if (!weights.empty()) {
      if (weights.size() != bandwidths.size()) {
        throw ConfigError("MI weights must match the bandwidth count");
      }
      double sum = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("MI weights must be non-negative");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("MI weights must sum to 1");
    }
    if (n_min < 1) throw ConfigError("MI n_min must be at least 1");
  }
};

// Dyadic ladder eps0 * 2^k, k = 0..count-1, where eps0 = extent *
// n^(-1/(2d)) is the grid width that balances bias and variance for n samples
// of a d-dimensional variable spread over `extent` pixels.
inline std::vector<double> scaled_bandwidth_ladder(double extent, std::size_t n, int dims = 2,
                                                   int count = 3) {
  if (!(extent > 0.0) || n == 0 || dims < 1 || count < 1) {
    throw ConfigError("scaled_bandwidth_ladder: invalid arguments");
  }
  const double eps0 = extent * std::pow(static_cast<double>(n), -1.0 / (2.0 * dims));
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(eps0 * std::ldexp(1.0, k));
  return out;
}

namespace detail {

struct Cell2 {
  std::int64_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const Cell2&, const Cell2&) = default;
};

struct Cell4 {
  Cell2 x;
  Cell2 y;
  friend bool operator==(const Cell4&, const Cell4&) = default;
};

inline std::size_t mix(std::size_t h, std::uint64_t v) {
  v ^= v >> 33;
  v *= 0xff51afd7ed558ccdULL;
  v ^= v >> 33;
  return h ^ (static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct Cell2Hash {
  std::size_t operator()(const Cell2& c) const {
    return mix(mix(0, static_cast<std::uint64_t>(c.a)), static_cast<std::uint64_t>(c.b));
  }
};

struct Cell4Hash {
  std::size_t operator()(const Cell4& c) const {
    return mix(Cell2Hash{}(c.x), Cell2Hash{}(c.y));
  }
};

inline Cell2 quantize(Point2 p, double eps) {
  return {static_cast<std::int64_t>(std::floor(p.x / eps)),
          static_cast<std::int64_t>(std::floor(p.y / eps))};
}

}  // namespace detail

// Count tables for every bandwidth. Single writer; copying is cheap relative
// to re-counting and yields an independent state.
class HashMiEstimator {
 public:
  struct Totals {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    std::uint64_t joint = 0;
  };

  explicit HashMiEstimator(MiConfig cfg = {}) : cfg_(std::move(cfg)) {
    cfg_.validate();
    weights_ = cfg_.resolved_weights();
    tables_.resize(cfg_.bandwidths.size());
  }

  void push(const SamplePair& s) {
    if (!std::isfinite(s.x.x) || !std::isfinite(s.x.y) || !std::isfinite(s.y.x) ||
        !std::isfinite(s.y.y)) {
      throw std::invalid_argument("HashMiEstimator::push: non-finite coordinate");
    }
    for (std::size_t k = 0; k < tables_.size(); ++k) {
      const double eps = cfg_.bandwidths[k];
      const detail::Cell2 cx = detail::quantize(s.x, eps);
      const detail::Cell2 cy = detail::quantize(s.y, eps);
      auto& t = tables_[k];
      ++t.x[cx];
      ++t.y[cy];
      ++t.joint[{cx, cy}];
    }
    ++n_;
  }

  std::size_t size() const { return n_; }
  const MiConfig& config() const { return cfg_; }

  // Plug-in estimate for one bandwidth of the ensemble.
  double estimate_at(std::size_t k) const {
    require_samples();
    const auto& t = tables_.at(k);
    const double n = static_cast<double>(n_);
    std::vector<double> terms;
    terms.reserve(t.joint.size());
    for (const auto& [cell, nij] : t.joint) {
      const double ni = static_cast<double>(t.x.at(cell.x));
      const double mj = static_cast<double>(t.y.at(cell.y));
      const double nm = ni * mj;
      const double ratio = (static_cast<double>(nij) * n) / nm;
      const double w = cfg_.weighting == MiWeighting::kJoint ? static_cast<double>(nij) / n
                                                             : nm / (n * n);
      terms.push_back(w * g_divergence(ratio));
    }
    // Summing in sorted order makes the result independent of hash-table
    // iteration order (and hence exact under swapping x and y).
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double v : terms) sum += v;
    return sum;
  }

  double estimate() const {
    require_samples();
    double total = 0.0;
    for (std::size_t k = 0; k < tables_.size(); ++k) {
      if (weights_[k] == 0.0) continue;
      total += weights_[k] * estimate_at(k);
    }
    return total;
  }

  Totals totals(std::size_t k) const {
    Totals r;
    const auto& t = tables_.at(k);
    for (const auto& [c, v] : t.x) r.x += v;
    for (const auto& [c, v] : t.y) r.y += v;
    for (const auto& [c, v] : t.joint) r.joint += v;
    return r;
  }

  std::size_t joint_cells(std::size_t k) const { return tables_.at(k).joint.size(); }

  std::uint64_t joint_count(std::size_t k, const SamplePair& s) const {
    const double eps = cfg_.bandwidths.at(k);
    const auto& j = tables_.at(k).joint;
    auto it = j.find({detail::quantize(s.x, eps), detail::quantize(s.y, eps)});
    return it == j.end() ? 0 : it->second;
  }

 private:
  struct Tables {
    std::unordered_map<detail::Cell2, std::uint64_t, detail::Cell2Hash> x;
    std::unordered_map<detail::Cell2, std::uint64_t, detail::Cell2Hash> y;
    std::unordered_map<detail::Cell4, std::uint64_t, detail::Cell4Hash> joint;
  };

  void require_samples() const {
    if (n_ < cfg_.n_min) {
      throw InsufficientDataError("MI estimate needs at least " + std::to_string(cfg_.n_min) +
                                  " samples, have " + std::to_string(n_));
    }
  }

  MiConfig cfg_;
  std::vector<double> weights_;
  std::vector<Tables> tables_;
  std::size_t n_ = 0;
};

inline double estimate_mi(std::span<const SamplePair> samples, const MiConfig& cfg = {}) {
  HashMiEstimator est(cfg);
  for (const auto& s : samples) est.push(s);
  return est.estimate();
}

struct MiPoint {
  std::size_t prefix = 0;  // number of leading samples used
  double value = 0.0;
};

// MI of every requested prefix length in a single pass over the samples.
inline std::vector<MiPoint> mi_prefix_series(std::span<const SamplePair> samples,
                                             std::span<const std::size_t> prefixes,
                                             const MiConfig& cfg = {}) {
  HashMiEstimator est(cfg);
  std::vector<MiPoint> out;
  out.reserve(prefixes.size());
  std::size_t pushed = 0;
  std::size_t last = 0;
  for (std::size_t t : prefixes) {
    if (!out.empty() && t <= last) throw std::invalid_argument("mi_prefix_series: prefixes must increase");
    if (t > samples.size()) throw std::out_of_range("mi_prefix_series: prefix beyond sample count");
    while (pushed < t) est.push(samples[pushed++]);
    out.push_back({t, est.estimate()});
    last = t;
  }
  return out;
}

}  // namespace sddkit
