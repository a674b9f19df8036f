# Copyright 2026 The sddkit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Independent oracle for the grid-hash MI estimator.

Recounts cells with numpy (no incremental state) and evaluates the plug-in
sum in exact rational arithmetic for the small fixtures. Its printed values
are frozen into tests/test_mi_edge.cpp and tests/acceptance/acceptance.cpp:

  * tau_ind: 99th percentile of the ensemble estimate over 100 independent
    draws of 10,000 pairs, x and y uniform on [0, 1000]^2 (seed 20260101);
  * the identity value y = x on one draw;
  * exact values for the small hand-built fixtures.

Run: python3 tests/oracles/mi_threshold_oracle.py
"""

from fractions import Fraction
import json

import numpy as np

SEED = 20260101
N = 10_000
EXTENT = 1000.0
REPS = 100


def g(t):
    return (t - 1) ** 2 / (2 * (t + 1))


def mi_single(x, y, eps, weighting="joint"):
    cx = np.floor(x / eps).astype(np.int64)
    cy = np.floor(y / eps).astype(np.int64)
    n = len(x)
    _, ix = np.unique(cx, axis=0, return_inverse=True)
    _, iy = np.unique(cy, axis=0, return_inverse=True)
    ix = ix.reshape(-1)
    iy = iy.reshape(-1)
    nx = np.bincount(ix)
    ny = np.bincount(iy)
    joint, nij = np.unique(np.stack([ix, iy], axis=1), axis=0, return_counts=True)
    ni = nx[joint[:, 0]].astype(float)
    mj = ny[joint[:, 1]].astype(float)
    ratio = nij * n / (ni * mj)
    w = nij / n if weighting == "joint" else ni * mj / n**2
    return float(np.sum(w * g(ratio)))


def mi(x, y, bandwidths, weighting="joint"):
    return float(np.mean([mi_single(x, y, e, weighting) for e in bandwidths]))


def mi_exact(xs, ys, eps):
    """Exact rational plug-in value for one bandwidth (joint weighting)."""
    def cell(p):
        return tuple(int(np.floor(c / eps)) for c in p)
    n = len(xs)
    cx = [cell(p) for p in xs]
    cy = [cell(p) for p in ys]
    total = Fraction(0)
    for key in sorted(set(zip(cx, cy))):
        nij = sum(1 for a, b in zip(cx, cy) if (a, b) == key)
        ni = cx.count(key[0])
        mj = cy.count(key[1])
        t = Fraction(nij * n, ni * mj)
        total += Fraction(nij, n) * g(t)
    return total


def scaled_ladder(extent, n, dims=2, count=3):
    eps0 = extent * n ** (-1.0 / (2 * dims))
    return [eps0 * 2**k for k in range(count)]


def main():
    rng = np.random.default_rng(SEED)
    ladders = {"scaled": scaled_ladder(EXTENT, N), "default": [8.0, 16.0, 32.0, 64.0]}
    out = {"seed": SEED, "n": N, "reps": REPS}
    indep = {k: [] for k in ladders}
    for _ in range(REPS):
        x = rng.uniform(0, EXTENT, size=(N, 2))
        y = rng.uniform(0, EXTENT, size=(N, 2))
        for k, bw in ladders.items():
            indep[k].append(mi(x, y, bw))
    x = rng.uniform(0, EXTENT, size=(N, 2))
    for k, bw in ladders.items():
        vals = np.array(indep[k])
        out[k] = {
            "bandwidths": bw,
            "tau_ind": float(np.percentile(vals, 99)),
            "indep_max": float(vals.max()),
            "identity": mi(x, x.copy(), bw),
        }

    small_x = [(0, 0), (1, 1), (12, 3), (15, 9), (3, 18)]
    small_y = [(0, 0), (25, 2), (26, 4), (5, 5), (5, 1)]
    out["small"] = {
        "x": small_x, "y": small_y, "eps": 10,
        "exact": str(mi_exact(small_x, small_y, 10)),
        "value": float(mi_exact(small_x, small_y, 10)),
    }
    # Two clusters of two: x and y share their partition.
    pair_x = [(0, 0), (0, 0), (20, 0), (20, 0)]
    pair_y = [(0, 0), (0, 0), (0, 20), (0, 20)]
    out["two_clusters"] = {"exact": str(mi_exact(pair_x, pair_y, 10)),
                           "value": float(mi_exact(pair_x, pair_y, 10))}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
