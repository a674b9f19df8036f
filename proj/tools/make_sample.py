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
"""Writes the small synthetic SDD/inD sample under data/sample/.

The files are synthetic: smooth random walks with lost-annotation runs at the
start, middle and end of some tracks, one walking pair and one fragmented
track. Output is deterministic for a given seed.
"""

import argparse
import pathlib

import numpy as np

SDD_VIDEOS = [("coupa", 0, 450), ("coupa", 1, 450), ("quad", 0, 360)]
BOX = 20.0
WIDTH, HEIGHT = 1000.0, 800.0


def walk(rng, n, start, speed):
    heading = rng.uniform(0, 2 * np.pi)
    pos = np.empty((n, 2))
    pos[0] = start
    for i in range(1, n):
        heading += rng.normal(0, 0.03)
        pos[i] = pos[i - 1] + speed * np.array([np.cos(heading), np.sin(heading)])
    return np.clip(pos, 5, [WIDTH - 5, HEIGHT - 5])


def with_lost(pos, rng, start_run, middle_run, end_run):
    """Marks lost runs. Start/end runs park at the image border, middle runs
    are linear interpolations, as in hand-annotated SDD files."""
    n = len(pos)
    lost = np.zeros(n, dtype=bool)
    pos = pos.copy()
    border = np.array([WIDTH - 1, pos[0][1]])
    if start_run:
        lost[:start_run] = True
        pos[:start_run] = border
    if end_run:
        lost[n - end_run:] = True
        pos[n - end_run:] = [pos[n - end_run - 1][0], HEIGHT - 1]
    if middle_run:
        a = n // 2 - middle_run // 2
        b = a + middle_run
        lost[a:b] = True
        for k in range(a, b):
            w = (k - a + 1) / (middle_run + 1)
            pos[k] = (1 - w) * pos[a - 1] + w * pos[b]
    return pos, lost


def sdd_rows(track_id, first_frame, pos, lost, label, rng):
    rows = []
    for k, (p, is_lost) in enumerate(zip(pos, lost)):
        generated = int(not is_lost and k % 5 != 0)
        occluded = int(rng.uniform() < 0.05)
        rows.append(
            f"{track_id} {p[0] - BOX / 2:.0f} {p[1] - BOX / 2:.0f} {p[0] + BOX / 2:.0f} "
            f"{p[1] + BOX / 2:.0f} {first_frame + k} {int(is_lost)} {occluded} {generated} \"{label}\""
        )
    return rows


def make_sdd_video(rng, frames):
    rows = []
    tid = 0
    labels = ["Pedestrian", "Pedestrian", "Biker", "Pedestrian", "Skater", "Cart"]
    lost_plan = [(12, 0, 30), (0, 24, 0), (36, 0, 0), (0, 0, 0), (0, 0, 48), (0, 0, 0)]
    for label, plan in zip(labels, lost_plan):
        n = int(rng.integers(frames // 2, frames))
        first = int(rng.integers(0, frames - n + 1))
        speed = 3.0 if label in ("Biker", "Skater", "Cart") else 1.2
        pos = walk(rng, n, rng.uniform([100, 100], [WIDTH - 100, HEIGHT - 100]), speed)
        pos, lost = with_lost(pos, rng, *plan)
        rows += sdd_rows(tid, first, pos, lost, label, rng)
        tid += 1
    # Two pedestrians walking side by side.
    n = frames - 30
    lead = walk(rng, n, np.array([200.0, 200.0]), 1.4)
    rows += sdd_rows(tid, 10, lead, np.zeros(n, bool), "Pedestrian", rng)
    rows += sdd_rows(tid + 1, 10, lead + [25.0, 5.0], np.zeros(n, bool), "Pedestrian", rng)
    tid += 2
    # One person annotated as two tracks with a short gap.
    whole = walk(rng, 240, np.array([600.0, 400.0]), 1.0)
    rows += sdd_rows(tid, 60, whole[:120], np.zeros(120, bool), "Pedestrian", rng)
    rows += sdd_rows(tid + 1, 60 + 132, whole[132:], np.zeros(108, bool), "Pedestrian", rng)
    return rows


def write_sdd(root, rng):
    for scene, video, frames in SDD_VIDEOS:
        path = root / "sdd" / scene / f"video{video}" / "annotations.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(make_sdd_video(rng, frames)) + "\n")


def write_ind(root, rng):
    d = root / "ind"
    d.mkdir(parents=True, exist_ok=True)
    rec, loc, factor = 0, 4, 0.00814
    classes = ["pedestrian", "car", "bicycle", "truck_bus"]
    track_rows, meta_rows = [], []
    for tid, cls in enumerate(classes):
        n = int(rng.integers(150, 250))
        first = int(rng.integers(0, 50))
        speed = 0.05 if cls == "pedestrian" else 0.4
        px = walk(rng, n, rng.uniform([200, 200], [800, 600]), speed / factor)
        for k, p in enumerate(px):
            x_m, y_m = p[0] * factor, -p[1] * factor
            track_rows.append(f"{rec},{tid},{first + k},{x_m:.5f},{y_m:.5f}")
        meta_rows.append(f"{rec},{tid},{first},{first + n - 1},{n},{cls}")
    (d / "00_tracks.csv").write_text(
        "recordingId,trackId,frame,xCenter,yCenter\n" + "\n".join(track_rows) + "\n")
    (d / "00_tracksMeta.csv").write_text(
        "recordingId,trackId,initialFrame,finalFrame,numFrames,class\n" + "\n".join(meta_rows) + "\n")
    (d / "00_recordingMeta.csv").write_text(
        "recordingId,locationId,frameRate,orthoPxToMeter\n" f"{rec},{loc},25,{factor}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "data" / "sample")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    write_sdd(args.out, rng)
    write_ind(args.out, rng)


if __name__ == "__main__":
    main()
