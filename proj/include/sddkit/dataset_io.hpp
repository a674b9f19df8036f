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

// Readers for the Stanford Drone Dataset (SDD) annotation files and the
// Intersection Drone (inD) track CSVs, producing one trajectory per track.

#pragma once

#include <functional>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sddkit/common.hpp"

namespace sddkit {

struct BoundingBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// One row of an SDD annotations.txt file.
struct AnnotationRecord {
  std::int64_t track_id = 0;
  std::int64_t frame = 0;
  BoundingBox box;
  bool lost = false;
  bool occluded = false;
  bool generated = false;
  AgentClass label = AgentClass::kPedestrian;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct TrackPoint {
  std::int64_t frame = 0;
  Point2 pos;
  bool lost = false;
  bool occluded = false;
  bool generated = false;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

// Where a trajectory came from. For inD, scene is the location id and video
// the recording id.
struct SourceRef {
  std::string dataset;
  std::string scene;
  int video = 0;

  friend bool operator==(const SourceRef&, const SourceRef&) = default;
  friend auto operator<=>(const SourceRef&, const SourceRef&) = default;
};

struct Trajectory {
  std::int64_t track_id = 0;
  // Non-zero for the extra pieces produced when a track is split by
  // lost-annotation filtering (FilterKeepAll); rendered as "<id>.<segment>".
  int segment = 0;
  AgentClass label = AgentClass::kPedestrian;
  std::vector<TrackPoint> points;  // frames strictly increasing
  SourceRef source;

  std::string id_string() const {
    return segment == 0 ? std::to_string(track_id)
                        : std::to_string(track_id) + "." + std::to_string(segment);
  }
  std::int64_t first_frame() const { return points.front().frame; }
  std::int64_t last_frame() const { return points.back().frame; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front())))
      field.remove_prefix(1);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back())))
      field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

inline bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

inline bool parse_flag(std::string_view s, bool& out) {
  if (s == "0") {
    out = false;
    return true;
  }
  if (s == "1") {
    out = true;
    return true;
  }
  return false;
}

inline std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Parses one SDD row: track_id xmin ymin xmax ymax frame lost occluded
// generated "label". Throws ParseError tagged with `line_no`.
inline AnnotationRecord parse_sdd_line(std::string_view line, std::size_t line_no) {
  const auto fields = detail::split_whitespace(line);
  if (fields.size() != 10) {
    throw ParseError("expected 10 fields, found " + std::to_string(fields.size()), line_no);
  }
  AnnotationRecord rec;
  auto integer = [&](std::size_t i, const char* name) {
    auto v = parse_number<std::int64_t>(fields[i]);
    if (!v) throw ParseError(std::string("non-integer ") + name + " '" + std::string(fields[i]) + "'", line_no);
    return *v;
  };
  auto real = [&](std::size_t i, const char* name) {
    auto v = parse_number<double>(fields[i]);
    if (!v) throw ParseError(std::string("non-numeric ") + name + " '" + std::string(fields[i]) + "'", line_no);
    return *v;
  };
  auto flag = [&](std::size_t i, const char* name) {
    bool b = false;
    if (!detail::parse_flag(fields[i], b))
      throw ParseError(std::string(name) + " flag must be 0 or 1, got '" + std::string(fields[i]) + "'", line_no);
    return b;
  };
  rec.track_id = integer(0, "track_id");
  rec.box = {real(1, "xmin"), real(2, "ymin"), real(3, "xmax"), real(4, "ymax")};
  rec.frame = integer(5, "frame");
  rec.lost = flag(6, "lost");
  rec.occluded = flag(7, "occluded");
  rec.generated = flag(8, "generated");
  std::string_view label = fields[9];
  if (label.size() < 2 || label.front() != '"' || label.back() != '"') {
    throw ParseError("label must be double-quoted, got " + std::string(label), line_no);
  }
  label = label.substr(1, label.size() - 2);
  auto cls = parse_agent_class(label);
  if (!cls || *cls == AgentClass::kTruckBus) {
    throw ParseError("unknown SDD label '" + std::string(label) + "'", line_no);
  }
  rec.label = *cls;
  if (rec.track_id < 0) throw ParseError("negative track_id", line_no);
  if (rec.frame < 0) throw ParseError("negative frame", line_no);
  return rec;
}

// Streams records one row at a time; memory use is bounded by the row length.
inline void for_each_sdd_record(std::istream& in,
                                const std::function<void(const AnnotationRecord&)>& sink) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim_line(line);
    if (detail::is_blank(view)) continue;
    sink(parse_sdd_line(view, line_no));
  }
}

inline std::vector<AnnotationRecord> parse_sdd_annotations(std::istream& in) {
  std::vector<AnnotationRecord> records;
  for_each_sdd_record(in, [&](const AnnotationRecord& r) { records.push_back(r); });
  return records;
}

// Inverse of parse_sdd_line, in the original column order.
inline std::string format_sdd_record(const AnnotationRecord& r) {
  using detail::shortest;
  std::string s;
  s += std::to_string(r.track_id) + ' ' + shortest(r.box.xmin) + ' ' + shortest(r.box.ymin) +
       ' ' + shortest(r.box.xmax) + ' ' + shortest(r.box.ymax) + ' ' +
       std::to_string(r.frame) + ' ' + (r.lost ? '1' : '0') + ' ' + (r.occluded ? '1' : '0') +
       ' ' + (r.generated ? '1' : '0') + " \"" + std::string(to_string(r.label)) + '"';
  return s;
}

// Groups one video's records into per-track trajectories ordered by track id.
// The class comes from the record at the track's first frame; a label change
// later in the track is reported through `diag`.
inline std::vector<Trajectory> assemble_trajectories(std::span<const AnnotationRecord> records,
                                                     const SourceRef& source = {},
                                                     Diagnostics* diag = nullptr) {
  std::map<std::int64_t, std::vector<const AnnotationRecord*>> by_track;
  for (const auto& r : records) by_track[r.track_id].push_back(&r);

  std::vector<Trajectory> out;
  out.reserve(by_track.size());
  for (auto& [id, recs] : by_track) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto* a, const auto* b) { return a->frame < b->frame; });
    Trajectory t;
    t.track_id = id;
    t.source = source;
    t.label = recs.front()->label;
    t.points.reserve(recs.size());
    bool label_changed = false;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto* r = recs[i];
      if (i > 0 && recs[i - 1]->frame == r->frame) {
        throw StructuralError("duplicate annotation for track " + std::to_string(id) +
                              " at frame " + std::to_string(r->frame));
      }
      if (r->label != t.label) label_changed = true;
      t.points.push_back({r->frame, r->box.center(), r->lost, r->occluded, r->generated});
    }
    if (label_changed) {
      warn(diag, "track " + std::to_string(id) + " changes class mid-track; using first-frame label " +
                     std::string(to_string(t.label)));
    }
    out.push_back(std::move(t));
  }
  return out;
}

// inD stores positions in meters with y pointing up; pixel rows grow downward.
inline Point2 ind_meters_to_pixels(Point2 m, double meters_per_pixel) {
  return {m.x / meters_per_pixel, -m.y / meters_per_pixel};
}

inline Point2 ind_pixels_to_meters(Point2 px, double meters_per_pixel) {
  return {px.x * meters_per_pixel, -px.y * meters_per_pixel};
}

inline std::optional<AgentClass> parse_ind_class(std::string_view s) {
  const std::string c = to_lower(s);
  if (c == "pedestrian") return AgentClass::kPedestrian;
  if (c == "bicycle") return AgentClass::kBiker;
  if (c == "car") return AgentClass::kCar;
  if (c == "truck_bus" || c == "truck" || c == "bus") return AgentClass::kTruckBus;
  return std::nullopt;
}

namespace detail {

// Header-indexed CSV table held in memory; inD files are a few tens of MB.
class CsvTable {
 public:
  CsvTable(std::istream& in, std::string name) : name_(std::move(name)) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(name_ + ": missing header row", 1);
    header_line_ = std::string(trim_line(line));
    for (auto f : split_csv(header_line_)) columns_.emplace(std::string(f), columns_.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view v = trim_line(line);
      if (is_blank(v)) continue;
      rows_.push_back({std::string(v), line_no});
    }
  }

  std::size_t column(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw ParseError(name_ + ": missing column '" + name + "'", 1);
    return it->second;
  }

  template <typename Fn>
  void for_each_row(Fn&& fn) const {
    for (const auto& [text, line_no] : rows_) {
      auto fields = split_csv(text);
      if (fields.size() != columns_.size()) {
        throw ParseError(name_ + ": expected " + std::to_string(columns_.size()) +
                             " fields, found " + std::to_string(fields.size()),
                         line_no);
      }
      fn(fields, line_no);
    }
  }

  template <typename T>
  T number(std::span<const std::string_view> fields, std::size_t col, std::size_t line_no) const {
    auto v = parse_number<T>(fields[col]);
    if (!v) {
      throw ParseError(name_ + ": non-numeric value '" + std::string(fields[col]) + "'", line_no);
    }
    return *v;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  std::string name_;
  std::string header_line_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::vector<std::pair<std::string, std::size_t>> rows_;
};

}  // namespace detail

struct IndRecordingInfo {
  int recording_id = 0;
  int location_id = 0;
  double frame_rate = 25.0;
  double meters_per_pixel = 0.0;  // orthoPxToMeter
};

inline IndRecordingInfo parse_ind_recording_meta(std::istream& recording_meta) {
  detail::CsvTable meta(recording_meta, "recordingMeta");
  if (meta.size() != 1) {
    throw ParseError("recordingMeta: expected exactly one data row, found " +
                         std::to_string(meta.size()),
                     0);
  }
  IndRecordingInfo info;
  const auto c_id = meta.column("recordingId");
  const auto c_loc = meta.column("locationId");
  const auto c_rate = meta.column("frameRate");
  const auto c_factor = meta.column("orthoPxToMeter");
  meta.for_each_row([&](std::span<const std::string_view> f, std::size_t ln) {
    info.recording_id = meta.number<int>(f, c_id, ln);
    info.location_id = meta.number<int>(f, c_loc, ln);
    info.frame_rate = meta.number<double>(f, c_rate, ln);
    info.meters_per_pixel = meta.number<double>(f, c_factor, ln);
  });
  if (!(info.meters_per_pixel > 0.0)) {
    throw StructuralError("recording " + std::to_string(info.recording_id) +
                          ": orthoPxToMeter must be positive");
  }
  return info;
}

// Reads one inD recording (tracks, tracksMeta, recordingMeta) and converts
// track centers to pixels. Every track must be frame-contiguous and match the
// numFrames in tracksMeta.
inline std::vector<Trajectory> parse_ind_tracks(std::istream& tracks, std::istream& tracks_meta,
                                                const IndRecordingInfo& rec) {
  if (!(rec.meters_per_pixel > 0.0)) {
    throw StructuralError("recording " + std::to_string(rec.recording_id) +
                          ": meter-per-pixel factor must be positive");
  }

  struct MetaRow {
    AgentClass label;
    std::int64_t num_frames;
  };
  std::map<std::int64_t, MetaRow> meta_rows;
  {
    detail::CsvTable meta(tracks_meta, "tracksMeta");
    const auto c_track = meta.column("trackId");
    const auto c_frames = meta.column("numFrames");
    const auto c_class = meta.column("class");
    meta.for_each_row([&](std::span<const std::string_view> f, std::size_t ln) {
      auto id = meta.number<std::int64_t>(f, c_track, ln);
      auto cls = parse_ind_class(f[c_class]);
      if (!cls) throw ParseError("tracksMeta: unknown class '" + std::string(f[c_class]) + "'", ln);
      meta_rows[id] = {*cls, meta.number<std::int64_t>(f, c_frames, ln)};
    });
  }

  std::map<std::int64_t, std::vector<TrackPoint>> points;
  {
    detail::CsvTable table(tracks, "tracks");
    const auto c_rec = table.column("recordingId");
    const auto c_track = table.column("trackId");
    const auto c_frame = table.column("frame");
    const auto c_x = table.column("xCenter");
    const auto c_y = table.column("yCenter");
    table.for_each_row([&](std::span<const std::string_view> f, std::size_t ln) {
      if (table.number<int>(f, c_rec, ln) != rec.recording_id) {
        throw StructuralError("tracks line " + std::to_string(ln) +
                              ": recordingId differs from recordingMeta");
      }
      TrackPoint p;
      p.frame = table.number<std::int64_t>(f, c_frame, ln);
      p.pos = ind_meters_to_pixels({table.number<double>(f, c_x, ln), table.number<double>(f, c_y, ln)},
                                   rec.meters_per_pixel);
      points[table.number<std::int64_t>(f, c_track, ln)].push_back(p);
    });
  }

  const SourceRef source{"ind", std::to_string(rec.location_id), rec.recording_id};
  std::vector<Trajectory> out;
  out.reserve(points.size());
  for (auto& [id, pts] : points) {
    auto meta = meta_rows.find(id);
    if (meta == meta_rows.end()) {
      throw StructuralError("track " + std::to_string(id) + " missing from tracksMeta");
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].frame != pts[i - 1].frame + 1) {
        throw StructuralError("track " + std::to_string(id) + ": frame gap or duplicate between " +
                              std::to_string(pts[i - 1].frame) + " and " +
                              std::to_string(pts[i].frame));
      }
    }
    if (static_cast<std::int64_t>(pts.size()) != meta->second.num_frames) {
      throw StructuralError("track " + std::to_string(id) + ": " + std::to_string(pts.size()) +
                            " frames but tracksMeta numFrames is " +
                            std::to_string(meta->second.num_frames));
    }
    Trajectory t;
    t.track_id = id;
    t.label = meta->second.label;
    t.points = std::move(pts);
    t.source = source;
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Trajectory> parse_ind_tracks(std::istream& tracks, std::istream& tracks_meta,
                                                std::istream& recording_meta) {
  return parse_ind_tracks(tracks, tracks_meta, parse_ind_recording_meta(recording_meta));
}

}  // namespace sddkit
