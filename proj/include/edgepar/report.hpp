// Copyright 2026 The edgepar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edgepar/error.hpp"
#include "edgepar/eval.hpp"
#include "edgepar/ingest.hpp"
#include "edgepar/numfmt.hpp"
#include "edgepar/pipeline.hpp"
#include "edgepar/synchronizer.hpp"

namespace edgepar::report {

// Bumped whenever a column is added, removed or reordered.
inline constexpr int kSchemaVersion = 1;

inline constexpr std::string_view kFramesHeader =
    "index,status,source_index,worker_id,dispatch_ts,completion_ts,"
    "detection_count";
inline constexpr std::string_view kDetectionsHeader =
    "index,source_index,class_label,x,y,w,h,confidence";
inline constexpr std::string_view kSummaryHeader =
    "schema_version,scheduler,mode,clock,lambda_fps,workers,total_frames,"
    "processed,filled,filled_empty,dropped,sigma_p_fps,span_s,map_percent,"
    "fps_per_watt,seed";
inline constexpr std::string_view kSweepHeader =
    "schema_version,n,nominal_fps,sigma_p_fps,processed,dropped,map_percent";

namespace detail {

inline std::string ts(const std::optional<Seconds>& t) {
  return t ? numfmt::fixed(*t, 9) : std::string();
}

inline std::string percent(const std::optional<double>& v) {
  return v ? numfmt::fixed(*v * 100.0, 1) : std::string();
}

}  // namespace detail

// One row per frame, in stream order.
inline void write_frames_csv(std::ostream& out,
                             const std::vector<FrameResult>& results) {
  out << kFramesHeader << '\n';
  for (const auto& r : results) {
    out << r.index << ',' << status_key(r.status) << ',' << r.source_index
        << ',' << (r.worker_id ? std::to_string(*r.worker_id) : "") << ','
        << detail::ts(r.dispatch_ts) << ',' << detail::ts(r.completion_ts)
        << ',' << r.detections.size() << '\n';
  }
}

// One row per emitted detection, including detections copied into filled
// frames. Class labels must not contain commas or line breaks.
inline void write_detections_csv(std::ostream& out,
                                 const std::vector<FrameResult>& results) {
  out << kDetectionsHeader << '\n';
  for (const auto& r : results) {
    for (const auto& d : r.detections) {
      if (d.class_label.find_first_of(",\n\r") != std::string::npos)
        throw InputError("class label '" + d.class_label +
                         "' cannot be written to CSV");
      out << r.index << ',' << r.source_index << ',' << d.class_label << ','
          << numfmt::shortest(d.bbox.x) << ',' << numfmt::shortest(d.bbox.y)
          << ',' << numfmt::shortest(d.bbox.w) << ','
          << numfmt::shortest(d.bbox.h) << ','
          << numfmt::shortest(d.confidence) << '\n';
    }
  }
}

struct SummaryRow {
  std::string scheduler;
  std::string mode;
  std::string clock;
  double lambda_fps = 0.0;
  std::size_t workers = 0;
  std::int64_t total_frames = 0;
  MetricsReport metrics;
  std::int64_t dropped = 0;
  Seconds span = 0.0;
  std::uint64_t seed = 0;
};

inline void write_summary_csv(std::ostream& out, const SummaryRow& row) {
  const auto& m = row.metrics;
  out << kSummaryHeader << '\n'
      << kSchemaVersion << ',' << row.scheduler << ',' << row.mode << ','
      << row.clock << ',' << numfmt::shortest(row.lambda_fps) << ','
      << row.workers << ',' << row.total_frames << ',' << m.processed_count
      << ',' << m.filled_count << ',' << m.filled_empty_count << ','
      << row.dropped << ',' << numfmt::fixed(m.sigma_p_fps, 3) << ','
      << numfmt::fixed(row.span, 6) << ',' << detail::percent(m.map_score)
      << ',' << (m.fps_per_watt ? numfmt::fixed(*m.fps_per_watt, 4) : "")
      << ',' << row.seed << '\n';
}

struct SweepRow {
  std::size_t n = 0;
  double nominal_fps = 0.0;
  double sigma_p_fps = 0.0;
  std::int64_t processed = 0;
  std::int64_t dropped = 0;
  std::optional<double> map_score;
};

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows)
    out << kSchemaVersion << ',' << r.n << ',' << numfmt::fixed(r.nominal_fps, 1)
        << ',' << numfmt::fixed(r.sigma_p_fps, 3) << ',' << r.processed << ','
        << r.dropped << ',' << detail::percent(r.map_score) << '\n';
}

namespace detail {

inline void expect_header(std::istream& in, std::string_view header,
                          const std::string& what) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(what + " is empty (missing header row)", 1);
  if (numfmt::trim(line) != header)
    throw ParseError(what + " header does not match the expected columns '" +
                         std::string(header) + "'",
                     1);
}

template <typename T>
T field_as(std::string_view s, std::size_t line, std::string_view name) {
  std::optional<T> v;
  if constexpr (std::is_floating_point_v<T>)
    v = numfmt::parse_double(s);
  else
    v = numfmt::parse_int<T>(s);
  if (!v)
    throw ParseError("column '" + std::string(name) + "' has invalid value '" +
                         std::string(s) + "'",
                     line);
  return *v;
}

}  // namespace detail

// Reads a frames CSV plus its detections CSV back into FrameResults. Rows
// must list frames 0..N-1 in order.
inline std::vector<FrameResult> read_results(std::istream& frames_in,
                                             std::istream& detections_in) {
  using detail::field_as;
  detail::expect_header(frames_in, kFramesHeader, "frames CSV");
  std::vector<FrameResult> results;
  std::vector<std::size_t> expected_counts;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(frames_in, line)) {
    ++line_no;
    if (numfmt::trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7)
      throw ParseError("frames CSV row needs 7 columns, found " +
                           std::to_string(f.size()),
                       line_no);
    FrameResult r;
    r.index = field_as<FrameIndex>(f[0], line_no, "index");
    if (r.index != static_cast<FrameIndex>(results.size()))
      throw ParseError("expected frame " + std::to_string(results.size()) +
                           ", found " + std::to_string(r.index),
                       line_no);
    auto status = parse_status_key(f[1]);
    if (!status) throw ParseError("unknown status '" + std::string(f[1]) + "'", line_no);
    r.status = *status;
    r.source_index = field_as<FrameIndex>(f[2], line_no, "source_index");
    if (!f[3].empty()) r.worker_id = field_as<int>(f[3], line_no, "worker_id");
    if (!f[4].empty()) r.dispatch_ts = field_as<double>(f[4], line_no, "dispatch_ts");
    if (!f[5].empty()) r.completion_ts = field_as<double>(f[5], line_no, "completion_ts");
    expected_counts.push_back(
        field_as<std::size_t>(f[6], line_no, "detection_count"));
    if (r.status == FrameStatus::Processed &&
        (r.source_index != r.index || !r.dispatch_ts || !r.completion_ts))
      throw ParseError("processed frame must carry its own index and timestamps",
                       line_no);
    results.push_back(std::move(r));
  }

  detail::expect_header(detections_in, kDetectionsHeader, "detections CSV");
  line_no = 1;
  while (std::getline(detections_in, line)) {
    ++line_no;
    if (numfmt::trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8)
      throw ParseError("detections CSV row needs 8 columns, found " +
                           std::to_string(f.size()),
                       line_no);
    const auto index = field_as<FrameIndex>(f[0], line_no, "index");
    if (index < 0 || index >= static_cast<FrameIndex>(results.size()))
      throw ParseError("detection refers to unknown frame " + std::to_string(index),
                       line_no);
    Detection d;
    d.class_label = std::string(f[2]);
    d.bbox = {field_as<double>(f[3], line_no, "x"), field_as<double>(f[4], line_no, "y"),
              field_as<double>(f[5], line_no, "w"), field_as<double>(f[6], line_no, "h")};
    d.confidence = field_as<double>(f[7], line_no, "confidence");
    if (!d.bbox.valid())
      throw ParseError("detection box must have positive width and height", line_no);
    results[static_cast<std::size_t>(index)].detections.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].detections.size() != expected_counts[i])
      throw ParseError("frame " + std::to_string(i) +
                       " detection count does not match the detections CSV");
  return results;
}

inline std::vector<FrameResult> read_results(
    const std::filesystem::path& frames_csv,
    const std::filesystem::path& detections_csv) {
  std::ifstream frames(frames_csv);
  if (!frames) throw IoError("cannot open '" + frames_csv.string() + "'");
  std::ifstream dets(detections_csv);
  if (!dets) throw IoError("cannot open '" + detections_csv.string() + "'");
  return read_results(frames, dets);
}

}  // namespace edgepar::report
