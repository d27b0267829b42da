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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/detector.hpp"
#include "edgepar/error.hpp"
#include "edgepar/synchronizer.hpp"

namespace edgepar {

struct Annotation {
  BBox bbox;
  std::string class_label;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

class GroundTruthSet {
 public:
  GroundTruthSet() = default;

  void add(FrameIndex index, Annotation a) {
    if (!a.bbox.valid())
      throw InputError("ground-truth box must have positive width and height");
    classes_.insert(a.class_label);
    frames_[index].push_back(std::move(a));
  }

  const std::map<FrameIndex, std::vector<Annotation>>& frames() const {
    return frames_;
  }
  const std::set<std::string>& classes() const { return classes_; }

  // One past the highest annotated frame index; 0 when empty.
  FrameIndex span() const {
    return frames_.empty() ? 0 : frames_.rbegin()->first + 1;
  }

 private:
  std::map<FrameIndex, std::vector<Annotation>> frames_;
  std::set<std::string> classes_;
};

inline double iou(const BBox& a, const BBox& b) {
  if (!a.valid() || !b.valid())
    throw InputError("iou requires boxes with positive width and height");
  const double ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

enum class MatchKind : std::uint8_t { TruePositive, FalsePositive };

// All-points interpolated AP: precision is replaced by its running maximum
// from the right, then integrated over recall steps. `matches` is in
// descending-confidence order.
inline double average_precision(std::span<const MatchKind> matches,
                                std::int64_t gt_count) {
  if (gt_count <= 0) return 0.0;
  const std::size_t n = matches.size();
  std::vector<double> precision(n), recall(n);
  std::int64_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (matches[i] == MatchKind::TruePositive) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
  }
  for (std::size_t i = n; i-- > 1;)
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (recall[i] > prev_recall) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
  }
  return ap;
}

struct QualityReport {
  std::map<std::string, double> per_class_ap;
  double map_score = 0.0;
  std::int64_t processed_count = 0;
  std::int64_t filled_count = 0;
  std::int64_t filled_empty_count = 0;
};

// Greedy confidence-ordered matching at a fixed IoU threshold. Every frame,
// including drop-filled ones, is scored against its own ground truth.
// Classes with neither ground truth nor detections are skipped; classes with
// detections but no ground truth score 0.
inline QualityReport evaluate_map(std::span<const FrameResult> results,
                                  const GroundTruthSet& gt,
                                  double iou_threshold = 0.5) {
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].index != static_cast<FrameIndex>(i))
      throw ProtocolError("results must cover frames 0..N-1 in order; frame " +
                          std::to_string(i) + " is missing or out of order");
  if (gt.span() > static_cast<FrameIndex>(results.size()))
    throw ProtocolError("results stop at frame " +
                        std::to_string(results.size()) +
                        " but ground truth extends to frame " +
                        std::to_string(gt.span() - 1));

  QualityReport report;
  std::set<std::string> classes = gt.classes();
  for (const auto& r : results) {
    switch (r.status) {
      case FrameStatus::Processed: ++report.processed_count; break;
      case FrameStatus::Filled: ++report.filled_count; break;
      case FrameStatus::FilledEmpty: ++report.filled_empty_count; break;
    }
    for (const auto& d : r.detections) classes.insert(d.class_label);
  }

  static const std::vector<Annotation> kNoAnnotations;
  for (const auto& label : classes) {
    struct Candidate {
      FrameIndex frame;
      const Detection* det;
    };
    std::vector<Candidate> candidates;
    for (const auto& r : results)
      for (const auto& d : r.detections)
        if (d.class_label == label) candidates.push_back({r.index, &d});
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.det->confidence > b.det->confidence;
                     });

    std::int64_t gt_count = 0;
    for (const auto& [frame, anns] : gt.frames())
      for (const auto& a : anns)
        if (a.class_label == label) ++gt_count;
    if (gt_count == 0 && candidates.empty()) continue;

    std::map<FrameIndex, std::vector<bool>> matched;
    std::vector<MatchKind> flags;
    flags.reserve(candidates.size());
    for (const auto& c : candidates) {
      auto it = gt.frames().find(c.frame);
      const auto& anns = it == gt.frames().end() ? kNoAnnotations : it->second;
      auto& used = matched[c.frame];
      used.resize(anns.size(), false);
      double best = -1.0;
      std::optional<std::size_t> best_idx;
      for (std::size_t j = 0; j < anns.size(); ++j) {
        if (used[j] || anns[j].class_label != label) continue;
        const double o = iou(c.det->bbox, anns[j].bbox);
        if (o > best) {
          best = o;
          best_idx = j;
        }
      }
      const bool tp = best_idx && best >= iou_threshold;
      if (tp) used[*best_idx] = true;
      flags.push_back(tp ? MatchKind::TruePositive : MatchKind::FalsePositive);
    }
    report.per_class_ap[label] = average_precision(flags, gt_count);
  }

  if (!report.per_class_ap.empty()) {
    double sum = 0.0;
    for (const auto& [label, ap] : report.per_class_ap) sum += ap;
    report.map_score = sum / static_cast<double>(report.per_class_ap.size());
  }
  return report;
}

struct CompletionEvent {
  Seconds dispatch_ts = 0.0;
  Seconds completion_ts = 0.0;
};

// Processed frames per second over the span from first dispatch to last
// completion.
inline double processing_fps(std::span<const CompletionEvent> log) {
  if (log.empty())
    throw MetricError("processing FPS is undefined with no processed frames");
  Seconds first = log.front().dispatch_ts;
  Seconds last = log.front().completion_ts;
  for (const auto& e : log) {
    first = std::min(first, e.dispatch_ts);
    last = std::max(last, e.completion_ts);
  }
  const Seconds span = last - first;
  if (!(span > 0.0))
    throw MetricError("processing FPS is undefined over a zero-length span");
  return static_cast<double>(log.size()) / span;
}

inline std::vector<CompletionEvent> completion_log(
    std::span<const FrameResult> results) {
  std::vector<CompletionEvent> log;
  for (const auto& r : results)
    if (r.status == FrameStatus::Processed && r.dispatch_ts && r.completion_ts)
      log.push_back({*r.dispatch_ts, *r.completion_ts});
  return log;
}

inline double fps_per_watt(double fps, double tdp_watts) {
  if (!(tdp_watts > 0.0))
    throw InputError("tdp_watts must be positive");
  return fps / tdp_watts;
}

struct MetricsReport {
  double sigma_p_fps = 0.0;
  std::int64_t processed_count = 0;
  std::int64_t filled_count = 0;
  std::int64_t filled_empty_count = 0;
  std::map<std::string, double> per_class_ap;
  std::optional<double> map_score;  // set when ground truth was supplied
  std::optional<double> fps_per_watt;
};

}  // namespace edgepar
