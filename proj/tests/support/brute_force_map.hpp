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

// Reference mAP evaluator used only by tests. It follows the same matching
// protocol as edgepar::evaluate_map but shares no code with it: detections are
// ranked with an explicit (confidence, frame, position) key, matching scans
// the whole ground-truth table, and AP is accumulated per true positive as
// (1 / gt_count) * max precision at that rank or later.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "edgepar/eval.hpp"
#include "edgepar/synchronizer.hpp"

namespace edgepar::testing {

inline double brute_force_iou(const BBox& a, const BBox& b) {
  const double w = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double h = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = w * h;
  if (inter == 0.0) return 0.0;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

// Precision envelope summed over true positives.
inline double brute_force_ap(const std::vector<bool>& tp, long gt_count) {
  if (gt_count <= 0) return 0.0;
  double ap = 0.0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    if (!tp[k]) continue;
    double best = 0.0;
    for (std::size_t j = k; j < tp.size(); ++j) {
      const long hits = std::count(tp.begin(), tp.begin() + static_cast<long>(j) + 1, true);
      best = std::max(best, static_cast<double>(hits) / static_cast<double>(j + 1));
    }
    ap += best / static_cast<double>(gt_count);
  }
  return ap;
}

struct BruteForceResult {
  std::map<std::string, double> per_class_ap;
  double map_score = 0.0;
};

inline BruteForceResult brute_force_map(const std::vector<FrameResult>& results,
                                        const GroundTruthSet& gt,
                                        double threshold = 0.5) {
  struct GtEntry {
    FrameIndex frame;
    std::size_t pos;
    Annotation ann;
  };
  std::vector<GtEntry> table;
  for (const auto& [frame, anns] : gt.frames())
    for (std::size_t p = 0; p < anns.size(); ++p) table.push_back({frame, p, anns[p]});

  std::set<std::string> labels;
  for (const auto& e : table) labels.insert(e.ann.class_label);
  for (const auto& r : results)
    for (const auto& d : r.detections) labels.insert(d.class_label);

  BruteForceResult out;
  for (const auto& label : labels) {
    // (confidence, frame, position) with confidence descending.
    std::vector<std::tuple<double, FrameIndex, std::size_t, BBox>> ranked;
    for (const auto& r : results)
      for (std::size_t p = 0; p < r.detections.size(); ++p)
        if (r.detections[p].class_label == label)
          ranked.emplace_back(r.detections[p].confidence, r.index, p,
                              r.detections[p].bbox);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
      return std::get<2>(a) < std::get<2>(b);
    });

    long gt_count = 0;
    for (const auto& e : table)
      if (e.ann.class_label == label) ++gt_count;
    if (gt_count == 0 && ranked.empty()) continue;

    std::set<std::pair<FrameIndex, std::size_t>> used;
    std::vector<bool> tp;
    for (const auto& [conf, frame, pos, box] : ranked) {
      const GtEntry* best = nullptr;
      double best_iou = -1.0;
      for (const auto& e : table) {
        if (e.frame != frame || e.ann.class_label != label) continue;
        if (used.count({e.frame, e.pos})) continue;
        const double o = brute_force_iou(box, e.ann.bbox);
        if (o > best_iou) {
          best_iou = o;
          best = &e;
        }
      }
      const bool hit = best != nullptr && best_iou >= threshold;
      if (hit) used.insert({best->frame, best->pos});
      tp.push_back(hit);
    }
    out.per_class_ap[label] = brute_force_ap(tp, gt_count);
  }
  for (const auto& [label, ap] : out.per_class_ap) out.map_score += ap;
  if (!out.per_class_ap.empty())
    out.map_score /= static_cast<double>(out.per_class_ap.size());
  return out;
}

}  // namespace edgepar::testing
