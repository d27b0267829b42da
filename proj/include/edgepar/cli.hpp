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

// Command implementations behind the edgepar executable. They print to the
// given stream and throw edgepar::Error subclasses on failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "edgepar/error.hpp"
#include "edgepar/eval.hpp"
#include "edgepar/ingest.hpp"
#include "edgepar/numfmt.hpp"
#include "edgepar/pipeline.hpp"
#include "edgepar/planner.hpp"
#include "edgepar/report.hpp"
#include "edgepar/wall.hpp"

namespace edgepar::cli {

inline int cmd_plan(double lambda_fps, double mu_fps, double comfort_fps,
                    std::ostream& out) {
  const auto p = planner::plan(lambda_fps, mu_fps, comfort_fps);
  out << "lambda_fps   " << numfmt::shortest(lambda_fps) << '\n'
      << "mu_fps       " << numfmt::shortest(mu_fps) << '\n'
      << "comfort_fps  " << numfmt::shortest(comfort_fps) << '\n'
      << "n            " << p.n_exact << '\n'
      << "range        [" << p.n_range.lo << ", " << p.n_range.hi << "]\n"
      << "drops/frame  "
      << planner::expected_drops_per_processed(lambda_fps, mu_fps)
      << "  (single model)\n"
      << "\n  n  sigma_p_fps\n";
  for (auto n = p.n_range.lo; n <= p.n_range.hi; ++n)
    out << std::setw(3) << n << "  " << numfmt::fixed(p.sigma_p(n), 1) << '\n';
  return 0;
}

struct SimulateOptions {
  std::filesystem::path config_path;
  std::optional<PolicyKind> scheduler;
  std::optional<FeedMode> mode;
  std::optional<ClockMode> clock;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> frames;
  std::optional<double> lambda_fps;
  std::optional<std::filesystem::path> output;
  std::optional<std::pair<std::size_t, std::size_t>> sweep;
};

// Parses "n=1..7" or "1..7".
inline std::pair<std::size_t, std::size_t> parse_sweep(std::string_view spec) {
  if (spec.substr(0, 2) == "n=") spec.remove_prefix(2);
  const auto dots = spec.find("..");
  if (dots == std::string_view::npos)
    throw ConfigError("sweep must look like n=LO..HI");
  auto lo = numfmt::parse_int<std::size_t>(spec.substr(0, dots));
  auto hi = numfmt::parse_int<std::size_t>(spec.substr(dots + 2));
  if (!lo || !hi || *lo < 1 || *hi < *lo)
    throw ConfigError("sweep bounds must satisfy 1 <= LO <= HI");
  return {*lo, *hi};
}

inline ExperimentConfig apply_overrides(ExperimentConfig cfg,
                                        const SimulateOptions& opt) {
  if (opt.scheduler && *opt.scheduler != cfg.scheduler.kind) {
    cfg.scheduler = SchedulePolicy::of(*opt.scheduler);
    if (*opt.scheduler == PolicyKind::WeightedRoundRobin)
      throw ConfigError("--scheduler wrr needs wrr_weights in the config file");
  }
  if (opt.mode) cfg.stream.mode = *opt.mode;
  if (opt.clock) cfg.clock = *opt.clock;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.frames) cfg.stream.total_frames = *opt.frames;
  if (opt.lambda_fps) cfg.stream.lambda_fps = *opt.lambda_fps;
  if (opt.output) cfg.output_path = *opt.output;
  validate(cfg);
  return cfg;
}

// n homogeneous copies of the first worker.
inline ExperimentConfig with_homogeneous_workers(ExperimentConfig cfg,
                                                 std::size_t n) {
  const WorkerProfile proto = cfg.workers.front();
  cfg.workers.clear();
  for (std::size_t i = 0; i < n; ++i) {
    cfg.workers.push_back(proto);
    cfg.workers.back().worker_id = static_cast<int>(i);
  }
  if (cfg.scheduler.kind == PolicyKind::WeightedRoundRobin)
    cfg.scheduler.weights.assign(n, cfg.scheduler.weights.front());
  return cfg;
}

struct Inputs {
  std::optional<GroundTruthSet> ground_truth;
  std::optional<ReplayStore> replay;
};

inline Inputs load_inputs(const ExperimentConfig& cfg) {
  Inputs in;
  if (cfg.ground_truth_path) {
    // A run may cover only a prefix of the clip; score it against that prefix.
    const auto full = load_mot_annotations(*cfg.ground_truth_path).to_ground_truth();
    in.ground_truth.emplace();
    for (const auto& [index, anns] : full.frames()) {
      if (index >= cfg.stream.total_frames) break;
      for (const auto& a : anns) in.ground_truth->add(index, a);
    }
  }
  if (cfg.detections_path)
    in.replay = load_mot_annotations(*cfg.detections_path).to_replay_store();
  return in;
}

inline MetricsReport metrics_for(const ExperimentConfig& cfg, const RunResult& run,
                                 const Inputs& in) {
  MetricsReport m;
  m.sigma_p_fps = run.sigma_p_fps;
  for (const auto& r : run.results) {
    switch (r.status) {
      case FrameStatus::Processed: ++m.processed_count; break;
      case FrameStatus::Filled: ++m.filled_count; break;
      case FrameStatus::FilledEmpty: ++m.filled_empty_count; break;
    }
  }
  if (in.ground_truth) {
    auto q = evaluate_map(run.results, *in.ground_truth);
    m.per_class_ap = std::move(q.per_class_ap);
    m.map_score = q.map_score;
  }
  double watts = 0.0;
  bool all_rated = true;
  for (const auto& w : cfg.workers) {
    if (w.tdp_watts) watts += *w.tdp_watts;
    else all_rated = false;
  }
  if (all_rated && m.processed_count > 0)
    m.fps_per_watt = fps_per_watt(m.sigma_p_fps, watts);
  return m;
}

inline void print_metrics(std::ostream& out, const MetricsReport& m) {
  out << "  sigma_p_fps     " << numfmt::fixed(m.sigma_p_fps, 1) << '\n'
      << "  processed       " << m.processed_count << '\n'
      << "  filled          " << m.filled_count << '\n'
      << "  filled_empty    " << m.filled_empty_count << '\n';
  for (const auto& [label, ap] : m.per_class_ap)
    out << "  AP[" << label << "]  " << numfmt::fixed(ap * 100.0, 1) << " %\n";
  if (m.map_score)
    out << "  mAP             " << numfmt::fixed(*m.map_score * 100.0, 1) << " %\n";
  if (m.fps_per_watt)
    out << "  fps_per_watt    " << numfmt::fixed(*m.fps_per_watt, 2) << '\n';
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

inline std::string_view mode_key(FeedMode m) { return detail::feed_mode_key(m); }

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  const auto cfg = apply_overrides(load_experiment_config(opt.config_path), opt);
  const auto inputs = load_inputs(cfg);
  const ReplayStore* store = inputs.replay ? &*inputs.replay : nullptr;
  std::filesystem::create_directories(cfg.output_path);

  if (opt.sweep) {
    std::vector<report::SweepRow> rows;
    out << "  n  nominal_fps  sigma_p_fps  processed  dropped  mAP\n";
    for (auto n = opt.sweep->first; n <= opt.sweep->second; ++n) {
      const auto cfg_n = with_homogeneous_workers(cfg, n);
      const auto run = simulate(cfg_n, store);
      const auto m = metrics_for(cfg_n, run, inputs);
      report::SweepRow row{n, static_cast<double>(n) * cfg_n.workers.front().mu_fps,
                           run.sigma_p_fps, m.processed_count,
                           run.drops.dropped, m.map_score};
      out << std::setw(3) << n << "  " << std::setw(11)
          << numfmt::fixed(row.nominal_fps, 1) << "  " << std::setw(11)
          << numfmt::fixed(row.sigma_p_fps, 1) << "  " << std::setw(9)
          << row.processed << "  " << std::setw(7) << row.dropped << "  "
          << (row.map_score ? numfmt::fixed(*row.map_score * 100.0, 1) : "-")
          << '\n';
      rows.push_back(row);
    }
    auto csv = open_output(cfg.output_path / "sweep.csv");
    report::write_sweep_csv(csv, rows);
    return 0;
  }

  const auto run = simulate(cfg, store);
  const auto m = metrics_for(cfg, run, inputs);
  {
    auto f = open_output(cfg.output_path / "frames.csv");
    report::write_frames_csv(f, run.results);
    auto d = open_output(cfg.output_path / "detections.csv");
    report::write_detections_csv(d, run.results);
    auto s = open_output(cfg.output_path / "summary.csv");
    report::write_summary_csv(
        s, {std::string(policy_key(cfg.scheduler.kind)),
            std::string(mode_key(cfg.stream.mode)),
            std::string(detail::clock_key(cfg.clock)), cfg.stream.lambda_fps,
            cfg.workers.size(), cfg.stream.total_frames, m, run.drops.dropped,
            run.span, cfg.seed});
  }

  out << "config:\n";
  std::istringstream echo(serialize_config(cfg));
  for (std::string line; std::getline(echo, line);)
    if (!line.empty()) out << "  " << line << '\n';
  out << "metrics:\n";
  print_metrics(out, m);
  out << "  span_s          " << numfmt::fixed(run.span, 3) << '\n'
      << "workers:\n";
  for (const auto& w : run.workers)
    out << "  worker " << w.worker_id << "  processed " << w.processed
        << "  utilization " << numfmt::fixed(w.utilization * 100.0, 1) << " %\n";
  out << "drops:\n"
      << "  dropped         " << run.drops.dropped << '\n'
      << "  evicted         " << run.drops.evicted << '\n'
      << "  longest_run     " << run.drops.longest_run << '\n'
      << "  per_processed   " << numfmt::fixed(run.drops.drops_per_processed, 2)
      << '\n'
      << "wrote " << (cfg.output_path / "frames.csv").string() << ", "
      << (cfg.output_path / "detections.csv").string() << ", "
      << (cfg.output_path / "summary.csv").string() << '\n';
  return 0;
}

inline int cmd_eval(const std::filesystem::path& frames_csv,
                    const std::filesystem::path& detections_csv,
                    const std::filesystem::path& gt_path, double iou_threshold,
                    std::ostream& out) {
  const auto results = report::read_results(frames_csv, detections_csv);
  const auto gt = load_mot_annotations(gt_path).to_ground_truth();
  const auto q = evaluate_map(results, gt, iou_threshold);
  out << "frames          " << results.size() << '\n'
      << "processed       " << q.processed_count << '\n'
      << "filled          " << q.filled_count << '\n'
      << "filled_empty    " << q.filled_empty_count << '\n'
      << "\nclass            AP (%)\n";
  for (const auto& [label, ap] : q.per_class_ap)
    out << std::left << std::setw(16) << label << std::right << ' '
        << numfmt::fixed(ap * 100.0, 1) << '\n';
  out << std::left << std::setw(16) << "mAP" << std::right << ' '
      << numfmt::fixed(q.map_score * 100.0, 1) << '\n';
  return 0;
}

}  // namespace edgepar::cli
