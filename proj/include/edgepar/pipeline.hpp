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
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/detector.hpp"
#include "edgepar/eval.hpp"
#include "edgepar/ingest.hpp"
#include "edgepar/scheduler.hpp"
#include "edgepar/stream.hpp"
#include "edgepar/synchronizer.hpp"

namespace edgepar {

struct WorkerUsage {
  int worker_id = 0;
  std::int64_t processed = 0;
  Seconds busy_time = 0.0;
  double utilization = 0.0;  // busy_time / run span, in [0, 1]
};

struct DropSummary {
  std::int64_t dropped = 0;       // frames that never reached a worker
  std::int64_t evicted = 0;       // of which displaced from the FCFS hold slot
  std::int64_t longest_run = 0;   // longest streak of consecutive drops
  double drops_per_processed = 0.0;
};

// Everything a pipeline run produces: the ordered per-frame results plus
// throughput and utilization summaries.
struct RunResult {
  std::vector<FrameResult> results;
  std::vector<WorkerUsage> workers;
  DropSummary drops;
  std::int64_t assigned = 0;
  Seconds span = 0.0;  // first dispatch to last completion
  double sigma_p_fps = 0.0;
};

namespace detail {

// Fills the summary fields of `run` from its results and worker busy times.
inline void finalize(RunResult& run) {
  const auto log = completion_log(run.results);
  if (!log.empty()) {
    Seconds first = log.front().dispatch_ts, last = log.front().completion_ts;
    for (const auto& e : log) {
      first = std::min(first, e.dispatch_ts);
      last = std::max(last, e.completion_ts);
    }
    run.span = last - first;
    run.sigma_p_fps = run.span > 0.0 ? processing_fps(log) : 0.0;
  }
  for (auto& w : run.workers)
    w.utilization = run.span > 0.0 ? std::clamp(w.busy_time / run.span, 0.0, 1.0)
                                   : 0.0;
  std::int64_t streak = 0;
  for (const auto& r : run.results) {
    streak = r.status == FrameStatus::Processed ? 0 : streak + 1;
    run.drops.longest_run = std::max(run.drops.longest_run, streak);
  }
  run.drops.drops_per_processed =
      log.empty() ? 0.0
                  : static_cast<double>(run.drops.dropped) /
                        static_cast<double>(log.size());
}

}  // namespace detail

// Deterministic discrete-event run in virtual time.
//
// Paced feeding: frames arrive at k / lambda. Cyclic policies drop a frame
// whose designated worker is busy. FCFS parks a frame that finds every
// worker busy in a single hold slot; a newer arrival evicts it (counted as a
// drop) and the first worker to free up takes whatever is parked.
//
// Saturation feeding: every frame is available at t = 0 and the source
// blocks until the policy can assign, so nothing is dropped.
class VirtualPipeline {
 public:
  VirtualPipeline(const ExperimentConfig& cfg, const ReplayStore* store)
      : cfg_(cfg),
        store_(store),
        dispatcher_(cfg.scheduler, cfg.workers.size()),
        views_(make_views(cfg.workers.size())) {
    validate(cfg_);
    for (const auto& w : cfg_.workers) samplers_.emplace_back(w, cfg_.seed);
    run_.workers.resize(cfg_.workers.size());
    for (std::size_t i = 0; i < cfg_.workers.size(); ++i)
      run_.workers[i].worker_id = cfg_.workers[i].worker_id;
  }

  RunResult run() && {
    const auto frames = emit_schedule(cfg_.stream);
    if (cfg_.stream.mode == FeedMode::Paced)
      run_paced(frames);
    else
      run_saturated(frames);
    complete_until(std::numeric_limits<Seconds>::infinity());
    for (auto& r : sync_.drain_ready()) run_.results.push_back(std::move(r));
    if (static_cast<std::int64_t>(run_.results.size()) !=
        cfg_.stream.total_frames)
      throw ProtocolError("pipeline finished with frames still unresolved");
    detail::finalize(run_);
    return std::move(run_);
  }

 private:
  struct InFlight {
    Seconds completion_ts;
    std::size_t worker;
    Frame frame;
    Seconds dispatch_ts;
    std::vector<Detection> detections;
  };
  struct LaterFirst {
    bool operator()(const InFlight& a, const InFlight& b) const {
      if (a.completion_ts != b.completion_ts)
        return a.completion_ts > b.completion_ts;
      return a.worker > b.worker;
    }
  };

  void run_paced(const std::vector<Frame>& frames) {
    const bool fcfs = cfg_.scheduler.kind == PolicyKind::FCFS;
    for (const auto& frame : frames) {
      complete_until(frame.arrival_ts);
      clock_.advance_to(frame.arrival_ts);
      auto decision = dispatcher_.dispatch(frame, views_, clock_.now());
      if (!decision.dropped()) {
        assign(frame, *decision.worker, clock_.now());
      } else if (fcfs) {
        if (held_) {
          ++run_.drops.evicted;
          drop(*held_);
        }
        held_ = frame;
      } else {
        drop(frame);
      }
    }
  }

  void run_saturated(const std::vector<Frame>& frames) {
    for (const auto& frame : frames) {
      const Seconds start =
          dispatcher_.earliest_start(frame, views_, clock_.now());
      complete_until(start);
      clock_.advance_to(start);
      auto decision = dispatcher_.dispatch(frame, views_, clock_.now());
      if (decision.dropped())
        throw ProtocolError("saturation dispatch found no idle worker");
      assign(frame, *decision.worker, clock_.now());
    }
  }

  void assign(const Frame& frame, std::size_t w, Seconds start) {
    auto outcome =
        simulate_process(cfg_.workers[w], frame, start, samplers_[w], store_);
    views_[w].busy_until = outcome.completion_ts;
    run_.workers[w].busy_time += outcome.completion_ts - start;
    ++run_.workers[w].processed;
    ++run_.assigned;
    in_flight_.push({outcome.completion_ts, w, frame, start,
                     std::move(outcome.detections)});
  }

  void drop(const Frame& frame) {
    ++run_.drops.dropped;
    sync_.submit(DropNotice{frame.index});
    emit();
  }

  // Retires every completion at or before t, in time order. A freed worker
  // immediately takes the FCFS held frame, if any.
  void complete_until(Seconds t) {
    while (!in_flight_.empty() && time_le(in_flight_.top().completion_ts, t)) {
      InFlight done = in_flight_.top();
      in_flight_.pop();
      clock_.advance_to(done.completion_ts);
      views_[done.worker].observe(done.completion_ts - done.dispatch_ts,
                                  cfg_.scheduler.ewma_alpha,
                                  static_cast<std::size_t>(cfg_.scheduler.window_frames));
      sync_.submit(ProcessedResult{done.frame.index, std::move(done.detections),
                                   cfg_.workers[done.worker].worker_id,
                                   done.dispatch_ts, done.completion_ts});
      emit();
      if (held_) {
        const Frame frame = *held_;
        held_.reset();
        auto decision = dispatcher_.dispatch(frame, views_, clock_.now());
        if (decision.dropped())
          throw ProtocolError("freed worker rejected the held frame");
        assign(frame, *decision.worker, clock_.now());
      }
    }
  }

  void emit() {
    for (auto& r : sync_.drain_ready()) run_.results.push_back(std::move(r));
  }

  const ExperimentConfig& cfg_;
  const ReplayStore* store_;
  Dispatcher dispatcher_;
  std::vector<WorkerView> views_;
  std::vector<LatencySampler> samplers_;
  Clock clock_{ClockMode::Virtual};
  std::priority_queue<InFlight, std::vector<InFlight>, LaterFirst> in_flight_;
  std::optional<Frame> held_;
  SequenceSynchronizer sync_;
  RunResult run_;
};

inline RunResult simulate_virtual(const ExperimentConfig& cfg,
                                  const ReplayStore* store = nullptr) {
  return VirtualPipeline(cfg, store).run();
}

}  // namespace edgepar
