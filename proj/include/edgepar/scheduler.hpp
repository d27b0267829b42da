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
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/error.hpp"
#include "edgepar/stream.hpp"

namespace edgepar {

enum class PolicyKind { RoundRobin, WeightedRoundRobin, FCFS, Proportional };

inline std::string_view policy_key(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::RoundRobin: return "rr";
    case PolicyKind::WeightedRoundRobin: return "wrr";
    case PolicyKind::FCFS: return "fcfs";
    case PolicyKind::Proportional: return "proportional";
  }
  return "rr";
}

inline std::optional<PolicyKind> parse_policy_key(std::string_view key) {
  if (key == "rr") return PolicyKind::RoundRobin;
  if (key == "wrr") return PolicyKind::WeightedRoundRobin;
  if (key == "fcfs") return PolicyKind::FCFS;
  if (key == "proportional") return PolicyKind::Proportional;
  return std::nullopt;
}

struct SchedulePolicy {
  PolicyKind kind = PolicyKind::FCFS;
  std::vector<double> weights;  // WeightedRoundRobin only, one per worker
  int window_frames = 10;       // Proportional only
  double ewma_alpha = 0.3;      // Proportional only

  static SchedulePolicy round_robin() { return of(PolicyKind::RoundRobin); }
  static SchedulePolicy fcfs() { return of(PolicyKind::FCFS); }
  static SchedulePolicy of(PolicyKind kind) {
    SchedulePolicy p;
    p.kind = kind;
    return p;
  }
  static SchedulePolicy weighted(std::vector<double> w) {
    return {PolicyKind::WeightedRoundRobin, std::move(w)};
  }
  static SchedulePolicy proportional(int window = 10, double alpha = 0.3) {
    return {PolicyKind::Proportional, {}, window, alpha};
  }

  friend bool operator==(const SchedulePolicy&, const SchedulePolicy&) = default;
};

inline void validate(const SchedulePolicy& policy, std::size_t n_workers) {
  if (n_workers == 0) throw ConfigError("scheduler needs at least one worker");
  if (policy.kind == PolicyKind::WeightedRoundRobin) {
    if (policy.weights.size() != n_workers)
      throw ConfigError("wrr_weights must list one weight per worker");
    for (double w : policy.weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw ConfigError("wrr_weights must all be positive");
  }
  if (policy.kind == PolicyKind::Proportional) {
    if (policy.window_frames < 1)
      throw ConfigError("proportional_window must be at least 1");
    if (!(policy.ewma_alpha > 0.0 && policy.ewma_alpha <= 1.0))
      throw ConfigError("proportional_alpha must lie in (0, 1]");
  }
}

// Dispatcher-side record of one worker.
struct WorkerView {
  Seconds busy_until = 0.0;
  std::deque<Seconds> observed_latencies;  // most recent last
  std::optional<Seconds> ewma_latency;
  double dynamic_weight = 1.0;

  bool idle_at(Seconds now) const { return time_le(busy_until, now); }

  void observe(Seconds service_time, double alpha, std::size_t ring_capacity) {
    observed_latencies.push_back(service_time);
    while (observed_latencies.size() > std::max<std::size_t>(ring_capacity, 1))
      observed_latencies.pop_front();
    ewma_latency = ewma_latency ? alpha * service_time +
                                      (1.0 - alpha) * *ewma_latency
                                : service_time;
  }
};

inline std::vector<WorkerView> make_views(std::size_t n) {
  std::vector<WorkerView> views(n);
  for (auto& v : views) v.dynamic_weight = 1.0 / static_cast<double>(n);
  return views;
}

// Sets weight_i proportional to 1 / ewma_latency_i and normalizes to 1.
// Workers without observations keep their previous weight as the raw value.
inline void recompute_weights(std::span<WorkerView> views) {
  double total = 0.0;
  std::vector<double> raw(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& v = views[i];
    raw[i] = (v.ewma_latency && *v.ewma_latency > 0.0) ? 1.0 / *v.ewma_latency
                                                        : v.dynamic_weight;
    total += raw[i];
  }
  if (!(total > 0.0)) return;
  for (std::size_t i = 0; i < views.size(); ++i)
    views[i].dynamic_weight = raw[i] / total;
}

struct DispatchDecision {
  std::optional<std::size_t> worker;  // nullopt: drop

  static DispatchDecision assign(std::size_t w) { return {w}; }
  static DispatchDecision drop() { return {}; }
  bool dropped() const { return !worker.has_value(); }

  friend bool operator==(const DispatchDecision&,
                         const DispatchDecision&) = default;
};

// Smooth weighted round robin: every step adds each weight to its running
// credit, picks the largest credit (lowest index on ties) and charges it the
// total. Over a cycle each worker is visited in proportion to its weight,
// spread out rather than in bursts.
class SmoothWeightedCursor {
 public:
  std::size_t peek(std::span<const double> weights) const {
    auto credit = credit_;
    return step(weights, credit);
  }

  std::size_t advance(std::span<const double> weights) {
    return step(weights, credit_);
  }

 private:
  static std::size_t step(std::span<const double> weights,
                          std::vector<double>& credit) {
    credit.resize(weights.size(), 0.0);
    double total = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      credit[i] += weights[i];
      total += weights[i];
      if (credit[i] > credit[best]) best = i;
    }
    credit[best] -= total;
    return best;
  }

  std::vector<double> credit_;
};

// Single decision point assigning frames to workers. Worker positions double
// as worker ids, so "lowest index" is the tie-break everywhere.
class Dispatcher {
 public:
  Dispatcher(SchedulePolicy policy, std::size_t n_workers)
      : policy_(std::move(policy)), n_(n_workers) {
    validate(policy_, n_);
  }

  const SchedulePolicy& policy() const { return policy_; }
  std::size_t worker_count() const { return n_; }
  std::size_t decisions() const { return decisions_; }

  // The worker a cyclic policy will offer the frame to next; nullopt for FCFS.
  std::optional<std::size_t> designated_target(
      const Frame& frame, std::span<const WorkerView> views) const {
    switch (policy_.kind) {
      case PolicyKind::RoundRobin:
        return static_cast<std::size_t>(frame.index %
                                        static_cast<FrameIndex>(n_));
      case PolicyKind::WeightedRoundRobin:
        return cursor_.peek(policy_.weights);
      case PolicyKind::Proportional:
        return cursor_.peek(dynamic_weights(views));
      case PolicyKind::FCFS:
        return std::nullopt;
    }
    return std::nullopt;
  }

  // Earliest instant >= now at which this policy can assign the frame
  // without dropping. Used when the source blocks (saturation feeding).
  Seconds earliest_start(const Frame& frame, std::span<const WorkerView> views,
                         Seconds now) const {
    check_views(views);
    now = std::max(now, frame.arrival_ts);
    if (auto target = designated_target(frame, views))
      return std::max(now, views[*target].busy_until);
    Seconds first_free = views[0].busy_until;
    for (const auto& v : views) first_free = std::min(first_free, v.busy_until);
    return std::max(now, first_free);
  }

  // One decision for one frame at `now`. Cyclic policies drop when their
  // designated worker is busy; FCFS drops only when every worker is busy.
  DispatchDecision dispatch(const Frame& frame, std::span<WorkerView> views,
                            Seconds now) {
    check_views(views);
    if (now < frame.arrival_ts - kTimeEpsilon)
      throw ProtocolError("dispatch before frame arrival");
    DispatchDecision decision = DispatchDecision::drop();
    switch (policy_.kind) {
      case PolicyKind::RoundRobin: {
        const auto t = static_cast<std::size_t>(frame.index %
                                                static_cast<FrameIndex>(n_));
        if (views[t].idle_at(now)) decision = DispatchDecision::assign(t);
        break;
      }
      case PolicyKind::WeightedRoundRobin: {
        const auto t = cursor_.advance(policy_.weights);
        if (views[t].idle_at(now)) decision = DispatchDecision::assign(t);
        break;
      }
      case PolicyKind::Proportional: {
        const auto t = cursor_.advance(dynamic_weights(views));
        if (views[t].idle_at(now)) decision = DispatchDecision::assign(t);
        break;
      }
      case PolicyKind::FCFS:
        for (std::size_t i = 0; i < n_; ++i) {
          if (views[i].idle_at(now)) {
            decision = DispatchDecision::assign(i);
            break;
          }
        }
        break;
    }
    ++decisions_;
    // Recomputing right after a window closes keeps designated_target()
    // consistent with the next dispatch().
    if (policy_.kind == PolicyKind::Proportional &&
        decisions_ % static_cast<std::size_t>(policy_.window_frames) == 0)
      recompute_weights(views);
    return decision;
  }

 private:
  void check_views(std::span<const WorkerView> views) const {
    if (views.size() != n_)
      throw ConfigError("worker view count does not match dispatcher");
  }

  static std::vector<double> dynamic_weights(std::span<const WorkerView> views) {
    std::vector<double> w(views.size());
    std::transform(views.begin(), views.end(), w.begin(),
                   [](const WorkerView& v) { return v.dynamic_weight; });
    return w;
  }

  SchedulePolicy policy_;
  std::size_t n_;
  std::size_t decisions_ = 0;
  SmoothWeightedCursor cursor_;
};

}  // namespace edgepar
