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

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/error.hpp"
#include "edgepar/stream.hpp"

namespace edgepar {

// Axis-aligned box in pixels: top-left corner plus extent.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool valid() const { return w > 0.0 && h > 0.0; }
  double area() const { return w * h; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  BBox bbox;
  std::string class_label;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Per-frame detector outputs replayed in place of DNN inference.
class ReplayStore {
 public:
  ReplayStore() = default;
  explicit ReplayStore(std::map<FrameIndex, std::vector<Detection>> frames)
      : frames_(std::move(frames)) {}

  void add(FrameIndex index, Detection d) {
    frames_[index].push_back(std::move(d));
  }

  const std::map<FrameIndex, std::vector<Detection>>& frames() const {
    return frames_;
  }

  bool empty() const { return frames_.empty(); }

 private:
  std::map<FrameIndex, std::vector<Detection>> frames_;
};

inline std::vector<Detection> replay_lookup(const ReplayStore& store,
                                            FrameIndex index) {
  auto it = store.frames().find(index);
  if (it == store.frames().end()) return {};
  return it->second;
}

enum class LatencyKind { Deterministic, Exponential, Uniform };

// Capacity model of one detection executor (accelerator stick, CPU, GPU).
// The latency distribution always has mean 1 / mu_fps. Uniform draws span
// mean * [1 - jitter, 1 + jitter].
struct WorkerProfile {
  int worker_id = 0;
  double mu_fps = 1.0;
  LatencyKind latency = LatencyKind::Deterministic;
  double jitter = 0.0;
  std::optional<double> bandwidth_bps;  // nullopt: unlimited
  std::optional<double> tdp_watts;

  double mean_latency() const { return 1.0 / mu_fps; }

  friend bool operator==(const WorkerProfile&, const WorkerProfile&) = default;
};

inline void validate(const WorkerProfile& p) {
  const std::string who = "worker " + std::to_string(p.worker_id) + ": ";
  if (p.worker_id < 0) throw ConfigError(who + "worker_id must be >= 0");
  if (!(p.mu_fps > 0.0) || !std::isfinite(p.mu_fps))
    throw ConfigError(who + "mu_fps must be a positive finite number");
  if (p.latency == LatencyKind::Uniform && !(p.jitter >= 0.0 && p.jitter < 1.0))
    throw ConfigError(who + "uniform jitter must lie in [0, 1)");
  if (p.bandwidth_bps && !(*p.bandwidth_bps > 0.0))
    throw ConfigError(who + "bandwidth_bps must be positive");
  if (p.tdp_watts && !(*p.tdp_watts > 0.0))
    throw ConfigError(who + "tdp_watts must be positive");
}

inline Seconds transfer_delay(const WorkerProfile& p,
                              std::uint64_t payload_bytes) {
  if (!p.bandwidth_bps || payload_bytes == 0) return 0.0;
  return static_cast<double>(payload_bytes) * 8.0 / *p.bandwidth_bps;
}

// Draws inference latencies for one worker. Each worker owns an independent
// stream seeded with global_seed + worker_id, so draws do not depend on how
// frames interleave across workers. Uses inverse-transform sampling on raw
// 64-bit outputs, which keeps sequences identical across standard libraries.
class LatencySampler {
 public:
  LatencySampler(const WorkerProfile& profile, std::uint64_t global_seed)
      : kind_(profile.latency),
        mean_(profile.mean_latency()),
        jitter_(profile.jitter),
        rng_(global_seed + static_cast<std::uint64_t>(profile.worker_id)) {}

  Seconds draw() {
    switch (kind_) {
      case LatencyKind::Deterministic:
        return mean_;
      case LatencyKind::Exponential:
        return -mean_ * std::log1p(-unit());
      case LatencyKind::Uniform: {
        const double lo = mean_ * (1.0 - jitter_);
        const double hi = mean_ * (1.0 + jitter_);
        return lo + (hi - lo) * unit();
      }
    }
    return mean_;
  }

 private:
  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  LatencyKind kind_;
  double mean_;
  double jitter_;
  std::mt19937_64 rng_;
};

struct ProcessOutcome {
  Seconds completion_ts = 0.0;
  std::vector<Detection> detections;
};

// Transfer is serialized before inference; there is no pipelining inside a
// worker.
inline ProcessOutcome simulate_process(const WorkerProfile& profile,
                                       const Frame& frame, Seconds start_ts,
                                       LatencySampler& sampler,
                                       const ReplayStore* store = nullptr) {
  if (start_ts < frame.arrival_ts - kTimeEpsilon)
    throw ProtocolError("frame " + std::to_string(frame.index) +
                        " started before it arrived");
  ProcessOutcome out;
  out.completion_ts = start_ts + transfer_delay(profile, frame.payload_bytes) +
                      sampler.draw();
  if (store != nullptr) out.detections = replay_lookup(*store, frame.index);
  return out;
}

}  // namespace edgepar
