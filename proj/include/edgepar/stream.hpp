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
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/error.hpp"

namespace edgepar {

using FrameIndex = std::int64_t;

// Paced feeds frames at lambda in stream time (online). Saturation makes
// every frame available at t = 0 (offline capacity measurement).
enum class FeedMode { Paced, Saturation };

struct StreamConfig {
  double lambda_fps = 30.0;
  std::int64_t total_frames = 1;
  FeedMode mode = FeedMode::Paced;
  std::uint64_t payload_bytes = 0;

  friend bool operator==(const StreamConfig&, const StreamConfig&) = default;
};

struct Frame {
  FrameIndex index = 0;
  Seconds arrival_ts = 0.0;
  std::uint64_t payload_bytes = 0;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline void validate(const StreamConfig& config) {
  if (!(config.lambda_fps > 0.0) || !std::isfinite(config.lambda_fps))
    throw ConfigError("lambda_fps must be a positive finite number");
  if (config.total_frames < 1)
    throw ConfigError("total_frames must be at least 1");
}

inline std::vector<Frame> emit_schedule(const StreamConfig& config) {
  validate(config);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(config.total_frames));
  for (FrameIndex k = 0; k < config.total_frames; ++k) {
    const Seconds ts = config.mode == FeedMode::Paced
                           ? static_cast<double>(k) / config.lambda_fps
                           : 0.0;
    frames.push_back(Frame{k, ts, config.payload_bytes});
  }
  return frames;
}

}  // namespace edgepar
