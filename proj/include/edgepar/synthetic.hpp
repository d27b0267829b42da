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
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "edgepar/error.hpp"
#include "edgepar/eval.hpp"
#include "edgepar/ingest.hpp"
#include "edgepar/numfmt.hpp"

namespace edgepar::synthetic {

// Moving-box scene: `objects` boxes of random size start at random positions
// inside a width x height canvas and translate at a constant speed drawn from
// [min_speed, max_speed] px/frame in a random direction. A box that would
// leave the canvas has the offending velocity component reflected, so speed
// is preserved for the whole clip.
struct SceneConfig {
  std::int64_t frames = 354;
  double width = 640.0;
  double height = 480.0;
  int objects = 6;
  double min_box = 30.0;
  double max_box = 90.0;
  double min_speed = 3.0;
  double max_speed = 6.0;
  std::uint64_t seed = 0;
};

inline std::vector<MotRecord> moving_boxes(const SceneConfig& cfg) {
  if (cfg.frames < 1 || cfg.objects < 1)
    throw ConfigError("scene needs at least one frame and one object");
  if (!(cfg.min_box > 0.0 && cfg.max_box >= cfg.min_box &&
        cfg.max_box < std::min(cfg.width, cfg.height)))
    throw ConfigError("box size range must be positive and fit the canvas");
  if (!(cfg.min_speed >= 0.0 && cfg.max_speed >= cfg.min_speed))
    throw ConfigError("speed range is invalid");

  std::mt19937_64 rng(cfg.seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(); };

  struct Body {
    double x, y, w, h, vx, vy;
  };
  std::vector<Body> bodies;
  for (int i = 0; i < cfg.objects; ++i) {
    Body b{};
    b.w = between(cfg.min_box, cfg.max_box);
    b.h = between(cfg.min_box, cfg.max_box) * 2.0;
    b.h = std::min(b.h, cfg.height - 1.0);
    b.x = between(0.0, cfg.width - b.w);
    b.y = between(0.0, cfg.height - b.h);
    const double speed = between(cfg.min_speed, cfg.max_speed);
    const double angle = between(0.0, 2.0 * std::numbers::pi);
    b.vx = speed * std::cos(angle);
    b.vy = speed * std::sin(angle);
    bodies.push_back(b);
  }

  std::vector<MotRecord> out;
  for (std::int64_t f = 0; f < cfg.frames; ++f) {
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      auto& b = bodies[i];
      out.push_back({f, static_cast<std::int64_t>(i) + 1, {b.x, b.y, b.w, b.h}, 1.0});
      if (b.x + b.vx < 0.0 || b.x + b.w + b.vx > cfg.width) b.vx = -b.vx;
      if (b.y + b.vy < 0.0 || b.y + b.h + b.vy > cfg.height) b.vy = -b.vy;
      b.x += b.vx;
      b.y += b.vy;
    }
  }
  return out;
}

// Writes records in MOT CSV layout (1-based frames, x/y/z set to -1).
inline void write_mot(std::ostream& out, const std::vector<MotRecord>& records) {
  for (const auto& r : records) {
    out << (r.index + 1) << ',' << r.track_id << ','
        << numfmt::fixed(r.bbox.x, 3) << ',' << numfmt::fixed(r.bbox.y, 3) << ','
        << numfmt::fixed(r.bbox.w, 3) << ',' << numfmt::fixed(r.bbox.h, 3) << ','
        << numfmt::shortest(r.raw_confidence) << ",-1,-1,-1\n";
  }
}

}  // namespace edgepar::synthetic
