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

#include <chrono>
#include <cmath>

#include "edgepar/error.hpp"

namespace edgepar {

// All timestamps are seconds from the run origin.
using Seconds = double;

// Tolerance for every timestamp comparison.
inline constexpr Seconds kTimeEpsilon = 1e-9;

inline bool time_le(Seconds a, Seconds b) { return a <= b + kTimeEpsilon; }
inline bool time_eq(Seconds a, Seconds b) {
  return std::fabs(a - b) <= kTimeEpsilon;
}

enum class ClockMode { Virtual, Wall };

// Virtual clocks move only through advance_to(); wall clocks read a
// monotone steady clock relative to construction.
class Clock {
 public:
  explicit Clock(ClockMode mode = ClockMode::Virtual)
      : mode_(mode), origin_(std::chrono::steady_clock::now()) {}

  ClockMode mode() const noexcept { return mode_; }

  Seconds now() const {
    if (mode_ == ClockMode::Virtual) return virtual_now_;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         origin_)
        .count();
  }

  // Wall-clock instant corresponding to run time t.
  std::chrono::steady_clock::time_point wall_time(Seconds t) const {
    return origin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(t));
  }

  void advance_to(Seconds t) {
    if (mode_ != ClockMode::Virtual)
      throw ConfigError("advance_to is only valid on a virtual clock");
    if (t < virtual_now_ - kTimeEpsilon)
      throw ProtocolError("virtual clock cannot move backwards");
    if (t > virtual_now_) virtual_now_ = t;
  }

 private:
  ClockMode mode_;
  std::chrono::steady_clock::time_point origin_;
  Seconds virtual_now_ = 0.0;
};

}  // namespace edgepar
