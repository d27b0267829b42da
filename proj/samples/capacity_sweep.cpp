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

// Library-level walk through a capacity sweep: plan n for a 14 FPS stream
// with 2.5 FPS detectors, then simulate 1..7 parallel workers under FCFS.

#include <iostream>

#include "edgepar/edgepar.hpp"

int main() {
  using namespace edgepar;
  const auto plan = planner::plan(14.0, 2.5);
  std::cout << "n = " << plan.n_exact << ", range [" << plan.n_range.lo << ", "
            << plan.n_range.hi << "]\n\n  n  sigma_p_fps\n";

  ExperimentConfig cfg;
  cfg.stream = {14.0, 354, FeedMode::Saturation, 0};
  cfg.scheduler = SchedulePolicy::fcfs();
  for (int n = 1; n <= 7; ++n) {
    cfg.workers.clear();
    for (int i = 0; i < n; ++i) cfg.workers.push_back({i, 2.5});
    const auto run = simulate_virtual(cfg);
    std::cout << "  " << n << "  " << numfmt::fixed(run.sigma_p_fps, 1) << '\n';
  }
  return 0;
}
