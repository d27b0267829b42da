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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "edgepar/cli.hpp"

namespace {

template <typename T>
std::optional<T> parse_choice(const std::string& value,
                              std::optional<T> (*parse)(std::string_view),
                              const char* flag) {
  if (value.empty()) return std::nullopt;
  auto v = parse(value);
  if (!v) throw CLI::ValidationError(flag, "invalid value '" + value + "'");
  return v;
}

std::optional<edgepar::FeedMode> parse_mode(std::string_view s) {
  if (s == "paced") return edgepar::FeedMode::Paced;
  if (s == "saturation") return edgepar::FeedMode::Saturation;
  return std::nullopt;
}

std::optional<edgepar::ClockMode> parse_clock(std::string_view s) {
  if (s == "virtual") return edgepar::ClockMode::Virtual;
  if (s == "wall") return edgepar::ClockMode::Wall;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel multi-model detection pipeline simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  double lambda = 0.0, mu = 0.0, comfort = 10.0;
  auto* plan = app.add_subcommand("plan", "Capacity planning for n parallel models");
  plan->add_option("--lambda", lambda, "Incoming stream rate (FPS)")->required();
  plan->add_option("--mu", mu, "Single-model detection rate (FPS)")->required();
  plan->add_option("--comfort", comfort, "Comfort rate for the lower bound (FPS)")
      ->capture_default_str();

  edgepar::cli::SimulateOptions sim;
  std::string sched, mode, clock, sweep, output;
  std::uint64_t seed = 0;
  std::int64_t frames = 0;
  double sim_lambda = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Run the pipeline on an experiment config");
  simulate->add_option("--config", sim.config_path, "Experiment config file")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Override the random seed");
  auto* frames_opt = simulate->add_option("--frames", frames, "Override total_frames");
  auto* lambda_opt = simulate->add_option("--lambda", sim_lambda, "Override lambda_fps");
  simulate->add_option("--scheduler", sched, "Override scheduler: rr|wrr|fcfs|proportional");
  simulate->add_option("--mode", mode, "Override feed mode: paced|saturation");
  simulate->add_option("--clock", clock, "Override clock: virtual|wall");
  simulate->add_option("--output", output, "Override output directory");
  simulate->add_option("--sweep", sweep, "Re-run with n=LO..HI homogeneous workers");

  std::string results, detections, gt;
  double iou_threshold = 0.5;
  auto* eval = app.add_subcommand("eval", "Score a results CSV against MOT ground truth");
  eval->add_option("--results", results, "frames.csv written by simulate")->required();
  eval->add_option("--detections", detections,
                   "detections.csv (default: next to --results)");
  eval->add_option("--gt", gt, "MOT ground-truth file")->required();
  eval->add_option("--iou", iou_threshold, "IoU threshold")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*plan) return edgepar::cli::cmd_plan(lambda, mu, comfort, std::cout);
    if (*simulate) {
      sim.scheduler = parse_choice(sched, edgepar::parse_policy_key, "--scheduler");
      sim.mode = parse_choice(mode, parse_mode, "--mode");
      sim.clock = parse_choice(clock, parse_clock, "--clock");
      if (*seed_opt) sim.seed = seed;
      if (*frames_opt) sim.frames = frames;
      if (*lambda_opt) sim.lambda_fps = sim_lambda;
      if (!output.empty()) sim.output = output;
      if (!sweep.empty()) sim.sweep = edgepar::cli::parse_sweep(sweep);
      return edgepar::cli::cmd_simulate(sim, std::cout);
    }
    if (*eval) {
      std::filesystem::path frames_csv(results);
      std::filesystem::path dets_csv =
          detections.empty() ? frames_csv.parent_path() / "detections.csv"
                             : std::filesystem::path(detections);
      return edgepar::cli::cmd_eval(frames_csv, dets_csv, gt, iou_threshold,
                                    std::cout);
    }
  } catch (const CLI::ParseError& e) {
    // Help output exits 0; every other usage error maps to the config code.
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const edgepar::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const edgepar::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
