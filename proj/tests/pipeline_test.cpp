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

#include "edgepar/pipeline.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "edgepar/eval.hpp"
#include "edgepar/planner.hpp"
#include "edgepar/synthetic.hpp"

namespace edgepar {
namespace {

ExperimentConfig make_config(double lambda, std::int64_t frames, FeedMode mode,
                             SchedulePolicy policy, std::vector<double> rates,
                             LatencyKind latency = LatencyKind::Deterministic) {
  ExperimentConfig cfg;
  cfg.stream = {lambda, frames, mode, 0};
  cfg.scheduler = std::move(policy);
  for (std::size_t i = 0; i < rates.size(); ++i)
    cfg.workers.push_back({static_cast<int>(i), rates[i], latency});
  return cfg;
}

std::vector<double> homogeneous(int n, double mu) { return std::vector<double>(n, mu); }

std::vector<double> with_head(double head, int n, double mu) {
  auto v = homogeneous(n, mu);
  v.insert(v.begin(), head);
  return v;
}

// Checks the invariants every run must satisfy.
void expect_well_formed(const RunResult& run, std::int64_t total) {
  ASSERT_EQ(static_cast<std::int64_t>(run.results.size()), total);
  EXPECT_EQ(run.assigned + run.drops.dropped, total);
  std::map<int, std::vector<std::pair<Seconds, Seconds>>> busy;
  FrameIndex latest = -1;
  for (std::size_t i = 0; i < run.results.size(); ++i) {
    const auto& r = run.results[i];
    ASSERT_EQ(r.index, static_cast<FrameIndex>(i));
    if (r.status == FrameStatus::Processed) {
      busy[*r.worker_id].push_back({*r.dispatch_ts, *r.completion_ts});
      latest = r.index;
    } else if (r.status == FrameStatus::Filled) {
      ASSERT_EQ(r.source_index, latest);
    } else {
      ASSERT_EQ(latest, -1);
    }
  }
  // No worker ever holds two frames at once.
  for (auto& [w, spans] : busy) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i)
      ASSERT_TRUE(time_le(spans[i - 1].second, spans[i].first)) << "worker " << w;
  }
  for (const auto& w : run.workers) {
    EXPECT_GE(w.utilization, 0.0);
    EXPECT_LE(w.utilization, 1.0);
  }
}

TEST(VirtualPipelineTest, SaturatedSingleWorkerRunsAtItsRate) {
  const auto run = simulate_virtual(make_config(
      14, 354, FeedMode::Saturation, SchedulePolicy::fcfs(), {2.5}));
  expect_well_formed(run, 354);
  EXPECT_NEAR(run.sigma_p_fps, 2.5, 1e-9);
  EXPECT_EQ(run.drops.dropped, 0);
  EXPECT_NEAR(run.workers[0].utilization, 1.0, 1e-9);
}

TEST(VirtualPipelineTest, StochasticLatencyConvergesToNominalRate) {
  for (auto kind : {LatencyKind::Exponential, LatencyKind::Uniform}) {
    auto cfg = make_config(14, 20000, FeedMode::Saturation,
                           SchedulePolicy::fcfs(), {2.5}, kind);
    cfg.workers[0].jitter = 0.5;
    const auto run = simulate_virtual(cfg);
    EXPECT_NEAR(run.sigma_p_fps, 2.5, 0.02 * 2.5);
  }
}

TEST(VirtualPipelineTest, SaturatedFcfsHomogeneousHasNoDropsAndSumsRates) {
  for (int n = 1; n <= 7; ++n) {
    const auto run = simulate_virtual(make_config(
        14, 354, FeedMode::Saturation, SchedulePolicy::fcfs(), homogeneous(n, 2.5)));
    expect_well_formed(run, 354);
    EXPECT_EQ(run.drops.dropped, 0);
    EXPECT_NEAR(run.sigma_p_fps, n * 2.5, 0.02 * n * 2.5) << n;
  }
}

TEST(VirtualPipelineTest, SixSticksMatchMeasuredCapacity) {
  const auto run = simulate_virtual(make_config(
      14, 354, FeedMode::Saturation, SchedulePolicy::fcfs(), homogeneous(6, 2.5)));
  EXPECT_NEAR(run.sigma_p_fps, 14.8, 0.5);
}

TEST(VirtualPipelineTest, RoundRobinAndFcfsAgreeOnHomogeneousWorkers) {
  for (int n : {2, 4, 7}) {
    const auto rr = simulate_virtual(make_config(
        14, 354, FeedMode::Saturation, SchedulePolicy::round_robin(), homogeneous(n, 2.5)));
    const auto fcfs = simulate_virtual(make_config(
        14, 354, FeedMode::Saturation, SchedulePolicy::fcfs(), homogeneous(n, 2.5)));
    EXPECT_NEAR(rr.sigma_p_fps, fcfs.sigma_p_fps, 0.02 * fcfs.sigma_p_fps);
    EXPECT_EQ(rr.drops.dropped, 0);
  }
}

TEST(VirtualPipelineTest, PacedSingleWorkerDropsAboutFivePerProcessed) {
  const auto expected = planner::expected_drops_per_processed(14, 2.5);
  ASSERT_EQ(expected, 5);
  const auto rr = simulate_virtual(make_config(
      14, 354, FeedMode::Paced, SchedulePolicy::round_robin(), {2.5}));
  expect_well_formed(rr, 354);
  EXPECT_NEAR(rr.drops.drops_per_processed, 5.0, 0.1);
  const auto fcfs = simulate_virtual(make_config(
      14, 354, FeedMode::Paced, SchedulePolicy::fcfs(), {2.5}));
  expect_well_formed(fcfs, 354);
  // The held frame keeps the worker busy back to back, so FCFS loses
  // lambda/mu - 1 frames per processed one rather than the ceiling.
  EXPECT_NEAR(fcfs.drops.drops_per_processed, 14.0 / 2.5 - 1.0, 0.2);
  EXPECT_NEAR(fcfs.sigma_p_fps, 2.5, 0.05);
  EXPECT_GT(fcfs.drops.evicted, 0);
}

TEST(VirtualPipelineTest, PacedRunWithEnoughCapacityDropsNothing) {
  for (auto policy : {SchedulePolicy::round_robin(), SchedulePolicy::fcfs()}) {
    const auto run = simulate_virtual(
        make_config(14, 354, FeedMode::Paced, policy, homogeneous(6, 2.5)));
    expect_well_formed(run, 354);
    EXPECT_EQ(run.drops.dropped, 0);
  }
}

TEST(VirtualPipelineTest, PacedRoundRobinHeterogeneousIsBoundByTheSlowest) {
  // lambda equals n * min(mu): the slow sticks keep up exactly, the fast CPU idles.
  const auto rates = with_head(13.5, 7, 2.5);
  const auto run = simulate_virtual(make_config(
      20, 2000, FeedMode::Paced, SchedulePolicy::round_robin(), rates));
  expect_well_formed(run, 2000);
  EXPECT_NEAR(run.sigma_p_fps, 8 * 2.5, 0.15 * 8 * 2.5);
}

TEST(VirtualPipelineTest, HeterogeneousSaturationSchedulerContrast) {
  const auto rates = with_head(13.5, 7, 2.5);
  const auto rr = simulate_virtual(make_config(
      14, 354, FeedMode::Saturation, SchedulePolicy::round_robin(), rates));
  const auto fcfs = simulate_virtual(make_config(
      14, 354, FeedMode::Saturation, SchedulePolicy::fcfs(), rates));
  const auto wrr = simulate_virtual(make_config(
      14, 354, FeedMode::Saturation, SchedulePolicy::weighted(rates), rates));
  const auto prop = simulate_virtual(make_config(
      14, 354, FeedMode::Saturation, SchedulePolicy::proportional(), rates));
  expect_well_formed(rr, 354);
  expect_well_formed(fcfs, 354);
  expect_well_formed(wrr, 354);
  expect_well_formed(prop, 354);
  EXPECT_NEAR(rr.sigma_p_fps, 20.0, 0.15 * 20.0);
  EXPECT_NEAR(fcfs.sigma_p_fps, 31.0, 0.10 * 31.0);
  EXPECT_GT(wrr.sigma_p_fps, rr.sigma_p_fps * 1.3);
  EXPECT_GT(prop.sigma_p_fps, rr.sigma_p_fps * 1.3);
  // The fast worker ends up with most of the proportional share.
  EXPECT_GT(prop.workers[0].processed, prop.workers[1].processed * 3);
}

TEST(VirtualPipelineTest, SlowTransferLowersThroughput) {
  auto cfg = make_config(30, 300, FeedMode::Saturation, SchedulePolicy::fcfs(),
                         homogeneous(4, 2.5));
  cfg.stream.payload_bytes = 519168;
  for (auto& w : cfg.workers) w.bandwidth_bps = 480e6;
  const auto usb2 = simulate_virtual(cfg);
  for (auto& w : cfg.workers) w.bandwidth_bps = 5e9;
  const auto usb3 = simulate_virtual(cfg);
  EXPECT_LT(usb2.sigma_p_fps, usb3.sigma_p_fps);
  EXPECT_NEAR(usb3.sigma_p_fps,
              300.0 / (75 * (0.4 + 519168.0 * 8 / 5e9)), 1e-6);
}

TEST(VirtualPipelineTest, RunsAreDeterministicForAFixedSeed) {
  auto cfg = make_config(14, 354, FeedMode::Paced, SchedulePolicy::proportional(),
                         with_head(13.5, 3, 2.5), LatencyKind::Exponential);
  cfg.seed = 1234;
  const auto a = simulate_virtual(cfg);
  const auto b = simulate_virtual(cfg);
  ASSERT_EQ(a.results, b.results);
  cfg.seed = 1235;
  EXPECT_NE(simulate_virtual(cfg).results, a.results);
}

TEST(VirtualPipelineTest, AllPoliciesStayWellFormedUnderRandomLatency) {
  for (auto mode : {FeedMode::Paced, FeedMode::Saturation}) {
    for (auto policy : {SchedulePolicy::round_robin(), SchedulePolicy::fcfs(),
                        SchedulePolicy::weighted({4, 1, 1, 2}),
                        SchedulePolicy::proportional(5, 0.5)}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto cfg = make_config(25, 400, mode, policy, {9.0, 2.5, 2.5, 4.0},
                               LatencyKind::Exponential);
        cfg.seed = seed;
        const auto run = simulate_virtual(cfg);
        expect_well_formed(run, 400);
        if (mode == FeedMode::Saturation) {
          EXPECT_EQ(run.drops.dropped, 0);
        }
      }
    }
  }
}

TEST(VirtualPipelineTest, ReplayedDetectionsFlowToResults) {
  synthetic::SceneConfig scene;
  scene.frames = 60;
  MotFile mot{synthetic::moving_boxes(scene)};
  const auto store = mot.to_replay_store();
  const auto gt = mot.to_ground_truth();
  const auto full = simulate_virtual(
      make_config(14, 60, FeedMode::Saturation, SchedulePolicy::fcfs(), {2.5}), &store);
  EXPECT_DOUBLE_EQ(evaluate_map(full.results, gt).map_score, 1.0);
  const auto dropped = simulate_virtual(
      make_config(14, 60, FeedMode::Paced, SchedulePolicy::fcfs(), {2.5}), &store);
  EXPECT_LT(evaluate_map(dropped.results, gt).map_score, 1.0);
}

TEST(VirtualPipelineTest, RejectsInvalidConfig) {
  auto cfg = make_config(14, 10, FeedMode::Paced, SchedulePolicy::fcfs(), {});
  EXPECT_THROW(simulate_virtual(cfg), ConfigError);
  cfg = make_config(0, 10, FeedMode::Paced, SchedulePolicy::fcfs(), {2.5});
  EXPECT_THROW(simulate_virtual(cfg), ConfigError);
}

}  // namespace
}  // namespace edgepar
