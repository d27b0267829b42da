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

#include "edgepar/detector.hpp"

#include <gtest/gtest.h>

namespace edgepar {
namespace {

Detection det(double x, const char* label = "pedestrian") {
  return {{x, 0.0, 10.0, 20.0}, label, 0.9};
}

TEST(SimulateProcessTest, DeterministicServiceTimeIsInverseRate) {
  const WorkerProfile stick{0, 2.5};
  LatencySampler sampler(stick, 0);
  const auto out = simulate_process(stick, {0, 0.0, 0}, 1.0, sampler);
  EXPECT_NEAR(out.completion_ts - 1.0, 0.400, 1e-12);

  const WorkerProfile cpu{1, 13.5};
  LatencySampler cpu_sampler(cpu, 0);
  EXPECT_NEAR(simulate_process(cpu, {0, 0.0, 0}, 0.0, cpu_sampler).completion_ts,
              0.074074, 1e-6);
}

TEST(SimulateProcessTest, TransferDelayPrecedesInference) {
  WorkerProfile stick{0, 2.5};
  stick.bandwidth_bps = 5e9;
  LatencySampler sampler(stick, 0);
  const auto out = simulate_process(stick, {0, 0.0, 519168}, 0.0, sampler);
  EXPECT_NEAR(out.completion_ts, 0.400 + 519168.0 * 8.0 / 5e9, 1e-12);
  EXPECT_NEAR(out.completion_ts, 0.40083, 1e-5);
}

TEST(SimulateProcessTest, TransferIsFreeWhenUnlimitedOrEmpty) {
  WorkerProfile p{0, 2.5};
  EXPECT_EQ(transfer_delay(p, 519168), 0.0);
  p.bandwidth_bps = 480e6;
  EXPECT_EQ(transfer_delay(p, 0), 0.0);
  EXPECT_GT(transfer_delay(p, 519168), 0.0);
}

TEST(SimulateProcessTest, DetectionsComeFromReplayStore) {
  const WorkerProfile p{0, 5.0};
  LatencySampler sampler(p, 0);
  ReplayStore store;
  store.add(3, det(1.0));
  EXPECT_EQ(simulate_process(p, {3, 0.0, 0}, 0.0, sampler, &store).detections.size(), 1u);
  EXPECT_TRUE(simulate_process(p, {4, 0.0, 0}, 0.0, sampler, &store).detections.empty());
  EXPECT_TRUE(simulate_process(p, {3, 0.0, 0}, 0.0, sampler).detections.empty());
}

TEST(SimulateProcessTest, RejectsStartBeforeArrival) {
  const WorkerProfile p{0, 5.0};
  LatencySampler sampler(p, 0);
  EXPECT_THROW(simulate_process(p, {2, 1.0, 0}, 0.5, sampler), ProtocolError);
}

TEST(ReplayLookupTest, ReturnsStoredListOrEmpty) {
  ReplayStore store;
  store.add(5, det(1.0));
  store.add(5, det(2.0));
  const auto hit = replay_lookup(store, 5);
  ASSERT_EQ(hit.size(), 2u);
  EXPECT_EQ(hit[0], det(1.0));
  EXPECT_EQ(hit[1], det(2.0));
  EXPECT_TRUE(replay_lookup(store, 6).empty());
  EXPECT_TRUE(replay_lookup(ReplayStore{}, 0).empty());
  EXPECT_EQ(replay_lookup(store, 5), replay_lookup(store, 5));
}

TEST(LatencySamplerTest, SeededDrawsAreReproducible) {
  for (auto kind : {LatencyKind::Exponential, LatencyKind::Uniform}) {
    WorkerProfile p{2, 2.5, kind, 0.3};
    LatencySampler a(p, 42), b(p, 42), other(p, 43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const double x = a.draw();
      ASSERT_EQ(x, b.draw());
      differs |= x != other.draw();
    }
    EXPECT_TRUE(differs);
  }
}

TEST(LatencySamplerTest, StreamsAreSeededPerWorker) {
  WorkerProfile w0{0, 2.5, LatencyKind::Exponential};
  WorkerProfile w1{1, 2.5, LatencyKind::Exponential};
  // global seed 5 for worker 1 equals global seed 6 for worker 0.
  LatencySampler a(w1, 5), b(w0, 6);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.draw(), b.draw());
}

TEST(LatencySamplerTest, DistributionsHaveTheNominalMean) {
  for (auto kind : {LatencyKind::Exponential, LatencyKind::Uniform}) {
    WorkerProfile p{0, 2.5, kind, 0.5};
    LatencySampler s(p, 7);
    double sum = 0.0, lo = 1e9, hi = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = s.draw();
      sum += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    EXPECT_NEAR(sum / n, 0.4, 0.004);
    EXPECT_GE(lo, 0.0);
    if (kind == LatencyKind::Uniform) {
      EXPECT_GE(lo, 0.2);
      EXPECT_LE(hi, 0.6);
    }
  }
}

TEST(WorkerProfileTest, ValidationRejectsBadFields) {
  EXPECT_THROW(validate(WorkerProfile{0, 0.0}), ConfigError);
  EXPECT_THROW(validate(WorkerProfile{-1, 1.0}), ConfigError);
  EXPECT_THROW(validate(WorkerProfile{0, 1.0, LatencyKind::Uniform, 1.0}), ConfigError);
  WorkerProfile p{0, 1.0};
  p.tdp_watts = 0.0;
  EXPECT_THROW(validate(p), ConfigError);
  p.tdp_watts.reset();
  p.bandwidth_bps = -1.0;
  EXPECT_THROW(validate(p), ConfigError);
}

}  // namespace
}  // namespace edgepar
