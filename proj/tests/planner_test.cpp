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

#include "edgepar/planner.hpp"

#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace edgepar::planner {
namespace {

TEST(RequiredModelsTest, CeilingOfRateRatio) {
  EXPECT_EQ(required_models(14, 2.5), 6);
  EXPECT_EQ(required_models(30, 2.3), 14);
  EXPECT_EQ(required_models(5, 10), 1);
  EXPECT_EQ(required_models(10, 2.5), 4);  // exact ratio, no float overshoot
  EXPECT_EQ(required_models(0.3, 0.1), 3);
}

TEST(RequiredModelsTest, RejectsNonPositiveRates) {
  EXPECT_THROW(required_models(0, 2.5), ConfigError);
  EXPECT_THROW(required_models(14, -1), ConfigError);
}

TEST(ModelRangeTest, ComfortLowerBound) {
  EXPECT_EQ(model_range(14, 2.5), (ModelRange{4, 6}));
  EXPECT_EQ(model_range(30, 2.5), (ModelRange{4, 12}));
  EXPECT_EQ(model_range(30, 2.3), (ModelRange{5, 14}));
  EXPECT_EQ(model_range(10, 10), (ModelRange{1, 1}));
}

TEST(ModelRangeTest, CollapsesWhenComfortExceedsStream) {
  EXPECT_EQ(model_range(8, 2.5), (ModelRange{4, 4}));
  EXPECT_EQ(model_range(30, 2.5, 20), (ModelRange{8, 12}));
  EXPECT_THROW(model_range(30, 2.5, 0), ConfigError);
}

TEST(ExpectedDropsTest, DropsPerProcessedFrame) {
  EXPECT_EQ(expected_drops_per_processed(14, 2.5), 5);
  EXPECT_EQ(expected_drops_per_processed(30, 2.3), 13);
  EXPECT_EQ(expected_drops_per_processed(30, 12.5), 2);
  EXPECT_EQ(expected_drops_per_processed(30, 2.5), 11);
  EXPECT_EQ(expected_drops_per_processed(30, 6.9), 4);
  EXPECT_EQ(expected_drops_per_processed(14, 17.3), 0);
  EXPECT_THROW(expected_drops_per_processed(14, 0), ConfigError);
}

TEST(AggregateRateTest, SumsRates) {
  const std::vector<double> sticks(4, 2.5);
  EXPECT_DOUBLE_EQ(aggregate_rate(sticks), 10.0);
  std::vector<double> mixed(7, 2.5);
  mixed.insert(mixed.begin(), 13.5);
  EXPECT_DOUBLE_EQ(aggregate_rate(mixed), 31.0);
  const std::vector<double> one{7.0};
  EXPECT_DOUBLE_EQ(aggregate_rate(one), 7.0);
  EXPECT_THROW(aggregate_rate({}), ConfigError);
  const std::vector<double> bad{2.5, 0.0};
  EXPECT_THROW(aggregate_rate(bad), ConfigError);
}

TEST(RationalTest, RecoversDecimalInputs) {
  const auto r = Rational::from_decimal(2.3);
  EXPECT_EQ(r.num, 23);
  EXPECT_EQ(r.den, 10);
  EXPECT_EQ(Rational::from_decimal(14).den, 1);
  EXPECT_EQ(ceil_div(Rational::from_decimal(10), Rational::from_decimal(2.5)), 4);
}

// Exact integer checks over one-decimal inputs (value = tenths / 10).
TEST(PlannerPropertyTest, InvariantsOverOneDecimalInputs) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> tenths(1, 600);
  for (int trial = 0; trial < 20000; ++trial) {
    const int l10 = tenths(rng), m10 = tenths(rng);
    const double lambda = l10 / 10.0, mu = m10 / 10.0;

    const auto n = required_models(lambda, mu);
    ASSERT_GE(n * m10, l10) << lambda << " / " << mu;
    ASSERT_TRUE(n == 1 || (n - 1) * m10 < l10) << lambda << " / " << mu;

    const auto range = model_range(lambda, mu);
    ASSERT_LE(range.lo, range.hi);
    ASSERT_EQ(range.hi, n);
    ASSERT_GE(range.lo, 1);
    ASSERT_LE(model_range(lambda + 0.1, mu).hi - range.hi, 1);
    ASSERT_GE(model_range(lambda + 0.1, mu).hi, range.hi);
    ASSERT_LE(model_range(lambda, mu + 0.1).hi, range.hi);
    ASSERT_LE(model_range(lambda, mu + 0.1).lo, range.lo);

    const auto drops = expected_drops_per_processed(lambda, mu);
    ASSERT_EQ(drops == 0, m10 >= l10) << lambda << " / " << mu;
  }
}

}  // namespace
}  // namespace edgepar::planner
