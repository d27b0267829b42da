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
#include <cstdint>
#include <numeric>
#include <string>
#include <span>
#include <vector>

#include "edgepar/error.hpp"

namespace edgepar::planner {

// Non-negative rational recovered from a decimal-valued double, so that
// ceilings such as ceil(10 / 2.5) come out as exactly 4 rather than 5.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  // Uses the smallest power-of-ten denominator (up to 10^9) reproducing the
  // value; otherwise falls back to 10^9.
  static Rational from_decimal(double v) {
    std::int64_t den = 1;
    for (int digits = 0; digits <= 9; ++digits, den *= 10) {
      const double scaled = v * static_cast<double>(den);
      const double rounded = std::round(scaled);
      if (std::fabs(scaled - rounded) <= 1e-9 * std::max(1.0, scaled))
        return reduce({static_cast<std::int64_t>(rounded), den});
    }
    den /= 10;
    return reduce(
        {static_cast<std::int64_t>(std::round(v * static_cast<double>(den))),
         den});
  }

  static Rational reduce(Rational r) {
    const auto g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }
};

// ceil(a / b) for positive rationals, in exact integer arithmetic.
inline std::int64_t ceil_div(Rational a, Rational b) {
  const __int128 num = static_cast<__int128>(a.num) * b.den;
  const __int128 den = static_cast<__int128>(a.den) * b.num;
  __int128 q = num / den;
  if (q * den < num) ++q;
  return static_cast<std::int64_t>(q);
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string(name) + " must be a positive finite number");
}

struct ModelRange {
  std::int64_t lo = 1;
  std::int64_t hi = 1;

  friend bool operator==(const ModelRange&, const ModelRange&) = default;
};

struct PlanResult {
  std::int64_t n_exact = 1;
  ModelRange n_range;
  double mu_fps = 0.0;

  // Nominal parallel rate n * mu for a homogeneous deployment.
  double sigma_p(std::int64_t n) const { return static_cast<double>(n) * mu_fps; }
  double sigma_p() const { return sigma_p(n_exact); }
};

// Models needed so that n * mu >= lambda.
inline std::int64_t required_models(double lambda_fps, double mu_fps) {
  require_positive(lambda_fps, "lambda_fps");
  require_positive(mu_fps, "mu_fps");
  return std::max<std::int64_t>(1, ceil_div(Rational::from_decimal(lambda_fps),
                                            Rational::from_decimal(mu_fps)));
}

// Closed range [ceil(comfort / mu), ceil(lambda / mu)]. The lower end is the
// smallest deployment that still meets the human-perception comfort rate.
inline ModelRange model_range(double lambda_fps, double mu_fps,
                              double comfort_fps = 10.0) {
  require_positive(comfort_fps, "comfort_fps");
  const auto hi = required_models(lambda_fps, mu_fps);
  if (comfort_fps > lambda_fps) return {hi, hi};
  const auto lo = std::max<std::int64_t>(
      1, ceil_div(Rational::from_decimal(comfort_fps),
                  Rational::from_decimal(mu_fps)));
  return {std::min(lo, hi), hi};
}

// Frames dropped per processed frame when the stream outpaces the detector.
inline std::int64_t expected_drops_per_processed(double lambda_fps,
                                                 double sigma_fps) {
  require_positive(lambda_fps, "lambda_fps");
  require_positive(sigma_fps, "sigma_fps");
  return std::max<std::int64_t>(
      0, ceil_div(Rational::from_decimal(lambda_fps),
                  Rational::from_decimal(sigma_fps)) - 1);
}

inline double aggregate_rate(std::span<const double> mu_list) {
  if (mu_list.empty()) throw ConfigError("aggregate_rate needs at least one rate");
  double total = 0.0;
  for (double mu : mu_list) {
    require_positive(mu, "mu_fps");
    total += mu;
  }
  return total;
}

inline PlanResult plan(double lambda_fps, double mu_fps,
                       double comfort_fps = 10.0) {
  PlanResult r;
  r.n_exact = required_models(lambda_fps, mu_fps);
  r.n_range = model_range(lambda_fps, mu_fps, comfort_fps);
  r.mu_fps = mu_fps;
  return r;
}

}  // namespace edgepar::planner
