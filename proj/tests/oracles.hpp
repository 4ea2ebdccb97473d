/*
 * Copyright 2026 The overbench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Independent numerical references for the statistics tests. Nothing here
// calls into the library.

#include <cmath>
#include <numbers>

namespace overbench::oracle {

// Standard normal CDF by composite Simpson integration of the density over
// [0, |x|].
inline double normal_cdf(double x, int intervals = 20000) {
  const double b = std::abs(x);
  const double h = b / intervals;
  auto pdf = [](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  };
  double sum = pdf(0.0) + pdf(b);
  for (int i = 1; i < intervals; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  }
  const double half = sum * h / 3.0;
  return x >= 0 ? 0.5 + half : 0.5 - half;
}

// Inverse of normal_cdf above by bisection on [-10, 10].
inline double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Values produced by the two functions above and frozen here.
inline constexpr double kZ995 = 2.5758293035;
inline constexpr double kZ99 = 2.3263478740;
// (z(0.995) + z(0.99)) / sqrt(5), in percent for sigma = 1%.
inline constexpr double kPowerDeltaAtOnePercent = 2.1923202814;

}  // namespace overbench::oracle
