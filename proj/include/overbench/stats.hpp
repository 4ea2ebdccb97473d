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

// Summary statistics and change detectability.
//
// The minimal detectable relative change is computed from the relative
// standard deviation sigma of the n loop-start means:
//
//   TableConsistent:  delta = sqrt(n/2) * sigma
//   TwoSamplePower:   delta = (z(1 - alpha/2) + z(1 - beta)) / sqrt(n/2) * sigma
//
// TableConsistent is the default. It is the relationship that reproduces the
// published overhead measurements (e.g. sigma 1.97% at n = 10 -> 4.41%).
// TwoSamplePower is the textbook two-sample z power calculation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <numbers>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "overbench/error.hpp"

namespace overbench {

enum class SampleBasis { PerCall, PerLoopMean };

inline std::string_view to_string(SampleBasis basis) noexcept {
  return basis == SampleBasis::PerCall ? "per-call" : "per-loop-mean";
}

struct StatsSummary {
  double mean_ns = 0.0;
  double stddev_ns = 0.0;
  // stddev / mean as a fraction (0.0197 for 1.97%).
  double rel_stddev = 0.0;
  SampleBasis basis = SampleBasis::PerCall;
  std::size_t count = 0;
};

inline std::size_t warmup_cutoff(std::size_t size, double warmup_fraction) {
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ValidationError("warmup_fraction must be in [0, 1), got " +
                          std::to_string(warmup_fraction));
  }
  return static_cast<std::size_t>(
      std::floor(warmup_fraction * static_cast<double>(size)));
}

/// Mean and sample standard deviation (divisor count - 1) over the values
/// left after dropping the first warmup_fraction of the input.
template <std::ranges::sized_range R>
  requires std::is_arithmetic_v<std::ranges::range_value_t<R>>
StatsSummary summarize(const R& durations, double warmup_fraction,
                       SampleBasis basis) {
  const std::size_t size = std::ranges::size(durations);
  const std::size_t skip = warmup_cutoff(size, warmup_fraction);
  const std::size_t count = size - skip;
  if (count < 2) {
    throw InsufficientDataError(
        "at least 2 values must remain after warmup removal, got " +
        std::to_string(count));
  }
  auto retained = durations | std::views::drop(skip);

  long double sum = 0.0L;
  for (auto v : retained) sum += static_cast<long double>(v);
  const long double mean = sum / static_cast<long double>(count);

  long double ss = 0.0L;
  for (auto v : retained) {
    const long double d = static_cast<long double>(v) - mean;
    ss += d * d;
  }
  const long double var = ss / static_cast<long double>(count - 1);

  StatsSummary s;
  s.mean_ns = static_cast<double>(mean);
  s.stddev_ns = static_cast<double>(std::sqrt(var));
  s.rel_stddev = s.mean_ns != 0.0 ? s.stddev_ns / std::abs(s.mean_ns) : 0.0;
  s.basis = basis;
  s.count = count;
  return s;
}

// Mean of the retained part of one loop start's durations.
template <std::ranges::sized_range R>
double retained_mean(const R& durations, double warmup_fraction) {
  const std::size_t size = std::ranges::size(durations);
  const std::size_t skip = warmup_cutoff(size, warmup_fraction);
  if (size == skip) {
    throw InsufficientDataError("no values remain after warmup removal");
  }
  long double sum = 0.0L;
  for (auto v : durations | std::views::drop(skip)) {
    sum += static_cast<long double>(v);
  }
  return static_cast<double>(sum / static_cast<long double>(size - skip));
}

inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse standard-normal CDF. A rational approximation (Acklam) gives a
/// starting point with relative error around 1e-9; one Halley step against
/// the erfc-based CDF tightens it to near machine precision.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile needs 0 < p < 1, got " +
                      std::to_string(p));
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  constexpr double p_high = 1.0 - p_low;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= p_high) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

enum class MdeMode { TableConsistent, TwoSamplePower };

inline std::string_view to_string(MdeMode mode) noexcept {
  return mode == MdeMode::TableConsistent ? "table" : "power";
}

struct MdeConfig {
  int n = 10;
  double alpha = 0.01;
  double beta = 0.01;
  MdeMode mode = MdeMode::TableConsistent;

  void validate() const {
    if (n < 2) {
      throw ValidationError("MDE needs n >= 2 loop starts, got " +
                            std::to_string(n));
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ValidationError("alpha must be in (0, 1)");
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      throw ValidationError("beta must be in (0, 1)");
    }
  }
};

/// Smallest relative change detectable given the relative standard deviation
/// of the loop-start means. Input and output share units (fraction or
/// percent), since the relation is linear.
inline double minimal_detectable_change(double rel_stddev,
                                        const MdeConfig& cfg = {}) {
  cfg.validate();
  if (!(rel_stddev >= 0.0) || !std::isfinite(rel_stddev)) {
    throw DomainError("relative standard deviation must be finite and >= 0");
  }
  const double root = std::sqrt(static_cast<double>(cfg.n) / 2.0);
  switch (cfg.mode) {
    case MdeMode::TableConsistent:
      return root * rel_stddev;
    case MdeMode::TwoSamplePower: {
      const double z_alpha = normal_quantile(1.0 - cfg.alpha / 2.0);
      const double z_beta = normal_quantile(1.0 - cfg.beta);
      return (z_alpha + z_beta) / root * rel_stddev;
    }
  }
  return 0.0;
}

struct WelchResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
};

/// Two-sided Welch t test for a difference of means.
inline WelchResult welch_t_test(std::span<const double> a,
                                std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientDataError("Welch test needs >= 2 values per sample");
  }
  auto moments = [](std::span<const double> xs) {
    long double sum = 0.0L;
    for (double x : xs) sum += x;
    const long double mean = sum / xs.size();
    long double ss = 0.0L;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair<double, double>(static_cast<double>(mean),
                                     static_cast<double>(ss / (xs.size() - 1)));
  };
  const auto [mean_a, var_a] = moments(a);
  const auto [mean_b, var_b] = moments(b);
  const double se_a = var_a / static_cast<double>(a.size());
  const double se_b = var_b / static_cast<double>(b.size());
  const double se2 = se_a + se_b;

  WelchResult r;
  if (se2 <= 0.0) {
    // Both samples constant: any difference is certain, none is impossible.
    r.degrees_of_freedom = static_cast<double>(a.size() + b.size() - 2);
    if (mean_a == mean_b) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = mean_b > mean_a ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.t_statistic = (mean_b - mean_a) / std::sqrt(se2);
  r.degrees_of_freedom =
      se2 * se2 /
      (se_a * se_a / static_cast<double>(a.size() - 1) +
       se_b * se_b / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.degrees_of_freedom);
  r.p_value =
      2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic)));
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

// Per-loop-start means of one run plus the digest of the configuration that
// produced them. Runs are only comparable when the digests match.
struct LoopMeans {
  std::string config_digest;
  std::vector<double> means;
};

struct ChangeDecision {
  bool changed = false;
  // (mean_b - mean_a) / mean_a
  double relative_change = 0.0;
  double p_value = 1.0;
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
};

/// Welch test on the n-vs-n loop-start means at level alpha.
inline ChangeDecision detect_change(const LoopMeans& a, const LoopMeans& b,
                                    double alpha = 0.01) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must be in (0, 1)");
  }
  if (a.config_digest != b.config_digest) {
    throw ComparabilityError("runs were produced by different configurations (" +
                             a.config_digest + " vs " + b.config_digest + ")");
  }
  if (a.means.size() < 2 || b.means.size() < 2) {
    throw InsufficientDataError(
        "change detection needs >= 2 loop-start means per run");
  }
  const auto welch = welch_t_test(a.means, b.means);
  long double sum_a = 0.0L, sum_b = 0.0L;
  for (double x : a.means) sum_a += x;
  for (double x : b.means) sum_b += x;
  const double mean_a = static_cast<double>(sum_a / a.means.size());
  const double mean_b = static_cast<double>(sum_b / b.means.size());
  if (mean_a == 0.0) {
    throw DomainError("baseline mean is zero; relative change undefined");
  }

  ChangeDecision d;
  d.relative_change = (mean_b - mean_a) / mean_a;
  d.p_value = welch.p_value;
  d.t_statistic = welch.t_statistic;
  d.degrees_of_freedom = welch.degrees_of_freedom;
  d.changed = welch.p_value < alpha;
  return d;
}

}  // namespace overbench
