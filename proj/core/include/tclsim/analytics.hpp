/*
 * Copyright 2026 The tclsim Authors.
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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tclsim::analytics {

/// 24-hour consumption profile normalized to [0, 1] (max = 1 unless all
/// values are zero).
struct LoadShape {
  std::string device_id;
  std::array<double, 24> values{};
  enum class Basis : std::uint8_t { mean, median };
  Basis basis = Basis::mean;
};

LoadShape normalize_shape(std::span<const double> hourly_kwh,
                          LoadShape::Basis basis = LoadShape::Basis::mean,
                          std::string device_id = {});

enum class ShapeDistance : std::uint8_t {
  euclidean_znorm,  // z-normalize each profile, then Euclidean
  shape_based,      // 1 - max cross-correlation over circular shifts
};

struct ClusterResult {
  std::vector<int> assignments;                // one per input shape
  std::vector<std::array<double, 24>> centroids;
  double within_dispersion = 0;  // sum of distances to assigned centroid
  int iterations = 0;
};

/// k-centroid clustering of daily load shapes, deterministic for a given
/// seed. Throws ValidationError when k < 1 or k > number of shapes.
ClusterResult cluster_shapes(const std::vector<LoadShape>& shapes, int k,
                             ShapeDistance distance, std::uint64_t seed = 0);

enum class CorrelationMethod : std::uint8_t { pearson, spearman };

struct Correlation {
  double r = 0;
  double p = 1;
  int n = 0;
};

/// Pearson or Spearman correlation with two-sided p from the t
/// approximation. Non-finite entries in either input are pairwise-deleted.
/// Throws ValidationError for n < 3 or zero variance.
Correlation correlate(std::span<const double> x, std::span<const double> y,
                      CorrelationMethod method);

struct KsResult {
  double d = 0;
  double p = 1;
};

/// Two-sample Kolmogorov-Smirnov statistic (sup over pooled evaluation
/// points) with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct FitResult {
  enum class Family : std::uint8_t { poisson, exponential };
  Family family = Family::poisson;
  double parameter = 0;  // lambda (events/interval) or mean duration
  int n = 0;             // observations used by the estimator
  int outliers_removed = 0;
  double goodness = 0;   // chi-square (poisson) or KS (exponential) statistic
  double goodness_p = 1;
  bool degenerate = false;  // e.g. all counts zero
};

/// Maximum-likelihood Poisson fit (lambda = sample mean of the counts) with
/// a chi-square goodness-of-fit. Throws ValidationError on empty input or
/// negative counts.
FitResult fit_poisson(std::span<const int> counts_per_interval);

struct OutlierRule {
  enum class Kind : std::uint8_t { none, iqr };
  Kind kind = Kind::none;
  double k = 3.0;  // drop values above Q3 + k * IQR

  static OutlierRule none() { return OutlierRule{Kind::none, 0}; }
  static OutlierRule iqr(double k) { return OutlierRule{Kind::iqr, k}; }
};

/// Exponential fit (mean estimator) with an optional upper-tail IQR filter
/// applied first; the removed count is reported. Goodness is the one-sample
/// KS statistic against the fitted exponential.
FitResult fit_exponential(std::span<const double> durations_s, OutlierRule rule);

/// Fraction of samples above on_threshold, bucketed by hour of day.
/// Hours never observed carry NaN.
std::array<double, 24> estimate_duty_cycle(std::span<const double> timestamps_s,
                                           std::span<const double> power_kw,
                                           double on_threshold_kw);

struct DeadbandEstimate {
  double setpoint_c = 0;
  double deadband_c = 0;
  int cycles = 0;
};

/// Recovers (setpoint, dead-band width) from a cycling temperature trace via
/// alternating-extrema detection; excursions (door openings) are rejected by
/// taking medians of the per-cycle extrema. Throws ValidationError when
/// fewer than 3 cycles are found.
DeadbandEstimate estimate_deadband(std::span<const double> temps_c);

struct EpiContents {
  double water_mass_kg = 120.0;  // water-equivalent thermal mass
  double air_mass_kg = 0.05;
};

struct EpiInterval {
  double start_s = 0;
  double end_s = 0;
  double heat_removed_kj = 0;
  double work_kj = 0;
  double epi = 0;
};

struct EpiSeries {
  std::vector<EpiInterval> intervals;
  std::array<double, 24> hourly_mean{};  // NaN where no interval started
};

/// Efficiency performance index per compressor-on interval:
/// Q_c = (m_w c_w + m_air c_air) * max(0, theta_start - theta_end) over the
/// interval, W = integral of electrical power; EPI = Q_c / W. Intervals with
/// zero work are skipped.
EpiSeries compute_epi(std::span<const double> timestamps_s,
                      std::span<const double> temps_c,
                      std::span<const double> power_kw,
                      const EpiContents& contents,
                      double on_threshold_kw = 0.01);

struct WeekendWeekdayRatio {
  double mean_ratio = 0;    // weekend mean / weekday mean - 1
  double median_ratio = 0;  // weekend median / weekday median - 1
  int weekend_days = 0;
  int weekday_days = 0;
};

/// day_of_week: 0 = Monday ... 6 = Sunday (5 and 6 are the weekend).
WeekendWeekdayRatio weekend_weekday_ratio(std::span<const double> daily_kwh,
                                          std::span<const int> day_of_week);

}  // namespace tclsim::analytics
