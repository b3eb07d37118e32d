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
#include "tclsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tclsim/errors.hpp"
#include "tclsim/rng.hpp"
#include "tclsim/stats_math.hpp"

namespace tclsim::analytics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Linearly interpolated sample quantile (the common "type 7" definition).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, n - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::array<double, 24> znorm(const std::array<double, 24>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= 24.0;
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / 24.0);
  std::array<double, 24> out{};
  if (sd == 0) return out;
  for (int i = 0; i < 24; ++i) out[static_cast<std::size_t>(i)] = (x[static_cast<std::size_t>(i)] - m) / sd;
  return out;
}

double euclidean(const std::array<double, 24>& a, const std::array<double, 24>& b) {
  double ss = 0;
  for (int i = 0; i < 24; ++i) {
    const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    ss += d * d;
  }
  return std::sqrt(ss);
}

// Daily profiles are clock-anchored; the shape distance tolerates schedule
// offsets of a few hours, not arbitrary rotations (a full rotation would let
// structurally different day patterns alias onto each other).
constexpr int kMaxShapeShiftHours = 4;

// Max circular cross-correlation of two z-normalized profiles over the
// allowed shift window, and the shift that attains it (profile b rotated
// left by the shift).
std::pair<double, int> best_shift_corr(const std::array<double, 24>& za,
                                       const std::array<double, 24>& zb) {
  double best = -2.0;
  int best_shift = 0;
  for (int offset = -kMaxShapeShiftHours; offset <= kMaxShapeShiftHours; ++offset) {
    const int s = (offset + 24) % 24;
    double dot = 0;
    for (int i = 0; i < 24; ++i) {
      dot += za[static_cast<std::size_t>(i)] * zb[static_cast<std::size_t>((i + s) % 24)];
    }
    const double corr = dot / 24.0;
    if (corr > best) {
      best = corr;
      best_shift = s;
    }
  }
  return {best, best_shift};
}

double shape_distance(const std::array<double, 24>& za, const std::array<double, 24>& zb) {
  return 1.0 - best_shift_corr(za, zb).first;
}

// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    throw ValidationError("correlate: undefined r (an input has zero variance)");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

LoadShape normalize_shape(std::span<const double> hourly_kwh,
                          LoadShape::Basis basis, std::string device_id) {
  if (hourly_kwh.size() != 24)
    throw ValidationError("normalize_shape: expected 24 hourly values, got " +
                          std::to_string(hourly_kwh.size()));
  for (double v : hourly_kwh) {
    if (v < 0 || !std::isfinite(v))
      throw ValidationError("normalize_shape: values must be finite and >= 0");
  }
  LoadShape shape;
  shape.device_id = std::move(device_id);
  shape.basis = basis;
  const double mx = *std::max_element(hourly_kwh.begin(), hourly_kwh.end());
  for (int i = 0; i < 24; ++i) {
    shape.values[static_cast<std::size_t>(i)] =
        mx == 0 ? 0.0 : hourly_kwh[static_cast<std::size_t>(i)] / mx;
  }
  return shape;
}

ClusterResult cluster_shapes(const std::vector<LoadShape>& shapes, int k,
                             ShapeDistance distance, std::uint64_t seed) {
  const std::size_t n = shapes.size();
  if (k < 1) throw ValidationError("cluster_shapes: k must be >= 1");
  if (static_cast<std::size_t>(k) > n)
    throw ValidationError("cluster_shapes: k (" + std::to_string(k) +
                          ") exceeds the number of shapes (" + std::to_string(n) + ")");

  std::vector<std::array<double, 24>> feats(n);
  for (std::size_t i = 0; i < n; ++i) feats[i] = znorm(shapes[i].values);

  auto dist = [&](const std::array<double, 24>& a, const std::array<double, 24>& b) {
    return distance == ShapeDistance::euclidean_znorm ? euclidean(a, b) : shape_distance(a, b);
  };

  // k-means++-style seeding from a dedicated stream.
  RngStream rng(seed, "cluster_shapes/init");
  std::vector<std::array<double, 24>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(feats[static_cast<std::size_t>(rng.next_u64() % n)]);
  std::vector<double> d2(n);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, dist(feats[i], c));
      d2[i] = best * best;
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0) {
      double target = rng.uniform() * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.next_u64() % n);
    }
    centroids.push_back(feats[pick]);
  }

  ClusterResult result;
  result.assignments.assign(n, -1);
  const int max_iter = 100;
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = dist(feats[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignments[i] != best) {
        result.assignments[i] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;

    // Update step. For the shape-based distance each member is circularly
    // aligned to its centroid before averaging.
    std::vector<std::array<double, 24>> sums(static_cast<std::size_t>(k));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (auto& s : sums) s.fill(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(result.assignments[i]);
      std::array<double, 24> member = feats[i];
      if (distance == ShapeDistance::shape_based) {
        const int shift = best_shift_corr(centroids[c], feats[i]).second;
        for (int j = 0; j < 24; ++j)
          member[static_cast<std::size_t>(j)] = feats[i][static_cast<std::size_t>((j + shift) % 24)];
      }
      for (int j = 0; j < 24; ++j) sums[c][static_cast<std::size_t>(j)] += member[static_cast<std::size_t>(j)];
      ++counts[c];
    }
    for (int c = 0; c < k; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      if (counts[cs] == 0) {
        // Re-seed an empty cluster with the worst-fitting point.
        std::size_t worst = 0;
        double worst_d = -1;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = dist(feats[i], centroids[static_cast<std::size_t>(result.assignments[i])]);
          if (d > worst_d) {
            worst_d = d;
            worst = i;
          }
        }
        centroids[cs] = feats[worst];
        changed = true;
        continue;
      }
      for (int j = 0; j < 24; ++j)
        sums[cs][static_cast<std::size_t>(j)] /= static_cast<double>(counts[cs]);
      centroids[cs] = distance == ShapeDistance::shape_based ? znorm(sums[cs]) : sums[cs];
    }
    if (!changed) break;
  }

  result.within_dispersion = 0;
  for (std::size_t i = 0; i < n; ++i) {
    result.within_dispersion +=
        dist(feats[i], centroids[static_cast<std::size_t>(result.assignments[i])]);
  }
  result.centroids = std::move(centroids);
  return result;
}

Correlation correlate(std::span<const double> x, std::span<const double> y,
                      CorrelationMethod method) {
  if (x.size() != y.size())
    throw ValidationError("correlate: inputs must have equal length");
  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i])) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  }
  const auto n = static_cast<int>(xs.size());
  if (n < 3) throw ValidationError("correlate: need at least 3 complete pairs");

  double r;
  if (method == CorrelationMethod::pearson) {
    r = pearson_r(xs, ys);
  } else {
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    r = pearson_r(rx, ry);
  }
  double p;
  if (std::fabs(r) >= 1.0) {
    p = 0.0;
  } else {
    const double t = r * std::sqrt((n - 2) / (1.0 - r * r));
    p = stats::student_t_two_sided_p(t, n - 2);
  }
  return Correlation{r, p, n};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw ValidationError("ks_two_sample: both samples must be non-empty");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const std::size_t n = sa.size();
  const std::size_t m = sb.size();

  // Walk the pooled order keeping integer counts so the statistic is exact.
  std::size_t i = 0, j = 0;
  long long best_num = 0;
  const auto ln = static_cast<long long>(n);
  const auto lm = static_cast<long long>(m);
  while (i < n || j < m) {
    const double v = (j >= m || (i < n && sa[i] <= sb[j])) ? sa[i] : sb[j];
    while (i < n && sa[i] == v) ++i;
    while (j < m && sb[j] == v) ++j;
    const long long num =
        std::llabs(static_cast<long long>(i) * lm - static_cast<long long>(j) * ln);
    best_num = std::max(best_num, num);
  }
  const double d = static_cast<double>(best_num) / static_cast<double>(ln * lm);
  const double ne = static_cast<double>(n) * static_cast<double>(m) /
                    (static_cast<double>(n) + static_cast<double>(m));
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return KsResult{d, stats::kolmogorov_sf(lambda)};
}

FitResult fit_poisson(std::span<const int> counts_per_interval) {
  if (counts_per_interval.empty()) throw ValidationError("fit_poisson: empty input");
  long long total = 0;
  int max_count = 0;
  for (int c : counts_per_interval) {
    if (c < 0) throw ValidationError("fit_poisson: counts must be >= 0");
    total += c;
    max_count = std::max(max_count, c);
  }
  FitResult fr;
  fr.family = FitResult::Family::poisson;
  fr.n = static_cast<int>(counts_per_interval.size());
  fr.parameter = static_cast<double>(total) / fr.n;
  if (total == 0) {
    fr.degenerate = true;
    fr.goodness = 0;
    fr.goodness_p = 1;
    return fr;
  }

  // Chi-square goodness-of-fit with the upper tail collapsed so every
  // expected bin count is at least 5.
  std::vector<double> observed(static_cast<std::size_t>(max_count) + 1, 0);
  for (int c : counts_per_interval) observed[static_cast<std::size_t>(c)] += 1;
  std::vector<double> expected(observed.size());
  const double lambda = fr.parameter;
  double pk = std::exp(-lambda);  // P(X = 0)
  double cumulative = 0;
  for (std::size_t kidx = 0; kidx < expected.size(); ++kidx) {
    expected[kidx] = fr.n * pk;
    cumulative += pk;
    pk *= lambda / static_cast<double>(kidx + 1);
  }
  // Final bin absorbs the entire remaining tail mass.
  expected.back() += fr.n * std::max(0.0, 1.0 - cumulative);

  std::vector<double> obs_bins, exp_bins;
  double o_acc = 0, e_acc = 0;
  for (std::size_t kidx = 0; kidx < expected.size(); ++kidx) {
    o_acc += observed[kidx];
    e_acc += expected[kidx];
    if (e_acc >= 5.0) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (exp_bins.empty()) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
    } else {
      obs_bins.back() += o_acc;
      exp_bins.back() += e_acc;
    }
  }
  double chi2 = 0;
  for (std::size_t kidx = 0; kidx < exp_bins.size(); ++kidx) {
    if (exp_bins[kidx] > 0) {
      const double d = obs_bins[kidx] - exp_bins[kidx];
      chi2 += d * d / exp_bins[kidx];
    }
  }
  fr.goodness = chi2;
  const auto df = static_cast<int>(exp_bins.size()) - 2;  // lambda estimated
  fr.goodness_p = df >= 1 ? stats::chi_square_sf(chi2, df) : kNaN;
  return fr;
}

FitResult fit_exponential(std::span<const double> durations_s, OutlierRule rule) {
  if (durations_s.empty()) throw ValidationError("fit_exponential: empty input");
  std::vector<double> v;
  v.reserve(durations_s.size());
  for (double d : durations_s) {
    if (!(d > 0) || !std::isfinite(d))
      throw ValidationError("fit_exponential: durations must be finite and > 0");
    v.push_back(d);
  }

  FitResult fr;
  fr.family = FitResult::Family::exponential;
  if (rule.kind == OutlierRule::Kind::iqr) {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_sorted(sorted, 0.25);
    const double q3 = quantile_sorted(sorted, 0.75);
    const double cutoff = q3 + rule.k * (q3 - q1);
    std::vector<double> kept;
    kept.reserve(v.size());
    for (double d : v) {
      if (d <= cutoff) kept.push_back(d);
    }
    fr.outliers_removed = static_cast<int>(v.size() - kept.size());
    if (kept.empty())
      throw ValidationError("fit_exponential: outlier rule removed every observation");
    v = std::move(kept);
  }
  fr.n = static_cast<int>(v.size());
  fr.parameter = mean_of(v);

  // One-sample KS against the fitted exponential.
  std::sort(v.begin(), v.end());
  double d_stat = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = 1.0 - std::exp(-v[i] / fr.parameter);
    const double lo = static_cast<double>(i) / fr.n;
    const double hi = static_cast<double>(i + 1) / fr.n;
    d_stat = std::max({d_stat, f - lo, hi - f});
  }
  fr.goodness = d_stat;
  const double sn = std::sqrt(static_cast<double>(fr.n));
  fr.goodness_p = stats::kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d_stat);
  return fr;
}

std::array<double, 24> estimate_duty_cycle(std::span<const double> timestamps_s,
                                           std::span<const double> power_kw,
                                           double on_threshold_kw) {
  if (timestamps_s.empty() || timestamps_s.size() != power_kw.size())
    throw ValidationError("estimate_duty_cycle: trace empty or misaligned");
  std::array<double, 24> on{};
  std::array<double, 24> total{};
  for (std::size_t i = 0; i < timestamps_s.size(); ++i) {
    const auto hour = static_cast<std::size_t>(std::fmod(timestamps_s[i] / 3600.0, 24.0));
    total[hour] += 1;
    if (power_kw[i] > on_threshold_kw) on[hour] += 1;
  }
  std::array<double, 24> duty{};
  for (int h = 0; h < 24; ++h) {
    const auto hs = static_cast<std::size_t>(h);
    duty[hs] = total[hs] > 0 ? on[hs] / total[hs] : kNaN;
  }
  return duty;
}

DeadbandEstimate estimate_deadband(std::span<const double> temps_c) {
  if (temps_c.size() < 4) throw ValidationError("estimate_deadband: no cycles detected");

  // Reversal threshold from the interquartile core of the trace, so that
  // occasional excursions (door openings) do not inflate the scale.
  std::vector<double> sorted(temps_c.begin(), temps_c.end());
  std::sort(sorted.begin(), sorted.end());
  const double spread = quantile_sorted(sorted, 0.70) - quantile_sorted(sorted, 0.30);
  if (spread <= 0) throw ValidationError("estimate_deadband: no cycles detected");
  const double reversal = 0.5 * spread;

  // Zigzag extrema: commit an extreme once the trace has moved away from it
  // by more than the reversal threshold.
  std::vector<double> peaks, troughs;
  double candidate = temps_c[0];
  int direction = 0;  // +1 rising, -1 falling
  for (std::size_t i = 1; i < temps_c.size(); ++i) {
    const double v = temps_c[i];
    if (direction >= 0) {
      if (v > candidate) {
        candidate = v;
        direction = 1;
      } else if (candidate - v > reversal) {
        if (direction == 1) peaks.push_back(candidate);
        candidate = v;
        direction = -1;
      }
    } else {
      if (v < candidate) {
        candidate = v;
      } else if (v - candidate > reversal) {
        troughs.push_back(candidate);
        candidate = v;
        direction = 1;
      }
    }
  }

  const int cycles = static_cast<int>(std::min(peaks.size(), troughs.size()));
  if (cycles < 3) throw ValidationError("estimate_deadband: no cycles detected");

  const double hi = median_of(peaks);
  const double lo = median_of(troughs);
  return DeadbandEstimate{(hi + lo) / 2.0, hi - lo, cycles};
}

EpiSeries compute_epi(std::span<const double> timestamps_s,
                      std::span<const double> temps_c,
                      std::span<const double> power_kw,
                      const EpiContents& contents, double on_threshold_kw) {
  const std::size_t n = timestamps_s.size();
  if (n == 0 || temps_c.size() != n || power_kw.size() != n)
    throw ValidationError("compute_epi: traces empty or misaligned");

  constexpr double kWaterKjPerKgC = 4.186;
  constexpr double kAirKjPerKgC = 1.005;
  const double heat_capacity_kj_per_c =
      contents.water_mass_kg * kWaterKjPerKgC + contents.air_mass_kg * kAirKjPerKgC;

  EpiSeries series;
  std::array<double, 24> hour_sum{};
  std::array<int, 24> hour_n{};

  std::size_t i = 0;
  while (i < n) {
    if (power_kw[i] <= on_threshold_kw) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double work_kwh = 0;
    while (j < n && power_kw[j] > on_threshold_kw) {
      const double dt_s = j + 1 < n ? timestamps_s[j + 1] - timestamps_s[j]
                                    : (j > 0 ? timestamps_s[j] - timestamps_s[j - 1] : 0.0);
      work_kwh += power_kw[j] * dt_s / 3600.0;
      ++j;
    }
    const double work_kj = work_kwh * 3600.0;
    if (work_kj > 0) {
      EpiInterval iv;
      iv.start_s = timestamps_s[i];
      iv.end_s = timestamps_s[j - 1];
      iv.heat_removed_kj = heat_capacity_kj_per_c * std::max(0.0, temps_c[i] - temps_c[j - 1]);
      iv.work_kj = work_kj;
      iv.epi = iv.heat_removed_kj / iv.work_kj;
      const auto hour = static_cast<std::size_t>(std::fmod(iv.start_s / 3600.0, 24.0));
      hour_sum[hour] += iv.epi;
      hour_n[hour] += 1;
      series.intervals.push_back(iv);
    }
    i = j;
  }
  for (int h = 0; h < 24; ++h) {
    const auto hs = static_cast<std::size_t>(h);
    series.hourly_mean[hs] = hour_n[hs] > 0 ? hour_sum[hs] / hour_n[hs] : kNaN;
  }
  return series;
}

WeekendWeekdayRatio weekend_weekday_ratio(std::span<const double> daily_kwh,
                                          std::span<const int> day_of_week) {
  if (daily_kwh.size() != day_of_week.size())
    throw ValidationError("weekend_weekday_ratio: inputs must have equal length");
  std::vector<double> weekend, weekday;
  for (std::size_t i = 0; i < daily_kwh.size(); ++i) {
    if (day_of_week[i] < 0 || day_of_week[i] > 6)
      throw ValidationError("weekend_weekday_ratio: day_of_week must lie in [0, 6]");
    (day_of_week[i] >= 5 ? weekend : weekday).push_back(daily_kwh[i]);
  }
  if (weekend.empty() || weekday.empty())
    throw ValidationError("weekend_weekday_ratio: need at least one weekend and one weekday value");

  const double wd_mean = mean_of(weekday);
  const double wd_median = median_of(weekday);
  if (wd_mean == 0 || wd_median == 0)
    throw ValidationError("weekend_weekday_ratio: weekday statistic is zero");

  WeekendWeekdayRatio out;
  out.mean_ratio = mean_of(weekend) / wd_mean - 1.0;
  out.median_ratio = median_of(weekend) / wd_median - 1.0;
  out.weekend_days = static_cast<int>(weekend.size());
  out.weekday_days = static_cast<int>(weekday.size());
  return out;
}

}  // namespace tclsim::analytics
