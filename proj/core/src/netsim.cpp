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
#include "tclsim/netsim.hpp"

#include <algorithm>
#include <cmath>

#include "tclsim/errors.hpp"

namespace tclsim::net {

void ChannelParams::validate() const {
  if (device_id.empty()) throw ValidationError("ChannelParams.device_id: must be non-empty");
  if (latency_mean_ms < 0) throw ValidationError("ChannelParams.latency_mean_ms (" + device_id + "): must be >= 0");
  if (latency_sd_ms < 0) throw ValidationError("ChannelParams.latency_sd_ms (" + device_id + "): must be >= 0");
  if (latency_floor_ms < 0) throw ValidationError("ChannelParams.latency_floor_ms (" + device_id + "): must be >= 0");
  for (double f : hourly_speed_factor) {
    if (!(f > 0)) throw ValidationError("ChannelParams.hourly_speed_factor (" + device_id + "): factors must be > 0");
  }
  if (outage_rate_per_hour < 0)
    throw ValidationError("ChannelParams.outage_rate_per_hour (" + device_id + "): must be >= 0");
  if (!(outage_duration_mean_s > 0))
    throw ValidationError("ChannelParams.outage_duration_mean_s (" + device_id + "): must be > 0");
  if (outage_rate_per_hour > 0 &&
      3600.0 / outage_rate_per_hour <= outage_duration_mean_s) {
    throw ValidationError("ChannelParams.outage_rate_per_hour (" + device_id +
                          "): rate too high for the mean outage duration "
                          "(outages would overlap)");
  }
  if (bandwidth_mean_bps < 0) throw ValidationError("ChannelParams.bandwidth_mean_bps (" + device_id + "): must be >= 0");
  if (bandwidth_sd_bps < 0) throw ValidationError("ChannelParams.bandwidth_sd_bps (" + device_id + "): must be >= 0");
  for (std::size_t i = 0; i < latency_empirical_ms.size(); ++i) {
    if (latency_empirical_ms[i] < 0)
      throw ValidationError("ChannelParams.latency_empirical_ms (" + device_id + "): values must be >= 0");
    if (i > 0 && latency_empirical_ms[i] < latency_empirical_ms[i - 1])
      throw ValidationError("ChannelParams.latency_empirical_ms (" + device_id + "): must be sorted ascending");
  }
}

double sample_latency_ms(const ChannelParams& params, double t_s, RngStream& rng) {
  const int hour = static_cast<int>(std::fmod(t_s / 3600.0, 24.0));
  const double factor = params.hourly_speed_factor[static_cast<std::size_t>(hour)];
  const double floor = params.latency_floor_ms;

  if (!params.latency_empirical_ms.empty()) {
    // Inverse-CDF draw with interpolation between order statistics.
    const auto& sample = params.latency_empirical_ms;
    const double u = rng.uniform();
    rng.next_u64();  // same draw count as the parametric path
    if (sample.size() == 1) return std::max(floor, sample[0] * factor);
    const double pos = u * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sample.size() - 1);
    const double v = sample[lo] + (pos - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
    return std::max(floor, v * factor);
  }

  const double target_mean = params.latency_mean_ms * factor;
  const double target_sd = params.latency_sd_ms * factor;
  const double body_mean = target_mean - floor;
  if (target_sd <= 0 || body_mean <= 0) {
    rng.next_u64();  // keep the stream position draw-count stable
    rng.next_u64();
    return std::max(floor, target_mean);
  }
  // Log-normal matched to (body_mean, target_sd), then shifted by the floor.
  const double s2 = std::log1p((target_sd * target_sd) / (body_mean * body_mean));
  const double mu = std::log(body_mean) - s2 / 2.0;
  const double draw = floor + std::exp(mu + std::sqrt(s2) * rng.normal());
  return std::max(draw, floor);
}

OutageProcess::OutageProcess(const ChannelParams& params, std::uint64_t seed)
    : rng_(seed, params.device_id + "/outage") {
  if (params.outage_rate_per_hour > 0) {
    up_mean_s_ = 3600.0 / params.outage_rate_per_hour - params.outage_duration_mean_s;
    down_mean_s_ = params.outage_duration_mean_s;
  }
}

void OutageProcess::extend_to(double t_s) {
  if (up_mean_s_ <= 0) return;
  double end = boundaries_.empty() ? 0.0 : boundaries_.back();
  while (end <= t_s) {
    const bool next_is_up = boundaries_.size() % 2 == 0;
    end += rng_.exponential(next_is_up ? up_mean_s_ : down_mean_s_);
    boundaries_.push_back(end);
  }
}

std::size_t OutageProcess::segment_index(double t_s) {
  extend_to(t_s);
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t_s);
  return static_cast<std::size_t>(it - boundaries_.begin());
}

bool OutageProcess::is_down(double t_s) {
  if (up_mean_s_ <= 0) return false;
  return segment_index(t_s) % 2 == 1;
}

std::vector<OutageProcess::Transition> OutageProcess::transitions_between(double t0, double t1) {
  std::vector<Transition> out;
  if (up_mean_s_ <= 0 || t1 <= t0) return out;
  extend_to(t1);
  auto lo = std::lower_bound(boundaries_.begin(), boundaries_.end(), t0);
  for (auto it = lo; it != boundaries_.end() && *it < t1; ++it) {
    const auto idx = static_cast<std::size_t>(it - boundaries_.begin());
    out.push_back(Transition{*it, idx % 2 == 0});  // end of an up segment -> going down
  }
  return out;
}

int OutageProcess::starts_between(double t0, double t1) {
  int n = 0;
  for (const auto& tr : transitions_between(t0, t1)) {
    if (tr.down) ++n;
  }
  return n;
}

ProbeRecord run_ping_probe(const ChannelParams& params, OutageProcess& outage,
                           double t_s, std::uint64_t seq, RngStream& latency_rng) {
  ProbeRecord rec;
  rec.kind = ProbeRecord::Kind::ping;
  rec.timestamp_s = t_s;
  rec.device_id = params.device_id;
  rec.seq = seq;
  double sum = 0;
  double mx = 0;
  int ok = 0;
  for (int i = 0; i < kPingsPerProbe; ++i) {
    const double ping_t = t_s + i * kPingSpacingS;
    if (outage.is_down(ping_t)) {
      ++rec.losses;
      continue;
    }
    const double rtt = sample_latency_ms(params, ping_t, latency_rng);
    rec.ping_ms[static_cast<std::size_t>(i)] = rtt;
    sum += rtt;
    mx = std::max(mx, rtt);
    ++ok;
  }
  if (ok > 0) {
    rec.avg_ms = sum / ok;
    rec.max_ms = mx;
  }
  rec.failed = ok == 0;
  return rec;
}

ProbeRecord run_bandwidth_probe(const ChannelParams& params, OutageProcess& outage,
                                double t_s, std::uint64_t seq, RngStream& bw_rng) {
  ProbeRecord rec;
  rec.kind = ProbeRecord::Kind::bandwidth;
  rec.timestamp_s = t_s;
  rec.device_id = params.device_id;
  rec.seq = seq;

  // Throughput is drawn regardless of outcome so the stream advances the
  // same way on every run shape.
  double throughput = bw_rng.normal(params.bandwidth_mean_bps, params.bandwidth_sd_bps);
  throughput = std::max(throughput, 1000.0);

  if (outage.is_down(t_s)) {
    rec.failed = true;
    return rec;
  }
  const double transfer_s = kBandwidthPayloadBits / throughput;
  const auto transitions = outage.transitions_between(t_s, t_s + transfer_s);
  for (const auto& tr : transitions) {
    if (tr.down) {
      rec.failed = true;  // outage began mid-transfer
      return rec;
    }
  }
  rec.bandwidth_bps = kBandwidthPayloadBits / transfer_s;
  return rec;
}

Delivery deliver(const ChannelParams& params, OutageProcess& outage, double t_s,
                 RngStream& latency_rng) {
  if (outage.is_down(t_s)) return Delivery{false, 0};
  const double rtt_ms = sample_latency_ms(params, t_s, latency_rng);
  // One-way trip modeled as half the measured round trip.
  return Delivery{true, t_s + rtt_ms / 2.0 / 1000.0};
}

}  // namespace tclsim::net
