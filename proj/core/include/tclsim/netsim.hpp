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
#include <string>
#include <vector>

#include "tclsim/rng.hpp"

namespace tclsim::net {

inline constexpr double kPingIntervalS = 30.0;
inline constexpr int kPingsPerProbe = 6;
inline constexpr double kPingSpacingS = 1.0;
inline constexpr double kBandwidthIntervalS = 2.0 * 3600.0;
inline constexpr double kBandwidthPayloadBits = 3.0e6;
inline constexpr double kUplinkIntervalS = 4.0 * 3600.0;

/// Per-device cellular link model.
///
/// Latency is a shifted log-normal matched to (latency_mean, latency_sd),
/// both scaled by the hour-of-day speed factor, never below latency_floor.
/// Outages are an alternating renewal process: event starts at outage_rate
/// per hour (up durations exponential with mean 3600/rate - duration so that
/// starts hit the target rate), down durations exponential with
/// outage_duration_mean.
struct ChannelParams {
  std::string device_id;
  double latency_mean_ms = 642.0;
  double latency_sd_ms = 185.0;
  double latency_floor_ms = 50.0;
  /// When non-empty, round trips are drawn from this empirical sample
  /// (inverse-CDF with interpolation; must be sorted ascending) instead of
  /// the parametric family. Intended for replaying field-measured traces.
  std::vector<double> latency_empirical_ms;
  std::array<double, 24> hourly_speed_factor;  // multiplicative, default 1.0
  double outage_rate_per_hour = 1.0;
  double outage_duration_mean_s = 258.0;
  double bandwidth_mean_bps = 250000.0;
  double bandwidth_sd_bps = 50000.0;

  ChannelParams() { hourly_speed_factor.fill(1.0); }

  void validate() const;
};

/// One round-trip latency draw at time t (channel must be up).
double sample_latency_ms(const ChannelParams& params, double t_s, RngStream& rng);

/// Pull-based alternating up/down schedule. Segments are generated on demand
/// from a dedicated stream, so the realized schedule depends only on
/// (seed, device) and not on when or how often it is queried.
class OutageProcess {
 public:
  OutageProcess(const ChannelParams& params, std::uint64_t seed);

  bool is_down(double t_s);

  struct Transition {
    double t_s;
    bool down;  // true: up -> down at t_s
  };
  /// All transitions with t in [t0, t1).
  std::vector<Transition> transitions_between(double t0, double t1);

  /// Number of outage starts in [t0, t1).
  int starts_between(double t0, double t1);

 private:
  void extend_to(double t_s);
  std::size_t segment_index(double t_s);

  double up_mean_s_ = 0;    // 0: never down
  double down_mean_s_ = 0;
  RngStream rng_;
  // boundaries_[k] ends segment k; segment 0 = [0, boundaries_[0]) is up,
  // odd segments are down.
  std::vector<double> boundaries_;
};

struct ProbeRecord {
  enum class Kind : std::uint8_t { ping, bandwidth };
  Kind kind = Kind::ping;
  double timestamp_s = 0;
  std::string device_id;
  std::uint64_t seq = 0;  // per device and kind, gap-free in local storage
  std::array<std::optional<double>, kPingsPerProbe> ping_ms;
  int losses = 0;
  std::optional<double> avg_ms;
  std::optional<double> max_ms;
  std::optional<double> bandwidth_bps;
  bool failed = false;
};

/// Six pings spaced one second apart starting at t; pings launched while the
/// channel is down are lost. avg/max cover successful pings only. The record
/// always exists (it is archived locally even when the network is out).
ProbeRecord run_ping_probe(const ChannelParams& params, OutageProcess& outage,
                           double t_s, std::uint64_t seq, RngStream& latency_rng);

/// Bulk transfer probe: 3 Mbit at a drawn throughput; failed outright when
/// down at start, or aborted (failed) when an outage begins mid-transfer.
ProbeRecord run_bandwidth_probe(const ChannelParams& params, OutageProcess& outage,
                                double t_s, std::uint64_t seq, RngStream& bw_rng);

struct Delivery {
  bool delivered = false;
  double delivered_at_s = 0;  // valid when delivered
};

/// One-way message delivery: dropped when down, otherwise arrives after half
/// a round-trip latency draw.
Delivery deliver(const ChannelParams& params, OutageProcess& outage, double t_s,
                 RngStream& latency_rng);

}  // namespace tclsim::net
