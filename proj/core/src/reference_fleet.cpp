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
#include "tclsim/reference_fleet.hpp"

#include <cmath>

#include "tclsim/rng.hpp"

namespace tclsim::sim {

namespace {

// Fleet-definition jitter is anchored to a fixed stream so the example
// fleet is the same fleet regardless of the scenario seed.
constexpr std::uint64_t kFleetSeed = 0xf1ee7;

// Five daily background-load archetypes (relative weight per hour).
std::array<double, 24> archetype_shape(int which) {
  std::array<double, 24> shape{};
  auto bump = [&](double center, double width, double height) {
    for (int h = 0; h < 24; ++h) {
      const double d = h - center;
      shape[static_cast<std::size_t>(h)] += height * std::exp(-d * d / (2 * width * width));
    }
  };
  switch (which % 5) {
    case 0:  // single midday peak
      bump(13, 2.5, 1.0);
      break;
    case 1:  // midday and evening twin peaks
      bump(13, 1.8, 0.8);
      bump(20, 1.5, 0.9);
      break;
    case 2:  // rises through the day
      for (int h = 0; h < 24; ++h) shape[static_cast<std::size_t>(h)] = 0.15 + 0.85 * h / 23.0;
      break;
    case 3:  // morning and night, midday quiet
      bump(7, 1.5, 0.9);
      bump(21.5, 1.8, 1.0);
      break;
    default:  // scattered with a modest midday maximum
      for (int h = 0; h < 24; ++h) shape[static_cast<std::size_t>(h)] = 0.45;
      bump(12.5, 2.0, 0.5);
      break;
  }
  return shape;
}

}  // namespace

thermal::TclParams reference_refrigerator(std::string device_id) {
  thermal::TclParams p;
  p.device_id = std::move(device_id);
  p.r_c_per_kw = 75.0;
  p.c_kwh_per_c = 0.0267;
  p.cop = 2.2;
  p.rated_kw = 0.35;
  p.setpoint_c = 4.0;
  p.deadband_c = 2.0;
  return p;
}

thermal::TclParams reference_freezer(std::string device_id) {
  thermal::TclParams p;
  p.device_id = std::move(device_id);
  p.r_c_per_kw = 80.8;
  p.c_kwh_per_c = 0.037;
  p.cop = 2.2;
  p.rated_kw = 0.45;
  p.setpoint_c = -14.0;
  p.deadband_c = 9.0;
  return p;
}

ScenarioConfig example_fleet_scenario(std::uint64_t seed, double horizon_s,
                                      double tick_seconds) {
  ScenarioConfig cfg;
  cfg.tick_seconds = tick_seconds;
  cfg.horizon_s = horizon_s;
  cfg.seed = seed;
  cfg.start_day_of_week = 4;  // Friday start covers a weekday and a weekend day

  cfg.ambient.mean_c = 30.0;
  cfg.ambient.diurnal_amplitude_c = 1.5;
  cfg.ambient.peak_hour = 14.0;
  cfg.ambient.per_unit_offset_spread_c = 4.0;
  cfg.ambient.noise_sd_c = 0.05;

  for (int i = 0; i < 30; ++i) {
    const bool enterprise = i < 20;  // freezer-class units
    char name[16];
    std::snprintf(name, sizeof(name), "%s%02d", enterprise ? "me" : "hh",
                  enterprise ? i : i - 20);
    const std::string id(name);

    DeviceConfig dev;
    dev.tcl = enterprise ? reference_freezer(id) : reference_refrigerator(id);

    RngStream jitter(kFleetSeed, id + "/params");
    dev.tcl.r_c_per_kw *= jitter.uniform(0.92, 1.08);
    dev.tcl.c_kwh_per_c *= jitter.uniform(0.92, 1.08);
    dev.tcl.rated_kw *= jitter.uniform(0.92, 1.08);
    dev.tcl.setpoint_c += jitter.uniform(-0.8, 0.8);
    dev.tcl.deadband_c *= jitter.uniform(0.95, 1.05);

    auto& rates = dev.disturbances.door_rate_per_hour;
    for (int h = 0; h < 24; ++h) {
      const bool busy = enterprise ? (h >= 8 && h < 18) : (h >= 7 && h < 22);
      rates[static_cast<std::size_t>(h)] = busy ? (enterprise ? 3.0 : 2.0) : 0.2;
    }
    dev.disturbances.door_duration_mean_s = 25.0;

    dev.house.base_shape_kw = archetype_shape(i);
    const double scale = enterprise ? jitter.uniform(0.25, 0.55) : jitter.uniform(0.12, 0.30);
    for (auto& v : dev.house.base_shape_kw) v *= scale;
    dev.house.weekend_multiplier = jitter.uniform(1.08, 1.25);
    dev.house.noise_sd_kw = 0.02;

    dev.faults.sensor_fault_rate_per_hour = 0.01;
    dev.faults.meter_fault_rate_per_hour = 0.02;
    dev.faults.meter_fault_duration_mean_s = 600.0;
    dev.faults.house_meter_fault_rate_per_hour = 0.005;
    dev.faults.house_meter_fault_duration_mean_s = 300.0;

    dev.sensors = default_sensor_set(id);
    dev.fridge_temp_2_offset_c = 0.3;
    dev.humidity_base_pct = enterprise ? 68.0 : 74.0;
    cfg.fleet.push_back(std::move(dev));

    net::ChannelParams ch;
    ch.device_id = id;
    RngStream chj(kFleetSeed, id + "/channel");
    ch.latency_mean_ms = 642.0;
    ch.latency_sd_ms = 185.0;
    ch.latency_floor_ms = 50.0;
    ch.outage_rate_per_hour = chj.uniform(0.5, 1.5);
    ch.outage_duration_mean_s = 258.0;
    ch.bandwidth_mean_bps = chj.uniform(180000.0, 320000.0);
    ch.bandwidth_sd_bps = 40000.0;
    cfg.channels.push_back(std::move(ch));
  }
  return cfg;
}

}  // namespace tclsim::sim
