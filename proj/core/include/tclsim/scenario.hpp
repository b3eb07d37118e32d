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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tclsim/aggregator.hpp"
#include "tclsim/gateway.hpp"
#include "tclsim/netsim.hpp"
#include "tclsim/thermal.hpp"

namespace tclsim::sim {

/// Background (non-TCL) household electrical load: a 24-hour base shape in
/// kW with a weekend multiplier and optional Gaussian noise per tick.
struct HouseLoadModel {
  std::array<double, 24> base_shape_kw{};
  double weekend_multiplier = 1.0;
  double noise_sd_kw = 0.0;

  void validate() const;
};

/// Fault injection for the data-acquisition side of one device.
struct GatewayFaultModel {
  double sensor_fault_rate_per_hour = 0.0;   // collector crashes (any sensor)
  double meter_fault_rate_per_hour = 0.0;    // load-meter link drops
  double meter_fault_duration_mean_s = 600.0;
  double house_meter_fault_rate_per_hour = 0.0;  // flags a comm error -> restart
  double house_meter_fault_duration_mean_s = 600.0;
  double meter_retry_spacing_s = 30.0;

  void validate() const;
};

struct DeviceConfig {
  thermal::TclParams tcl;
  thermal::DisturbanceModel disturbances;
  std::vector<gateway::SensorSpec> sensors;  // empty -> default 7-sensor set
  HouseLoadModel house;
  GatewayFaultModel faults;
  double fridge_temp_2_offset_c = 0.0;
  std::optional<double> initial_theta_c;  // default: seeded draw inside the band
  double humidity_base_pct = 70.0;
  double theta_noise_sd_c = 0.0;  // additive per-tick process noise, off by default

  void validate() const;
};

struct AnalyticsToggles {
  bool capacity_reports = true;
  double capacity_interval_s = 3600.0;
  bool probe_records = true;
  bool evaluate_events = true;  // run an internal baseline when signals exist
};

struct ScenarioConfig {
  double tick_seconds = 10.0;
  double horizon_s = 0.0;
  std::uint64_t seed = 0;
  int start_day_of_week = 0;  // 0 = Monday
  std::vector<DeviceConfig> fleet;
  std::vector<net::ChannelParams> channels;
  thermal::AmbientModel ambient;
  std::vector<agg::DrSignal> dr_schedule;
  AnalyticsToggles toggles;
  double override_margin_c = agg::kDefaultOverrideMarginC;
  bool simultaneous_resume = true;  // force-off expiry anchored to issue time

  std::size_t n_ticks() const { return static_cast<std::size_t>(horizon_s / tick_seconds); }

  /// Throws ValidationError naming the offending field.
  void validate() const;

  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  static ScenarioConfig load_file(const std::filesystem::path& path);

  /// Applies a dotted-path override such as "seed=7" or "ambient.mean_c=28".
  /// Operates on the JSON form; throws ValidationError on unknown keys.
  static nlohmann::json apply_override(nlohmann::json j, const std::string& key,
                                       const std::string& value);

  /// Stable 64-bit hash of the canonical JSON form.
  std::uint64_t config_hash() const;
};

/// The default 7-sensor set with per-kind default thresholds.
std::vector<gateway::SensorSpec> default_sensor_set(const std::string& device_id);

/// Loads fleet definitions from a CSV with columns device_id, r_c_per_kw,
/// c_kwh_per_c, cop, rated_kw, setpoint_c, deadband_c and optional
/// disturbance columns (door_rate_per_hour applied flat across the day,
/// door_duration_mean_s, door_heat_gain_kw, unplug_probability). Devices get
/// the default sensor set.
std::vector<DeviceConfig> fleet_from_csv(const std::filesystem::path& path);

}  // namespace tclsim::sim
