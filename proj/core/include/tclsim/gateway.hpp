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

#include "tclsim/events.hpp"

namespace tclsim::gateway {

/// The seven per-device sensors.
enum class SensorKind : std::uint8_t {
  fridge_temp_1 = 0,
  fridge_temp_2,
  room_temp,
  humidity,
  door,
  tcl_power_meter,
  house_power_meter,
};

inline constexpr int kSensorCount = 7;

const char* sensor_kind_name(SensorKind kind);
std::optional<SensorKind> sensor_kind_from_name(const std::string& name);

/// Default store-on-change thresholds, in the sensor's native unit
/// (degC, %RH, watts; door stores on any transition).
double default_change_threshold(SensorKind kind);

struct SensorSpec {
  std::string sensor_id;
  SensorKind kind = SensorKind::fridge_temp_1;
  double change_threshold = 0;
  double heartbeat_s = 60.0;

  void validate() const;
};

enum class StoreReason : std::uint8_t { change, heartbeat };

struct StoredRow {
  double timestamp_s = 0;
  std::string device_id;
  std::string sensor_id;
  double value = 0;
  StoreReason reason = StoreReason::change;
};

/// Data-acquisition state machine for one device: per-sensor collectors with
/// store-on-change + heartbeat, the power-meter reconnect ladder (at most
/// four retries, then wait for the next restart), and the hourly restart.
struct GatewayState {
  struct Collector {
    bool healthy = true;
    bool has_stored = false;
    double last_value = 0;
    double last_store_s = 0;
  };

  std::string device_id;
  std::array<Collector, kSensorCount> collectors;

  // mPower-style load-meter link (SensorKind::tcl_power_meter).
  bool meter_link_up = true;
  int retry_count = 0;      // never exceeds kMaxMeterRetries
  bool meter_wait = false;  // retries exhausted; waiting for restart

  bool comm_error_flag = false;  // forces an immediate restart
  double next_restart_s = 3600.0;

  static constexpr int kMaxMeterRetries = 4;
};

/// One polling step for one sensor. Returns a row iff the value moved more
/// than the threshold since the last store or the heartbeat elapsed. An
/// unhealthy collector stores nothing (a broken sensor must be
/// distinguishable from a static one); the caller logs the health event.
std::optional<StoredRow> poll_sensor(const SensorSpec& spec, double truth,
                                     GatewayState& state, double t_s);

/// Scheduled hourly restart, or an immediate one when a communication error
/// was flagged. Collectors are reinitialized, the retry ladder resets, and
/// last-stored bookkeeping survives (the local store is durable).
void hourly_restart(GatewayState& state, double t_s, EventLog* log = nullptr);

bool restart_due(const GatewayState& state, double t_s);

/// One reconnect attempt against the load meter. link_up reports whether
/// the underlying link is usable at the attempt.
void meter_reconnect(GatewayState& state, bool link_up, double t_s,
                     EventLog* log = nullptr);

struct UplinkRow {
  double timestamp_s = 0;
  std::string device_id;
  /// Latest stored value per sensor, in SensorKind order; absent when the
  /// sensor never stored, its collector is down or the meter is offline.
  std::array<std::optional<double>, kSensorCount> values;
  bool meter_wait = false;
  int healthy_collectors = 0;
};

/// Four-hourly snapshot of the latest stored values plus health flags.
UplinkRow build_uplink_row(const GatewayState& state, double t_s);

}  // namespace tclsim::gateway
