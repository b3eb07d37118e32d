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
#include "tclsim/gateway.hpp"

#include <cmath>

#include "tclsim/errors.hpp"

namespace tclsim::gateway {

namespace {
constexpr const char* kKindNames[kSensorCount] = {
    "fridge_temp_1", "fridge_temp_2",   "room_temp",        "humidity",
    "door",          "tcl_power_meter", "house_power_meter"};
}

const char* sensor_kind_name(SensorKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<SensorKind> sensor_kind_from_name(const std::string& name) {
  for (int i = 0; i < kSensorCount; ++i) {
    if (name == kKindNames[i]) return static_cast<SensorKind>(i);
  }
  return std::nullopt;
}

double default_change_threshold(SensorKind kind) {
  switch (kind) {
    case SensorKind::fridge_temp_1:
    case SensorKind::fridge_temp_2:
    case SensorKind::room_temp:
      return 0.25;  // degC
    case SensorKind::humidity:
      return 1.0;  // %RH
    case SensorKind::tcl_power_meter:
    case SensorKind::house_power_meter:
      return 5.0;  // watts
    case SensorKind::door:
      return 0.0;  // any transition
  }
  return 0.0;
}

void SensorSpec::validate() const {
  if (sensor_id.empty()) throw ValidationError("SensorSpec.sensor_id: must be non-empty");
  if (change_threshold < 0 || !std::isfinite(change_threshold))
    throw ValidationError("SensorSpec.change_threshold (" + sensor_id + "): must be >= 0");
  if (!(heartbeat_s > 0))
    throw ValidationError("SensorSpec.heartbeat_s (" + sensor_id + "): must be > 0");
}

std::optional<StoredRow> poll_sensor(const SensorSpec& spec, double truth,
                                     GatewayState& state, double t_s) {
  auto& col = state.collectors[static_cast<std::size_t>(spec.kind)];
  if (!col.healthy) return std::nullopt;
  if (spec.kind == SensorKind::tcl_power_meter &&
      (!state.meter_link_up || state.meter_wait)) {
    return std::nullopt;  // reading absent, not zero
  }

  StoreReason reason;
  if (!col.has_stored) {
    reason = StoreReason::change;
  } else if (std::fabs(truth - col.last_value) > spec.change_threshold) {
    reason = StoreReason::change;
  } else if (t_s - col.last_store_s >= spec.heartbeat_s) {
    reason = StoreReason::heartbeat;
  } else {
    return std::nullopt;
  }

  col.has_stored = true;
  col.last_value = truth;
  col.last_store_s = t_s;
  return StoredRow{t_s, state.device_id, spec.sensor_id, truth, reason};
}

bool restart_due(const GatewayState& state, double t_s) {
  return state.comm_error_flag || t_s >= state.next_restart_s;
}

void hourly_restart(GatewayState& state, double t_s, EventLog* log) {
  const bool was_error = state.comm_error_flag;
  for (auto& col : state.collectors) col.healthy = true;
  state.retry_count = 0;
  state.meter_wait = false;
  state.comm_error_flag = false;
  state.next_restart_s = (std::floor(t_s / 3600.0) + 1.0) * 3600.0;
  if (log != nullptr) {
    log->add(t_s, state.device_id, "gateway_restart",
             was_error ? "communication error" : "hourly");
  }
}

void meter_reconnect(GatewayState& state, bool link_up, double t_s, EventLog* log) {
  if (state.meter_wait) return;
  if (link_up) {
    state.meter_link_up = true;
    state.retry_count = 0;
    if (log != nullptr) log->add(t_s, state.device_id, "meter_reconnected");
    return;
  }
  state.meter_link_up = false;
  ++state.retry_count;
  if (log != nullptr) {
    log->add(t_s, state.device_id, "meter_retry",
             "attempt " + std::to_string(state.retry_count));
  }
  if (state.retry_count >= GatewayState::kMaxMeterRetries) {
    state.meter_wait = true;
    if (log != nullptr) log->add(t_s, state.device_id, "meter_wait_for_restart");
  }
}

UplinkRow build_uplink_row(const GatewayState& state, double t_s) {
  UplinkRow row;
  row.timestamp_s = t_s;
  row.device_id = state.device_id;
  row.meter_wait = state.meter_wait;
  for (int i = 0; i < kSensorCount; ++i) {
    const auto& col = state.collectors[static_cast<std::size_t>(i)];
    if (col.healthy) ++row.healthy_collectors;
    const bool meter_down =
        static_cast<SensorKind>(i) == SensorKind::tcl_power_meter &&
        (!state.meter_link_up || state.meter_wait);
    if (col.healthy && col.has_stored && !meter_down) {
      row.values[static_cast<std::size_t>(i)] = col.last_value;
    }
  }
  return row;
}

}  // namespace tclsim::gateway
