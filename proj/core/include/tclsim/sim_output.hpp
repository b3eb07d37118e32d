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

#include <cstdint>
#include <string>
#include <vector>

#include "tclsim/events.hpp"
#include "tclsim/gateway.hpp"
#include "tclsim/netsim.hpp"

namespace tclsim::sim {

/// Per-device traces on the shared tick grid.
struct DeviceSeries {
  std::string device_id;
  std::vector<double> theta_c;    // internal temperature
  std::vector<double> room_c;     // room temperature at the unit
  std::vector<double> tcl_kw;     // compressor electrical draw
  std::vector<double> house_kw;   // whole-household draw (incl. the TCL)
  std::vector<std::uint8_t> door; // 1 while open
};

struct UplinkTransmission {
  gateway::UplinkRow row;
  bool delivered = false;
  double delivered_at_s = 0;
};

struct DeviceDelivery {
  std::string device_id;
  bool delivered = false;
  double delivered_at_s = 0;
  bool dropped = false;
  int attempts = 0;
};

struct DispatchRecord {
  std::string signal_id;
  std::string action;  // "force_off" | "resume"
  double issue_time_s = 0;
  double duration_s = 0;
  std::vector<DeviceDelivery> deliveries;
  // Filled when the run is evaluated against a baseline.
  bool evaluated = false;
  double curtailment_kwh = 0;
  double rebound_peak_kw = 0;
};

struct CapacityDeviceRow {
  std::string device_id;
  double e_kwh = 0;
  double duty = 0;
  double p_kw = 0;
  bool cycling = true;
};

struct CapacitySnapshot {
  double timestamp_s = 0;
  double theta_a_c = 0;
  double e_cap_kwh = 0;
  double p_cap_low_kw = 0;
  double p_cap_high_kw = 0;
  double baseline_pm_kw = 0;
  std::vector<CapacityDeviceRow> devices;
  std::vector<std::string> excluded;  // non-cycling device ids
};

struct SimOutput {
  double tick_seconds = 0;
  double horizon_s = 0;
  std::uint64_t seed = 0;
  std::size_t n_ticks = 0;
  std::size_t n_channels = 0;

  std::vector<DeviceSeries> devices;
  std::vector<gateway::StoredRow> stored_rows;
  std::vector<UplinkTransmission> uplinks;
  std::vector<net::ProbeRecord> probes;
  std::vector<DispatchRecord> dispatches;
  std::vector<CapacitySnapshot> capacity;
  std::vector<Event> events;

  double time_at(std::size_t tick) const { return static_cast<double>(tick) * tick_seconds; }

  /// Sum of tcl_kw across devices at one tick.
  double aggregate_tcl_kw(std::size_t tick) const {
    double sum = 0;
    for (const auto& d : devices) sum += d.tcl_kw[tick];
    return sum;
  }

  /// Total TCL electrical energy over the run, kWh.
  double total_tcl_kwh() const {
    double sum = 0;
    for (const auto& d : devices) {
      for (double kw : d.tcl_kw) sum += kw;
    }
    return sum * tick_seconds / 3600.0;
  }
};

}  // namespace tclsim::sim
