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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tclsim/netsim.hpp"
#include "tclsim/sim_output.hpp"

namespace tclsim::csv {

/// Shortest round-trip decimal form, locale-independent.
std::string format_double(double v);

/// Minimal CSV table. Fields containing separators or quotes are quoted on
/// write and unquoted on read.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;  // throws ValidationError
};

Table read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Table& table);

std::string escape_field(const std::string& field);

// ---- trace schemas -------------------------------------------------------
// temps:   timestamp_s, device_id, sensor_id, celsius
// power:   timestamp_s, device_id, watts, meter {tcl, house}
// door:    timestamp_s, device_id, open {0,1}
// stored_rows, uplink_rows, probes, dispatch, capacity, events: see writers.

struct TempsRow {
  double timestamp_s;
  std::string device_id;
  std::string sensor_id;
  double celsius;
};

struct PowerRow {
  double timestamp_s;
  std::string device_id;
  double watts;
  std::string meter;  // "tcl" | "house"
};

struct DoorRow {
  double timestamp_s;
  std::string device_id;
  int open;
};

std::vector<TempsRow> read_temps_csv(const std::filesystem::path& path);
std::vector<PowerRow> read_power_csv(const std::filesystem::path& path);
std::vector<DoorRow> read_door_csv(const std::filesystem::path& path);
std::vector<net::ProbeRecord> read_probes_csv(const std::filesystem::path& path);

/// Writes the full trace set for one run into out_dir; returns the file
/// names written. When local_stores is given, per-device append-only logs
/// are written under out_dir/store/.
std::vector<std::string> write_sim_output(
    const std::filesystem::path& out_dir, const sim::SimOutput& output,
    const std::map<std::string, std::string>* local_stores = nullptr);

struct RunManifest {
  std::string tool = "tclsim";
  std::string version;
  std::uint64_t seed = 0;
  std::string config_hash_hex;
  double tick_seconds = 0;
  double horizon_s = 0;
  int start_day_of_week = 0;
  std::vector<std::string> overrides;
  std::vector<std::string> files;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
std::optional<RunManifest> read_manifest(const std::filesystem::path& path);

}  // namespace tclsim::csv
