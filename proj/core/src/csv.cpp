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
#include "tclsim/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tclsim/errors.hpp"
#include "tclsim/local_store.hpp"

namespace tclsim::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const char* what) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError(std::string("bad numeric value for ") + what + ": '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, what);
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape_field(fields[i]);
  }
  out.push_back('\n');
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write: " + path.string());
}

}  // namespace

std::string escape_field(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Table::require_column(const std::string& name) const {
  const int idx = column(name);
  if (idx < 0) throw ValidationError("missing required column '" + name + "'");
  return idx;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV: " + path.string());
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw ValidationError("empty CSV (no header): " + path.string());
  return table;
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::string text;
  append_row(text, table.header);
  for (const auto& row : table.rows) append_row(text, row);
  write_text(path, text);
}

std::vector<TempsRow> read_temps_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto ct = static_cast<std::size_t>(t.require_column("timestamp_s"));
  const auto cd = static_cast<std::size_t>(t.require_column("device_id"));
  const auto cs = static_cast<std::size_t>(t.require_column("sensor_id"));
  const auto cc = static_cast<std::size_t>(t.require_column("celsius"));
  std::vector<TempsRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    rows.push_back({parse_double(r[ct], "timestamp_s"), r[cd], r[cs],
                    parse_double(r[cc], "celsius")});
  }
  return rows;
}

std::vector<PowerRow> read_power_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto ct = static_cast<std::size_t>(t.require_column("timestamp_s"));
  const auto cd = static_cast<std::size_t>(t.require_column("device_id"));
  const auto cw = static_cast<std::size_t>(t.require_column("watts"));
  const auto cm = static_cast<std::size_t>(t.require_column("meter"));
  std::vector<PowerRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    rows.push_back({parse_double(r[ct], "timestamp_s"), r[cd],
                    parse_double(r[cw], "watts"), r[cm]});
  }
  return rows;
}

std::vector<DoorRow> read_door_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto ct = static_cast<std::size_t>(t.require_column("timestamp_s"));
  const auto cd = static_cast<std::size_t>(t.require_column("device_id"));
  const auto co = static_cast<std::size_t>(t.require_column("open"));
  std::vector<DoorRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    rows.push_back({parse_double(r[ct], "timestamp_s"), r[cd],
                    static_cast<int>(parse_double(r[co], "open"))});
  }
  return rows;
}

std::vector<net::ProbeRecord> read_probes_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto ct = static_cast<std::size_t>(t.require_column("timestamp_s"));
  const auto cd = static_cast<std::size_t>(t.require_column("device_id"));
  const auto ck = static_cast<std::size_t>(t.require_column("kind"));
  const auto cs = static_cast<std::size_t>(t.require_column("seq"));
  std::array<std::size_t, net::kPingsPerProbe> cp{};
  for (int i = 0; i < net::kPingsPerProbe; ++i) {
    cp[static_cast<std::size_t>(i)] = static_cast<std::size_t>(
        t.require_column("p" + std::to_string(i + 1) + "_ms"));
  }
  const auto cl = static_cast<std::size_t>(t.require_column("losses"));
  const auto ca = static_cast<std::size_t>(t.require_column("avg_ms"));
  const auto cm = static_cast<std::size_t>(t.require_column("max_ms"));
  const auto cb = static_cast<std::size_t>(t.require_column("bandwidth_bps"));
  const auto cf = static_cast<std::size_t>(t.require_column("failed"));

  std::vector<net::ProbeRecord> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    net::ProbeRecord rec;
    rec.timestamp_s = parse_double(r[ct], "timestamp_s");
    rec.device_id = r[cd];
    rec.kind = r[ck] == "bandwidth" ? net::ProbeRecord::Kind::bandwidth
                                    : net::ProbeRecord::Kind::ping;
    rec.seq = static_cast<std::uint64_t>(parse_double(r[cs], "seq"));
    for (int i = 0; i < net::kPingsPerProbe; ++i) {
      rec.ping_ms[static_cast<std::size_t>(i)] =
          parse_optional(r[cp[static_cast<std::size_t>(i)]], "ping_ms");
    }
    rec.losses = static_cast<int>(parse_double(r[cl], "losses"));
    rec.avg_ms = parse_optional(r[ca], "avg_ms");
    rec.max_ms = parse_optional(r[cm], "max_ms");
    rec.bandwidth_bps = parse_optional(r[cb], "bandwidth_bps");
    rec.failed = r[cf] == "1";
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> write_sim_output(
    const std::filesystem::path& out_dir, const sim::SimOutput& output,
    const std::map<std::string, std::string>* local_stores) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> files;

  auto emit = [&](const char* name, const std::string& text) {
    write_text(out_dir / name, text);
    files.emplace_back(name);
  };

  {
    std::string text = "timestamp_s,device_id,sensor_id,celsius\n";
    std::string text_power = "timestamp_s,device_id,watts,meter\n";
    std::string text_door = "timestamp_s,device_id,open\n";
    for (std::size_t k = 0; k < output.n_ticks; ++k) {
      const std::string ts = format_double(output.time_at(k));
      for (const auto& dev : output.devices) {
        text += ts;
        text += ',';
        text += dev.device_id;
        text += ",fridge_temp_1,";
        text += format_double(dev.theta_c[k]);
        text += '\n';
        text += ts;
        text += ',';
        text += dev.device_id;
        text += ",room_temp,";
        text += format_double(dev.room_c[k]);
        text += '\n';

        text_power += ts;
        text_power += ',';
        text_power += dev.device_id;
        text_power += ',';
        text_power += format_double(dev.tcl_kw[k] * 1000.0);
        text_power += ",tcl\n";
        text_power += ts;
        text_power += ',';
        text_power += dev.device_id;
        text_power += ',';
        text_power += format_double(dev.house_kw[k] * 1000.0);
        text_power += ",house\n";

        text_door += ts;
        text_door += ',';
        text_door += dev.device_id;
        text_door += ',';
        text_door += dev.door[k] != 0 ? '1' : '0';
        text_door += '\n';
      }
    }
    emit("temps.csv", text);
    emit("power.csv", text_power);
    emit("door.csv", text_door);
  }

  {
    std::string text = "timestamp_s,device_id,sensor_id,value,store_reason\n";
    for (const auto& row : output.stored_rows) {
      append_row(text, {format_double(row.timestamp_s), row.device_id, row.sensor_id,
                        format_double(row.value),
                        row.reason == gateway::StoreReason::change ? "change" : "heartbeat"});
    }
    emit("stored_rows.csv", text);
  }

  {
    // Flat uplink record; field order is part of the format.
    std::string text =
        "timestamp_s,device_id,fridge_temp_1,fridge_temp_2,room_temp,humidity,door,"
        "tcl_power_w,house_power_w,meter_wait,healthy_collectors,delivered,delivered_at_s\n";
    for (const auto& tx : output.uplinks) {
      std::vector<std::string> fields{format_double(tx.row.timestamp_s), tx.row.device_id};
      for (int i = 0; i < gateway::kSensorCount; ++i)
        fields.push_back(opt_field(tx.row.values[static_cast<std::size_t>(i)]));
      fields.push_back(tx.row.meter_wait ? "1" : "0");
      fields.push_back(std::to_string(tx.row.healthy_collectors));
      fields.push_back(tx.delivered ? "1" : "0");
      fields.push_back(tx.delivered ? format_double(tx.delivered_at_s) : "");
      append_row(text, fields);
    }
    emit("uplink_rows.csv", text);
  }

  {
    std::string text =
        "timestamp_s,device_id,kind,seq,p1_ms,p2_ms,p3_ms,p4_ms,p5_ms,p6_ms,losses,"
        "avg_ms,max_ms,bandwidth_bps,failed\n";
    for (const auto& pr : output.probes) {
      std::vector<std::string> fields{
          format_double(pr.timestamp_s), pr.device_id,
          pr.kind == net::ProbeRecord::Kind::ping ? "ping" : "bandwidth",
          std::to_string(pr.seq)};
      for (int i = 0; i < net::kPingsPerProbe; ++i)
        fields.push_back(opt_field(pr.ping_ms[static_cast<std::size_t>(i)]));
      fields.push_back(std::to_string(pr.losses));
      fields.push_back(opt_field(pr.avg_ms));
      fields.push_back(opt_field(pr.max_ms));
      fields.push_back(opt_field(pr.bandwidth_bps));
      fields.push_back(pr.failed ? "1" : "0");
      append_row(text, fields);
    }
    emit("probes.csv", text);
  }

  {
    std::string text =
        "signal_id,action,issue_time_s,duration_s,device_id,attempts,delivered,"
        "delivered_at_s,dropped\n";
    std::string metrics =
        "signal_id,curtailment_kwh,rebound_peak_kw,event_start_s,event_end_s\n";
    bool any_metrics = false;
    for (const auto& rec : output.dispatches) {
      for (const auto& dd : rec.deliveries) {
        append_row(text, {rec.signal_id, rec.action, format_double(rec.issue_time_s),
                          format_double(rec.duration_s), dd.device_id,
                          std::to_string(dd.attempts), dd.delivered ? "1" : "0",
                          dd.delivered ? format_double(dd.delivered_at_s) : "",
                          dd.dropped ? "1" : "0"});
      }
      if (rec.evaluated) {
        any_metrics = true;
        append_row(metrics, {rec.signal_id, format_double(rec.curtailment_kwh),
                             format_double(rec.rebound_peak_kw),
                             format_double(rec.issue_time_s),
                             format_double(rec.issue_time_s + rec.duration_s)});
      }
    }
    emit("dispatch.csv", text);
    if (any_metrics) emit("dispatch_metrics.csv", metrics);
  }

  {
    std::string fleet =
        "timestamp_s,theta_a_c,e_cap_kwh,p_cap_low_kw,p_cap_high_kw,baseline_pm_kw,"
        "n_cycling,n_excluded\n";
    std::string per_device = "timestamp_s,device_id,e_kwh,duty,p_kw,cycling\n";
    for (const auto& snap : output.capacity) {
      append_row(fleet,
                 {format_double(snap.timestamp_s), format_double(snap.theta_a_c),
                  format_double(snap.e_cap_kwh), format_double(snap.p_cap_low_kw),
                  format_double(snap.p_cap_high_kw), format_double(snap.baseline_pm_kw),
                  std::to_string(snap.devices.size() - snap.excluded.size()),
                  std::to_string(snap.excluded.size())});
      for (const auto& row : snap.devices) {
        append_row(per_device,
                   {format_double(snap.timestamp_s), row.device_id,
                    format_double(row.e_kwh), format_double(row.duty),
                    format_double(row.p_kw), row.cycling ? "1" : "0"});
      }
    }
    emit("capacity_fleet.csv", fleet);
    emit("capacity_devices.csv", per_device);
  }

  {
    std::string text = "timestamp_s,device_id,kind,detail\n";
    for (const auto& ev : output.events) {
      append_row(text, {format_double(ev.t_s), ev.device_id, ev.kind, ev.detail});
    }
    emit("events.csv", text);
  }

  if (local_stores != nullptr) {
    fs::create_directories(out_dir / "store");
    for (const auto& [device_id, bytes] : *local_stores) {
      const auto path = out_dir / "store" / (device_id + ".tlog");
      write_text(path, bytes);
      files.push_back("store/" + device_id + ".tlog");
    }
  }
  return files;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["tool"] = manifest.tool;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["config_hash"] = manifest.config_hash_hex;
  j["tick_seconds"] = manifest.tick_seconds;
  j["horizon_s"] = manifest.horizon_s;
  j["start_day_of_week"] = manifest.start_day_of_week;
  j["overrides"] = manifest.overrides;
  j["files"] = manifest.files;
  write_text(path, j.dump(2) + "\n");
}

std::optional<RunManifest> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error&) {
    return std::nullopt;
  }
  RunManifest m;
  if (j.contains("tool")) m.tool = j["tool"].get<std::string>();
  if (j.contains("version")) m.version = j["version"].get<std::string>();
  if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("config_hash")) m.config_hash_hex = j["config_hash"].get<std::string>();
  if (j.contains("tick_seconds")) m.tick_seconds = j["tick_seconds"].get<double>();
  if (j.contains("horizon_s")) m.horizon_s = j["horizon_s"].get<double>();
  if (j.contains("start_day_of_week")) m.start_day_of_week = j["start_day_of_week"].get<int>();
  if (j.contains("overrides")) m.overrides = j["overrides"].get<std::vector<std::string>>();
  if (j.contains("files")) m.files = j["files"].get<std::vector<std::string>>();
  return m;
}

}  // namespace tclsim::csv
