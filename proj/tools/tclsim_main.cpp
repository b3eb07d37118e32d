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

// tclsim: scenario runner, trace ingester and analytics front end.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tclsim/analysis.hpp"
#include "tclsim/csv.hpp"
#include "tclsim/errors.hpp"
#include "tclsim/local_store.hpp"
#include "tclsim/scenario.hpp"
#include "tclsim/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tclsim;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_replicates_csv(const fs::path& path,
                          const std::vector<sim::ReplicateSummary>& summaries) {
  std::string text =
      "seed,total_tcl_kwh,mean_duty,outage_starts,outage_starts_per_channel_hour,"
      "door_events,stored_rows,uplinks_delivered,uplinks_dropped,probe_failures\n";
  for (const auto& s : summaries) {
    text += std::to_string(s.seed) + "," + csv::format_double(s.total_tcl_kwh) + "," +
            csv::format_double(s.mean_duty) + "," + std::to_string(s.outage_starts) + "," +
            csv::format_double(s.outage_starts_per_channel_hour) + "," +
            std::to_string(s.door_events) + "," + std::to_string(s.stored_rows) + "," +
            std::to_string(s.uplinks_delivered) + "," + std::to_string(s.uplinks_dropped) +
            "," + std::to_string(s.probe_failures) + "\n";
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::vector<std::string>& overrides,
                 const std::string& fleet_csv, int replicates, bool write_stores) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open scenario config: " + config_path);
  json config_json;
  try {
    in >> config_json;
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario config parse error: " + std::string(e.what()));
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ValidationError("override must look like key=value: " + ov);
    config_json = sim::ScenarioConfig::apply_override(config_json, ov.substr(0, eq),
                                                      ov.substr(eq + 1));
  }
  auto config = sim::ScenarioConfig::from_json(config_json);
  if (!fleet_csv.empty()) {
    config.fleet = sim::fleet_from_csv(fleet_csv);
    config.channels.clear();  // channels must reference the replaced fleet
  }
  config.validate();

  std::map<std::string, std::string> stores;
  auto output = sim::run_scenario(config, write_stores ? &stores : nullptr);
  if (config.toggles.evaluate_events) sim::annotate_event_metrics(output, config);

  auto files = csv::write_sim_output(out_dir, output, write_stores ? &stores : nullptr);

  if (replicates > 1) {
    const auto summaries = sim::replicate(config, replicates);
    write_replicates_csv(fs::path(out_dir) / "replicates.csv", summaries);
    files.emplace_back("replicates.csv");
  }

  csv::RunManifest manifest;
  manifest.version = kVersion;
  manifest.seed = config.seed;
  manifest.config_hash_hex = hex64(config.config_hash());
  manifest.tick_seconds = config.tick_seconds;
  manifest.horizon_s = config.horizon_s;
  manifest.start_day_of_week = config.start_day_of_week;
  manifest.overrides = overrides;
  manifest.files = files;
  csv::write_manifest(fs::path(out_dir) / "run_manifest.json", manifest);

  std::cout << "simulate: " << output.devices.size() << " devices, "
            << output.n_ticks << " ticks, " << output.stored_rows.size()
            << " stored rows, " << output.probes.size() << " probes -> " << out_dir
            << "\n";
  return 0;
}

int cmd_analyze(const std::string& traces_dir, const std::string& out_dir,
                analysis::AnalyzeOptions options, bool start_dow_set) {
  if (!start_dow_set) {
    if (auto manifest = csv::read_manifest(fs::path(traces_dir) / "run_manifest.json"))
      options.start_day_of_week = manifest->start_day_of_week;
  }
  const auto report = analysis::run_analysis(traces_dir, out_dir, options);
  for (const auto& note : report.notices) std::cerr << "note: " << note << "\n";
  std::cout << "analyze: " << report.devices_seen << " devices, "
            << report.files_written.size() << " files -> " << out_dir << "\n";
  return 0;
}

struct Mapping {
  std::string kind;
  std::map<std::string, std::string> columns;    // internal -> external
  std::map<std::string, std::string> constants;  // internal -> fixed value
};

Mapping load_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open column mapping: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("mapping parse error: " + std::string(e.what()));
  }
  Mapping m;
  m.kind = j.at("kind").get<std::string>();
  if (m.kind != "temps" && m.kind != "power" && m.kind != "door")
    throw ValidationError("mapping.kind must be temps, power or door");
  if (j.contains("columns"))
    m.columns = j["columns"].get<std::map<std::string, std::string>>();
  if (j.contains("constants"))
    m.constants = j["constants"].get<std::map<std::string, std::string>>();
  return m;
}

int cmd_ingest(const std::string& mapping_path, const std::string& out_dir,
               const std::vector<std::string>& inputs) {
  const auto mapping = load_mapping(mapping_path);
  const std::vector<std::string> required =
      mapping.kind == "temps"
          ? std::vector<std::string>{"timestamp_s", "device_id", "sensor_id", "celsius"}
      : mapping.kind == "power"
          ? std::vector<std::string>{"timestamp_s", "device_id", "watts", "meter"}
          : std::vector<std::string>{"timestamp_s", "device_id", "open"};

  struct OutRow {
    std::string device;
    double t;
    std::vector<std::string> fields;
  };
  std::vector<OutRow> rows;
  long long malformed = 0;
  long long out_of_order = 0;
  std::ostringstream log;

  for (const auto& input : inputs) {
    const auto table = csv::read_csv(input);
    std::vector<int> src(required.size(), -1);
    std::vector<std::string> fixed(required.size());
    for (std::size_t c = 0; c < required.size(); ++c) {
      const auto& internal = required[c];
      if (auto it = mapping.columns.find(internal); it != mapping.columns.end()) {
        src[c] = table.column(it->second);
        if (src[c] < 0)
          throw ValidationError("ingest: mapped column '" + it->second + "' for '" +
                                internal + "' not found in " + input);
      } else if (auto cit = mapping.constants.find(internal); cit != mapping.constants.end()) {
        fixed[c] = cit->second;
      } else if (table.column(internal) >= 0) {
        src[c] = table.column(internal);
      } else {
        throw ValidationError("ingest: required column '" + internal +
                              "' is unmapped and absent in " + input);
      }
    }
    const std::size_t t_idx = 0;  // timestamp_s is always required[0]
    const std::size_t dev_idx = 1;
    for (const auto& r : table.rows) {
      OutRow out;
      out.fields.resize(required.size());
      bool ok = true;
      for (std::size_t c = 0; c < required.size(); ++c) {
        out.fields[c] = src[c] >= 0 ? r[static_cast<std::size_t>(src[c])] : fixed[c];
      }
      auto numeric = [](const std::string& s, double* v) {
        try {
          std::size_t pos = 0;
          const double parsed = std::stod(s, &pos);
          if (pos != s.size()) return false;
          if (v != nullptr) *v = parsed;
          return true;
        } catch (const std::exception&) {
          return false;
        }
      };
      ok = numeric(out.fields[t_idx], &out.t);
      // Numeric sanity for the value column as well.
      const std::size_t value_idx = required.size() - (mapping.kind == "power" ? 2 : 1);
      ok = ok && numeric(out.fields[value_idx], nullptr);
      if (!ok) {
        ++malformed;
        log << "malformed row skipped in " << input << "\n";
        continue;
      }
      out.device = out.fields[dev_idx];
      rows.push_back(std::move(out));
    }
  }

  // Per-device timestamp ordering; out-of-order rows are counted and sorted.
  std::map<std::string, double> last_t;
  for (const auto& r : rows) {
    auto [it, inserted] = last_t.try_emplace(r.device, r.t);
    if (!inserted) {
      if (r.t < it->second) ++out_of_order;
      it->second = std::max(it->second, r.t);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const OutRow& a, const OutRow& b) {
    if (a.device != b.device) return a.device < b.device;
    return a.t < b.t;
  });

  fs::create_directories(out_dir);
  csv::Table out_table;
  out_table.header = required;
  for (auto& r : rows) out_table.rows.push_back(std::move(r.fields));
  csv::write_csv(fs::path(out_dir) / (mapping.kind + ".csv"), out_table);

  log << "ingested " << rows.size() << " rows; malformed " << malformed
      << "; out-of-order " << out_of_order << "\n";
  std::ofstream lf(fs::path(out_dir) / "ingest_log.txt", std::ios::trunc);
  lf << log.str();
  std::cout << "ingest: " << rows.size() << " rows (" << malformed << " malformed, "
            << out_of_order << " out of order) -> " << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  const fs::path path = fs::path(dir) / "report.txt";
  std::ifstream in(path);
  if (!in) throw IoError("no report.txt in " + dir + " (run analyze first)");
  std::cout << in.rdbuf();
  return 0;
}

int cmd_inspect(const std::string& target, int tail) {
  std::vector<fs::path> stores;
  const fs::path p(target);
  if (fs::is_directory(p)) {
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.path().extension() == ".tlog") stores.push_back(entry.path());
    }
    std::sort(stores.begin(), stores.end());
  } else {
    stores.push_back(p);
  }
  if (stores.empty()) throw IoError("no .tlog store files under " + target);

  for (const auto& store_path : stores) {
    const auto result = gateway::LocalStore::scan_file(store_path);
    std::cout << store_path.filename().string() << ": " << result.rows.size() << " rows";
    if (result.corrupt_skipped > 0) std::cout << ", " << result.corrupt_skipped << " corrupt";
    if (result.truncated_tail) std::cout << ", truncated tail";
    std::cout << "\n";
    for (const auto& warning : result.warnings) std::cout << "  warning: " << warning << "\n";

    std::map<std::string, std::vector<const gateway::StoredRow*>> by_sensor;
    for (const auto& row : result.rows) by_sensor[row.sensor_id].push_back(&row);
    for (const auto& [sensor, sensor_rows] : by_sensor) {
      std::cout << "  " << sensor << " (" << sensor_rows.size() << " rows)\n";
      const auto start = sensor_rows.size() > static_cast<std::size_t>(tail)
                             ? sensor_rows.size() - static_cast<std::size_t>(tail)
                             : 0;
      for (auto i = start; i < sensor_rows.size(); ++i) {
        const auto* row = sensor_rows[i];
        std::cout << "    t=" << csv::format_double(row->timestamp_s) << " value="
                  << csv::format_double(row->value) << " ("
                  << (row->reason == gateway::StoreReason::change ? "change" : "heartbeat")
                  << ")\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demand-response TCL fleet simulator and analytics toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and export trace CSVs");
  std::string config_path, out_dir = "out", fleet_csv;
  std::vector<std::string> overrides;
  bool no_stores = false;
  int replicates = 1;
  sim_cmd->add_option("--config,-c", config_path, "Scenario config (JSON)")->required();
  sim_cmd->add_option("--out,-o", out_dir, "Output directory");
  sim_cmd->add_option("--override", overrides, "Config override key=value (repeatable)");
  sim_cmd->add_option("--fleet-csv", fleet_csv,
                      "Replace the config's fleet with devices from a CSV");
  sim_cmd->add_option("--replicate", replicates,
                      "Also run seeds seed..seed+N-1 and write replicates.csv");
  sim_cmd->add_flag("--no-stores", no_stores, "Skip writing per-device .tlog store files");

  // analyze
  auto* an_cmd = app.add_subcommand("analyze", "Run the statistics pipeline over trace CSVs");
  std::string traces_dir, an_out = "analysis";
  analysis::AnalyzeOptions options;
  std::string distance = "euclidean";
  std::string basis = "mean";
  bool no_thermal = false, no_network = false;
  int start_dow = -1;
  an_cmd->add_option("--traces,-t", traces_dir, "Directory of trace CSVs")->required();
  an_cmd->add_option("--out,-o", an_out, "Output directory");
  an_cmd->add_option("--k", options.cluster_k, "Cluster count");
  an_cmd->add_option("--distance", distance, "euclidean | shape");
  an_cmd->add_option("--basis", basis, "mean | median");
  an_cmd->add_option("--seed", options.seed, "Clustering seed");
  an_cmd->add_option("--duty-threshold-w", options.duty_on_threshold_w,
                     "Compressor-on threshold, watts");
  an_cmd->add_option("--epi-water-kg", options.epi_contents.water_mass_kg,
                     "Assumed water-equivalent contents mass");
  an_cmd->add_option("--epi-air-kg", options.epi_contents.air_mass_kg, "Assumed air mass");
  an_cmd->add_option("--iqr-k", options.duration_outlier_rule.k,
                     "IQR multiplier for duration outliers");
  an_cmd->add_option("--start-dow", start_dow, "Day of week at t=0 (0=Mon .. 6=Sun)");
  an_cmd->add_flag("--no-thermal", no_thermal, "Skip thermal sections");
  an_cmd->add_flag("--no-network", no_network, "Skip network sections");

  // ingest
  auto* in_cmd = app.add_subcommand("ingest", "Normalize external CSVs into the trace schema");
  std::string mapping_path, in_out = "ingested";
  std::vector<std::string> inputs;
  in_cmd->add_option("--mapping,-m", mapping_path, "Column mapping JSON")->required();
  in_cmd->add_option("--out,-o", in_out, "Output directory");
  in_cmd->add_option("inputs", inputs, "Input CSV files")->required();

  // report
  auto* rp_cmd = app.add_subcommand("report", "Print the plain-text analysis report");
  std::string report_dir;
  rp_cmd->add_option("--dir,-d", report_dir, "analyze output directory")->required();

  // inspect
  auto* ins_cmd = app.add_subcommand("inspect", "Inspect gateway local store logs");
  std::string inspect_target;
  int tail = 3;
  ins_cmd->add_option("--store,-s", inspect_target, ".tlog file or directory")->required();
  ins_cmd->add_option("--tail", tail, "Rows to print per sensor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) {
      if (replicates < 1) throw ValidationError("--replicate must be >= 1");
      return cmd_simulate(config_path, out_dir, overrides, fleet_csv, replicates,
                          !no_stores);
    }
    if (an_cmd->parsed()) {
      if (distance == "shape") {
        options.distance = analytics::ShapeDistance::shape_based;
      } else if (distance != "euclidean") {
        throw ValidationError("--distance must be euclidean or shape");
      }
      options.shape_basis = basis == "median" ? analytics::LoadShape::Basis::median
                                              : analytics::LoadShape::Basis::mean;
      options.thermal_sections = !no_thermal;
      options.network_sections = !no_network;
      if (start_dow >= 0) options.start_day_of_week = start_dow;
      return cmd_analyze(traces_dir, an_out, options, start_dow >= 0);
    }
    if (in_cmd->parsed()) return cmd_ingest(mapping_path, in_out, inputs);
    if (rp_cmd->parsed()) return cmd_report(report_dir);
    if (ins_cmd->parsed()) return cmd_inspect(inspect_target, tail);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
