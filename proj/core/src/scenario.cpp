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
#include "tclsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tclsim/csv.hpp"
#include "tclsim/errors.hpp"

namespace tclsim::sim {

using nlohmann::json;

namespace {

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::array<double, 24> hourly_array(const json& j, const char* key,
                                    double fill_default) {
  std::array<double, 24> out;
  out.fill(fill_default);
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (it->is_number()) {
    out.fill(it->get<double>());
    return out;
  }
  if (!it->is_array() || it->size() != 24)
    throw ValidationError(std::string(key) + ": expected a scalar or 24 hourly values");
  for (int i = 0; i < 24; ++i) out[static_cast<std::size_t>(i)] = (*it)[static_cast<std::size_t>(i)].get<double>();
  return out;
}

json hourly_to_json(const std::array<double, 24>& a) {
  json out = json::array();
  for (double v : a) out.push_back(v);
  return out;
}

}  // namespace

void HouseLoadModel::validate() const {
  for (double v : base_shape_kw) {
    if (v < 0 || !std::isfinite(v))
      throw ValidationError("HouseLoadModel.base_shape_kw: values must be finite and >= 0");
  }
  if (weekend_multiplier < 0)
    throw ValidationError("HouseLoadModel.weekend_multiplier: must be >= 0");
  if (noise_sd_kw < 0) throw ValidationError("HouseLoadModel.noise_sd_kw: must be >= 0");
}

void GatewayFaultModel::validate() const {
  auto nonneg = [](double v, const char* field) {
    if (v < 0 || !std::isfinite(v))
      throw ValidationError(std::string("GatewayFaultModel.") + field + ": must be >= 0");
  };
  nonneg(sensor_fault_rate_per_hour, "sensor_fault_rate_per_hour");
  nonneg(meter_fault_rate_per_hour, "meter_fault_rate_per_hour");
  nonneg(house_meter_fault_rate_per_hour, "house_meter_fault_rate_per_hour");
  if (!(meter_fault_duration_mean_s > 0))
    throw ValidationError("GatewayFaultModel.meter_fault_duration_mean_s: must be > 0");
  if (!(house_meter_fault_duration_mean_s > 0))
    throw ValidationError("GatewayFaultModel.house_meter_fault_duration_mean_s: must be > 0");
  if (!(meter_retry_spacing_s > 0))
    throw ValidationError("GatewayFaultModel.meter_retry_spacing_s: must be > 0");
}

void DeviceConfig::validate() const {
  tcl.validate();
  disturbances.validate();
  house.validate();
  faults.validate();
  if (theta_noise_sd_c < 0)
    throw ValidationError("DeviceConfig.theta_noise_sd_c (" + tcl.device_id +
                          "): must be >= 0");
  std::set<std::string> sensor_ids;
  for (const auto& s : sensors) {
    s.validate();
    if (!sensor_ids.insert(s.sensor_id).second)
      throw ValidationError("DeviceConfig.sensors (" + tcl.device_id +
                            "): duplicate sensor_id " + s.sensor_id);
  }
}

void ScenarioConfig::validate() const {
  if (!(tick_seconds > 0)) throw ValidationError("ScenarioConfig.tick_seconds: must be > 0");
  if (horizon_s < tick_seconds)
    throw ValidationError("ScenarioConfig.horizon_s: must be >= tick_seconds");
  if (start_day_of_week < 0 || start_day_of_week > 6)
    throw ValidationError("ScenarioConfig.start_day_of_week: must lie in [0, 6]");
  ambient.validate();
  std::set<std::string> ids;
  for (const auto& dev : fleet) {
    dev.validate();
    if (!ids.insert(dev.tcl.device_id).second)
      throw ValidationError("ScenarioConfig.fleet: duplicate device_id " + dev.tcl.device_id);
  }
  std::set<std::string> channel_ids;
  for (const auto& ch : channels) {
    ch.validate();
    if (!ids.contains(ch.device_id))
      throw ValidationError("ScenarioConfig.channels: device_id " + ch.device_id +
                            " does not match any fleet device");
    if (!channel_ids.insert(ch.device_id).second)
      throw ValidationError("ScenarioConfig.channels: duplicate channel for device " +
                            ch.device_id);
  }
  for (const auto& sig : dr_schedule) {
    sig.validate();
    for (const auto& target : sig.targets) {
      if (!ids.contains(target))
        throw ValidationError("ScenarioConfig.dr_schedule (" + sig.signal_id +
                              "): target " + target + " does not match any fleet device");
    }
  }
  if (override_margin_c < 0)
    throw ValidationError("ScenarioConfig.override_margin_c: must be >= 0");
}

std::vector<gateway::SensorSpec> default_sensor_set(const std::string& device_id) {
  std::vector<gateway::SensorSpec> out;
  for (int i = 0; i < gateway::kSensorCount; ++i) {
    const auto kind = static_cast<gateway::SensorKind>(i);
    gateway::SensorSpec spec;
    spec.kind = kind;
    spec.sensor_id = device_id + "/" + gateway::sensor_kind_name(kind);
    spec.change_threshold = gateway::default_change_threshold(kind);
    spec.heartbeat_s = 60.0;
    out.push_back(std::move(spec));
  }
  return out;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  ScenarioConfig cfg;
  get_if_present(j, "tick_seconds", cfg.tick_seconds);
  get_if_present(j, "horizon_s", cfg.horizon_s);
  get_if_present(j, "seed", cfg.seed);
  get_if_present(j, "start_day_of_week", cfg.start_day_of_week);
  get_if_present(j, "override_margin_c", cfg.override_margin_c);
  get_if_present(j, "simultaneous_resume", cfg.simultaneous_resume);

  if (auto it = j.find("ambient"); it != j.end()) {
    const json& a = *it;
    get_if_present(a, "mean_c", cfg.ambient.mean_c);
    get_if_present(a, "diurnal_amplitude_c", cfg.ambient.diurnal_amplitude_c);
    get_if_present(a, "peak_hour", cfg.ambient.peak_hour);
    get_if_present(a, "per_unit_offset_spread_c", cfg.ambient.per_unit_offset_spread_c);
    get_if_present(a, "noise_sd_c", cfg.ambient.noise_sd_c);
    if (auto tr = a.find("trace"); tr != a.end()) {
      for (const auto& pt : *tr)
        cfg.ambient.trace.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    }
  }

  if (auto it = j.find("toggles"); it != j.end()) {
    const json& t = *it;
    get_if_present(t, "capacity_reports", cfg.toggles.capacity_reports);
    get_if_present(t, "capacity_interval_s", cfg.toggles.capacity_interval_s);
    get_if_present(t, "probe_records", cfg.toggles.probe_records);
    get_if_present(t, "evaluate_events", cfg.toggles.evaluate_events);
  }

  if (auto it = j.find("fleet"); it != j.end()) {
    for (const json& d : *it) {
      DeviceConfig dev;
      dev.tcl.device_id = d.at("device_id").get<std::string>();
      dev.tcl.r_c_per_kw = d.at("r_c_per_kw").get<double>();
      dev.tcl.c_kwh_per_c = d.at("c_kwh_per_c").get<double>();
      dev.tcl.cop = d.at("cop").get<double>();
      dev.tcl.rated_kw = d.at("rated_kw").get<double>();
      dev.tcl.setpoint_c = d.at("setpoint_c").get<double>();
      dev.tcl.deadband_c = d.at("deadband_c").get<double>();

      if (auto dist = d.find("disturbances"); dist != d.end()) {
        dev.disturbances.door_rate_per_hour = hourly_array(*dist, "door_rate_per_hour", 0.0);
        get_if_present(*dist, "door_duration_mean_s", dev.disturbances.door_duration_mean_s);
        get_if_present(*dist, "door_heat_gain_kw", dev.disturbances.door_heat_gain_kw);
        get_if_present(*dist, "unplug_probability", dev.disturbances.unplug_probability);
        if (auto sch = dist->find("unplug_schedule"); sch != dist->end()) {
          for (const auto& iv : *sch) {
            dev.disturbances.unplug_schedule.push_back(
                {iv.at(0).get<double>(), iv.at(1).get<double>()});
          }
        }
      }

      if (auto house = d.find("house"); house != d.end()) {
        dev.house.base_shape_kw = hourly_array(*house, "base_shape_kw", 0.0);
        get_if_present(*house, "weekend_multiplier", dev.house.weekend_multiplier);
        get_if_present(*house, "noise_sd_kw", dev.house.noise_sd_kw);
      }

      if (auto f = d.find("faults"); f != d.end()) {
        get_if_present(*f, "sensor_fault_rate_per_hour", dev.faults.sensor_fault_rate_per_hour);
        get_if_present(*f, "meter_fault_rate_per_hour", dev.faults.meter_fault_rate_per_hour);
        get_if_present(*f, "meter_fault_duration_mean_s", dev.faults.meter_fault_duration_mean_s);
        get_if_present(*f, "house_meter_fault_rate_per_hour",
                       dev.faults.house_meter_fault_rate_per_hour);
        get_if_present(*f, "house_meter_fault_duration_mean_s",
                       dev.faults.house_meter_fault_duration_mean_s);
        get_if_present(*f, "meter_retry_spacing_s", dev.faults.meter_retry_spacing_s);
      }

      if (auto sensors = d.find("sensors"); sensors != d.end()) {
        for (const auto& s : *sensors) {
          gateway::SensorSpec spec;
          const auto kind_name = s.at("kind").get<std::string>();
          auto kind = gateway::sensor_kind_from_name(kind_name);
          if (!kind)
            throw ValidationError("sensors.kind: unknown sensor kind " + kind_name);
          spec.kind = *kind;
          spec.sensor_id = s.contains("sensor_id")
                               ? s.at("sensor_id").get<std::string>()
                               : dev.tcl.device_id + "/" + kind_name;
          spec.change_threshold = s.contains("change_threshold")
                                      ? s.at("change_threshold").get<double>()
                                      : gateway::default_change_threshold(*kind);
          get_if_present(s, "heartbeat_s", spec.heartbeat_s);
          dev.sensors.push_back(std::move(spec));
        }
      } else {
        dev.sensors = default_sensor_set(dev.tcl.device_id);
      }

      get_if_present(d, "fridge_temp_2_offset_c", dev.fridge_temp_2_offset_c);
      get_if_present(d, "humidity_base_pct", dev.humidity_base_pct);
      get_if_present(d, "theta_noise_sd_c", dev.theta_noise_sd_c);
      if (d.contains("initial_theta_c")) dev.initial_theta_c = d.at("initial_theta_c").get<double>();
      cfg.fleet.push_back(std::move(dev));
    }
  }

  if (auto it = j.find("channels"); it != j.end()) {
    for (const json& c : *it) {
      net::ChannelParams ch;
      ch.device_id = c.at("device_id").get<std::string>();
      get_if_present(c, "latency_mean_ms", ch.latency_mean_ms);
      get_if_present(c, "latency_sd_ms", ch.latency_sd_ms);
      get_if_present(c, "latency_floor_ms", ch.latency_floor_ms);
      ch.hourly_speed_factor = hourly_array(c, "hourly_speed_factor", 1.0);
      get_if_present(c, "latency_empirical_ms", ch.latency_empirical_ms);
      get_if_present(c, "outage_rate_per_hour", ch.outage_rate_per_hour);
      get_if_present(c, "outage_duration_mean_s", ch.outage_duration_mean_s);
      get_if_present(c, "bandwidth_mean_bps", ch.bandwidth_mean_bps);
      get_if_present(c, "bandwidth_sd_bps", ch.bandwidth_sd_bps);
      cfg.channels.push_back(std::move(ch));
    }
  }

  if (auto it = j.find("dr_schedule"); it != j.end()) {
    for (const json& s : *it) {
      agg::DrSignal sig;
      sig.signal_id = s.at("signal_id").get<std::string>();
      sig.targets = s.at("targets").get<std::vector<std::string>>();
      const auto action = s.at("action").get<std::string>();
      if (action == "force_off") {
        sig.action = agg::DrSignal::Action::force_off;
      } else if (action == "resume") {
        sig.action = agg::DrSignal::Action::resume;
      } else {
        throw ValidationError("dr_schedule.action: unknown action " + action);
      }
      sig.issue_time_s = s.at("issue_time_s").get<double>();
      get_if_present(s, "duration_s", sig.duration_s);
      if (auto r = s.find("retry"); r != s.end()) {
        sig.retry.retries = r->at("retries").get<int>();
        get_if_present(*r, "spacing_s", sig.retry.spacing_s);
      }
      cfg.dr_schedule.push_back(std::move(sig));
    }
  }
  return cfg;
}

json ScenarioConfig::to_json() const {
  json j;
  j["tick_seconds"] = tick_seconds;
  j["horizon_s"] = horizon_s;
  j["seed"] = seed;
  j["start_day_of_week"] = start_day_of_week;
  j["override_margin_c"] = override_margin_c;
  j["simultaneous_resume"] = simultaneous_resume;
  j["ambient"] = {{"mean_c", ambient.mean_c},
                  {"diurnal_amplitude_c", ambient.diurnal_amplitude_c},
                  {"peak_hour", ambient.peak_hour},
                  {"per_unit_offset_spread_c", ambient.per_unit_offset_spread_c},
                  {"noise_sd_c", ambient.noise_sd_c}};
  if (!ambient.trace.empty()) {
    json tr = json::array();
    for (const auto& [t, v] : ambient.trace) tr.push_back(json::array({t, v}));
    j["ambient"]["trace"] = tr;
  }
  j["toggles"] = {{"capacity_reports", toggles.capacity_reports},
                  {"capacity_interval_s", toggles.capacity_interval_s},
                  {"probe_records", toggles.probe_records},
                  {"evaluate_events", toggles.evaluate_events}};
  j["fleet"] = json::array();
  for (const auto& dev : fleet) {
    json d;
    d["device_id"] = dev.tcl.device_id;
    d["r_c_per_kw"] = dev.tcl.r_c_per_kw;
    d["c_kwh_per_c"] = dev.tcl.c_kwh_per_c;
    d["cop"] = dev.tcl.cop;
    d["rated_kw"] = dev.tcl.rated_kw;
    d["setpoint_c"] = dev.tcl.setpoint_c;
    d["deadband_c"] = dev.tcl.deadband_c;
    d["disturbances"] = {
        {"door_rate_per_hour", hourly_to_json(dev.disturbances.door_rate_per_hour)},
        {"door_duration_mean_s", dev.disturbances.door_duration_mean_s},
        {"door_heat_gain_kw", dev.disturbances.door_heat_gain_kw},
        {"unplug_probability", dev.disturbances.unplug_probability}};
    if (!dev.disturbances.unplug_schedule.empty()) {
      json sch = json::array();
      for (const auto& iv : dev.disturbances.unplug_schedule)
        sch.push_back(json::array({iv.start_hour, iv.end_hour}));
      d["disturbances"]["unplug_schedule"] = sch;
    }
    d["house"] = {{"base_shape_kw", hourly_to_json(dev.house.base_shape_kw)},
                  {"weekend_multiplier", dev.house.weekend_multiplier},
                  {"noise_sd_kw", dev.house.noise_sd_kw}};
    d["faults"] = {{"sensor_fault_rate_per_hour", dev.faults.sensor_fault_rate_per_hour},
                   {"meter_fault_rate_per_hour", dev.faults.meter_fault_rate_per_hour},
                   {"meter_fault_duration_mean_s", dev.faults.meter_fault_duration_mean_s},
                   {"house_meter_fault_rate_per_hour", dev.faults.house_meter_fault_rate_per_hour},
                   {"house_meter_fault_duration_mean_s", dev.faults.house_meter_fault_duration_mean_s},
                   {"meter_retry_spacing_s", dev.faults.meter_retry_spacing_s}};
    json sensors = json::array();
    for (const auto& s : dev.sensors) {
      sensors.push_back({{"sensor_id", s.sensor_id},
                         {"kind", gateway::sensor_kind_name(s.kind)},
                         {"change_threshold", s.change_threshold},
                         {"heartbeat_s", s.heartbeat_s}});
    }
    d["sensors"] = sensors;
    d["fridge_temp_2_offset_c"] = dev.fridge_temp_2_offset_c;
    d["humidity_base_pct"] = dev.humidity_base_pct;
    d["theta_noise_sd_c"] = dev.theta_noise_sd_c;
    if (dev.initial_theta_c) d["initial_theta_c"] = *dev.initial_theta_c;
    j["fleet"].push_back(std::move(d));
  }
  j["channels"] = json::array();
  for (const auto& ch : channels) {
    json c = {{"device_id", ch.device_id},
              {"latency_mean_ms", ch.latency_mean_ms},
              {"latency_sd_ms", ch.latency_sd_ms},
              {"latency_floor_ms", ch.latency_floor_ms},
              {"hourly_speed_factor", hourly_to_json(ch.hourly_speed_factor)},
              {"outage_rate_per_hour", ch.outage_rate_per_hour},
              {"outage_duration_mean_s", ch.outage_duration_mean_s},
              {"bandwidth_mean_bps", ch.bandwidth_mean_bps},
              {"bandwidth_sd_bps", ch.bandwidth_sd_bps}};
    if (!ch.latency_empirical_ms.empty()) c["latency_empirical_ms"] = ch.latency_empirical_ms;
    j["channels"].push_back(std::move(c));
  }
  j["dr_schedule"] = json::array();
  for (const auto& sig : dr_schedule) {
    json s = {{"signal_id", sig.signal_id},
              {"targets", sig.targets},
              {"action", sig.action == agg::DrSignal::Action::force_off ? "force_off" : "resume"},
              {"issue_time_s", sig.issue_time_s},
              {"duration_s", sig.duration_s}};
    if (sig.retry.retries > 0)
      s["retry"] = {{"retries", sig.retry.retries}, {"spacing_s", sig.retry.spacing_s}};
    j["dr_schedule"].push_back(std::move(s));
  }
  return j;
}

ScenarioConfig ScenarioConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario config parse error in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json ScenarioConfig::apply_override(json j, const std::string& key, const std::string& value) {
  // Resolve the dotted path, allowing numeric segments as array indexes.
  json* node = &j;
  std::stringstream path(key);
  std::string segment;
  std::vector<std::string> segments;
  while (std::getline(path, segment, '.')) segments.push_back(segment);
  if (segments.empty()) throw ValidationError("override: empty key");
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (node->is_array()) {
      const auto idx = static_cast<std::size_t>(std::stoul(seg));
      if (idx >= node->size()) throw ValidationError("override: index out of range in " + key);
      node = &(*node)[idx];
    } else if (node->contains(seg)) {
      node = &(*node)[seg];
    } else {
      throw ValidationError("override: unknown key segment '" + seg + "' in " + key);
    }
  }
  const auto& leaf = segments.back();
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // plain string
  }
  if (node->is_array()) {
    const auto idx = static_cast<std::size_t>(std::stoul(leaf));
    if (idx >= node->size()) throw ValidationError("override: index out of range in " + key);
    (*node)[idx] = parsed;
  } else {
    if (!node->contains(leaf))
      throw ValidationError("override: unknown key '" + leaf + "' in " + key);
    (*node)[leaf] = parsed;
  }
  return j;
}

std::vector<DeviceConfig> fleet_from_csv(const std::filesystem::path& path) {
  const auto table = csv::read_csv(path);
  const auto col = [&](const char* name) {
    return static_cast<std::size_t>(table.require_column(name));
  };
  const auto cid = col("device_id");
  const auto cr = col("r_c_per_kw");
  const auto cc = col("c_kwh_per_c");
  const auto ccop = col("cop");
  const auto cp = col("rated_kw");
  const auto cset = col("setpoint_c");
  const auto cdb = col("deadband_c");
  const int c_rate = table.column("door_rate_per_hour");
  const int c_dur = table.column("door_duration_mean_s");
  const int c_gain = table.column("door_heat_gain_kw");
  const int c_unplug = table.column("unplug_probability");

  auto num = [&](const std::vector<std::string>& row, std::size_t idx, const char* what) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(row[idx], &pos);
      if (pos != row[idx].size()) throw std::invalid_argument(what);
      return v;
    } catch (const std::exception&) {
      throw ValidationError(std::string("fleet CSV: bad value for ") + what + ": '" +
                            row[idx] + "'");
    }
  };

  std::vector<DeviceConfig> fleet;
  for (const auto& row : table.rows) {
    DeviceConfig dev;
    dev.tcl.device_id = row[cid];
    dev.tcl.r_c_per_kw = num(row, cr, "r_c_per_kw");
    dev.tcl.c_kwh_per_c = num(row, cc, "c_kwh_per_c");
    dev.tcl.cop = num(row, ccop, "cop");
    dev.tcl.rated_kw = num(row, cp, "rated_kw");
    dev.tcl.setpoint_c = num(row, cset, "setpoint_c");
    dev.tcl.deadband_c = num(row, cdb, "deadband_c");
    if (c_rate >= 0)
      dev.disturbances.door_rate_per_hour.fill(
          num(row, static_cast<std::size_t>(c_rate), "door_rate_per_hour"));
    if (c_dur >= 0)
      dev.disturbances.door_duration_mean_s =
          num(row, static_cast<std::size_t>(c_dur), "door_duration_mean_s");
    if (c_gain >= 0)
      dev.disturbances.door_heat_gain_kw =
          num(row, static_cast<std::size_t>(c_gain), "door_heat_gain_kw");
    if (c_unplug >= 0)
      dev.disturbances.unplug_probability =
          num(row, static_cast<std::size_t>(c_unplug), "unplug_probability");
    dev.sensors = default_sensor_set(dev.tcl.device_id);
    fleet.push_back(std::move(dev));
  }
  return fleet;
}

std::uint64_t ScenarioConfig::config_hash() const {
  const std::string canonical = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tclsim::sim
