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
#include "tclsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <optional>

#include "tclsim/errors.hpp"
#include "tclsim/local_store.hpp"
#include "tclsim/rng.hpp"

namespace tclsim::sim {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kHumiditySlopePctPerC = 2.0;
constexpr double kStalenessCheckIntervalS = 3600.0;

/// Exponential event clock: fires at rate events/hour, or never at rate 0.
class EventClock {
 public:
  void init(double rate_per_hour, RngStream* rng) {
    rate_per_hour_ = rate_per_hour;
    rng_ = rng;
    next_s_ = rate_per_hour > 0 ? rng->exponential(3600.0 / rate_per_hour) : kInfinity;
  }
  bool due(double t_s) const { return t_s >= next_s_; }
  void advance() {
    next_s_ += rng_->exponential(3600.0 / rate_per_hour_);
  }

 private:
  double rate_per_hour_ = 0;
  double next_s_ = kInfinity;
  RngStream* rng_ = nullptr;
};

struct PendingForce {
  double apply_at_s;
  std::string device_id;
  agg::DrSignal::Action action;
  double expiry_s;  // force_off only
};

struct DeviceRuntime {
  const DeviceConfig* cfg = nullptr;
  thermal::TclState state;
  double ambient_offset_c = 0;
  bool unplug_adopted = false;

  RngStream disturbance_rng;
  RngStream ambient_rng;
  RngStream house_rng;
  RngStream fault_rng;
  RngStream latency_rng;
  RngStream bandwidth_rng;
  RngStream thermal_noise_rng;

  int current_day = -1;
  thermal::DayDisturbances today;
  std::size_t next_door_event = 0;
  double door_open_until_s = -1;
  long long door_events_seen = 0;

  gateway::GatewayState gw;
  gateway::LocalStore store;
  EventClock sensor_fault_clock;
  EventClock meter_fault_clock;
  EventClock house_fault_clock;
  double meter_phys_down_until_s = -1;
  double house_phys_down_until_s = -1;
  bool meter_phys_was_up = true;
  bool house_phys_was_up = true;
  double next_meter_retry_s = 0;

  const net::ChannelParams* channel = nullptr;
  std::optional<net::OutageProcess> outage;
  std::uint64_t ping_seq = 0;
  std::uint64_t bandwidth_seq = 0;

  bool flagged_stale = false;
};

int day_of_week(const ScenarioConfig& cfg, double t_s) {
  const auto day = static_cast<long long>(std::floor(t_s / 86400.0));
  return static_cast<int>((cfg.start_day_of_week + day) % 7);
}

bool in_intervals(const std::vector<std::pair<double, double>>& intervals, double t_s) {
  for (const auto& [a, b] : intervals) {
    if (t_s >= a && t_s < b) return true;
  }
  return false;
}

}  // namespace

SimOutput run_scenario(const ScenarioConfig& config) {
  return run_scenario(config, nullptr);
}

SimOutput run_scenario(const ScenarioConfig& config,
                       std::map<std::string, std::string>* local_stores) {
  config.validate();

  const double dt = config.tick_seconds;
  const std::size_t n_ticks = config.n_ticks();
  const std::uint64_t seed = config.seed;

  SimOutput out;
  out.tick_seconds = dt;
  out.horizon_s = config.horizon_s;
  out.seed = seed;
  out.n_ticks = n_ticks;
  out.n_channels = config.channels.size();

  EventLog log;

  std::vector<DeviceRuntime> devices(config.fleet.size());
  std::map<std::string, std::size_t> device_index;
  std::vector<thermal::TclParams> fleet_params;
  for (std::size_t i = 0; i < config.fleet.size(); ++i) {
    auto& dev = devices[i];
    dev.cfg = &config.fleet[i];
    const std::string& id = dev.cfg->tcl.device_id;
    device_index[id] = i;
    fleet_params.push_back(dev.cfg->tcl);

    dev.disturbance_rng = RngStream(seed, id + "/disturbance");
    dev.ambient_rng = RngStream(seed, id + "/ambient");
    dev.house_rng = RngStream(seed, id + "/house");
    dev.fault_rng = RngStream(seed, id + "/fault");
    dev.latency_rng = RngStream(seed, id + "/latency");
    dev.bandwidth_rng = RngStream(seed, id + "/bandwidth");
    dev.thermal_noise_rng = RngStream(seed, id + "/thermal_noise");

    RngStream init_rng(seed, id + "/init");
    dev.ambient_offset_c = thermal::draw_ambient_offset(config.ambient, init_rng);
    dev.state.theta_c = dev.cfg->initial_theta_c.value_or(
        init_rng.uniform(dev.cfg->tcl.band_low_c(), dev.cfg->tcl.band_high_c()));
    dev.unplug_adopted = thermal::draw_unplug_adoption(dev.cfg->disturbances, dev.disturbance_rng);

    dev.gw.device_id = id;
    dev.gw.next_restart_s = 3600.0;
    dev.sensor_fault_clock.init(dev.cfg->faults.sensor_fault_rate_per_hour, &dev.fault_rng);
    dev.meter_fault_clock.init(dev.cfg->faults.meter_fault_rate_per_hour, &dev.fault_rng);
    dev.house_fault_clock.init(dev.cfg->faults.house_meter_fault_rate_per_hour, &dev.fault_rng);

    DeviceSeries series;
    series.device_id = id;
    series.theta_c.reserve(n_ticks);
    series.room_c.reserve(n_ticks);
    series.tcl_kw.reserve(n_ticks);
    series.house_kw.reserve(n_ticks);
    series.door.reserve(n_ticks);
    out.devices.push_back(std::move(series));
  }

  for (const auto& ch : config.channels) {
    auto& dev = devices[device_index.at(ch.device_id)];
    dev.channel = &ch;
    dev.outage.emplace(ch, seed);
  }

  agg::FleetEstimator estimator;
  std::vector<PendingForce> pending_forces;
  struct PendingUplink {
    double arrive_s;
    gateway::UplinkRow row;
  };
  std::deque<PendingUplink> uplink_in_flight;
  std::size_t next_signal = 0;
  auto dr_schedule = config.dr_schedule;
  std::sort(dr_schedule.begin(), dr_schedule.end(),
            [](const agg::DrSignal& a, const agg::DrSignal& b) {
              return a.issue_time_s < b.issue_time_s;
            });

  double next_uplink_s = 0;
  double next_ping_s = 0;
  double next_bandwidth_s = 0;
  double next_capacity_s = 0;
  double next_staleness_s = kStalenessCheckIntervalS;

  for (std::size_t k = 0; k < n_ticks; ++k) {
    const double t = static_cast<double>(k) * dt;
    const int dow = day_of_week(config, t);
    const bool weekend = dow >= 5;
    const auto day = static_cast<int>(std::floor(t / 86400.0));
    const double hour_of_day = std::fmod(t / 3600.0, 24.0);
    const auto hour_idx = static_cast<std::size_t>(hour_of_day);

    // ---- phase 1+2: ambient and disturbances ------------------------------
    std::vector<double> room_c(devices.size());
    for (std::size_t i = 0; i < devices.size(); ++i) {
      auto& dev = devices[i];
      room_c[i] = thermal::ambient_at(config.ambient, t, dev.ambient_offset_c,
                                      &dev.ambient_rng);

      if (dev.current_day != day) {
        dev.current_day = day;
        dev.today = thermal::sample_disturbances(dev.cfg->disturbances, day,
                                                 dev.unplug_adopted, dev.disturbance_rng);
        dev.next_door_event = 0;
      }
      while (dev.next_door_event < dev.today.door_events.size() &&
             dev.today.door_events[dev.next_door_event].start_s <= t) {
        const auto& ev = dev.today.door_events[dev.next_door_event];
        dev.door_open_until_s = std::max(dev.door_open_until_s, ev.start_s + ev.duration_s);
        ++dev.door_events_seen;
        ++dev.next_door_event;
      }
      dev.state.door_open = t < dev.door_open_until_s;
      dev.state.plugged = !in_intervals(dev.today.unplug_intervals, t);
      if (dev.state.forced_off_until_s && t >= *dev.state.forced_off_until_s) {
        dev.state.forced_off_until_s.reset();
      }
    }

    // ---- phase 3: thermal --------------------------------------------------
    for (std::size_t i = 0; i < devices.size(); ++i) {
      auto& dev = devices[i];
      auto& series = out.devices[i];
      const bool drawing =
          dev.state.compressor_on && dev.state.plugged && !dev.state.forced_off();
      const double tcl_kw = drawing ? dev.cfg->tcl.rated_kw : 0.0;

      double base_kw = dev.cfg->house.base_shape_kw[hour_idx] *
                       (weekend ? dev.cfg->house.weekend_multiplier : 1.0);
      if (dev.cfg->house.noise_sd_kw > 0)
        base_kw += dev.house_rng.normal(0.0, dev.cfg->house.noise_sd_kw);
      base_kw = std::max(0.0, base_kw);

      series.theta_c.push_back(dev.state.theta_c);
      series.room_c.push_back(room_c[i]);
      series.tcl_kw.push_back(tcl_kw);
      series.house_kw.push_back(base_kw + tcl_kw);
      series.door.push_back(dev.state.door_open ? 1 : 0);

      const double w_kw =
          dev.state.door_open ? dev.cfg->disturbances.door_heat_gain_kw : 0.0;
      dev.state = thermal::step_tcl(dev.cfg->tcl, dev.state, room_c[i], w_kw, dt);
      if (dev.cfg->theta_noise_sd_c > 0) {
        dev.state.theta_c += dev.thermal_noise_rng.normal(0.0, dev.cfg->theta_noise_sd_c);
      }
      dev.state = agg::safety_override(dev.state, dev.cfg->tcl,
                                       config.override_margin_c, t, &log);
    }

    // ---- phase 4: sensors / gateway ---------------------------------------
    const bool uplink_due = t >= next_uplink_s;
    for (std::size_t i = 0; i < devices.size(); ++i) {
      auto& dev = devices[i];
      const auto& series = out.devices[i];

      // Fault processes.
      if (dev.sensor_fault_clock.due(t)) {
        dev.sensor_fault_clock.advance();
        const auto victim = static_cast<std::size_t>(dev.fault_rng.next_u64() %
                                                     gateway::kSensorCount);
        if (dev.gw.collectors[victim].healthy) {
          dev.gw.collectors[victim].healthy = false;
          log.add(t, dev.gw.device_id, "sensor_fault",
                  gateway::sensor_kind_name(static_cast<gateway::SensorKind>(victim)));
        }
      }
      if (dev.meter_fault_clock.due(t)) {
        dev.meter_fault_clock.advance();
        dev.meter_phys_down_until_s =
            std::max(dev.meter_phys_down_until_s,
                     t + dev.fault_rng.exponential(dev.cfg->faults.meter_fault_duration_mean_s));
      }
      if (dev.house_fault_clock.due(t)) {
        dev.house_fault_clock.advance();
        dev.house_phys_down_until_s =
            std::max(dev.house_phys_down_until_s,
                     t + dev.fault_rng.exponential(
                             dev.cfg->faults.house_meter_fault_duration_mean_s));
      }

      const bool meter_up = t >= dev.meter_phys_down_until_s;
      const bool house_up = t >= dev.house_phys_down_until_s;
      if (dev.meter_phys_was_up && !meter_up) {
        dev.gw.meter_link_up = false;
        dev.next_meter_retry_s = t + dev.cfg->faults.meter_retry_spacing_s;
        log.add(t, dev.gw.device_id, "meter_link_down");
      }
      if (dev.house_phys_was_up && !house_up) {
        dev.gw.comm_error_flag = true;  // caught immediately, forces a restart
        log.add(t, dev.gw.device_id, "house_meter_error");
      }
      dev.meter_phys_was_up = meter_up;
      dev.house_phys_was_up = house_up;

      if (gateway::restart_due(dev.gw, t)) gateway::hourly_restart(dev.gw, t, &log);

      if (!dev.gw.meter_link_up && !dev.gw.meter_wait && t >= dev.next_meter_retry_s) {
        gateway::meter_reconnect(dev.gw, meter_up, t, &log);
        dev.next_meter_retry_s = t + dev.cfg->faults.meter_retry_spacing_s;
      }

      const double theta = series.theta_c[k];
      const double room = series.room_c[k];
      const double humidity = std::clamp(
          dev.cfg->humidity_base_pct -
              kHumiditySlopePctPerC * (room - config.ambient.mean_c),
          5.0, 100.0);
      for (const auto& spec : dev.cfg->sensors) {
        double truth = 0;
        switch (spec.kind) {
          case gateway::SensorKind::fridge_temp_1: truth = theta; break;
          case gateway::SensorKind::fridge_temp_2:
            truth = theta + dev.cfg->fridge_temp_2_offset_c;
            break;
          case gateway::SensorKind::room_temp: truth = room; break;
          case gateway::SensorKind::humidity: truth = humidity; break;
          case gateway::SensorKind::door: truth = series.door[k]; break;
          case gateway::SensorKind::tcl_power_meter:
            truth = series.tcl_kw[k] * 1000.0;
            break;
          case gateway::SensorKind::house_power_meter:
            truth = series.house_kw[k] * 1000.0;
            break;
        }
        if (spec.kind == gateway::SensorKind::house_power_meter && !house_up) {
          continue;  // reading absent while the link is down
        }
        if (auto row = gateway::poll_sensor(spec, truth, dev.gw, t)) {
          dev.store.append(*row);
          out.stored_rows.push_back(std::move(*row));
        }
      }

      if (uplink_due) {
        UplinkTransmission tx;
        tx.row = gateway::build_uplink_row(dev.gw, t);
        if (dev.channel != nullptr) {
          const auto delivery = net::deliver(*dev.channel, *dev.outage, t, dev.latency_rng);
          tx.delivered = delivery.delivered;
          tx.delivered_at_s = delivery.delivered_at_s;
        } else {
          // No modem: rows reach the server out of band (enumerator pickup).
          tx.delivered = true;
          tx.delivered_at_s = t;
        }
        if (tx.delivered) uplink_in_flight.push_back({tx.delivered_at_s, tx.row});
        out.uplinks.push_back(std::move(tx));
      }
    }
    if (uplink_due) next_uplink_s += net::kUplinkIntervalS;

    // ---- phase 5: channel probes ------------------------------------------
    const bool ping_due = config.toggles.probe_records && t >= next_ping_s;
    const bool bandwidth_due = config.toggles.probe_records && t >= next_bandwidth_s;
    for (auto& dev : devices) {
      if (dev.channel == nullptr) continue;
      if (ping_due) {
        out.probes.push_back(net::run_ping_probe(*dev.channel, *dev.outage, t,
                                                 dev.ping_seq++, dev.latency_rng));
      }
      if (bandwidth_due) {
        out.probes.push_back(net::run_bandwidth_probe(*dev.channel, *dev.outage, t,
                                                      dev.bandwidth_seq++, dev.bandwidth_rng));
      }
      for (const auto& tr : dev.outage->transitions_between(t, t + dt)) {
        log.add(tr.t_s, dev.cfg->tcl.device_id, tr.down ? "channel_down" : "channel_up");
      }
    }
    if (ping_due) next_ping_s += net::kPingIntervalS;
    if (bandwidth_due) next_bandwidth_s += net::kBandwidthIntervalS;

    // ---- phase 6: aggregator ----------------------------------------------
    while (next_signal < dr_schedule.size() &&
           dr_schedule[next_signal].issue_time_s < t + dt) {
      const auto& signal = dr_schedule[next_signal];
      auto record = agg::dispatch(signal, [&](const std::string& id, double at) {
        auto& dev = devices[device_index.at(id)];
        if (dev.channel == nullptr) return net::Delivery{true, at};
        return net::deliver(*dev.channel, *dev.outage, at, dev.latency_rng);
      });
      for (const auto& dd : record.deliveries) {
        if (!dd.delivered) continue;
        PendingForce pf;
        pf.apply_at_s = dd.delivered_at_s;
        pf.device_id = dd.device_id;
        pf.action = signal.action;
        pf.expiry_s = config.simultaneous_resume
                          ? signal.issue_time_s + signal.duration_s
                          : dd.delivered_at_s + signal.duration_s;
        pending_forces.push_back(std::move(pf));
      }
      out.dispatches.push_back(std::move(record));
      ++next_signal;
    }
    for (auto it = pending_forces.begin(); it != pending_forces.end();) {
      if (it->apply_at_s <= t + dt) {
        auto& dev = devices[device_index.at(it->device_id)];
        if (it->action == agg::DrSignal::Action::force_off) {
          if (it->expiry_s > t) {
            dev.state.forced_off_until_s = it->expiry_s;
            log.add(it->apply_at_s, it->device_id, "force_off_applied");
          }
        } else {
          dev.state.forced_off_until_s.reset();
          log.add(it->apply_at_s, it->device_id, "resume_applied");
        }
        it = pending_forces.erase(it);
      } else {
        ++it;
      }
    }

    while (!uplink_in_flight.empty() && uplink_in_flight.front().arrive_s <= t) {
      estimator.ingest(uplink_in_flight.front().row);
      uplink_in_flight.pop_front();
    }
    if (t >= next_staleness_s) {
      next_staleness_s += kStalenessCheckIntervalS;
      for (const auto& entry : estimator.snapshot(t).entries) {
        auto& dev = devices[device_index.at(entry.device_id)];
        if (entry.stale && !dev.flagged_stale) {
          dev.flagged_stale = true;
          log.add(t, entry.device_id, "device_stale",
                  "silent for " + std::to_string(static_cast<long long>(entry.staleness_s)) + " s");
        } else if (!entry.stale && dev.flagged_stale) {
          dev.flagged_stale = false;
          log.add(t, entry.device_id, "device_fresh");
        }
      }
    }

    if (config.toggles.capacity_reports && t >= next_capacity_s) {
      next_capacity_s += config.toggles.capacity_interval_s;
      const double theta_a = thermal::ambient_at(config.ambient, t, 0.0, nullptr);
      out.capacity.push_back(agg::compute_capacity(fleet_params, theta_a, t));
    }
  }

  // In-flight uplinks that arrive after the horizon stay undelivered in the
  // estimator; they are already recorded in out.uplinks.

  out.events = log.take();
  std::stable_sort(out.events.begin(), out.events.end(), [](const Event& a, const Event& b) {
    if (a.t_s != b.t_s) return a.t_s < b.t_s;
    if (a.device_id != b.device_id) return a.device_id < b.device_id;
    return a.kind < b.kind;
  });

  if (local_stores != nullptr) {
    for (const auto& dev : devices) {
      (*local_stores)[dev.cfg->tcl.device_id] = dev.store.bytes();
    }
  }
  return out;
}

void annotate_event_metrics(SimOutput& event_run, const ScenarioConfig& config,
                            double rebound_window_s) {
  if (event_run.dispatches.empty()) return;
  ScenarioConfig baseline_cfg = config;
  baseline_cfg.dr_schedule.clear();
  const SimOutput baseline = run_scenario(baseline_cfg);
  for (auto& rec : event_run.dispatches) {
    if (rec.action != "force_off") continue;
    agg::DrSignal signal;
    signal.signal_id = rec.signal_id;
    signal.action = agg::DrSignal::Action::force_off;
    signal.issue_time_s = rec.issue_time_s;
    signal.duration_s = rec.duration_s;
    for (const auto& dd : rec.deliveries) signal.targets.push_back(dd.device_id);
    const auto metrics = agg::evaluate_event(event_run, baseline, signal, rebound_window_s);
    rec.evaluated = true;
    rec.curtailment_kwh = metrics.curtailment_kwh;
    rec.rebound_peak_kw = metrics.rebound_peak_kw;
  }
}

ReplicateSummary summarize(const SimOutput& output) {
  ReplicateSummary s;
  s.seed = output.seed;
  s.total_tcl_kwh = output.total_tcl_kwh();

  long long on_ticks = 0;
  long long device_ticks = 0;
  for (const auto& dev : output.devices) {
    for (double kw : dev.tcl_kw) {
      if (kw > 0) ++on_ticks;
      ++device_ticks;
    }
  }
  s.mean_duty = device_ticks > 0 ? static_cast<double>(on_ticks) / device_ticks : 0.0;

  for (const auto& ev : output.events) {
    if (ev.kind == "channel_down") ++s.outage_starts;
  }
  const double hours = output.horizon_s / 3600.0;
  if (output.n_channels > 0 && hours > 0) {
    s.outage_starts_per_channel_hour =
        static_cast<double>(s.outage_starts) /
        (static_cast<double>(output.n_channels) * hours);
  }

  s.stored_rows = static_cast<long long>(output.stored_rows.size());
  for (const auto& up : output.uplinks) {
    if (up.delivered) {
      ++s.uplinks_delivered;
    } else {
      ++s.uplinks_dropped;
    }
  }
  for (const auto& pr : output.probes) {
    if (pr.failed) ++s.probe_failures;
  }
  for (const auto& dev : output.devices) {
    bool open = false;
    for (auto d : dev.door) {
      if (d != 0 && !open) ++s.door_events;
      open = d != 0;
    }
  }
  return s;
}

std::vector<ReplicateSummary> replicate(const ScenarioConfig& config, int n_seeds,
                                        bool parallel) {
  if (n_seeds < 1) throw ValidationError("replicate: n_seeds must be >= 1");
  std::vector<ReplicateSummary> summaries(static_cast<std::size_t>(n_seeds));
  auto run_one = [&config](int i) {
    ScenarioConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(i);
    return summarize(run_scenario(c));
  };
  if (!parallel || n_seeds == 1) {
    for (int i = 0; i < n_seeds; ++i) summaries[static_cast<std::size_t>(i)] = run_one(i);
    return summaries;
  }
  std::vector<std::future<ReplicateSummary>> futures;
  futures.reserve(static_cast<std::size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i)
    futures.push_back(std::async(std::launch::async, run_one, i));
  for (int i = 0; i < n_seeds; ++i)
    summaries[static_cast<std::size_t>(i)] = futures[static_cast<std::size_t>(i)].get();
  return summaries;
}

}  // namespace tclsim::sim
