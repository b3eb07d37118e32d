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

// End-to-end acceptance suite. Each test prints one PASS/FAIL line so the
// run reads as a checklist.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tclsim/aggregator.hpp"
#include "tclsim/analytics.hpp"
#include "tclsim/csv.hpp"
#include "tclsim/netsim.hpp"
#include "tclsim/reference_fleet.hpp"
#include "tclsim/simulate.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace tclsim;
using Clock = std::chrono::steady_clock;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[criterion %2d] %s: %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

sim::ScenarioConfig quiet_fleet_scenario(double horizon_s) {
  auto cfg = sim::example_fleet_scenario(42, horizon_s);
  for (auto& dev : cfg.fleet) {
    dev.disturbances.door_rate_per_hour.fill(0.0);
    dev.faults = sim::GatewayFaultModel{};
    dev.house.noise_sd_kw = 0;
  }
  for (auto& ch : cfg.channels) {
    ch.outage_rate_per_hour = 0;
    ch.latency_sd_ms = 0;
  }
  cfg.ambient.noise_sd_c = 0;
  cfg.toggles.probe_records = false;
  return cfg;
}

}  // namespace

// 1. step_tcl at dt = 10 s vs a dt = 0.1 s reference integration of the same
//    switched ODE (same mode and disturbance inputs) within 0.05 C over 24 h;
//    analytic duty cycle within 2% of fine-step simulation. Runtime < 10 s.
TEST(Acceptance, Criterion01_ThermalOracle) {
  const auto t0 = Clock::now();

  auto cfg = sim::example_fleet_scenario(42, 24 * 3600.0);
  cfg.fleet.resize(2);  // one freezer-class, one refrigerator-class
  cfg.fleet[1] = cfg.fleet[0];
  cfg.fleet[1].tcl = sim::reference_refrigerator("hh_ref");
  cfg.fleet[1].tcl.device_id = "hh_ref";
  cfg.fleet[1].sensors = sim::default_sensor_set("hh_ref");
  cfg.channels.clear();
  cfg.toggles.probe_records = false;
  const auto out = sim::run_scenario(cfg);

  double worst = 0;
  for (std::size_t d = 0; d < out.devices.size(); ++d) {
    const auto& dev = out.devices[d];
    const auto& params = cfg.fleet[d].tcl;
    const double gain = cfg.fleet[d].disturbances.door_heat_gain_kw;
    double ref = dev.theta_c[0];
    for (std::size_t k = 0; k + 1 < out.n_ticks; ++k) {
      const bool mode_on = dev.tcl_kw[k] > 0;
      const double w = dev.door[k] != 0 ? gain : 0.0;
      ref = oracle::rk4_thermal_step(params, ref, mode_on, dev.room_c[k], w,
                                     cfg.tick_seconds, 0.1);
      worst = std::max(worst, std::fabs(ref - dev.theta_c[k + 1]));
      ref = dev.theta_c[k + 1];  // resynchronize; the bound is per-step drift
    }
  }

  const auto fridge = sim::reference_refrigerator("oracle");
  const auto analytic = thermal::analytic_duty_cycle(fridge, 30.0);
  thermal::TclState st;
  st.theta_c = fridge.setpoint_c;
  long long on = 0, total = 0;
  for (double t = 0; t < 5 * 24 * 3600.0; t += 1.0) {
    st = thermal::step_tcl(fridge, st, 30.0, 0.0, 1.0);
    if (t < 12 * 3600.0) continue;
    ++total;
    on += st.compressor_on ? 1 : 0;
  }
  const double sim_duty = static_cast<double>(on) / static_cast<double>(total);
  const double duty_err = std::fabs(sim_duty - analytic.duty) / analytic.duty;

  const double elapsed = seconds_since(t0);
  const bool pass = worst <= 0.05 && duty_err <= 0.02 && elapsed < 10.0;
  std::ostringstream msg;
  msg << "max |ODE ref - step| = " << worst << " C (<= 0.05), duty err = "
      << duty_err * 100 << "% (<= 2%), runtime " << elapsed << " s (< 10)";
  report(1, pass, msg.str());
  EXPECT_LE(worst, 0.05);
  EXPECT_LE(duty_err, 0.02);
  EXPECT_LT(elapsed, 10.0);
}

// 2. Bundled 30-device scenario: per-device duty cycles inside [0.1, 0.9] and
//    fleet annual-equivalent consumption within +-50% of 1400 kWh/device.
TEST(Acceptance, Criterion02_FleetEnvelope) {
  const auto cfg = sim::example_fleet_scenario(42, 48 * 3600.0);
  const auto out = sim::run_scenario(cfg);

  double duty_lo = 1.0, duty_hi = 0.0;
  for (const auto& dev : out.devices) {
    long long on = 0;
    for (double kw : dev.tcl_kw) on += kw > 0 ? 1 : 0;
    const double duty = static_cast<double>(on) / static_cast<double>(dev.tcl_kw.size());
    duty_lo = std::min(duty_lo, duty);
    duty_hi = std::max(duty_hi, duty);
  }

  const double total_kwh = out.total_tcl_kwh();
  const double annual_per_device =
      total_kwh * (8760.0 * 3600.0 / out.horizon_s) / static_cast<double>(out.devices.size());

  const bool pass = duty_lo >= 0.1 && duty_hi <= 0.9 && annual_per_device >= 700.0 &&
                    annual_per_device <= 2100.0;
  std::ostringstream msg;
  msg << "duty range [" << duty_lo << ", " << duty_hi
      << "] (within [0.1, 0.9]), annual-equivalent " << annual_per_device
      << " kWh/device (within 1400 +- 50%)";
  report(2, pass, msg.str());
  EXPECT_GE(duty_lo, 0.1);
  EXPECT_LE(duty_hi, 0.9);
  EXPECT_GE(annual_per_device, 700.0);
  EXPECT_LE(annual_per_device, 2100.0);
}

// 3. Door-opening calibration: a continuously opened cycle consumes at least
//    4x the undisturbed cycle's energy with the default heat gain.
TEST(Acceptance, Criterion03_DoorCalibration) {
  const auto p = sim::reference_refrigerator("door");
  auto cycle_energy = [&](double w) {
    thermal::TclState st;
    st.theta_c = p.band_high_c();
    st.compressor_on = true;
    double energy = 0;
    bool reached_bottom = false;
    for (double t = 0; t < 48 * 3600.0; t += 1.0) {
      if (st.compressor_on) energy += p.rated_kw / 3600.0;
      st = thermal::step_tcl(p, st, 30.0, w, 1.0);
      if (!st.compressor_on) reached_bottom = true;
      if (reached_bottom && st.compressor_on) return energy;
    }
    return -1.0;
  };
  const double closed = cycle_energy(0.0);
  const double open = cycle_energy(thermal::kDefaultDoorHeatGainKw);
  const double ratio = open / closed;
  const bool pass = closed > 0 && open > 0 && ratio >= 4.0;
  std::ostringstream msg;
  msg << "open/closed cycle energy = " << ratio << " (>= 4)";
  report(3, pass, msg.str());
  EXPECT_GE(ratio, 4.0);
}

// 4. Gateway contract: one row per sensor per 60 s on constant signals;
//    reconstruction within the change threshold; retry ceiling of 4 over a
//    7-day fault-injection run.
TEST(Acceptance, Criterion04_GatewayContract) {
  // (a) Constant signals, all seven sensors, 10-minute window at 10 s polls.
  bool heartbeat_ok = true;
  {
    gateway::GatewayState st;
    st.device_id = "g";
    const auto specs = sim::default_sensor_set("g");
    std::array<int, gateway::kSensorCount> rows{};
    for (double t = 0; t < 600.0; t += 10.0) {
      for (const auto& spec : specs) {
        if (gateway::poll_sensor(spec, 5.0, st, t))
          ++rows[static_cast<std::size_t>(spec.kind)];
      }
    }
    for (int count : rows) heartbeat_ok = heartbeat_ok && count == 10;
  }

  // (b) Reconstruction fidelity on a fault-free 24 h run.
  auto cfg = quiet_fleet_scenario(24 * 3600.0);
  cfg.fleet.resize(2);
  cfg.channels.resize(2);
  for (auto& dev : cfg.fleet) dev.disturbances.door_rate_per_hour.fill(1.0);
  const auto out = sim::run_scenario(cfg);
  double worst_err = 0;
  for (std::size_t d = 0; d < out.devices.size(); ++d) {
    const auto& dev = out.devices[d];
    const std::string id = dev.device_id;
    struct Check {
      std::string sensor;
      const std::vector<double>* truth;
      double scale;
      double threshold;
    };
    std::vector<double> door_d(dev.door.begin(), dev.door.end());
    const std::vector<Check> checks{
        {id + "/fridge_temp_1", &dev.theta_c, 1.0, 0.25},
        {id + "/room_temp", &dev.room_c, 1.0, 0.25},
        {id + "/tcl_power_meter", &dev.tcl_kw, 1000.0, 5.0},
        {id + "/house_power_meter", &dev.house_kw, 1000.0, 5.0},
        {id + "/door", &door_d, 1.0, 0.0},
    };
    for (const auto& check : checks) {
      std::vector<const gateway::StoredRow*> rows;
      for (const auto& row : out.stored_rows)
        if (row.sensor_id == check.sensor) rows.push_back(&row);
      std::size_t idx = 0;
      double reconstructed = 0;
      for (std::size_t k = 0; k < out.n_ticks; ++k) {
        const double t = out.time_at(k);
        while (idx < rows.size() && rows[idx]->timestamp_s <= t) {
          reconstructed = rows[idx]->value;
          ++idx;
        }
        const double truth = (*check.truth)[k] * check.scale;
        const double err = std::fabs(truth - reconstructed) - check.threshold;
        worst_err = std::max(worst_err, err);
      }
    }
  }
  const bool reconstruction_ok = worst_err <= 1e-9;

  // (c) 7-day fault injection: the retry counter never exceeds 4.
  auto fault_cfg = quiet_fleet_scenario(7 * 24 * 3600.0);
  fault_cfg.fleet.resize(2);
  fault_cfg.channels.resize(2);
  for (auto& dev : fault_cfg.fleet) {
    dev.faults.meter_fault_rate_per_hour = 0.6;
    dev.faults.meter_fault_duration_mean_s = 1200.0;
    dev.faults.house_meter_fault_rate_per_hour = 0.05;
    dev.faults.sensor_fault_rate_per_hour = 0.05;
  }
  const auto fault_out = sim::run_scenario(fault_cfg);
  int max_attempt = 0;
  long long waits = 0;
  for (const auto& ev : fault_out.events) {
    if (ev.kind == "meter_retry") {
      const int attempt = std::stoi(ev.detail.substr(ev.detail.rfind(' ') + 1));
      max_attempt = std::max(max_attempt, attempt);
    } else if (ev.kind == "meter_wait_for_restart") {
      ++waits;
    }
  }
  const bool retry_ok = max_attempt <= 4 && waits > 0;

  const bool pass = heartbeat_ok && reconstruction_ok && retry_ok;
  std::ostringstream msg;
  msg << "heartbeat rows exact: " << (heartbeat_ok ? "yes" : "no")
      << ", worst reconstruction excess = " << worst_err << " (<= 0), max retry = "
      << max_attempt << " (<= 4, " << waits << " wait states)";
  report(4, pass, msg.str());
  EXPECT_TRUE(heartbeat_ok);
  EXPECT_TRUE(reconstruction_ok);
  EXPECT_LE(max_attempt, 4);
  EXPECT_GT(waits, 0);
}

// 5. Network calibration: latency moments, outage duration statistics and
//    Poisson rate recovery.
TEST(Acceptance, Criterion05_NetworkCalibration) {
  net::ChannelParams ch;
  ch.device_id = "cal";
  RngStream lat_rng(29, "cal/latency");
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = net::sample_latency_ms(ch, 0.0, lat_rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);

  net::OutageProcess proc(ch, 99);
  const auto transitions = proc.transitions_between(0, 1e4 * 3600.0);
  std::vector<double> durations;
  for (std::size_t i = 0; i + 1 < transitions.size(); i += 2)
    durations.push_back(transitions[i + 1].t_s - transitions[i].t_s);
  double dsum = 0;
  for (double d : durations) dsum += d;
  const double dmean = dsum / static_cast<double>(durations.size());
  std::sort(durations.begin(), durations.end());
  const double dmedian = durations[durations.size() / 2];

  net::OutageProcess proc2(ch, 7);
  std::vector<int> counts;
  for (int h = 0; h < 10000; ++h)
    counts.push_back(proc2.starts_between(h * 3600.0, (h + 1) * 3600.0));
  const double lambda = analytics::fit_poisson(counts).parameter;

  const bool pass = std::fabs(mean - 642.0) <= 642.0 * 0.05 &&
                    std::fabs(sd - 185.0) <= 185.0 * 0.10 &&
                    std::fabs(dmean - 258.0) <= 258.0 * 0.05 &&
                    std::fabs(dmedian - 179.0) <= 179.0 * 0.05 &&
                    std::fabs(lambda - 1.0) <= 0.05;
  std::ostringstream msg;
  msg << "latency mean " << mean << " ms (642 +- 5%), sd " << sd
      << " ms (185 +- 10%); outage mean " << dmean << " s (258 +- 5%), median "
      << dmedian << " s (179 +- 5%); lambda " << lambda << " (1 +- 5%)";
  report(5, pass, msg.str());
  EXPECT_NEAR(mean, 642.0, 642.0 * 0.05);
  EXPECT_NEAR(sd, 185.0, 185.0 * 0.10);
  EXPECT_NEAR(dmean, 258.0, 258.0 * 0.05);
  EXPECT_NEAR(dmedian, 179.0, 179.0 * 0.05);
  EXPECT_NEAR(lambda, 1.0, 0.05);
}

// 6. KS statistic equals the brute-force sup over pooled points, exactly,
//    for 100 random small samples.
TEST(Acceptance, Criterion06_KsExactness) {
  RngStream rng(2024, "acceptance_ks");
  int exact = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 20);
    const int m = 1 + static_cast<int>(rng.next_u64() % 20);
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(m));
    for (auto& v : a) v = std::round(rng.uniform(0, 8) * 2.0) / 2.0;
    for (auto& v : b) v = std::round(rng.uniform(0, 8) * 2.0) / 2.0;
    if (analytics::ks_two_sample(a, b).d == oracle::ks_brute_force(a, b)) ++exact;
  }
  const bool pass = exact == trials;
  report(6, pass, std::to_string(exact) + "/100 exact matches against brute force");
  EXPECT_EQ(exact, trials);
}

// 7. Five synthetic archetypes recovered with ARI >= 0.9 under both distance
//    options, in under 30 s.
TEST(Acceptance, Criterion07_ClusteringRecovery) {
  const auto t0 = Clock::now();
  std::vector<analytics::LoadShape> shapes;
  std::vector<int> truth;
  RngStream rng(123, "cluster_fixture");
  for (int which = 0; which < 5; ++which) {
    const auto base = oracle::archetype(which);
    for (int copy = 0; copy < 20; ++copy) {
      std::vector<double> noisy(24);
      const double scale = rng.uniform(0.85, 1.15);
      for (int h = 0; h < 24; ++h)
        noisy[static_cast<std::size_t>(h)] =
            std::max(0.0, base[static_cast<std::size_t>(h)] * scale + rng.normal(0.0, 0.05));
      shapes.push_back(analytics::normalize_shape(noisy));
      truth.push_back(which);
    }
  }
  double ari_euclid = 0, ari_shape = 0;
  {
    const auto r =
        analytics::cluster_shapes(shapes, 5, analytics::ShapeDistance::euclidean_znorm, 7);
    ari_euclid = oracle::adjusted_rand_index(r.assignments, truth);
  }
  {
    const auto r =
        analytics::cluster_shapes(shapes, 5, analytics::ShapeDistance::shape_based, 7);
    ari_shape = oracle::adjusted_rand_index(r.assignments, truth);
  }
  const double elapsed = seconds_since(t0);
  const bool pass = ari_euclid >= 0.9 && ari_shape >= 0.9 && elapsed < 30.0;
  std::ostringstream msg;
  msg << "ARI euclidean = " << ari_euclid << ", shape-based = " << ari_shape
      << " (>= 0.9), runtime " << elapsed << " s (< 30)";
  report(7, pass, msg.str());
  EXPECT_GE(ari_euclid, 0.9);
  EXPECT_GE(ari_shape, 0.9);
  EXPECT_LT(elapsed, 30.0);
}

// 8. Fleet-wide force_off: aggregate TCL power collapses to <= 5% of the
//    baseline within one delivery latency; simultaneous resume produces a
//    rebound peak strictly above the baseline's; the 2 C safety margin holds.
TEST(Acceptance, Criterion08_DrEventProperties) {
  auto cfg = quiet_fleet_scenario(8 * 3600.0);

  agg::DrSignal signal;
  signal.signal_id = "event";
  for (const auto& dev : cfg.fleet) signal.targets.push_back(dev.tcl.device_id);
  signal.action = agg::DrSignal::Action::force_off;
  signal.issue_time_s = 4 * 3600.0;
  signal.duration_s = 3300.0;  // 55 minutes
  cfg.dr_schedule.push_back(signal);

  auto out = sim::run_scenario(cfg);
  auto baseline_cfg = cfg;
  baseline_cfg.dr_schedule.clear();
  const auto baseline = sim::run_scenario(baseline_cfg);

  bool all_delivered = true;
  for (const auto& dd : out.dispatches.at(0).deliveries)
    all_delivered = all_delivered && dd.delivered;

  // (a) collapse within one delivery latency (+1 tick).
  const double dt = cfg.tick_seconds;
  const auto drop_tick = static_cast<std::size_t>((signal.issue_time_s + dt) / dt) + 1;
  double event_power = 0, baseline_mean = 0;
  const auto window = static_cast<std::size_t>(600.0 / dt);
  for (std::size_t k = drop_tick; k < drop_tick + window; ++k) {
    event_power = std::max(event_power, out.aggregate_tcl_kw(k));
    baseline_mean += baseline.aggregate_tcl_kw(k);
  }
  baseline_mean /= static_cast<double>(window);
  const bool collapse_ok = event_power <= 0.05 * baseline_mean;

  // (b) rebound peak strictly above the baseline's over the post-event window.
  const auto metrics = agg::evaluate_event(out, baseline, signal, 1800.0);
  const bool rebound_ok = metrics.rebound_peak_kw > 0.0;

  // (c) safety margin: no theta above band top + margin + one tick of drift.
  bool safety_ok = true;
  double worst_excess = -1e9;
  for (std::size_t d = 0; d < out.devices.size(); ++d) {
    const auto& params = cfg.fleet[d].tcl;
    const double room_max = cfg.ambient.mean_c + cfg.ambient.diurnal_amplitude_c +
                            cfg.ambient.per_unit_offset_spread_c / 2.0;
    const double drift =
        dt / params.time_constant_s() * (room_max - params.band_low_c());
    const double cap = params.band_high_c() + cfg.override_margin_c + drift;
    for (double theta : out.devices[d].theta_c) {
      worst_excess = std::max(worst_excess, theta - cap);
      if (theta > cap) safety_ok = false;
    }
  }

  const bool pass = all_delivered && collapse_ok && rebound_ok && safety_ok;
  std::ostringstream msg;
  msg << "delivered to all: " << (all_delivered ? "yes" : "no") << "; event power "
      << event_power << " kW vs baseline mean " << baseline_mean
      << " kW (<= 5%); rebound excess " << metrics.rebound_peak_kw
      << " kW (> 0); worst safety excess " << worst_excess << " C (<= 0)";
  report(8, pass, msg.str());
  EXPECT_TRUE(all_delivered);
  EXPECT_TRUE(collapse_ok);
  EXPECT_GT(metrics.rebound_peak_kw, 0.0);
  EXPECT_TRUE(safety_ok);
}

// 9. Capacity oracle: per-device storable energy matches the adiabatic
//    dead-band traversal within 3%; fleet capacity is exactly additive.
TEST(Acceptance, Criterion09_CapacityOracle) {
  const auto cfg = sim::example_fleet_scenario();
  std::vector<thermal::TclParams> fleet;
  for (const auto& dev : cfg.fleet) fleet.push_back(dev.tcl);
  const auto snap = agg::compute_capacity(fleet, 30.0);

  double worst_rel = 0;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const auto& p = fleet[i];
    thermal::TclState st;
    st.theta_c = p.band_high_c();
    st.compressor_on = true;
    double energy = 0;
    while (st.compressor_on) {
      energy += p.rated_kw / 3600.0;
      st = thermal::step_tcl(p, st, st.theta_c, 0.0, 1.0);
    }
    worst_rel = std::max(worst_rel,
                         std::fabs(energy - snap.devices[i].e_kwh) / snap.devices[i].e_kwh);
  }

  double singleton_sum = 0;
  for (const auto& p : fleet)
    singleton_sum += agg::compute_capacity(std::vector{p}, 30.0).e_cap_kwh;
  const bool additive = singleton_sum == snap.e_cap_kwh;

  const bool pass = worst_rel <= 0.03 && additive;
  std::ostringstream msg;
  msg << "worst traversal mismatch " << worst_rel * 100 << "% (<= 3%), additivity "
      << (additive ? "exact" : "violated");
  report(9, pass, msg.str());
  EXPECT_LE(worst_rel, 0.03);
  EXPECT_TRUE(additive);
}

// 10. Statistics oracles: correlation fixture matches brute-force rank/moment
//     computation; the constructed 16% weekend case is exact.
TEST(Acceptance, Criterion10_StatisticsOracles) {
  const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8};
  const std::vector<double> y{2, 7, 1, 8, 2, 8, 1, 9, 3, 8, 4, 5};
  const auto pearson = analytics::correlate(x, y, analytics::CorrelationMethod::pearson);
  const auto spearman = analytics::correlate(x, y, analytics::CorrelationMethod::spearman);
  const double pearson_ref = oracle::pearson_long_double(x, y);
  const auto rx = oracle::ranks_by_counting(x);
  const auto ry = oracle::ranks_by_counting(y);
  const double spearman_ref = oracle::pearson_long_double(rx, ry);
  const bool corr_ok = std::fabs(pearson.r - pearson_ref) <= 1e-12 &&
                       std::fabs(spearman.r - spearman_ref) <= 1e-12;

  std::vector<double> kwh{1.0, 1.0, 1.0, 1.0, 1.0, 1.16, 1.16};
  std::vector<int> dow{0, 1, 2, 3, 4, 5, 6};
  const auto ratio = analytics::weekend_weekday_ratio(kwh, dow);
  const bool ratio_ok = std::fabs(ratio.mean_ratio - 0.16) <= 1e-12;

  const bool pass = corr_ok && ratio_ok;
  std::ostringstream msg;
  msg << "pearson " << pearson.r << " / spearman " << spearman.r
      << " match brute force; weekend mean ratio " << ratio.mean_ratio << " (= 0.16)";
  report(10, pass, msg.str());
  EXPECT_TRUE(corr_ok);
  EXPECT_TRUE(ratio_ok);
}

// 11. Two runs of the full example pipeline with one seed are byte-identical
//     end to end (simulate + analyze).
TEST(Acceptance, Criterion11_PipelineDeterminism) {
  const fs::path base = fs::temp_directory_path() / "tclsim_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string config =
      std::string(TCLSIM_SOURCE_DIR) + "/configs/example_managua_30.cfg";
  const std::string cli = TCLSIM_CLI_PATH;

  auto run = [&](const std::string& tag) {
    const auto traces = base / ("traces_" + tag);
    const auto analysis = base / ("analysis_" + tag);
    const std::string cmd1 = cli + " simulate --config " + config + " --out " +
                             traces.string() + " > /dev/null 2>&1";
    const std::string cmd2 = cli + " analyze --traces " + traces.string() + " --out " +
                             analysis.string() + " > /dev/null 2>&1";
    if (std::system(cmd1.c_str()) != 0) return false;
    if (std::system(cmd2.c_str()) != 0) return false;
    return true;
  };
  ASSERT_TRUE(run("a"));
  ASSERT_TRUE(run("b"));

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool identical = true;
  std::string first_diff;
  for (const char* stage : {"traces", "analysis"}) {
    const auto dir_a = base / (std::string(stage) + "_a");
    const auto dir_b = base / (std::string(stage) + "_b");
    for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
      if (!entry.is_regular_file()) continue;
      const auto rel = fs::relative(entry.path(), dir_a);
      if (slurp(entry.path()) != slurp(dir_b / rel)) {
        identical = false;
        if (first_diff.empty()) first_diff = rel.string();
      }
    }
  }
  report(11, identical,
         identical ? "simulate + analyze byte-identical across two runs"
                   : "first differing file: " + first_diff);
  EXPECT_TRUE(identical) << first_diff;
  if (identical) fs::remove_all(base);
}
