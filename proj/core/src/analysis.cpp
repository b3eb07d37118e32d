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
#include "tclsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tclsim/csv.hpp"
#include "tclsim/errors.hpp"

namespace tclsim::analysis {

namespace fs = std::filesystem;
using csv::format_double;

namespace {

struct Series {
  std::vector<double> t;
  std::vector<double> v;
};

struct DeviceHour {
  // Keyed by absolute hour index (floor(t / 3600)).
  std::map<long long, double> room_sum, room_n;
  std::map<long long, double> fridge_sum, fridge_n;
  std::map<long long, double> tcl_wh, house_wh;
  std::map<long long, double> door_opens;
};

double median_step(const std::vector<double>& t) {
  if (t.size() < 2) return 1.0;
  std::vector<double> deltas;
  deltas.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) deltas.push_back(t[i] - t[i - 1]);
  std::nth_element(deltas.begin(), deltas.begin() + static_cast<long>(deltas.size() / 2),
                   deltas.end());
  return deltas[deltas.size() / 2];
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
}

struct PingSample {
  double t;
  bool ok;
};

}  // namespace

AnalyzeReport run_analysis(const fs::path& traces_dir, const fs::path& out_dir,
                           const AnalyzeOptions& options) {
  AnalyzeReport report;
  fs::create_directories(out_dir);

  const fs::path temps_path = traces_dir / "temps.csv";
  const fs::path power_path = traces_dir / "power.csv";
  const fs::path door_path = traces_dir / "door.csv";
  const fs::path probes_path = traces_dir / "probes.csv";

  const bool have_temps = fs::exists(temps_path);
  const bool have_power = fs::exists(power_path);
  const bool have_door = fs::exists(door_path);
  const bool have_probes = fs::exists(probes_path);
  if (!have_temps && !have_power && !have_door && !have_probes) {
    throw ValidationError("no trace inputs found in " + traces_dir.string() +
                          " (expected temps.csv, power.csv, door.csv or probes.csv)");
  }

  std::ostringstream rpt;
  rpt << "analysis report\n===============\n\n";

  // ---- load traces ---------------------------------------------------------
  std::map<std::string, Series> fridge_temp, room_temp, tcl_power_w, house_power_w, door_state;
  if (have_temps) {
    for (const auto& row : csv::read_temps_csv(temps_path)) {
      auto& series = row.sensor_id == "room_temp" ? room_temp[row.device_id]
                                                  : fridge_temp[row.device_id];
      series.t.push_back(row.timestamp_s);
      series.v.push_back(row.celsius);
    }
  }
  if (have_power) {
    for (const auto& row : csv::read_power_csv(power_path)) {
      auto& series =
          row.meter == "tcl" ? tcl_power_w[row.device_id] : house_power_w[row.device_id];
      series.t.push_back(row.timestamp_s);
      series.v.push_back(row.watts);
    }
  }
  if (have_door) {
    for (const auto& row : csv::read_door_csv(door_path)) {
      auto& series = door_state[row.device_id];
      series.t.push_back(row.timestamp_s);
      series.v.push_back(row.open);
    }
  }

  std::set<std::string> devices;
  for (const auto& [id, _] : fridge_temp) devices.insert(id);
  for (const auto& [id, _] : tcl_power_w) devices.insert(id);
  for (const auto& [id, _] : house_power_w) devices.insert(id);
  report.devices_seen = static_cast<int>(devices.size());

  auto emit = [&](const char* name, const std::string& text) {
    write_text_file(out_dir / name, text);
    report.files_written.emplace_back(name);
  };
  auto notice = [&](const std::string& text) {
    report.notices.push_back(text);
    rpt << "note: " << text << "\n";
  };

  const bool thermal_possible = options.thermal_sections && have_power;

  // ---- load shapes + clustering -------------------------------------------
  std::vector<analytics::LoadShape> shapes;
  if (thermal_possible && !house_power_w.empty()) {
    std::string shape_text = "device_id,hour,value\n";
    for (const auto& [id, series] : house_power_w) {
      const double dt = median_step(series.t);
      // kWh per (day, hour-of-day), then the basis statistic across days.
      std::map<std::pair<long long, int>, double> day_hour_kwh;
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const auto day = static_cast<long long>(std::floor(series.t[i] / 86400.0));
        const int hour = static_cast<int>(std::fmod(series.t[i] / 3600.0, 24.0));
        day_hour_kwh[{day, hour}] += series.v[i] / 1000.0 * dt / 3600.0;
      }
      std::array<std::vector<double>, 24> by_hour;
      for (const auto& [key, kwh] : day_hour_kwh)
        by_hour[static_cast<std::size_t>(key.second)].push_back(kwh);
      std::vector<double> hourly(24, 0.0);
      for (int h = 0; h < 24; ++h) {
        auto& vals = by_hour[static_cast<std::size_t>(h)];
        if (vals.empty()) continue;
        if (options.shape_basis == analytics::LoadShape::Basis::mean) {
          double sum = 0;
          for (double v : vals) sum += v;
          hourly[static_cast<std::size_t>(h)] = sum / static_cast<double>(vals.size());
        } else {
          std::sort(vals.begin(), vals.end());
          const std::size_t n = vals.size();
          hourly[static_cast<std::size_t>(h)] =
              n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
        }
      }
      auto shape = analytics::normalize_shape(hourly, options.shape_basis, id);
      for (int h = 0; h < 24; ++h) {
        shape_text += id;
        shape_text += ',';
        shape_text += std::to_string(h);
        shape_text += ',';
        shape_text += format_double(shape.values[static_cast<std::size_t>(h)]);
        shape_text += '\n';
      }
      shapes.push_back(std::move(shape));
    }
    emit("load_shapes.csv", shape_text);
    rpt << "load shapes: " << shapes.size() << " devices\n";

    if (static_cast<int>(shapes.size()) >= options.cluster_k) {
      const auto clusters = analytics::cluster_shapes(shapes, options.cluster_k,
                                                      options.distance, options.seed);
      std::string cl = "device_id,cluster\n";
      for (std::size_t i = 0; i < shapes.size(); ++i) {
        cl += shapes[i].device_id;
        cl += ',';
        cl += std::to_string(clusters.assignments[i]);
        cl += '\n';
      }
      emit("clusters.csv", cl);
      std::string cen = "cluster,hour,value\n";
      for (int c = 0; c < options.cluster_k; ++c) {
        for (int h = 0; h < 24; ++h) {
          cen += std::to_string(c);
          cen += ',';
          cen += std::to_string(h);
          cen += ',';
          cen += format_double(
              clusters.centroids[static_cast<std::size_t>(c)][static_cast<std::size_t>(h)]);
          cen += '\n';
        }
      }
      emit("centroids.csv", cen);
      report.clusters = options.cluster_k;
      rpt << "clustering: k=" << options.cluster_k
          << " within-dispersion=" << format_double(clusters.within_dispersion)
          << " iterations=" << clusters.iterations << "\n";
    } else {
      notice("clustering skipped: fewer devices than k");
    }
  } else if (options.thermal_sections) {
    notice("thermal sections skipped: power.csv not present");
  }

  // ---- correlations --------------------------------------------------------
  if (thermal_possible && have_temps) {
    std::map<std::string, DeviceHour> agg;
    for (const auto& [id, series] : room_temp) {
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const auto h = static_cast<long long>(std::floor(series.t[i] / 3600.0));
        agg[id].room_sum[h] += series.v[i];
        agg[id].room_n[h] += 1;
      }
    }
    for (const auto& [id, series] : fridge_temp) {
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const auto h = static_cast<long long>(std::floor(series.t[i] / 3600.0));
        agg[id].fridge_sum[h] += series.v[i];
        agg[id].fridge_n[h] += 1;
      }
    }
    for (const auto& [id, series] : tcl_power_w) {
      const double dt = median_step(series.t);
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const auto h = static_cast<long long>(std::floor(series.t[i] / 3600.0));
        agg[id].tcl_wh[h] += series.v[i] * dt / 3600.0;
      }
    }
    for (const auto& [id, series] : house_power_w) {
      const double dt = median_step(series.t);
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const auto h = static_cast<long long>(std::floor(series.t[i] / 3600.0));
        agg[id].house_wh[h] += series.v[i] * dt / 3600.0;
      }
    }
    for (const auto& [id, series] : door_state) {
      bool open = false;
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const bool now = series.v[i] != 0;
        if (now && !open) {
          const auto h = static_cast<long long>(std::floor(series.t[i] / 3600.0));
          agg[id].door_opens[h] += 1;
        }
        open = now;
      }
    }

    // Pooled device-hour table with NaN for absences (pairwise deletion).
    std::vector<double> room, fridge, tclwh, housewh, dooro;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [id, dh] : agg) {
      std::set<long long> hours;
      for (const auto& [h, _] : dh.room_sum) hours.insert(h);
      for (const auto& [h, _] : dh.tcl_wh) hours.insert(h);
      for (const auto& [h, _] : dh.house_wh) hours.insert(h);
      for (const long long h : hours) {
        const auto rn = dh.room_n.find(h);
        room.push_back(rn != dh.room_n.end() ? dh.room_sum.at(h) / rn->second : nan);
        const auto fn = dh.fridge_n.find(h);
        fridge.push_back(fn != dh.fridge_n.end() ? dh.fridge_sum.at(h) / fn->second : nan);
        const auto tw = dh.tcl_wh.find(h);
        tclwh.push_back(tw != dh.tcl_wh.end() ? tw->second : nan);
        const auto hw = dh.house_wh.find(h);
        housewh.push_back(hw != dh.house_wh.end() ? hw->second : nan);
        const auto dr = dh.door_opens.find(h);
        dooro.push_back(have_door ? (dr != dh.door_opens.end() ? dr->second : 0.0) : nan);
      }
    }

    std::string corr = "x,y,method,r,p,n\n";
    auto corr_row = [&](const char* x_name, const std::vector<double>& x,
                        const char* y_name, const std::vector<double>& y,
                        analytics::CorrelationMethod method) {
      try {
        const auto c = analytics::correlate(x, y, method);
        corr += std::string(x_name) + "," + y_name + "," +
                (method == analytics::CorrelationMethod::pearson ? "pearson" : "spearman") +
                "," + format_double(c.r) + "," + format_double(c.p) + "," +
                std::to_string(c.n) + "\n";
      } catch (const ValidationError& e) {
        notice(std::string("correlation ") + x_name + "~" + y_name + " skipped: " + e.what());
      }
    };
    corr_row("room_temp", room, "fridge_temp", fridge, analytics::CorrelationMethod::pearson);
    corr_row("room_temp", room, "tcl_wh", tclwh, analytics::CorrelationMethod::spearman);
    corr_row("room_temp", room, "house_wh", housewh, analytics::CorrelationMethod::spearman);
    corr_row("room_temp", room, "door_openings", dooro, analytics::CorrelationMethod::spearman);
    emit("correlations.csv", corr);
  }

  // ---- duty-cycle curves ---------------------------------------------------
  if (thermal_possible && !tcl_power_w.empty()) {
    std::string duty = "device_id,hour,duty\n";
    for (const auto& [id, series] : tcl_power_w) {
      std::vector<double> kw(series.v.size());
      for (std::size_t i = 0; i < series.v.size(); ++i) kw[i] = series.v[i] / 1000.0;
      const auto curve = analytics::estimate_duty_cycle(series.t, kw,
                                                        options.duty_on_threshold_w / 1000.0);
      for (int h = 0; h < 24; ++h) {
        duty += id;
        duty += ',';
        duty += std::to_string(h);
        duty += ',';
        duty += format_double(curve[static_cast<std::size_t>(h)]);
        duty += '\n';
      }
    }
    emit("duty_cycles.csv", duty);
  }

  // ---- dead-band estimates -------------------------------------------------
  if (options.thermal_sections && have_temps && !fridge_temp.empty()) {
    std::string db = "device_id,setpoint_est_c,deadband_est_c,cycles\n";
    int estimated = 0;
    for (const auto& [id, series] : fridge_temp) {
      try {
        const auto est = analytics::estimate_deadband(series.v);
        db += id;
        db += ',';
        db += format_double(est.setpoint_c);
        db += ',';
        db += format_double(est.deadband_c);
        db += ',';
        db += std::to_string(est.cycles);
        db += '\n';
        ++estimated;
      } catch (const ValidationError&) {
        notice("dead-band estimate skipped for " + id + " (no cycles detected)");
      }
    }
    emit("deadband_estimates.csv", db);
    rpt << "dead-band estimates: " << estimated << " devices\n";
  }

  // ---- EPI -----------------------------------------------------------------
  if (options.thermal_sections && have_temps && thermal_possible) {
    std::string epi = "device_id,hour,epi_mean\n";
    for (const auto& [id, temp_series] : fridge_temp) {
      const auto pw = tcl_power_w.find(id);
      if (pw == tcl_power_w.end() || pw->second.t.size() != temp_series.t.size()) continue;
      std::vector<double> kw(pw->second.v.size());
      for (std::size_t i = 0; i < kw.size(); ++i) kw[i] = pw->second.v[i] / 1000.0;
      const auto series = analytics::compute_epi(temp_series.t, temp_series.v, kw,
                                                 options.epi_contents,
                                                 options.duty_on_threshold_w / 1000.0);
      for (int h = 0; h < 24; ++h) {
        epi += id;
        epi += ',';
        epi += std::to_string(h);
        epi += ',';
        epi += format_double(series.hourly_mean[static_cast<std::size_t>(h)]);
        epi += '\n';
      }
    }
    emit("epi.csv", epi);
  }

  // ---- weekend / weekday ---------------------------------------------------
  if (thermal_possible && !house_power_w.empty()) {
    std::map<long long, double> daily_kwh;
    for (const auto& [id, series] : house_power_w) {
      const double dt = median_step(series.t);
      for (std::size_t i = 0; i < series.t.size(); ++i) {
        const auto day = static_cast<long long>(std::floor(series.t[i] / 86400.0));
        daily_kwh[day] += series.v[i] / 1000.0 * dt / 3600.0;
      }
    }
    std::vector<double> kwh;
    std::vector<int> dow;
    for (const auto& [day, val] : daily_kwh) {
      kwh.push_back(val);
      dow.push_back(static_cast<int>((options.start_day_of_week + day) % 7));
    }
    try {
      const auto ratio = analytics::weekend_weekday_ratio(kwh, dow);
      std::string txt = "mean_ratio,median_ratio,weekend_days,weekday_days\n";
      txt += format_double(ratio.mean_ratio) + "," + format_double(ratio.median_ratio) + "," +
             std::to_string(ratio.weekend_days) + "," + std::to_string(ratio.weekday_days) + "\n";
      emit("weekend_ratio.csv", txt);
      rpt << "weekend/weekday: mean " << format_double(ratio.mean_ratio) << " median "
          << format_double(ratio.median_ratio) << "\n";
    } catch (const ValidationError& e) {
      notice(std::string("weekend/weekday ratio skipped: ") + e.what());
    }
  }

  // ---- network fits --------------------------------------------------------
  if (options.network_sections && have_probes) {
    const auto probes = csv::read_probes_csv(probes_path);
    std::map<std::string, std::vector<PingSample>> pings;
    std::map<std::string, std::vector<double>> avg_latency;
    for (const auto& pr : probes) {
      if (pr.kind != net::ProbeRecord::Kind::ping) continue;
      for (int i = 0; i < net::kPingsPerProbe; ++i) {
        const auto& p = pr.ping_ms[static_cast<std::size_t>(i)];
        pings[pr.device_id].push_back(
            {pr.timestamp_s + i * net::kPingSpacingS, p.has_value()});
      }
      if (pr.avg_ms) avg_latency[pr.device_id].push_back(*pr.avg_ms);
    }

    std::string fits =
        "device_id,family,parameter,n,outliers_removed,statistic,p,degenerate\n";
    for (auto& [id, samples] : pings) {
      std::sort(samples.begin(), samples.end(),
                [](const PingSample& a, const PingSample& b) { return a.t < b.t; });
      // Outage events inferred from runs of lost pings bounded by successes.
      std::vector<double> durations;
      std::map<long long, int> hourly_events;
      double horizon_start = samples.front().t;
      double horizon_end = samples.back().t;
      std::optional<double> last_ok;
      std::optional<double> run_start_after_ok;
      for (const auto& s : samples) {
        if (s.ok) {
          if (run_start_after_ok && last_ok) {
            durations.push_back(s.t - *last_ok);
            hourly_events[static_cast<long long>(std::floor(*run_start_after_ok / 3600.0))] += 1;
          }
          last_ok = s.t;
          run_start_after_ok.reset();
        } else if (last_ok && !run_start_after_ok) {
          run_start_after_ok = s.t;
        }
      }
      std::vector<int> counts;
      const auto h0 = static_cast<long long>(std::floor(horizon_start / 3600.0));
      const auto h1 = static_cast<long long>(std::floor(horizon_end / 3600.0));
      for (long long h = h0; h <= h1; ++h) {
        const auto it = hourly_events.find(h);
        counts.push_back(it != hourly_events.end() ? it->second : 0);
      }
      if (!counts.empty()) {
        const auto pf = analytics::fit_poisson(counts);
        fits += id + ",poisson," + format_double(pf.parameter) + "," + std::to_string(pf.n) +
                ",0," + format_double(pf.goodness) + "," + format_double(pf.goodness_p) + "," +
                (pf.degenerate ? "1" : "0") + "\n";
      }
      if (durations.size() >= 3) {
        const auto fe = analytics::fit_exponential(durations, options.duration_outlier_rule);
        fits += id + ",exponential," + format_double(fe.parameter) + "," +
                std::to_string(fe.n) + "," + std::to_string(fe.outliers_removed) + "," +
                format_double(fe.goodness) + "," + format_double(fe.goodness_p) + ",0\n";
      }
    }
    emit("network_fits.csv", fits);

    std::string ks = "device_a,device_b,d,p\n";
    for (auto a = avg_latency.begin(); a != avg_latency.end(); ++a) {
      for (auto b = std::next(a); b != avg_latency.end(); ++b) {
        if (a->second.empty() || b->second.empty()) continue;
        const auto res = analytics::ks_two_sample(a->second, b->second);
        ks += a->first + "," + b->first + "," + format_double(res.d) + "," +
              format_double(res.p) + "\n";
      }
    }
    emit("ks_matrix.csv", ks);
    rpt << "network fits: " << pings.size() << " devices with ping probes\n";
  } else if (options.network_sections) {
    notice("network sections skipped: probes.csv not present");
  }

  rpt << "\nfiles written: " << report.files_written.size() << "\n";
  for (const auto& f : report.files_written) rpt << "  " << f << "\n";
  write_text_file(out_dir / "report.txt", rpt.str());
  report.files_written.emplace_back("report.txt");
  return report;
}

}  // namespace tclsim::analysis
