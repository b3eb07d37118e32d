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
#include "tclsim/aggregator.hpp"

#include <algorithm>
#include <cmath>

#include "tclsim/errors.hpp"

namespace tclsim::agg {

void DrSignal::validate() const {
  if (signal_id.empty()) throw ValidationError("DrSignal.signal_id: must be non-empty");
  if (targets.empty()) throw ValidationError("DrSignal.targets (" + signal_id + "): must be non-empty");
  if (issue_time_s < 0) throw ValidationError("DrSignal.issue_time_s (" + signal_id + "): must be >= 0");
  if (action == Action::force_off && !(duration_s > 0))
    throw ValidationError("DrSignal.duration_s (" + signal_id + "): must be > 0 for force_off");
  if (retry.retries < 0 || (retry.retries > 0 && !(retry.spacing_s > 0)))
    throw ValidationError("DrSignal.retry (" + signal_id + "): retries >= 0 and spacing > 0 required");
}

sim::CapacitySnapshot compute_capacity(std::span<const thermal::TclParams> fleet,
                                       double theta_a_c, double timestamp_s) {
  sim::CapacitySnapshot snap;
  snap.timestamp_s = timestamp_s;
  snap.theta_a_c = theta_a_c;
  for (const auto& params : fleet) {
    sim::CapacityDeviceRow row;
    row.device_id = params.device_id;
    row.p_kw = params.rated_kw;
    row.e_kwh = params.c_kwh_per_c * params.deadband_c / params.cop;
    try {
      const auto dc = thermal::analytic_duty_cycle(params, theta_a_c);
      row.duty = dc.duty;
      row.cycling = true;
      snap.e_cap_kwh += row.e_kwh;
      snap.p_cap_high_kw += params.rated_kw;
      snap.baseline_pm_kw += dc.duty * params.rated_kw;
    } catch (const thermal::NonCyclingError&) {
      row.duty = 0;
      row.cycling = false;
      snap.excluded.push_back(params.device_id);
    }
    snap.devices.push_back(std::move(row));
  }
  snap.p_cap_low_kw = 0;
  return snap;
}

sim::DispatchRecord dispatch(const DrSignal& signal, const DeliverFn& deliver_fn) {
  signal.validate();
  sim::DispatchRecord rec;
  rec.signal_id = signal.signal_id;
  rec.action = signal.action == DrSignal::Action::force_off ? "force_off" : "resume";
  rec.issue_time_s = signal.issue_time_s;
  rec.duration_s = signal.duration_s;
  for (const auto& device : signal.targets) {
    sim::DeviceDelivery dd;
    dd.device_id = device;
    for (int attempt = 0; attempt <= signal.retry.retries; ++attempt) {
      const double at = signal.issue_time_s + attempt * signal.retry.spacing_s;
      ++dd.attempts;
      const auto result = deliver_fn(device, at);
      if (result.delivered) {
        dd.delivered = true;
        dd.delivered_at_s = result.delivered_at_s;
        break;
      }
    }
    dd.dropped = !dd.delivered;
    rec.deliveries.push_back(std::move(dd));
  }
  return rec;
}

thermal::TclState safety_override(const thermal::TclState& state,
                                  const thermal::TclParams& params,
                                  double margin_c, double t_s, EventLog* log) {
  if (!state.forced_off()) return state;
  if (state.theta_c < params.band_high_c() + margin_c) return state;
  thermal::TclState next = state;
  next.forced_off_until_s.reset();
  // Resuming above the band top: the hysteresis controller starts cooling
  // on the very next tick.
  next.compressor_on = next.plugged;
  if (log != nullptr) {
    log->add(t_s, params.device_id, "override_cleared",
             "theta reached the safety bound during a force-off");
  }
  return next;
}

EventMetrics evaluate_event(const sim::SimOutput& event_run,
                            const sim::SimOutput& baseline,
                            const DrSignal& signal, double rebound_window_s) {
  if (event_run.tick_seconds != baseline.tick_seconds ||
      event_run.n_ticks != baseline.n_ticks ||
      event_run.devices.size() != baseline.devices.size()) {
    throw ValidationError("evaluate_event: event and baseline runs are misaligned");
  }
  for (std::size_t i = 0; i < event_run.devices.size(); ++i) {
    if (event_run.devices[i].device_id != baseline.devices[i].device_id)
      throw ValidationError("evaluate_event: device sets differ between runs");
  }

  EventMetrics m;
  m.event_start_s = signal.issue_time_s;
  m.event_end_s = signal.issue_time_s + signal.duration_s;

  const double dt = event_run.tick_seconds;
  const auto n = event_run.n_ticks;
  const auto tick_of = [&](double t) {
    return static_cast<std::size_t>(std::clamp(t / dt, 0.0, static_cast<double>(n)));
  };

  for (auto k = tick_of(m.event_start_s); k < tick_of(m.event_end_s) && k < n; ++k) {
    m.curtailment_kwh +=
        (baseline.aggregate_tcl_kw(k) - event_run.aggregate_tcl_kw(k)) * dt / 3600.0;
  }

  double event_peak = 0, baseline_peak = 0;
  for (auto k = tick_of(m.event_end_s);
       k < tick_of(m.event_end_s + rebound_window_s) && k < n; ++k) {
    event_peak = std::max(event_peak, event_run.aggregate_tcl_kw(k));
    baseline_peak = std::max(baseline_peak, baseline.aggregate_tcl_kw(k));
  }
  m.rebound_peak_kw = event_peak - baseline_peak;
  return m;
}

void FleetEstimator::ingest(const gateway::UplinkRow& row) {
  if (row.device_id.empty() || !std::isfinite(row.timestamp_s)) {
    warnings_.push_back("skipped malformed uplink row");
    return;
  }
  auto& est = devices_[row.device_id];
  if (!est.ever_seen || row.timestamp_s >= est.last_seen_s) {
    est.latest = row;
    est.last_seen_s = row.timestamp_s;
    est.ever_seen = true;
  }
}

FleetEstimator::Snapshot FleetEstimator::snapshot(double now_s) const {
  Snapshot snap;
  for (const auto& [id, est] : devices_) {
    Snapshot::Entry e;
    e.device_id = id;
    e.staleness_s = now_s - est.last_seen_s;
    e.stale = e.staleness_s > kStaleAfterS;
    e.latest = est.latest;
    snap.entries.push_back(std::move(e));
  }
  return snap;
}

}  // namespace tclsim::agg
