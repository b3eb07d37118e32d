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
#include "tclsim/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tclsim/errors.hpp"

namespace tclsim::thermal {

void TclParams::validate() const {
  if (device_id.empty()) throw ValidationError("TclParams.device_id: must be non-empty");
  auto positive = [&](double v, const char* field) {
    if (!(v > 0) || !std::isfinite(v))
      throw ValidationError(std::string("TclParams.") + field + " (" + device_id +
                            "): must be > 0");
  };
  positive(r_c_per_kw, "r_c_per_kw");
  positive(c_kwh_per_c, "c_kwh_per_c");
  positive(cop, "cop");
  positive(rated_kw, "rated_kw");
  positive(deadband_c, "deadband_c");
  if (setpoint_c < -30.0 || setpoint_c > 10.0)
    throw ValidationError("TclParams.setpoint_c (" + device_id +
                          "): must lie in [-30, 10] for cooling loads");
}

TclState step_tcl(const TclParams& params, const TclState& state,
                  double theta_a_c, double disturbance_kw, double dt_s) {
  if (!(dt_s > 0)) throw ValidationError("step_tcl: dt_s must be > 0");

  const bool held_off = !state.plugged || state.forced_off();
  const bool mode = state.compressor_on && !held_off;

  const double cooling_c = mode ? params.cop * params.rated_kw * params.r_c_per_kw : 0.0;
  const double theta_ss = theta_a_c - cooling_c + params.r_c_per_kw * disturbance_kw;
  const double decay = std::exp(-dt_s / params.time_constant_s());

  TclState next = state;
  next.theta_c = theta_ss + (state.theta_c - theta_ss) * decay;

  if (held_off) {
    next.compressor_on = false;
  } else if (next.theta_c >= params.band_high_c()) {
    next.compressor_on = true;
  } else if (next.theta_c <= params.band_low_c()) {
    next.compressor_on = false;
  } else {
    next.compressor_on = mode;
  }
  return next;
}

DutyCycle analytic_duty_cycle(const TclParams& params, double theta_a_c) {
  const double lo = params.band_low_c();
  const double hi = params.band_high_c();
  const double ss_off = theta_a_c;
  const double ss_on = theta_a_c - params.cop * params.rated_kw * params.r_c_per_kw;

  if (ss_off <= hi) {
    throw NonCyclingError(NonCyclingError::Reason::never_turns_on,
                          "analytic_duty_cycle (" + params.device_id +
                              "): never turns on (ambient does not exceed the band top)");
  }
  if (ss_on >= lo) {
    throw NonCyclingError(NonCyclingError::Reason::cannot_reach_lower_bound,
                          "analytic_duty_cycle (" + params.device_id +
                              "): cannot reach lower bound (ON steady state inside the band)");
  }

  const double tau = params.time_constant_s();
  const double t_on = tau * std::log((hi - ss_on) / (lo - ss_on));
  const double t_off = tau * std::log((ss_off - lo) / (ss_off - hi));
  return DutyCycle{t_on / (t_on + t_off), t_on, t_off};
}

void DisturbanceModel::validate() const {
  for (double r : door_rate_per_hour) {
    if (r < 0 || !std::isfinite(r))
      throw ValidationError("DisturbanceModel.door_rate_per_hour: rates must be >= 0");
  }
  if (!(door_duration_mean_s > 0))
    throw ValidationError("DisturbanceModel.door_duration_mean_s: must be > 0");
  if (door_heat_gain_kw < 0)
    throw ValidationError("DisturbanceModel.door_heat_gain_kw: must be >= 0");
  if (unplug_probability < 0 || unplug_probability > 1)
    throw ValidationError("DisturbanceModel.unplug_probability: must lie in [0, 1]");
  for (const auto& iv : unplug_schedule) {
    if (iv.start_hour < 0 || iv.end_hour > 24 || iv.end_hour <= iv.start_hour)
      throw ValidationError("DisturbanceModel.unplug_schedule: intervals must satisfy 0 <= start < end <= 24");
  }
}

bool draw_unplug_adoption(const DisturbanceModel& model, RngStream& rng) {
  return rng.bernoulli(model.unplug_probability);
}

DayDisturbances sample_disturbances(const DisturbanceModel& model,
                                    int day_index, bool unplug_adopted,
                                    RngStream& rng) {
  DayDisturbances out;
  const double day_start = static_cast<double>(day_index) * 86400.0;
  for (int hour = 0; hour < 24; ++hour) {
    const int n = rng.poisson(model.door_rate_per_hour[static_cast<std::size_t>(hour)]);
    for (int i = 0; i < n; ++i) {
      DoorEvent ev;
      ev.start_s = day_start + (hour + rng.uniform()) * 3600.0;
      ev.duration_s = rng.exponential(model.door_duration_mean_s);
      out.door_events.push_back(ev);
    }
  }
  std::sort(out.door_events.begin(), out.door_events.end(),
            [](const DoorEvent& a, const DoorEvent& b) { return a.start_s < b.start_s; });
  if (unplug_adopted) {
    for (const auto& iv : model.unplug_schedule) {
      out.unplug_intervals.emplace_back(day_start + iv.start_hour * 3600.0,
                                        day_start + iv.end_hour * 3600.0);
    }
  }
  return out;
}

void AmbientModel::validate() const {
  if (diurnal_amplitude_c < 0)
    throw ValidationError("AmbientModel.diurnal_amplitude_c: must be >= 0");
  if (per_unit_offset_spread_c < 0)
    throw ValidationError("AmbientModel.per_unit_offset_spread_c: must be >= 0");
  if (noise_sd_c < 0) throw ValidationError("AmbientModel.noise_sd_c: must be >= 0");
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].first <= trace[i - 1].first)
      throw ValidationError("AmbientModel.trace: timestamps must be strictly increasing");
  }
}

double draw_ambient_offset(const AmbientModel& model, RngStream& rng) {
  if (model.per_unit_offset_spread_c == 0) return 0.0;
  return rng.uniform(-model.per_unit_offset_spread_c / 2.0,
                     model.per_unit_offset_spread_c / 2.0);
}

double ambient_at(const AmbientModel& model, double t_s,
                  double device_offset_c, RngStream* noise_rng) {
  double base;
  if (!model.trace.empty()) {
    if (t_s < model.trace.front().first || t_s > model.trace.back().first)
      throw ValidationError("ambient_at: time outside the explicit trace range");
    auto it = std::lower_bound(model.trace.begin(), model.trace.end(), t_s,
                               [](const auto& p, double t) { return p.first < t; });
    if (it == model.trace.begin()) {
      base = it->second;
    } else {
      auto prev = std::prev(it);
      const double frac = (t_s - prev->first) / (it->first - prev->first);
      base = prev->second + frac * (it->second - prev->second);
    }
  } else {
    const double hour = t_s / 3600.0;
    base = model.mean_c +
           model.diurnal_amplitude_c *
               std::cos(2.0 * std::numbers::pi * (hour - model.peak_hour) / 24.0);
  }
  double noise = 0.0;
  if (noise_rng != nullptr && model.noise_sd_c > 0)
    noise = noise_rng->normal(0.0, model.noise_sd_c);
  return base + device_offset_c + noise;
}

}  // namespace tclsim::thermal
