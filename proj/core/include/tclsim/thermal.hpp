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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tclsim/rng.hpp"

namespace tclsim::thermal {

/// Thermal gain through an open fridge/freezer door, kW. Calibrated against
/// the per-cycle energy ratio of a continuously opened default refrigerator
/// (see tools/door_calibration.cpp for the sweep that produced this value;
/// valid calibration window for the default refrigerator is roughly
/// [0.32, 0.41) kW).
inline constexpr double kDefaultDoorHeatGainKw = 0.36;

enum class TclKind : std::uint8_t { cooling };

/// First-order equivalent thermal parameters of one cooling load.
///
/// Note on units: thermal resistance is degrees C per kW of heat flow.
/// Field datasheets sometimes quote the same quantity as "degC/kWh";
/// dimensional analysis of the RC model requires degC/kW, which is what
/// this struct stores. R * C is then the time constant in hours.
struct TclParams {
  std::string device_id;
  double r_c_per_kw = 0;    // thermal resistance
  double c_kwh_per_c = 0;   // thermal capacitance
  double cop = 0;           // coefficient of performance (eta)
  double rated_kw = 0;      // electrical draw while the compressor runs
  double setpoint_c = 0;    // theta_set
  double deadband_c = 0;    // delta, full width of the hysteresis band
  TclKind kind = TclKind::cooling;

  double band_low_c() const { return setpoint_c - deadband_c / 2.0; }
  double band_high_c() const { return setpoint_c + deadband_c / 2.0; }
  double time_constant_s() const { return r_c_per_kw * c_kwh_per_c * 3600.0; }

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Hybrid state: continuous internal temperature plus discrete compressor
/// mode, plug state, door state, and an optional DR force-off with expiry.
struct TclState {
  double theta_c = 0;
  bool compressor_on = false;
  bool plugged = true;
  bool door_open = false;
  std::optional<double> forced_off_until_s;

  bool forced_off() const { return forced_off_until_s.has_value(); }
};

/// Advances one load by dt seconds against ambient theta_a with additive
/// disturbance heat w (kW, e.g. an open door).
///
/// The continuous part is the exact discretization of
///   d(theta)/dt = (theta_ss - theta) / tau,   theta_ss = theta_a - m*eta*P*R + R*w
/// i.e. theta' = theta_ss + (theta - theta_ss) * exp(-dt/tau). The discrete
/// part is hysteresis on the dead-band: the compressor turns on when theta'
/// reaches the band top, off when it reaches the band bottom, and is held
/// off outright while unplugged or force-off is active. Electrical draw for
/// the tick is new_state.compressor_on * rated_kw.
TclState step_tcl(const TclParams& params, const TclState& state,
                  double theta_a_c, double disturbance_kw, double dt_s);

/// Raised by analytic_duty_cycle when the load cannot cycle at the given
/// ambient temperature.
class NonCyclingError : public std::runtime_error {
 public:
  enum class Reason { never_turns_on, cannot_reach_lower_bound };
  NonCyclingError(Reason reason, const std::string& msg)
      : std::runtime_error(msg), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

struct DutyCycle {
  double duty;               // fraction of a full cycle spent compressor-on
  double on_traversal_s;     // h: time to cross the dead-band in ON mode
  double off_traversal_s;
};

/// Closed-form duty cycle of the first-order model at fixed ambient.
/// Throws NonCyclingError when a steady state falls inside the band.
DutyCycle analytic_duty_cycle(const TclParams& params, double theta_a_c);

/// Behavioral disturbances: door openings as a nonhomogeneous Poisson
/// process over hour-of-day, plus optional voluntary daily unplugging
/// adopted by a fraction of devices.
struct DisturbanceModel {
  std::array<double, 24> door_rate_per_hour{};  // openings per hour
  double door_duration_mean_s = 25.0;
  double door_heat_gain_kw = kDefaultDoorHeatGainKw;

  struct DailyInterval {
    double start_hour = 0;  // [0, 24)
    double end_hour = 0;    // (start_hour, 24]
  };
  std::vector<DailyInterval> unplug_schedule;
  double unplug_probability = 0.0;

  void validate() const;
};

struct DoorEvent {
  double start_s;     // absolute scenario time
  double duration_s;
};

struct DayDisturbances {
  std::vector<DoorEvent> door_events;                      // sorted by start
  std::vector<std::pair<double, double>> unplug_intervals; // absolute [a, b)
};

/// One adoption draw per device per scenario.
bool draw_unplug_adoption(const DisturbanceModel& model, RngStream& rng);

/// Samples one day's door events (and, when adopted, the day's unplug
/// intervals). Door starts are Poisson within each hourly bin; durations
/// are exponential.
DayDisturbances sample_disturbances(const DisturbanceModel& model,
                                    int day_index, bool unplug_adopted,
                                    RngStream& rng);

/// Ambient (room) temperature: diurnal sinusoid with per-unit offset and
/// optional Gaussian noise, or an explicit trace with linear interpolation.
struct AmbientModel {
  double mean_c = 30.0;
  double diurnal_amplitude_c = 1.5;  // half of the daily max-min swing
  double peak_hour = 14.0;
  double per_unit_offset_spread_c = 0.0;
  double noise_sd_c = 0.0;
  std::vector<std::pair<double, double>> trace;  // (t_s, celsius); empty -> parametric

  void validate() const;
};

/// Per-device offset drawn once per scenario, uniform on +-spread/2.
double draw_ambient_offset(const AmbientModel& model, RngStream& rng);

/// Evaluates the model at absolute time t. Trace lookups outside the trace
/// range throw ValidationError. Pass a stream to enable the noise term.
double ambient_at(const AmbientModel& model, double t_s,
                  double device_offset_c, RngStream* noise_rng = nullptr);

}  // namespace tclsim::thermal
