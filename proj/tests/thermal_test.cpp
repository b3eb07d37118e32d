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

#include <gtest/gtest.h>

#include <cmath>

#include "tclsim/errors.hpp"
#include "test_util.hpp"

using namespace tclsim;
using thermal::TclParams;
using thermal::TclState;

namespace {

TclParams params_with(double r, double c, double cop, double p, double set, double db,
                      const char* id = "t1") {
  TclParams params;
  params.device_id = id;
  params.r_c_per_kw = r;
  params.c_kwh_per_c = c;
  params.cop = cop;
  params.rated_kw = p;
  params.setpoint_c = set;
  params.deadband_c = db;
  return params;
}

// The reference household refrigerator used across these tests.
TclParams fridge() { return params_with(75.0, 0.0267, 2.2, 0.35, 4.0, 2.0); }

double simulated_duty(const TclParams& p, double theta_a, double dt, double horizon_s) {
  TclState st;
  st.theta_c = p.setpoint_c;
  long long on = 0, total = 0;
  // settle over one tenth of the horizon before counting
  const auto settle = static_cast<long long>(horizon_s / dt / 10);
  long long k = 0;
  for (double t = 0; t < horizon_s; t += dt, ++k) {
    st = thermal::step_tcl(p, st, theta_a, 0.0, dt);
    if (k < settle) continue;
    ++total;
    if (st.compressor_on) ++on;
  }
  return static_cast<double>(on) / static_cast<double>(total);
}

}  // namespace

TEST(StepTcl, AmbientFixedPoint) {
  const auto p = fridge();
  TclState st;
  st.theta_c = 30.0;
  st.compressor_on = false;
  // theta == theta_a is a fixed point of the OFF dynamics; with the band top
  // below ambient the mode flips on, which is the expected hysteresis pull.
  auto next = thermal::step_tcl(p, st, 30.0, 0.0, 10.0);
  EXPECT_DOUBLE_EQ(next.theta_c, 30.0);

  // With ambient inside the band the mode must stay off.
  st.theta_c = 4.2;
  next = thermal::step_tcl(p, st, 4.2, 0.0, 10.0);
  EXPECT_DOUBLE_EQ(next.theta_c, 4.2);
  EXPECT_FALSE(next.compressor_on);
}

TEST(StepTcl, ContractionTowardSteadyState) {
  const auto p = fridge();
  for (double dt : {1.0, 10.0, 60.0, 3600.0}) {
    TclState st;
    st.theta_c = 8.0;
    st.compressor_on = true;
    const double theta_ss = 30.0 - p.cop * p.rated_kw * p.r_c_per_kw;
    const auto next = thermal::step_tcl(p, st, 30.0, 0.0, dt);
    EXPECT_LT(std::fabs(next.theta_c - theta_ss), std::fabs(st.theta_c - theta_ss))
        << "dt=" << dt;
  }
}

TEST(StepTcl, ExactDiscretizationMatchesRk4Reference) {
  const auto p = fridge();
  double theta = 5.0;
  double ref = 5.0;
  TclState st;
  st.theta_c = theta;
  st.compressor_on = true;
  // One hour compressor-on, stepped at 10 s, against an RK4 integration of
  // the identical ODE at 10 ms substeps.
  for (int k = 0; k < 360; ++k) {
    st = thermal::step_tcl(p, st, 30.0, 0.0, 10.0);
    st.compressor_on = true;  // hold the mode; this test probes the ODE only
    ref = oracle::rk4_thermal_step(p, ref, true, 30.0, 0.0, 10.0, 0.01);
  }
  EXPECT_NEAR(st.theta_c, ref, 1e-9);
}

TEST(StepTcl, SteadyCyclingStaysInsideBandPlusOneTick) {
  // Low-power unit in a mild room so that cycling exists: steady states at
  // 12 C (off) and 4 C (on) straddle the 5..7 C band.
  const auto p = params_with(20.0, 0.04, 2.0, 0.2, 6.0, 2.0);
  const double theta_a = 12.0;
  const double dt = 10.0;
  const double tau = p.time_constant_s();
  // Largest possible movement in one tick from inside the band.
  const double ss_on = theta_a - p.cop * p.rated_kw * p.r_c_per_kw;
  const double swing = std::max(theta_a - p.band_low_c(), p.band_high_c() - ss_on);
  const double eps = swing * (1.0 - std::exp(-dt / tau));

  TclState st;
  st.theta_c = p.setpoint_c;
  bool prev_mode = st.compressor_on;
  for (double t = 0; t < 24 * 3600.0; t += dt) {
    st = thermal::step_tcl(p, st, theta_a, 0.0, dt);
    if (t > 2 * 3600.0) {
      ASSERT_GE(st.theta_c, p.band_low_c() - eps);
      ASSERT_LE(st.theta_c, p.band_high_c() + eps);
      // Hysteresis: flips happen only at the boundaries.
      if (st.compressor_on && !prev_mode) ASSERT_GE(st.theta_c, p.band_high_c());
      if (!st.compressor_on && prev_mode) ASSERT_LE(st.theta_c, p.band_low_c());
    }
    prev_mode = st.compressor_on;
  }
}

TEST(StepTcl, UnpluggedAndForcedHoldCompressorOff) {
  const auto p = fridge();
  TclState st;
  st.theta_c = 20.0;  // far above the band: would switch on
  st.plugged = false;
  auto next = thermal::step_tcl(p, st, 30.0, 0.0, 10.0);
  EXPECT_FALSE(next.compressor_on);

  st.plugged = true;
  st.forced_off_until_s = 1e9;
  next = thermal::step_tcl(p, st, 30.0, 0.0, 10.0);
  EXPECT_FALSE(next.compressor_on);

  st.forced_off_until_s.reset();
  next = thermal::step_tcl(p, st, 30.0, 0.0, 10.0);
  EXPECT_TRUE(next.compressor_on);
}

TEST(AnalyticDutyCycle, SymmetricCaseIsOneHalf) {
  // Steady states at +5 and -5 mirror the 1-degree band around 0.
  const auto p = params_with(10.0, 0.05, 2.0, 0.5, 0.0, 2.0);
  const auto dc = thermal::analytic_duty_cycle(p, 5.0);
  EXPECT_NEAR(dc.duty, 0.5, 1e-12);
  EXPECT_NEAR(dc.on_traversal_s, dc.off_traversal_s, 1e-9);
}

TEST(AnalyticDutyCycle, MatchesFineStepSimulation) {
  const auto p = fridge();
  const auto dc = thermal::analytic_duty_cycle(p, 30.0);
  const double sim = simulated_duty(p, 30.0, 1.0, 5 * 24 * 3600.0);
  EXPECT_NEAR(sim, dc.duty, 0.02 * dc.duty);
}

TEST(AnalyticDutyCycle, MidRangeDeviceWithinReportedEnvelope) {
  for (double theta_a : {27.0, 30.0, 33.0}) {
    const auto dc = thermal::analytic_duty_cycle(fridge(), theta_a);
    EXPECT_GT(dc.duty, 0.1);
    EXPECT_LT(dc.duty, 0.9);
  }
}

TEST(AnalyticDutyCycle, NeverTurnsOnError) {
  const auto p = params_with(20.0, 0.04, 2.0, 0.2, 4.0, 4.0);
  try {
    thermal::analytic_duty_cycle(p, 5.0);
    FAIL() << "expected NonCyclingError";
  } catch (const thermal::NonCyclingError& e) {
    EXPECT_EQ(e.reason(), thermal::NonCyclingError::Reason::never_turns_on);
    EXPECT_NE(std::string(e.what()).find("never turns on"), std::string::npos);
  }
}

TEST(AnalyticDutyCycle, CannotReachLowerBoundError) {
  const auto p = params_with(20.0, 0.04, 2.0, 0.2, 4.0, 2.0);  // pulldown only 8 C
  try {
    thermal::analytic_duty_cycle(p, 30.0);
    FAIL() << "expected NonCyclingError";
  } catch (const thermal::NonCyclingError& e) {
    EXPECT_EQ(e.reason(), thermal::NonCyclingError::Reason::cannot_reach_lower_bound);
    EXPECT_NE(std::string(e.what()).find("cannot reach lower bound"), std::string::npos);
  }
}

TEST(Disturbances, ZeroRatesProduceNoEvents) {
  thermal::DisturbanceModel model;
  RngStream rng(1, "d");
  const auto day = thermal::sample_disturbances(model, 0, false, rng);
  EXPECT_TRUE(day.door_events.empty());
  EXPECT_TRUE(day.unplug_intervals.empty());
}

TEST(Disturbances, FlatRateRecoversDailyMean) {
  thermal::DisturbanceModel model;
  model.door_rate_per_hour.fill(2.0);  // 48 per day
  RngStream rng(5, "d");
  long long total = 0;
  const int days = 10000;
  for (int d = 0; d < days; ++d)
    total += static_cast<long long>(
        thermal::sample_disturbances(model, d, false, rng).door_events.size());
  EXPECT_NEAR(static_cast<double>(total) / days, 48.0, 48.0 * 0.02);
}

TEST(Disturbances, EventsAreSortedAndInsideTheDay) {
  thermal::DisturbanceModel model;
  model.door_rate_per_hour.fill(3.0);
  RngStream rng(9, "d");
  const auto day = thermal::sample_disturbances(model, 3, false, rng);
  for (std::size_t i = 0; i < day.door_events.size(); ++i) {
    EXPECT_GE(day.door_events[i].start_s, 3 * 86400.0);
    EXPECT_LT(day.door_events[i].start_s, 4 * 86400.0);
    EXPECT_GT(day.door_events[i].duration_s, 0.0);
    if (i > 0) EXPECT_GE(day.door_events[i].start_s, day.door_events[i - 1].start_s);
  }
}

TEST(Disturbances, AdoptionFractionMatchesProbability) {
  thermal::DisturbanceModel model;
  model.unplug_probability = 0.71;
  int adopted = 0;
  const int devices = 10000;
  for (int i = 0; i < devices; ++i) {
    RngStream rng(42, "dev" + std::to_string(i) + "/disturbance");
    if (thermal::draw_unplug_adoption(model, rng)) ++adopted;
  }
  const double fraction = static_cast<double>(adopted) / devices;
  EXPECT_GE(fraction, 0.69);
  EXPECT_LE(fraction, 0.73);
}

TEST(Disturbances, UnplugIntervalsFollowSchedule) {
  thermal::DisturbanceModel model;
  model.unplug_schedule.push_back({10.0, 14.0});
  RngStream rng(1, "d");
  const auto day = thermal::sample_disturbances(model, 2, true, rng);
  ASSERT_EQ(day.unplug_intervals.size(), 1u);
  EXPECT_DOUBLE_EQ(day.unplug_intervals[0].first, 2 * 86400.0 + 10 * 3600.0);
  EXPECT_DOUBLE_EQ(day.unplug_intervals[0].second, 2 * 86400.0 + 14 * 3600.0);
}

TEST(Disturbances, DoorHeatNeverDecreasesDailyEnergy) {
  const auto p = fridge();
  thermal::DisturbanceModel model;
  model.door_rate_per_hour.fill(2.0);
  RngStream rng(17, "events");
  const auto day = thermal::sample_disturbances(model, 0, false, rng);

  auto daily_energy = [&](double gain_kw) {
    TclState st;
    st.theta_c = p.setpoint_c;
    double energy = 0;
    const double dt = 10.0;
    std::size_t next_ev = 0;
    double open_until = -1;
    for (double t = 0; t < 86400.0; t += dt) {
      while (next_ev < day.door_events.size() && day.door_events[next_ev].start_s <= t) {
        open_until = std::max(open_until, day.door_events[next_ev].start_s +
                                              day.door_events[next_ev].duration_s);
        ++next_ev;
      }
      const bool open = t < open_until;
      if (st.compressor_on) energy += p.rated_kw * dt / 3600.0;
      st = thermal::step_tcl(p, st, 30.0, open ? gain_kw : 0.0, dt);
    }
    return energy;
  };

  const double closed = daily_energy(0.0);
  const double low = daily_energy(0.15);
  const double high = daily_energy(thermal::kDefaultDoorHeatGainKw);
  EXPECT_GE(low, closed);
  EXPECT_GE(high, low);
}

TEST(Disturbances, ContinuousOpeningQuadruplesCycleEnergy) {
  const auto p = fridge();
  auto cycle_energy = [&](double w) {
    TclState st;
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
    ADD_FAILURE() << "cycle never completed at w=" << w;
    return energy;
  };
  const double closed = cycle_energy(0.0);
  const double open = cycle_energy(thermal::kDefaultDoorHeatGainKw);
  EXPECT_GE(open, 4.0 * closed);
}

TEST(Ambient, ConstantWhenFlat) {
  thermal::AmbientModel model;
  model.mean_c = 30;
  model.diurnal_amplitude_c = 0;
  model.noise_sd_c = 0;
  for (double t : {0.0, 3600.0, 50000.0, 86400.0}) {
    EXPECT_DOUBLE_EQ(thermal::ambient_at(model, t, 0.0), 30.0);
  }
}

TEST(Ambient, DailySwingIsTwiceTheAmplitude) {
  thermal::AmbientModel model;
  model.mean_c = 30;
  model.diurnal_amplitude_c = 1.5;
  model.peak_hour = 14;
  double lo = 1e9, hi = -1e9;
  double peak_t = 0;
  for (double t = 0; t < 86400.0; t += 60.0) {
    const double v = thermal::ambient_at(model, t, 0.0);
    if (v > hi) {
      hi = v;
      peak_t = t;
    }
    lo = std::min(lo, v);
  }
  EXPECT_NEAR(hi - lo, 3.0, 1e-6);
  EXPECT_NEAR(peak_t / 3600.0, 14.0, 0.02);
}

TEST(Ambient, OffsetsStayWithinSpread) {
  thermal::AmbientModel model;
  model.per_unit_offset_spread_c = 4.0;
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 30; ++i) {
    RngStream rng(42, "unit" + std::to_string(i) + "/init");
    const double off = thermal::draw_ambient_offset(model, rng);
    lo = std::min(lo, off);
    hi = std::max(hi, off);
  }
  EXPECT_LE(hi - lo, 4.0);
  EXPECT_GE(hi - lo, 1.0);  // 30 draws should cover a good part of the spread
}

TEST(Ambient, TraceInterpolatesAndRejectsOutOfRange) {
  thermal::AmbientModel model;
  model.trace = {{0.0, 20.0}, {100.0, 30.0}, {200.0, 25.0}};
  EXPECT_DOUBLE_EQ(thermal::ambient_at(model, 50.0, 0.0), 25.0);
  EXPECT_DOUBLE_EQ(thermal::ambient_at(model, 150.0, 0.0), 27.5);
  EXPECT_DOUBLE_EQ(thermal::ambient_at(model, 200.0, 0.0), 25.0);
  EXPECT_THROW(thermal::ambient_at(model, 201.0, 0.0), tclsim::ValidationError);
  EXPECT_THROW(thermal::ambient_at(model, -1.0, 0.0), tclsim::ValidationError);
}

TEST(Validation, ParamsErrorsNameTheField) {
  auto p = fridge();
  p.r_c_per_kw = 0;
  try {
    p.validate();
    FAIL();
  } catch (const tclsim::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("r_c_per_kw"), std::string::npos);
  }
  p = fridge();
  p.setpoint_c = 15.0;
  EXPECT_THROW(p.validate(), tclsim::ValidationError);
}
