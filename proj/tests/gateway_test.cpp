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
#include "tclsim/gateway.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace tclsim;
using gateway::GatewayState;
using gateway::SensorKind;
using gateway::SensorSpec;
using gateway::StoredRow;
using gateway::StoreReason;

namespace {

SensorSpec temp_spec(double threshold = 0.25, double heartbeat = 60.0) {
  SensorSpec spec;
  spec.sensor_id = "g1/fridge_temp_1";
  spec.kind = SensorKind::fridge_temp_1;
  spec.change_threshold = threshold;
  spec.heartbeat_s = heartbeat;
  return spec;
}

GatewayState fresh_state() {
  GatewayState st;
  st.device_id = "g1";
  return st;
}

}  // namespace

TEST(PollSensor, ConstantTruthStoresOneHeartbeatPerMinute) {
  auto spec = temp_spec();
  auto st = fresh_state();
  std::vector<StoredRow> rows;
  for (double t = 0; t < 600.0; t += 1.0) {
    if (auto row = gateway::poll_sensor(spec, 5.0, st, t)) rows.push_back(*row);
  }
  // Initial store at t=0 plus heartbeats at 60, 120, ..., 540.
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].reason, StoreReason::change);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].reason, StoreReason::heartbeat);
    EXPECT_DOUBLE_EQ(rows[i].timestamp_s, 60.0 * static_cast<double>(i));
  }
}

TEST(PollSensor, SubThresholdJumpStoresNoChangeRow) {
  auto spec = temp_spec(0.5);
  auto st = fresh_state();
  ASSERT_TRUE(gateway::poll_sensor(spec, 5.0, st, 0.0).has_value());
  const auto row = gateway::poll_sensor(spec, 5.4, st, 1.0);
  EXPECT_FALSE(row.has_value());  // 0.4 < 0.5 and heartbeat not due
}

TEST(PollSensor, SquareWaveRowsMatchHandEnumeration) {
  // Truth flips between 0 and 1 every 20 s; threshold 0.5, heartbeat 60 s.
  // Hand replay of the storage rule: a change row on every flip (including
  // the initial store at t=0) and no heartbeats, since no 60 s gap ever
  // opens between stores.
  auto spec = temp_spec(0.5);
  auto st = fresh_state();
  std::vector<StoredRow> rows;
  for (double t = 0; t < 600.0; t += 1.0) {
    const double truth = static_cast<long long>(t / 20.0) % 2 == 0 ? 0.0 : 1.0;
    if (auto row = gateway::poll_sensor(spec, truth, st, t)) rows.push_back(*row);
  }
  ASSERT_EQ(rows.size(), 30u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(rows[i].timestamp_s, 20.0 * static_cast<double>(i));
    EXPECT_EQ(rows[i].reason, StoreReason::change);
    EXPECT_DOUBLE_EQ(rows[i].value, i % 2 == 0 ? 0.0 : 1.0);
  }
}

TEST(PollSensor, HeartbeatGapNeverExceedsBoundOnRandomishSignal) {
  auto spec = temp_spec(0.25);
  auto st = fresh_state();
  const double tick = 10.0;
  double last_store = -1;
  for (double t = 0; t < 6 * 3600.0; t += tick) {
    const double truth = 5.0 + 0.2 * std::sin(t / 500.0);  // always sub-threshold
    if (auto row = gateway::poll_sensor(spec, truth, st, t)) {
      if (last_store >= 0) EXPECT_LE(row->timestamp_s - last_store, 60.0 + tick);
      last_store = row->timestamp_s;
    }
  }
  EXPECT_GE(last_store, 6 * 3600.0 - 60.0 - tick);
}

TEST(PollSensor, ReconstructionStaysWithinThreshold) {
  auto spec = temp_spec(0.25);
  auto st = fresh_state();
  double reconstructed = 0;
  bool have = false;
  for (double t = 0; t < 3600.0; t += 10.0) {
    const double truth = 4.0 + 2.0 * std::sin(t / 300.0) + 0.3 * std::sin(t / 37.0);
    if (auto row = gateway::poll_sensor(spec, truth, st, t)) {
      reconstructed = row->value;
      have = true;
    }
    ASSERT_TRUE(have);
    ASSERT_LE(std::fabs(truth - reconstructed), spec.change_threshold + 1e-12);
  }
}

TEST(PollSensor, UnhealthyCollectorStoresNothing) {
  auto spec = temp_spec();
  auto st = fresh_state();
  st.collectors[static_cast<int>(SensorKind::fridge_temp_1)].healthy = false;
  EXPECT_FALSE(gateway::poll_sensor(spec, 5.0, st, 0.0).has_value());
  EXPECT_FALSE(gateway::poll_sensor(spec, 25.0, st, 120.0).has_value());
}

TEST(PollSensor, IsolationAcrossSensors) {
  // A dead fridge-temp collector must not change what the room sensor stores.
  SensorSpec room;
  room.sensor_id = "g1/room_temp";
  room.kind = SensorKind::room_temp;
  room.change_threshold = 0.25;

  auto healthy_rows = [&](bool kill_other) {
    auto st = fresh_state();
    if (kill_other)
      st.collectors[static_cast<int>(SensorKind::fridge_temp_1)].healthy = false;
    std::vector<double> stored;
    auto other = temp_spec();
    for (double t = 0; t < 1800.0; t += 10.0) {
      const double room_truth = 30.0 + std::sin(t / 100.0);
      gateway::poll_sensor(other, 5.0, st, t);
      if (auto row = gateway::poll_sensor(room, room_truth, st, t))
        stored.push_back(row->value);
    }
    return stored;
  };
  EXPECT_EQ(healthy_rows(false), healthy_rows(true));
}

TEST(PollSensor, MeterRowsAbsentWhileLinkDown) {
  SensorSpec meter;
  meter.sensor_id = "g1/tcl_power_meter";
  meter.kind = SensorKind::tcl_power_meter;
  meter.change_threshold = 5.0;
  auto st = fresh_state();
  st.meter_link_up = false;
  EXPECT_FALSE(gateway::poll_sensor(meter, 350.0, st, 0.0).has_value());
  st.meter_link_up = true;
  st.meter_wait = true;
  EXPECT_FALSE(gateway::poll_sensor(meter, 350.0, st, 10.0).has_value());
  st.meter_wait = false;
  EXPECT_TRUE(gateway::poll_sensor(meter, 350.0, st, 20.0).has_value());
}

TEST(HourlyRestart, ResetsCollectorsAndRetryLadderButKeepsBookkeeping) {
  auto spec = temp_spec();
  auto st = fresh_state();
  gateway::poll_sensor(spec, 5.0, st, 0.0);
  st.collectors[0].healthy = false;
  st.retry_count = 3;
  st.meter_wait = true;
  EventLog log;

  EXPECT_FALSE(gateway::restart_due(st, 1800.0));
  EXPECT_TRUE(gateway::restart_due(st, 3600.0));
  gateway::hourly_restart(st, 3600.0, &log);
  EXPECT_TRUE(st.collectors[0].healthy);
  EXPECT_EQ(st.retry_count, 0);
  EXPECT_FALSE(st.meter_wait);
  EXPECT_DOUBLE_EQ(st.next_restart_s, 7200.0);
  // Last-stored values survive (the local store is durable).
  EXPECT_TRUE(st.collectors[0].has_stored);
  EXPECT_DOUBLE_EQ(st.collectors[0].last_value, 5.0);
  ASSERT_EQ(log.events().size(), 1u);
  EXPECT_EQ(log.events()[0].kind, "gateway_restart");
}

TEST(HourlyRestart, CommErrorForcesImmediateRestart) {
  auto st = fresh_state();
  st.comm_error_flag = true;
  EXPECT_TRUE(gateway::restart_due(st, 120.0));
  gateway::hourly_restart(st, 120.0, nullptr);
  EXPECT_FALSE(st.comm_error_flag);
  // Second restart right away is harmless.
  gateway::hourly_restart(st, 130.0, nullptr);
  EXPECT_EQ(st.retry_count, 0);
  EXPECT_FALSE(st.meter_wait);
}

TEST(MeterReconnect, RecoveryMidLadderResetsCounter) {
  auto st = fresh_state();
  st.meter_link_up = false;
  gateway::meter_reconnect(st, false, 0.0);
  gateway::meter_reconnect(st, false, 30.0);
  EXPECT_EQ(st.retry_count, 2);
  gateway::meter_reconnect(st, true, 60.0);
  EXPECT_EQ(st.retry_count, 0);
  EXPECT_TRUE(st.meter_link_up);
}

TEST(MeterReconnect, ExactlyFourRetriesThenWait) {
  auto st = fresh_state();
  st.meter_link_up = false;
  for (int i = 0; i < 10; ++i) gateway::meter_reconnect(st, false, i * 30.0);
  EXPECT_EQ(st.retry_count, 4);
  EXPECT_TRUE(st.meter_wait);
  // Waiting: further attempts are ignored until a restart.
  gateway::meter_reconnect(st, true, 400.0);
  EXPECT_TRUE(st.meter_wait);
  gateway::hourly_restart(st, 3600.0, nullptr);
  EXPECT_FALSE(st.meter_wait);
  gateway::meter_reconnect(st, true, 3610.0);
  EXPECT_TRUE(st.meter_link_up);
  EXPECT_EQ(st.retry_count, 0);
}

TEST(UplinkRow, SnapshotsLatestValuesAndMarksAbsences) {
  auto st = fresh_state();
  auto spec = temp_spec();
  gateway::poll_sensor(spec, 4.5, st, 0.0);
  SensorSpec meter;
  meter.sensor_id = "g1/tcl_power_meter";
  meter.kind = SensorKind::tcl_power_meter;
  meter.change_threshold = 5.0;
  gateway::poll_sensor(meter, 350.0, st, 0.0);

  auto row = gateway::build_uplink_row(st, 100.0);
  EXPECT_EQ(row.device_id, "g1");
  EXPECT_EQ(row.healthy_collectors, gateway::kSensorCount);
  ASSERT_TRUE(row.values[static_cast<int>(SensorKind::fridge_temp_1)].has_value());
  EXPECT_DOUBLE_EQ(*row.values[static_cast<int>(SensorKind::fridge_temp_1)], 4.5);
  ASSERT_TRUE(row.values[static_cast<int>(SensorKind::tcl_power_meter)].has_value());
  // Never-stored sensors are absent.
  EXPECT_FALSE(row.values[static_cast<int>(SensorKind::humidity)].has_value());

  // Meter in wait state: meter field absent even though a value was stored.
  st.meter_wait = true;
  row = gateway::build_uplink_row(st, 200.0);
  EXPECT_FALSE(row.values[static_cast<int>(SensorKind::tcl_power_meter)].has_value());
  EXPECT_TRUE(row.meter_wait);
}

TEST(UplinkRow, AllSevenSensorsPresentWhenHealthy) {
  auto st = fresh_state();
  for (int i = 0; i < gateway::kSensorCount; ++i) {
    SensorSpec spec;
    spec.kind = static_cast<SensorKind>(i);
    spec.sensor_id = std::string("g1/") + gateway::sensor_kind_name(spec.kind);
    spec.change_threshold = gateway::default_change_threshold(spec.kind);
    gateway::poll_sensor(spec, 1.0 + i, st, 0.0);
  }
  const auto row = gateway::build_uplink_row(st, 0.0);
  int present = 0;
  for (const auto& v : row.values) present += v.has_value() ? 1 : 0;
  EXPECT_EQ(present, 7);
}
