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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tclsim/scenario.hpp"
#include "tclsim/sim_output.hpp"

namespace tclsim::sim {

/// Runs one scenario on the fixed tick grid. Deterministic: the output is a
/// pure function of (config, config.seed).
///
/// Update order within a tick: ambient -> disturbances -> thermal ->
/// sensors/gateway -> channel -> aggregator. Cross-language ports must keep
/// this order to match traces bit for bit.
SimOutput run_scenario(const ScenarioConfig& config);

/// When requested, gateway local stores are also materialized (device id ->
/// raw append-only log bytes).
SimOutput run_scenario(const ScenarioConfig& config,
                       std::map<std::string, std::string>* local_stores);

/// Runs a baseline (same config minus the DR schedule) and fills curtailment
/// and rebound metrics on the run's force_off dispatch records. No-op when
/// the run has no dispatches.
void annotate_event_metrics(SimOutput& event_run, const ScenarioConfig& config,
                            double rebound_window_s = 3600.0);

struct ReplicateSummary {
  std::uint64_t seed = 0;
  double total_tcl_kwh = 0;
  double mean_duty = 0;           // on fraction over device-ticks
  long long outage_starts = 0;    // channel outage events begun
  double outage_starts_per_channel_hour = 0;
  long long door_events = 0;
  long long stored_rows = 0;
  long long uplinks_delivered = 0;
  long long uplinks_dropped = 0;
  long long probe_failures = 0;
};

ReplicateSummary summarize(const SimOutput& output);

/// Runs seeds config.seed .. config.seed + n_seeds - 1. Replicates are
/// independent and may run on worker threads; summaries come back ordered
/// by seed.
std::vector<ReplicateSummary> replicate(const ScenarioConfig& config, int n_seeds,
                                        bool parallel = true);

}  // namespace tclsim::sim
