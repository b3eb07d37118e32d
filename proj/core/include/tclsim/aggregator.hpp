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

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tclsim/events.hpp"
#include "tclsim/gateway.hpp"
#include "tclsim/netsim.hpp"
#include "tclsim/sim_output.hpp"
#include "tclsim/thermal.hpp"

namespace tclsim::agg {

inline constexpr double kDefaultOverrideMarginC = 2.0;
inline constexpr double kStaleAfterS = 8.0 * 3600.0;

struct RetryPolicy {
  int retries = 0;       // additional attempts after the first
  double spacing_s = 0;  // between attempts

  static RetryPolicy none() { return {}; }
  static RetryPolicy retry_n(int count, double spacing_s) { return {count, spacing_s}; }
};

struct DrSignal {
  std::string signal_id;
  std::vector<std::string> targets;
  enum class Action : std::uint8_t { force_off, resume };
  Action action = Action::force_off;
  double issue_time_s = 0;
  double duration_s = 0;  // force_off only
  RetryPolicy retry;

  void validate() const;
};

/// Virtual-storage accounting for a fleet at a given ambient temperature.
///
/// Per device the storable electrical energy is the dead-band traversal of
/// the thermal mass, e_i = C_i * delta_i / eta_i (the adiabatic pull-down;
/// standing losses through R are baseline load, not storage). The baseline
/// power is duty-cycle weighted and therefore moves with ambient
/// temperature. Devices that cannot cycle at this ambient are excluded and
/// listed.
sim::CapacitySnapshot compute_capacity(std::span<const thermal::TclParams> fleet,
                                       double theta_a_c, double timestamp_s = 0);

/// Attempts delivery of one message to one device at the given time.
using DeliverFn =
    std::function<net::Delivery(const std::string& device_id, double t_s)>;

/// One deliver() per target plus retries per policy. Drops are recorded,
/// not raised.
sim::DispatchRecord dispatch(const DrSignal& signal, const DeliverFn& deliver_fn);

/// Local food-safety override: clears an active force-off once the internal
/// temperature exceeds band top + margin, and logs the release.
thermal::TclState safety_override(const thermal::TclState& state,
                                  const thermal::TclParams& params,
                                  double margin_c, double t_s,
                                  EventLog* log = nullptr);

struct EventMetrics {
  double curtailment_kwh = 0;   // baseline-minus-event energy over the window
  double rebound_peak_kw = 0;   // post-event peak excess over the baseline's
  double event_start_s = 0;
  double event_end_s = 0;
};

/// Measurement and verification of one force-off event against a baseline
/// run that shares the tick grid and fleet. Throws ValidationError when the
/// runs are misaligned.
EventMetrics evaluate_event(const sim::SimOutput& event_run,
                            const sim::SimOutput& baseline,
                            const DrSignal& signal,
                            double rebound_window_s = 3600.0);

/// Latest-known device state from uplink rows, with staleness accounting.
class FleetEstimator {
 public:
  struct DeviceEstimate {
    gateway::UplinkRow latest;
    double last_seen_s = 0;
    bool ever_seen = false;
  };

  /// Ingests one row; out-of-order rows lose to newer ones. Malformed rows
  /// (empty device id, non-finite timestamp) are skipped with a warning.
  void ingest(const gateway::UplinkRow& row);

  struct Snapshot {
    struct Entry {
      std::string device_id;
      double staleness_s = 0;
      bool stale = false;  // silent longer than kStaleAfterS
      gateway::UplinkRow latest;
    };
    std::vector<Entry> entries;  // ordered by device id
  };
  Snapshot snapshot(double now_s) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::map<std::string, DeviceEstimate> devices_;
  std::vector<std::string> warnings_;
};

}  // namespace tclsim::agg
