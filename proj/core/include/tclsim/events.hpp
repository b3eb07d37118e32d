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

#include <string>
#include <vector>

namespace tclsim {

struct Event {
  double t_s = 0;
  std::string device_id;  // empty for scenario-level events
  std::string kind;       // e.g. "gateway_restart", "sensor_fault", "override_cleared"
  std::string detail;
};

class EventLog {
 public:
  void add(double t_s, std::string device_id, std::string kind,
           std::string detail = {}) {
    events_.push_back(Event{t_s, std::move(device_id), std::move(kind), std::move(detail)});
  }
  const std::vector<Event>& events() const { return events_; }
  std::vector<Event> take() { return std::move(events_); }

 private:
  std::vector<Event> events_;
};

}  // namespace tclsim
