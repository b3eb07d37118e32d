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
#include <string>

#include "tclsim/scenario.hpp"

namespace tclsim::sim {

/// Nominal appliance classes behind the bundled example scenario. The
/// household refrigerator cycles at roughly 45% duty at 30 degC ambient;
/// the micro-enterprise freezer at roughly 55% with a much wider dead-band.
thermal::TclParams reference_refrigerator(std::string device_id);
thermal::TclParams reference_freezer(std::string device_id);

/// The bundled 30-unit scenario: 20 micro-enterprise freezers and 10
/// household refrigerators, each with its own cellular channel, diurnal
/// ambient around 30 degC, door-opening disturbances and background house
/// loads drawn from five daily archetypes. Device parameter jitter comes
/// from a fixed internal stream, so the fleet definition is stable across
/// scenario seeds; only initial conditions and process noise follow `seed`.
ScenarioConfig example_fleet_scenario(std::uint64_t seed = 42,
                                      double horizon_s = 48.0 * 3600.0,
                                      double tick_seconds = 10.0);

}  // namespace tclsim::sim
