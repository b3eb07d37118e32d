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

// Regenerates configs/example_managua_30.cfg from the built-in fleet
// builder. Run after changing reference_fleet.cpp so the bundled file and
// the builder stay in lockstep.

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "tclsim/reference_fleet.hpp"

int main(int argc, char** argv) {
  const char* path = argc > 1 ? argv[1] : "configs/example_managua_30.cfg";
  const auto cfg = tclsim::sim::example_fleet_scenario();
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    std::cerr << "cannot open " << path << " for writing\n";
    return 2;
  }
  out << cfg.to_json().dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}
