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
#include <string_view>

namespace tclsim {

/// Counter-based random stream keyed by (seed, label).
///
/// Every consumer (one device's door process, one channel's outage process,
/// ...) owns its own stream, so adding or reordering devices never perturbs
/// the draws seen by any other stream. The generator is the splitmix64
/// sequence starting at a key derived from the seed and the label; output is
/// a pure function of (seed, label, draw index) and is identical across
/// platforms.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1); never returns an exact 0 or 1.
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();
  double normal(double mean, double sd);

  /// Exponential with the given mean (mean > 0).
  double exponential(double mean);

  /// Poisson draw; exact inversion for small lambda, halving split above.
  int poisson(double lambda);

  bool bernoulli(double p);

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace tclsim
