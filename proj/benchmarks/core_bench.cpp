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
#include <benchmark/benchmark.h>

#include "tclsim/analytics.hpp"
#include "tclsim/local_store.hpp"
#include "tclsim/netsim.hpp"
#include "tclsim/reference_fleet.hpp"
#include "tclsim/simulate.hpp"

using namespace tclsim;

static void BM_StepTcl(benchmark::State& state) {
  const auto params = sim::reference_refrigerator("bench");
  thermal::TclState st;
  st.theta_c = 4.0;
  for (auto _ : state) {
    st = thermal::step_tcl(params, st, 30.0, 0.0, 10.0);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_StepTcl);

static void BM_RunScenarioFleetHour(benchmark::State& state) {
  auto cfg = sim::example_fleet_scenario(42, 3600.0);
  cfg.fleet.resize(static_cast<std::size_t>(state.range(0)));
  cfg.channels.resize(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = sim::run_scenario(cfg);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<long>(cfg.n_ticks()));
}
BENCHMARK(BM_RunScenarioFleetHour)->Arg(5)->Arg(30);

static void BM_SampleLatency(benchmark::State& state) {
  net::ChannelParams ch;
  ch.device_id = "bench";
  RngStream rng(1, "bench/latency");
  for (auto _ : state) {
    benchmark::DoNotOptimize(net::sample_latency_ms(ch, 0.0, rng));
  }
}
BENCHMARK(BM_SampleLatency);

static void BM_OutageYear(benchmark::State& state) {
  net::ChannelParams ch;
  ch.device_id = "bench";
  for (auto _ : state) {
    net::OutageProcess proc(ch, 7);
    benchmark::DoNotOptimize(proc.is_down(8760.0 * 3600.0));
  }
}
BENCHMARK(BM_OutageYear);

static void BM_ClusterShapes(benchmark::State& state) {
  std::vector<analytics::LoadShape> shapes;
  RngStream rng(9, "bench/shapes");
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(24);
    for (auto& x : v) x = rng.uniform(0.0, 1.0);
    shapes.push_back(analytics::normalize_shape(v));
  }
  const auto distance = state.range(0) == 0 ? analytics::ShapeDistance::euclidean_znorm
                                            : analytics::ShapeDistance::shape_based;
  for (auto _ : state) {
    auto result = analytics::cluster_shapes(shapes, 5, distance, 3);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_ClusterShapes)->Arg(0)->Arg(1);

static void BM_KsTwoSample(benchmark::State& state) {
  RngStream rng(4, "bench/ks");
  std::vector<double> a(10000), b(10000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal(0.1, 1.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::ks_two_sample(a, b));
  }
}
BENCHMARK(BM_KsTwoSample);

static void BM_LocalStoreScan(benchmark::State& state) {
  gateway::LocalStore store;
  for (int i = 0; i < 10000; ++i) {
    store.append({i * 10.0, "dev1", "fridge_temp_1", 4.0 + i % 3,
                  gateway::StoreReason::heartbeat});
  }
  for (auto _ : state) {
    auto result = store.scan();
    benchmark::DoNotOptimize(result);
  }
  state.SetBytesProcessed(static_cast<long>(state.iterations() * store.size_bytes()));
}
BENCHMARK(BM_LocalStoreScan);

BENCHMARK_MAIN();
