// Copyright 2026 The donorsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <numbers>

#include "donorsim/coherence.hpp"
#include "donorsim/dynamics.hpp"
#include "donorsim/gst.hpp"
#include "donorsim/hamiltonians.hpp"
#include "donorsim/navigator.hpp"
#include "donorsim/sequence.hpp"
#include "donorsim/spectroscopy.hpp"
#include "donorsim/stark.hpp"

namespace {

using namespace donorsim;

Transition line(Mechanism m, ChargeState c, const std::string& id) {
  for (const auto& t : compute_transitions(DeviceParams{}, m, c))
    if (t.id() == id) return t;
  throw std::invalid_argument("no line " + id);
}

void BM_NeutralEigensystem(benchmark::State& state) {
  const DeviceParams p;
  const HermitianOperator h = h_neutral(p);
  const auto labels = basis_labels(p, ChargeState::Neutral);
  for (auto _ : state) benchmark::DoNotOptimize(eigensystem(h, labels));
}
BENCHMARK(BM_NeutralEigensystem);

void BM_Transitions(benchmark::State& state) {
  const DeviceParams p;
  for (auto _ : state) benchmark::DoNotOptimize(compute_transitions(p, Mechanism::ESR, ChargeState::Neutral));
}
BENCHMARK(BM_Transitions);

// Ionised NMR pi pulse at 1 kHz Rabi rate with all eight levels kept.
void BM_EvolveFullPiPulse(benchmark::State& state) {
  const DeviceParams p;
  const Transition t = line(Mechanism::NMR, ChargeState::Ionised, "m+5/2:m+7/2");
  DriveSpec d;
  d.frequency = t.frequency;
  d.amplitude = 1.0;  // rate per tesla
  d.amplitude = 1e3 / rabi_rate(t, d, p);
  d.duration = 0.5e-3;
  const DriveTone tone = make_tone(d, p, 0.0);
  const HermitianOperator h0 = h_ionised(p);
  const QuantumState psi0 = QuantumState::basis(8, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(evolve_full(h0, {tone}, psi0, {d.duration}, max_step_for({tone})));
}
BENCHMARK(BM_EvolveFullPiPulse)->Unit(benchmark::kMillisecond);

void BM_RamseyShots(benchmark::State& state) {
  const DeviceParams p;
  const Transition t = line(Mechanism::NMR, ChargeState::Ionised, "m-7/2:m-5/2");
  NoiseModel n;
  n.sigma_b = 1e-6;
  n.sigma_fq = 50;
  PulseSequence s;
  const double half = std::numbers::pi / 2;
  s.add(InstantRotation{half, 0}).add(FreeEvolution{1e-3}).add(InstantRotation{half, 0}).add(Readout{});
  SequenceOptions o;
  o.threads = 1;
  const int shots = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sequence(s, t, p, n, shots, 7, o));
  state.SetItemsProcessed(state.iterations() * shots);
}
BENCHMARK(BM_RamseyShots)->Arg(1000)->Arg(10000);

void BM_GstLite(benchmark::State& state) {
  GstOptions o;
  o.max_depth = static_cast<int>(state.range(0));
  o.shots = 1000;
  o.bootstrap = 10;
  o.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(gst_lite({0.1, 0.0, 0.0}, o));
}
BENCHMARK(BM_GstLite)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FanoutScan(benchmark::State& state) {
  const DeviceParams p;
  const auto grid = voltage_grid(0.5, 11);
  for (auto _ : state) benchmark::DoNotOptimize(fanout_scan(p, p.stark, FanoutKind::ESR, grid));
}
BENCHMARK(BM_FanoutScan)->Unit(benchmark::kMillisecond);

void BM_RouteNeutral(benchmark::State& state) {
  const DeviceParams p;
  const TransitionGraph g(p, ChargeState::Neutral,
                          {Mechanism::NMR, Mechanism::ESR, Mechanism::EDSR});
  const BasisLabel from = BasisLabel::parse("dn_m-7/2"), to = BasisLabel::parse("up_m+7/2");
  for (auto _ : state) benchmark::DoNotOptimize(route(g, from, to, RouteCost::Time));
}
BENCHMARK(BM_RouteNeutral);

void BM_PlanVerification(benchmark::State& state) {
  const DeviceParams p;
  const HalfInt target = HalfInt::from_twice(-7);
  const auto plan = plan_initialization(std::nullopt, target, p);
  const std::vector<double> uniform(8, 1.0 / 8);
  for (auto _ : state) benchmark::DoNotOptimize(verify_plan(plan, uniform, target, p, NoiseModel{}));
}
BENCHMARK(BM_PlanVerification)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
