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

#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "donorsim/coherence.hpp"
#include "donorsim/device_params.hpp"
#include "donorsim/spectroscopy.hpp"

namespace donorsim {

// Drive amplitudes used to weight edges and to predict adiabatic pulses.
struct DriveStrengths {
  double nmr_b1 = 1e-4;   // T
  double esr_b1 = 1e-5;   // T
  double ner_dq = 100.0;  // Hz
  double edsr_da = 50e3;  // Hz
};

// Drive amplitude of `m` from `d`, in DriveSpec units.
double drive_amplitude(Mechanism m, const DriveStrengths& d);

struct GraphEdge {
  std::size_t a = 0;  // node indices, a < b
  std::size_t b = 0;
  Transition transition;
  double pi_time = 0.0;  // s
};

// Labeled eigenstates of one charge state joined by the allowed transitions
// of the enabled mechanisms. Mechanisms that do not exist in that charge
// state are ignored. Nodes are sorted by label string.
class TransitionGraph {
 public:
  TransitionGraph(const DeviceParams& p, ChargeState c, const std::set<Mechanism>& enabled,
                  const DriveStrengths& d = {});

  ChargeState charge_state() const { return charge_; }
  const std::vector<BasisLabel>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::optional<std::size_t> index_of(const BasisLabel& l) const;
  bool connected() const;

 private:
  ChargeState charge_;
  std::vector<BasisLabel> nodes_;
  std::vector<GraphEdge> edges_;
};

enum class RouteCost { Hops, Time };
const char* to_string(RouteCost c);
RouteCost parse_route_cost(const std::string& s);

struct RouteHop {
  BasisLabel from;
  BasisLabel to;
  Transition transition;
  double pi_time = 0.0;
};

struct Route {
  bool found = false;
  std::vector<BasisLabel> nodes;
  std::vector<RouteHop> hops;
  double cost = 0.0;  // hops, or total pi time in s
};

// Optimal path; among equal-cost paths the node sequence that is smallest
// lexicographically by label string wins. Parallel edges resolve to the
// fastest, then the lowest mechanism. Throws std::invalid_argument when
// the labels are not states of one charge state.
Route route(const TransitionGraph& g, const BasisLabel& from, const BasisLabel& to, RouteCost cost);
Route route(const BasisLabel& from, const BasisLabel& to, const std::set<Mechanism>& enabled, RouteCost cost,
            const DeviceParams& p, const DriveStrengths& d = {});

void write_route_json(std::ostream& out, const Route& r, RouteCost cost);

enum class PlanStepKind { LoadElectron, AdiabaticESR, AdiabaticEDSR, Read };
const char* to_string(PlanStepKind k);

// Adiabatic pulses are linear chirps from carrier + iq_offset over `sweep`
// (signed) in `duration`. The EDSR tone starts at carrier + depth and sweeps
// down, the ESR tones start at their line minus depth and sweep up.
struct PlanStep {
  PlanStepKind kind = PlanStepKind::LoadElectron;
  double carrier = 0.0;    // Hz
  double iq_offset = 0.0;  // Hz
  double sweep = 0.0;      // Hz
  double duration = 0.0;   // s
  int subspace = 0;        // 1 for -I <-> -I+1, counting up
  std::optional<Transition> target;  // exact line the pulse is meant to cross

  double start() const { return carrier + iq_offset; }
  double center() const { return carrier + iq_offset + 0.5 * sweep; }
};

// Where the IQ offsets come from. Identity uses -A/2 - gamma_n B0 - depth,
// +A/2 - gamma_n B0 - depth and +depth about the exact EDSR carrier; Oracle
// replaces the ESR offsets by exact line minus carrier minus depth.
enum class FrequencySource { Identity, Oracle };

struct PlanOptions {
  int repetitions = 20;      // sweeps for an unknown start
  double depth = 1e6;        // Hz, adiabatic modulation depth
  double duration = 1e-3;    // s per adiabatic pulse
  FrequencySource source = FrequencySource::Identity;
  DriveStrengths drives;
};

// Subspace k couples m = -I + k - 1 and m + 1. Raising k: load, aESR on the
// lower line, aESR on the upper line, aEDSR. Lowering k: load, aEDSR.
// A known start gets the shortest chain of those; an unknown start gets
// `repetitions` rounds of raising every subspace below the target (upward)
// and then lowering every subspace above it (downward).
std::vector<PlanStep> plan_initialization(std::optional<HalfInt> current, HalfInt target, const DeviceParams& p,
                                          const PlanOptions& o = {});
std::vector<PlanStep> raise_sequence(int subspace, const DeviceParams& p, const PlanOptions& o = {});
std::vector<PlanStep> lower_sequence(int subspace, const DeviceParams& p, const PlanOptions& o = {});
std::size_t microwave_pulse_count(const std::vector<PlanStep>& plan);

void write_plan_json(std::ostream& out, const std::vector<PlanStep>& plan);

struct PlanVerification {
  std::vector<double> nuclear_populations;  // per m_I, Iz ordering (+I first)
  std::vector<double> step_probabilities;   // flip probability of the crossed line, 0 if none
  double target_population = 0.0;
};

// Incoherent execution on the 16 neutral levels. Loads reset the electron
// to down (nuclear shock with noise.readout_flip). A chirp inverts each line
// of its mechanism inside the swept window with the Landau-Zener
// probability.
PlanVerification verify_plan(const std::vector<PlanStep>& plan, const std::vector<double>& initial_nuclear,
                             HalfInt target, const DeviceParams& p, const NoiseModel& noise,
                             const DriveStrengths& d = {});

}  // namespace donorsim
