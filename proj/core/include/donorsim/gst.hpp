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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "donorsim/spin_algebra.hpp"

namespace donorsim {

// Single-qubit gate set in the normalized Pauli basis {I, X, Y, Z}/sqrt(2).
// Gate order is idle, X_{pi/2}, Y_{pi/2}.
inline constexpr int kGstGates = 3;
inline constexpr std::array<const char*, kGstGates> kGstGateNames = {"Gi", "Gxpi2", "Gypi2"};

struct GateSet {
  Eigen::Vector4d rho;     // prepared state
  Eigen::Vector4d effect;  // POVM element of outcome 0
  std::array<Eigen::Matrix4d, kGstGates> gates;
};

// PTM of a 2x2 unitary.
Eigen::Matrix4d pauli_transfer_matrix(const Eigen::Matrix2cd& u);
// Entanglement fidelity Tr(R_ideal^T R) / d^2 and its average-gate form.
double process_fidelity(const Eigen::Matrix4d& r, const Eigen::Matrix4d& ideal);
double average_gate_fidelity(const Eigen::Matrix4d& r, const Eigen::Matrix4d& ideal);
// (2 cos^2(eps/2) + 1) / 3
double over_rotation_fidelity(double eps);
// Mean over pure inputs psi of the unsquared state fidelity
// sqrt(<psi_ideal| R(psi) |psi_ideal>), psi_ideal being the ideal output.
// Gauss-Legendre in cos(theta) times a uniform azimuth grid.
double mean_state_fidelity(const Eigen::Matrix4d& r, const Eigen::Matrix4d& ideal);
// Same for a rotation error eps: 1/2 + (1 - s) asinh(sqrt(s / (1 - s))) / (2 sqrt(s)),
// s = sin^2(eps/2), about 1 - eps^2/12.
double over_rotation_state_fidelity(double eps);

// Coherent errors injected into the simulated gates.
struct GateErrors {
  double over_rotation_x = 0.0;  // rad added to X_{pi/2}
  double over_rotation_y = 0.0;  // rad added to Y_{pi/2}
  double detuning = 0.0;         // Hz, static qubit detuning during every gate
};

struct GstOptions {
  int max_depth = 8;             // germ powers 1, 2, 4, ... <= max_depth
  long shots = 0;                // per circuit; 0 is the infinite-shot limit
  int bootstrap = 40;            // resamples for the error bars
  double rabi_frequency = 1e3;   // Hz, sets the pi/2 gate time 1 / (4 f_R)
  std::uint64_t seed = 0;
};

// A circuit is a gate-index string in time order.
using Circuit = std::vector<int>;
std::string circuit_str(const Circuit& c);

const std::vector<Circuit>& gst_fiducials();
const std::vector<Circuit>& gst_germs();
// Sorted, duplicate-free fiducial x germ^power x fiducial list, including
// the bare fiducial pairs. Throws std::invalid_argument if max_depth < 1.
std::vector<Circuit> gst_circuits(int max_depth);

GateSet ideal_gate_set();
GateSet simulated_gate_set(const GateErrors& e, double rabi_frequency);
double outcome0_probability(const GateSet& g, const Circuit& c);

// Linear-inversion reconstruction from outcome-0 probabilities of the
// fiducial pairs and of every fiducial-gate-fiducial circuit.
GateSet linear_inversion(const std::map<Circuit, double>& p0);
// Gauge transform X minimizing the squared distance of X.G.X^-1 (and the
// SPAM vectors) to `target`.
GateSet gauge_optimize(const GateSet& estimate, const GateSet& target);
// Largest absolute entry difference over gates and SPAM vectors.
double gate_set_distance(const GateSet& a, const GateSet& b);

struct GateEstimate {
  std::string name;
  Eigen::Matrix4d ptm;
  double fidelity = 0.0;     // average gate fidelity against the ideal gate
  double uncertainty = 0.0;  // bootstrap standard deviation, 0 at infinite shots
  double state_fidelity = 0.0;  // mean_state_fidelity against the ideal gate
  double state_uncertainty = 0.0;
};

struct GateReport {
  std::vector<GateEstimate> gates;
  GateSet estimate;
  std::size_t circuits = 0;
  long shots = 0;
  std::string qubit;  // "lower|upper" labels
};

// Throws std::invalid_argument if max_depth < 1 or shots < 0.
GateReport gst_lite(const GateErrors& errors, const GstOptions& options);

// {"gates": {"Gxpi2": {"fidelity": ., "uncertainty": ., "state_fidelity": .,
//   "state_uncertainty": ., "ptm": [16 values]}}}
void write_gate_report_json(std::ostream& out, const GateReport& r);

}  // namespace donorsim
