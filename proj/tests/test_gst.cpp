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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "donorsim/gst.hpp"

namespace donorsim {
namespace {

using std::numbers::pi;

// Average gate fidelity between two qubit unitaries, (|Tr U^dag V|^2 + d) / (d (d + 1)).
double unitary_fidelity(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v) {
  return (std::norm((u.adjoint() * v).trace()) + 2.0) / 6.0;
}

Eigen::Matrix2cd rx(double theta) {
  Eigen::Matrix2cd u;
  const std::complex<double> c = std::cos(theta / 2), s(0.0, -std::sin(theta / 2));
  u << c, s, s, c;
  return u;
}

TEST(Ptm, UnitaryPtmIsOrthogonalAndTracePreserving) {
  const Eigen::Matrix4d r = pauli_transfer_matrix(rx(0.7));
  EXPECT_LT((r.transpose() * r - Eigen::Matrix4d::Identity()).norm(), 1e-14);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_LT(r.row(0).tail<3>().norm(), 1e-15);
  // x rotation leaves the x axis and turns y into z
  EXPECT_NEAR(r(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(r(3, 2), std::sin(0.7), 1e-15);
}

TEST(Ptm, FidelityMatchesUnitaryFormula) {
  for (double eps : {0.0, 0.01, 0.1, 0.5}) {
    const double expected = unitary_fidelity(rx(pi / 2), rx(pi / 2 + eps));
    const double got = average_gate_fidelity(pauli_transfer_matrix(rx(pi / 2 + eps)), pauli_transfer_matrix(rx(pi / 2)));
    EXPECT_NEAR(got, expected, 1e-14) << eps;
    EXPECT_NEAR(over_rotation_fidelity(eps), expected, 1e-14);
  }
  EXPECT_NEAR(over_rotation_fidelity(0.1), 0.998334721759, 1e-12);
}

// Mean of |<psi| U^dag V |psi>| over a Fibonacci lattice of Bloch vectors.
double lattice_state_fidelity(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v, int n) {
  const double golden = pi * (3.0 - std::sqrt(5.0));
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double theta = std::acos(z), phi = golden * k;
    Eigen::Vector2cd psi(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi));
    total += std::abs(psi.dot(u.adjoint() * v * psi));
  }
  return total / n;
}

TEST(Ptm, StateFidelityMatchesDirectAverage) {
  for (double eps : {0.01, 0.1, 0.5, 1.5}) {
    const double got = mean_state_fidelity(pauli_transfer_matrix(rx(pi / 2 + eps)), pauli_transfer_matrix(rx(pi / 2)));
    EXPECT_NEAR(got, lattice_state_fidelity(rx(pi / 2), rx(pi / 2 + eps), 200000), 1e-7) << eps;
    EXPECT_NEAR(got, over_rotation_state_fidelity(eps), 1e-12) << eps;
  }
  EXPECT_NEAR(over_rotation_state_fidelity(0.1), 0.999167, 1e-6);
  const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
  EXPECT_NEAR(mean_state_fidelity(id, id), 1.0, 1e-12);
  // depolarizing channel: every input keeps overlap (1 + p) / 2
  Eigen::Matrix4d dep = id * 0.8;
  dep(0, 0) = 1.0;
  EXPECT_NEAR(mean_state_fidelity(dep, id), std::sqrt(0.9), 1e-12);
}

TEST(Circuits, FiducialGermStructure) {
  EXPECT_EQ(gst_fiducials().size(), 6u);
  EXPECT_EQ(gst_germs().size(), 5u);
  const auto c = gst_circuits(8);
  EXPECT_EQ(c.size(), 556u);
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_THROW(gst_circuits(0), std::invalid_argument);
  EXPECT_EQ(circuit_str({}), "{}");
  EXPECT_EQ(circuit_str({1, 2}), "Gxpi2Gypi2");
}

TEST(Circuits, IdealProbabilities) {
  const GateSet g = ideal_gate_set();
  EXPECT_NEAR(outcome0_probability(g, {}), 1.0, 1e-15);
  EXPECT_NEAR(outcome0_probability(g, {1}), 0.5, 1e-15);
  EXPECT_NEAR(outcome0_probability(g, {1, 1}), 0.0, 1e-15);
  EXPECT_NEAR(outcome0_probability(g, {2, 2, 2, 2}), 1.0, 1e-14);
}

TEST(Simulation, ErrorsEnterThePtms) {
  const GateSet g = simulated_gate_set({0.1, 0.0, 0.0}, 1e3);
  EXPECT_LT((g.gates[1] - pauli_transfer_matrix(rx(pi / 2 + 0.1))).norm(), 1e-12);
  EXPECT_LT((g.gates[2] - ideal_gate_set().gates[2]).norm(), 1e-12);
  EXPECT_LT((g.gates[0] - Eigen::Matrix4d::Identity()).norm(), 1e-12);
}

TEST(Reconstruction, NoiselessRecoversInjectedGates) {
  const GateErrors e{0.07, -0.04, 15.0};
  GstOptions o;
  const GateReport r = gst_lite(e, o);
  const GateSet truth = gauge_optimize(simulated_gate_set(e, o.rabi_frequency), r.estimate);
  for (int k = 0; k < kGstGates; ++k) EXPECT_LT((r.estimate.gates[k] - truth.gates[k]).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(gate_set_distance(r.estimate, truth), 1e-6);
  for (const auto& g : r.gates) EXPECT_EQ(g.uncertainty, 0.0);
}

TEST(Reconstruction, OverRotationFidelityAnalytic) {
  GstOptions o;
  const GateReport r = gst_lite({0.1, 0.0, 0.0}, o);
  ASSERT_EQ(r.gates.size(), 3u);
  EXPECT_EQ(r.gates[1].name, "Gxpi2");
  EXPECT_NEAR(r.gates[1].fidelity, over_rotation_fidelity(0.1), 1e-6);
  EXPECT_NEAR(r.gates[1].state_fidelity, over_rotation_state_fidelity(0.1), 1e-6);
  EXPECT_NEAR(r.gates[0].fidelity, 1.0, 1e-6);
  EXPECT_NEAR(r.gates[2].fidelity, 1.0, 1e-6);
}

TEST(Reconstruction, FiniteShotsAndBootstrap) {
  GstOptions o;
  o.shots = 10000;
  o.seed = 5;
  const GateReport r = gst_lite({0.1, 0.0, 0.0}, o);
  EXPECT_NEAR(r.gates[1].fidelity, over_rotation_fidelity(0.1), 1e-3);
  EXPECT_GT(r.gates[1].uncertainty, 0.0);
  EXPECT_LT(r.gates[1].uncertainty, 1e-3);
  EXPECT_NEAR(r.gates[1].state_fidelity, over_rotation_state_fidelity(0.1), 1e-3);
  EXPECT_GT(r.gates[1].state_uncertainty, 0.0);
  const GateReport again = gst_lite({0.1, 0.0, 0.0}, o);
  EXPECT_EQ(again.gates[1].fidelity, r.gates[1].fidelity);
}

TEST(Reconstruction, RejectsBadOptions) {
  GstOptions o;
  o.max_depth = 0;
  EXPECT_THROW(gst_lite({}, o), std::invalid_argument);
  o.max_depth = 8;
  o.shots = -1;
  EXPECT_THROW(gst_lite({}, o), std::invalid_argument);
}

TEST(Report, JsonLayout) {
  GstOptions o;
  o.max_depth = 2;
  const GateReport r = gst_lite({0.1, 0.0, 0.0}, o);
  std::stringstream ss;
  write_gate_report_json(ss, r);
  const auto j = nlohmann::json::parse(ss.str());
  EXPECT_EQ(j.at("qubit"), "m-5/2|m-7/2");
  EXPECT_EQ(j.at("circuits").get<std::size_t>(), gst_circuits(2).size());
  EXPECT_EQ(j.at("shots_per_circuit"), 0);
  for (const char* name : kGstGateNames) {
    ASSERT_TRUE(j.at("gates").contains(name));
    EXPECT_EQ(j.at("gates").at(name).at("ptm").size(), 16u);
    EXPECT_TRUE(j.at("gates").at(name).contains("state_fidelity"));
  }
}

}  // namespace
}  // namespace donorsim
