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

#include "donorsim/gst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

#include "donorsim/dynamics.hpp"
#include "donorsim/sequence.hpp"

namespace donorsim {

using std::numbers::pi;

namespace {

std::array<Eigen::Matrix2cd, 4> paulis() {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity(), x, y, z;
  x << 0, 1, 1, 0;
  y << 0, -i, i, 0;
  z << 1, 0, 0, -1;
  return {id, x, y, z};
}

Eigen::Vector4d zero_state() { return Eigen::Vector4d(1, 0, 0, 1) / std::sqrt(2.0); }

// Operator of a circuit: later gates multiply from the left.
Eigen::Matrix4d circuit_matrix(const GateSet& g, const Circuit& c) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (int k : c) m = g.gates.at(k) * m;
  return m;
}

Circuit concat(const Circuit& a, const Circuit& b) {
  Circuit out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Eigen::Matrix4d unflatten(const Eigen::VectorXd& v) {
  Eigen::Matrix4d x;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) x(r, c) = v(4 * r + c);
  return x;
}

GateSet transform(const GateSet& g, const Eigen::Matrix4d& x) {
  const Eigen::Matrix4d xi = x.inverse();
  GateSet out;
  for (int k = 0; k < kGstGates; ++k) out.gates[k] = x * g.gates[k] * xi;
  out.rho = x * g.rho;
  out.effect = xi.transpose() * g.effect;
  return out;
}

struct GaugeResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const GateSet* estimate;
  const GateSet* target;

  int inputs() const { return 16; }
  int values() const { return 16 * kGstGates + 8; }
  int operator()(const Eigen::VectorXd& q, Eigen::VectorXd& r) const {
    const Eigen::Matrix4d x = unflatten(q);
    if (std::abs(x.determinant()) < 1e-12) {
      r.setConstant(1e6);
      return 0;
    }
    const GateSet g = transform(*estimate, x);
    int k = 0;
    for (int n = 0; n < kGstGates; ++n)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(k++) = g.gates[n](i, j) - target->gates[n](i, j);
    for (int i = 0; i < 4; ++i) r(k++) = g.rho(i) - target->rho(i);
    for (int i = 0; i < 4; ++i) r(k++) = g.effect(i) - target->effect(i);
    return 0;
  }
};

Eigen::MatrixXd fiducial_rows(const GateSet& g) {
  const auto& f = gst_fiducials();
  Eigen::MatrixXd a(f.size(), 4);
  for (std::size_t j = 0; j < f.size(); ++j) a.row(j) = g.effect.transpose() * circuit_matrix(g, f[j]);
  return a;
}

}  // namespace

Eigen::Matrix4d pauli_transfer_matrix(const Eigen::Matrix2cd& u) {
  const auto p = paulis();
  Eigen::Matrix4d r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = 0.5 * (p[i] * u * p[j] * u.adjoint()).trace().real();
  return r;
}

double process_fidelity(const Eigen::Matrix4d& r, const Eigen::Matrix4d& ideal) {
  return (ideal.transpose() * r).trace() / 4.0;
}

double average_gate_fidelity(const Eigen::Matrix4d& r, const Eigen::Matrix4d& ideal) {
  return (2.0 * process_fidelity(r, ideal) + 1.0) / 3.0;
}

double over_rotation_fidelity(double eps) {
  const double c = std::cos(eps / 2.0);
  return (2.0 * c * c + 1.0) / 3.0;
}

double mean_state_fidelity(const Eigen::Matrix4d& r, const Eigen::Matrix4d& ideal) {
  constexpr int kPolar = 24, kAzimuth = 48;
  // Gauss-Legendre nodes by Newton iteration from the Chebyshev guesses
  static const auto nodes = [] {
    std::array<std::pair<double, double>, kPolar> out{};
    for (int k = 0; k < kPolar; ++k) {
      double x = std::cos(pi * (k + 0.75) / (kPolar + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        const double p0 = std::legendre(kPolar, x), p1 = std::legendre(kPolar - 1, x);
        dp = kPolar * (x * p0 - p1) / (x * x - 1.0);
        const double step = p0 / dp;
        x -= step;
        if (std::abs(step) < 1e-16) break;
      }
      const double p0 = std::legendre(kPolar, x), p1 = std::legendre(kPolar - 1, x);
      dp = kPolar * (x * p0 - p1) / (x * x - 1.0);
      out[static_cast<std::size_t>(k)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return out;
  }();
  const double h = 1.0 / std::sqrt(2.0);
  double total = 0.0;
  for (const auto& [c, w] : nodes) {
    const double sn = std::sqrt(1.0 - c * c);
    for (int j = 0; j < kAzimuth; ++j) {
      const double phi = 2.0 * pi * j / kAzimuth;
      const Eigen::Vector4d rho(h, h * sn * std::cos(phi), h * sn * std::sin(phi), h * c);
      const double overlap = (ideal * rho).dot(r * rho);
      total += w * std::sqrt(std::max(overlap, 0.0));
    }
  }
  return total / (2.0 * kAzimuth);
}

double over_rotation_state_fidelity(double eps) {
  const double s = std::pow(std::sin(eps / 2.0), 2);
  if (s == 0.0) return 1.0;
  if (s >= 1.0) return 0.5;
  return 0.5 + (1.0 - s) * std::asinh(std::sqrt(s / (1.0 - s))) / (2.0 * std::sqrt(s));
}

std::string circuit_str(const Circuit& c) {
  if (c.empty()) return "{}";
  std::string s;
  for (int k : c) s += kGstGateNames.at(k);
  return s;
}

const std::vector<Circuit>& gst_fiducials() {
  static const std::vector<Circuit> f = {{}, {1}, {2}, {1, 1, 1}, {2, 2, 2}, {1, 1}};
  return f;
}

const std::vector<Circuit>& gst_germs() {
  static const std::vector<Circuit> g = {{0}, {1}, {2}, {1, 2}, {1, 1, 2}};
  return g;
}

std::vector<Circuit> gst_circuits(int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("GST depth must be at least 1");
  std::set<Circuit> out;
  const auto& fid = gst_fiducials();
  for (const auto& a : fid)
    for (const auto& b : fid) {
      out.insert(concat(a, b));
      for (int k = 0; k < kGstGates; ++k) out.insert(concat(concat(a, Circuit{k}), b));
      for (const auto& germ : gst_germs())
        for (int power = 1; power <= max_depth; power *= 2) {
          Circuit body;
          for (int r = 0; r < power; ++r) body = concat(body, germ);
          out.insert(concat(concat(a, body), b));
        }
    }
  return {out.begin(), out.end()};
}

GateSet ideal_gate_set() { return simulated_gate_set(GateErrors{}, 1.0); }

GateSet simulated_gate_set(const GateErrors& e, double rabi_frequency) {
  if (!(rabi_frequency > 0)) throw std::invalid_argument("Rabi frequency must be positive");
  const double t_gate = 1.0 / (4.0 * rabi_frequency);
  // over-rotation by eps stretches the pi/2 angle by eps / (pi/2)
  const double fx = rabi_frequency * (1.0 + e.over_rotation_x / (pi / 2));
  const double fy = rabi_frequency * (1.0 + e.over_rotation_y / (pi / 2));
  GateSet g;
  g.rho = zero_state();
  g.effect = zero_state();
  g.gates[0] = pauli_transfer_matrix(rwa_unitary(e.detuning, 0.0, 0.0, t_gate));
  g.gates[1] = pauli_transfer_matrix(rwa_unitary(e.detuning, fx, 0.0, t_gate));
  g.gates[2] = pauli_transfer_matrix(rwa_unitary(e.detuning, fy, pi / 2, t_gate));
  return g;
}

double outcome0_probability(const GateSet& g, const Circuit& c) {
  return std::clamp(g.effect.dot(circuit_matrix(g, c) * g.rho), 0.0, 1.0);
}

GateSet linear_inversion(const std::map<Circuit, double>& p0) {
  const auto& fid = gst_fiducials();
  const auto n = static_cast<Eigen::Index>(fid.size());
  auto lookup = [&](const Circuit& c) {
    auto it = p0.find(c);
    if (it == p0.end()) throw std::invalid_argument("missing circuit " + circuit_str(c));
    return it->second;
  };
  // rows: measurement fiducial, columns: preparation fiducial
  Eigen::MatrixXd gram(n, n);
  std::array<Eigen::MatrixXd, kGstGates> m;
  for (auto& mk : m) mk.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      gram(j, i) = lookup(concat(fid[i], fid[j]));
      for (int k = 0; k < kGstGates; ++k) m[k](j, i) = lookup(concat(concat(fid[i], Circuit{k}), fid[j]));
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector4d s = svd.singularValues().head<4>();
  if (!(s(3) > 1e-9)) throw std::runtime_error("fiducial Gram matrix is rank deficient");
  const Eigen::Vector4d rs = s.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd u = svd.matrixU().leftCols(4);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(4);
  // A' = U S^1/2 and B' = S^1/2 V^T, so pinv(A') = S^-1/2 U^T, pinv(B') = V S^-1/2
  const Eigen::MatrixXd a_pinv = rs.asDiagonal() * u.transpose();
  const Eigen::MatrixXd b_pinv = v * rs.asDiagonal();

  // the empty fiducial is first, so column 0 and row 0 of the Gram matrix
  // carry the bare prepared state and the bare effect
  GateSet g;
  g.rho = a_pinv * gram.col(0);
  g.effect = (gram.row(0) * b_pinv).transpose();
  for (int k = 0; k < kGstGates; ++k) g.gates[k] = a_pinv * m[k] * b_pinv;

  // express the estimate in a basis close to the target frame
  const Eigen::MatrixXd a_ideal = fiducial_rows(ideal_gate_set());
  const Eigen::MatrixXd a_prime = u * s.cwiseSqrt().asDiagonal();
  const Eigen::Matrix4d x0 = a_ideal.completeOrthogonalDecomposition().pseudoInverse() * a_prime;
  return transform(g, x0);
}

GateSet gauge_optimize(const GateSet& estimate, const GateSet& target) {
  GaugeResiduals f{&estimate, &target};
  Eigen::NumericalDiff<GaugeResiduals> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<GaugeResiduals>> lm(nd);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-16;
  lm.parameters.maxfev = 20000;
  // seed from the linear problem X.G = T.X, X.rho = rho_t, e = X^T.e_t,
  // unknowns ordered as vec(X) column-major
  const int rows = 16 * kGstGates + 8;
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(rows, 16);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  int row = 0;
  for (int k = 0; k < kGstGates; ++k) {
    const Eigen::Matrix4d& g = estimate.gates[k];
    const Eigen::Matrix4d& t = target.gates[k];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j, ++row)
        for (int m = 0; m < 4; ++m) {
          lhs(row, i + 4 * m) += g(m, j);
          lhs(row, m + 4 * j) -= t(i, m);
        }
  }
  for (int r = 0; r < 4; ++r, ++row) {
    for (int c = 0; c < 4; ++c) lhs(row, r + 4 * c) = estimate.rho(c);
    rhs(row) = target.rho(r);
  }
  for (int c = 0; c < 4; ++c, ++row) {
    for (int r = 0; r < 4; ++r) lhs(row, r + 4 * c) = target.effect(r);
    rhs(row) = estimate.effect(c);
  }
  const Eigen::VectorXd vx = lhs.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd q(16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) q(4 * r + c) = vx(r + 4 * c);
  if (!q.allFinite() || std::abs(unflatten(q).determinant()) < 1e-9) {
    q.setZero();
    for (int i = 0; i < 4; ++i) q(5 * i) = 1.0;
  }
  lm.minimize(q);
  return transform(estimate, unflatten(q));
}

double gate_set_distance(const GateSet& a, const GateSet& b) {
  double d = std::max((a.rho - b.rho).cwiseAbs().maxCoeff(), (a.effect - b.effect).cwiseAbs().maxCoeff());
  for (int k = 0; k < kGstGates; ++k) d = std::max(d, (a.gates[k] - b.gates[k]).cwiseAbs().maxCoeff());
  return d;
}

namespace {

// average gate fidelities, then mean state fidelities
std::array<double, 2 * kGstGates> fidelities(const GateSet& est, const GateSet& ideal) {
  std::array<double, 2 * kGstGates> f{};
  for (int k = 0; k < kGstGates; ++k) {
    f[k] = std::clamp(average_gate_fidelity(est.gates[k], ideal.gates[k]), 0.0, 1.0);
    f[kGstGates + k] = std::clamp(mean_state_fidelity(est.gates[k], ideal.gates[k]), 0.0, 1.0);
  }
  return f;
}

GateSet estimate_from(const std::map<Circuit, double>& p0, const GateSet& ideal) {
  return gauge_optimize(linear_inversion(p0), ideal);
}

std::map<Circuit, double> sample(const std::map<Circuit, double>& p, long shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<Circuit, double> out;
  for (const auto& [c, pk] : p) {
    std::binomial_distribution<long> draw(shots, pk);
    out[c] = static_cast<double>(draw(rng)) / static_cast<double>(shots);
  }
  return out;
}

}  // namespace

GateReport gst_lite(const GateErrors& errors, const GstOptions& o) {
  if (o.max_depth < 1) throw std::invalid_argument("GST depth must be at least 1");
  if (o.shots < 0) throw std::invalid_argument("shot count must be non-negative");
  if (o.shots > 0 && o.bootstrap < 2) throw std::invalid_argument("bootstrap needs at least two resamples");

  const GateSet truth = simulated_gate_set(errors, o.rabi_frequency);
  const GateSet ideal = ideal_gate_set();
  const std::vector<Circuit> circuits = gst_circuits(o.max_depth);
  std::map<Circuit, double> exact;
  for (const auto& c : circuits) exact[c] = outcome0_probability(truth, c);

  const std::map<Circuit, double> data = o.shots > 0 ? sample(exact, o.shots, mix_seed(o.seed, 0)) : exact;

  GateReport r;
  r.estimate = estimate_from(data, ideal);
  r.circuits = circuits.size();
  r.shots = o.shots;
  r.qubit = "m-5/2|m-7/2";
  const auto f = fidelities(r.estimate, ideal);

  std::array<double, 2 * kGstGates> sd{};
  if (o.shots > 0) {
    std::array<double, 2 * kGstGates> mean{}, m2{};
    for (int b = 0; b < o.bootstrap; ++b) {
      const auto fb = fidelities(estimate_from(sample(data, o.shots, mix_seed(o.seed, b + 1)), ideal), ideal);
      for (std::size_t k = 0; k < fb.size(); ++k) {
        const double d = fb[k] - mean[k];
        mean[k] += d / (b + 1);
        m2[k] += d * (fb[k] - mean[k]);
      }
    }
    for (std::size_t k = 0; k < sd.size(); ++k) sd[k] = std::sqrt(m2[k] / (o.bootstrap - 1));
  }
  for (int k = 0; k < kGstGates; ++k)
    r.gates.push_back({kGstGateNames[k], r.estimate.gates[k], f[k], sd[k], f[kGstGates + k], sd[kGstGates + k]});
  return r;
}

void write_gate_report_json(std::ostream& out, const GateReport& r) {
  nlohmann::ordered_json j;
  j["qubit"] = r.qubit;
  j["circuits"] = r.circuits;
  j["shots_per_circuit"] = r.shots;
  for (const auto& g : r.gates) {
    std::vector<double> ptm;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) ptm.push_back(std::abs(g.ptm(i, k)) < 1e-15 ? 0.0 : g.ptm(i, k));
    j["gates"][g.name] = {{"fidelity", g.fidelity},
                          {"uncertainty", g.uncertainty},
                          {"state_fidelity", g.state_fidelity},
                          {"state_uncertainty", g.state_uncertainty},
                          {"ptm", ptm}};
  }
  out << j.dump(2) << '\n';
}

}  // namespace donorsim
