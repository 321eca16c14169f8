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

#include "donorsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace donorsim {

using std::numbers::pi;

QuantumState::QuantumState(CVector amplitudes) : psi_(std::move(amplitudes)) {
  if (psi_.size() == 0 || std::abs(psi_.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("state vector must have unit norm");
}

QuantumState QuantumState::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw std::invalid_argument("basis index out of range");
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return QuantumState(std::move(v));
}

namespace {

double amplitude_factor(const DriveSpec& spec, const DeviceParams& p, HalfInt m_s) {
  check_compatible(spec.mechanism, spec.charge_state);
  double f = 0.0;
  switch (spec.mechanism) {
    case Mechanism::NMR:
      f = p.gamma_n * spec.amplitude;
      if (spec.charge_state == ChargeState::Neutral) {
        // admixed electron moment adds (or subtracts, electron up) A/(2 gamma_n B0)
        const double r = p.a / (2.0 * p.nuclear_zeeman());
        f *= std::abs(m_s == kHalf ? 1.0 - r : 1.0 + r);
      }
      break;
    case Mechanism::ESR:
      f = p.gamma_e * spec.amplitude;
      break;
    case Mechanism::NER1:
    case Mechanism::NER2:
    case Mechanism::EDSR:
      f = spec.amplitude;
      break;
  }
  return f * spec.calibration;
}

}  // namespace

double amplitude_factor(const DriveSpec& spec, const DeviceParams& p) {
  return amplitude_factor(spec, p, -kHalf);
}

double rabi_rate(const Transition& t, const DriveSpec& spec, const DeviceParams& p) {
  if (spec.mechanism != t.mechanism)
    throw std::invalid_argument(std::string("drive mechanism ") + to_string(spec.mechanism) +
                                " does not match transition mechanism " + to_string(t.mechanism));
  if (spec.charge_state != t.charge_state())
    throw std::invalid_argument("drive charge state does not match the transition");
  return amplitude_factor(spec, p, t.from.m_s) * t.matrix_element;
}

Eigen::Matrix2cd rwa_unitary(double detuning, double f_rabi, double phase, double duration) {
  const double omega = std::hypot(f_rabi, detuning);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  if (omega == 0.0) return u;
  const double c = std::cos(pi * omega * duration);
  const double s = std::sin(pi * omega * duration);
  const double nx = f_rabi * std::cos(phase) / omega;
  const double ny = f_rabi * std::sin(phase) / omega;
  const double nz = detuning / omega;
  const Complex i(0.0, 1.0);
  u(0, 0) = c - i * s * nz;
  u(1, 1) = c + i * s * nz;
  u(0, 1) = -i * s * Complex(nx, -ny);
  u(1, 0) = -i * s * Complex(nx, ny);
  return u;
}

QuantumState evolve_rwa(const QuantumState& psi0, double detuning, double f_rabi, double phase,
                        double duration) {
  if (psi0.dim() != 2) throw std::invalid_argument("evolve_rwa acts on a two-level state");
  CVector out = rwa_unitary(detuning, f_rabi, phase, duration) * psi0.amplitudes();
  out.normalize();
  return QuantumState(std::move(out));
}

double rabi_flip_probability(double detuning, double f_rabi, double duration) {
  const double w2 = f_rabi * f_rabi + detuning * detuning;
  if (w2 == 0.0) return 0.0;
  const double s = std::sin(pi * std::sqrt(w2) * duration);
  return f_rabi * f_rabi / w2 * s * s;
}

DriveTone make_tone(const DriveSpec& spec, const DeviceParams& p, double t_on) {
  spec.validate();
  if (!std::holds_alternative<RectangularEnvelope>(spec.envelope))
    throw std::invalid_argument("make_tone handles rectangular envelopes only");
  DriveTone tone;
  tone.v = drive_operator(spec, p) * spec.calibration;
  tone.frequency = spec.frequency;
  // axis angle phi in the rotating frame is lab phase -phi
  tone.phase = -spec.phase;
  tone.t_on = t_on;
  tone.t_off = t_on + spec.duration;
  return tone;
}

double max_step_for(const std::vector<DriveTone>& drives) {
  double fmax = 0.0;
  for (const auto& d : drives) fmax = std::max(fmax, std::abs(d.frequency));
  if (fmax == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (20.0 * fmax);
}

Trajectory evolve_full(const HermitianOperator& h0, const std::vector<DriveTone>& drives,
                       const QuantumState& psi0, const std::vector<double>& sample_times,
                       double max_step) {
  if (psi0.dim() != h0.dim()) throw std::invalid_argument("state and Hamiltonian dimensions differ");
  for (const auto& d : drives)
    if (d.v.dim() != h0.dim()) throw std::invalid_argument("drive and Hamiltonian dimensions differ");
  if (!(max_step > 0)) throw std::invalid_argument("time step must be positive");
  if (max_step > max_step_for(drives) * (1.0 + 1e-12))
    throw std::invalid_argument("time step too coarse: needs dt <= 1/(20 f_max)");
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (sample_times[k] < 0 || (k > 0 && sample_times[k] < sample_times[k - 1]))
      throw std::invalid_argument("sample times must be ascending and non-negative");
  }

  // Propagate in the interaction picture of the static H0. Each step takes the
  // first-order Magnus exponent with the drive integrated in closed form.
  Eigen::SelfAdjointEigenSolver<CMatrix> es0(h0.matrix());
  const CMatrix& w = es0.eigenvectors();
  const Eigen::VectorXd& e = es0.eigenvalues();
  const Eigen::Index n_dim = h0.dim();
  std::vector<CMatrix> v_eig;
  for (const auto& d : drives) v_eig.push_back(w.adjoint() * d.v.matrix() * w);
  const Complex i(0.0, 1.0);
  // integral of exp(i k t) over [lo, hi]
  auto phase_integral = [&](double k, double lo, double hi) {
    const double half = 0.5 * (hi - lo), x = k * half;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return std::exp(i * (k * (lo + half))) * (2.0 * half * sinc);
  };

  Trajectory traj;
  CVector c = w.adjoint() * psi0.amplitudes();  // interaction-picture amplitudes at t = 0
  double t = 0.0;
  CMatrix m(n_dim, n_dim);
  for (double target : sample_times) {
    const double span = target - t;
    const long n = span > 0 ? static_cast<long>(std::ceil(span / max_step - 1e-9)) : 0;
    const double dt = n > 0 ? span / static_cast<double>(n) : 0.0;
    for (long s = 0; s < n; ++s) {
      const double a = t + s * dt, b = a + dt;
      m.setZero();
      bool active = false;
      for (std::size_t k = 0; k < drives.size(); ++k) {
        const auto& d = drives[k];
        const double lo = std::max(a, d.t_on), hi = std::min(b, d.t_off);
        if (hi <= lo) continue;
        active = true;
        const double om = 2.0 * pi * d.frequency;
        const Complex ep = std::exp(i * d.phase), em = std::conj(ep);
        for (Eigen::Index r = 0; r < n_dim; ++r)
          for (Eigen::Index q = r; q < n_dim; ++q) {
            const double gap = 2.0 * pi * (e(r) - e(q));
            const Complex f = 0.5 * (ep * phase_integral(gap + om, lo, hi) + em * phase_integral(gap - om, lo, hi));
            m(r, q) += v_eig[k](r, q) * f;
            if (q != r) m(q, r) = std::conj(m(r, q));
          }
      }
      if (!active) continue;
      for (Eigen::Index r = 0; r < n_dim; ++r) m(r, r) = m(r, r).real();
      Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
      const Eigen::VectorXcd ph = (-2.0 * pi * es.eigenvalues()).unaryExpr([&](double x) { return std::exp(i * x); });
      c = es.eigenvectors() * (ph.asDiagonal() * (es.eigenvectors().adjoint() * c));
    }
    t = target;
    const Eigen::VectorXcd back = (-2.0 * pi * t * e).unaryExpr([&](double x) { return std::exp(i * x); });
    CVector psi = w * back.cwiseProduct(c);
    traj.times.push_back(t);
    traj.states.emplace_back(std::move(psi));
  }
  return traj;
}

double landau_zener_probability(double f_rabi, double rate) {
  if (f_rabi == 0.0) return 0.0;
  if (!(rate > 0)) return 1.0;
  return 1.0 - std::exp(-pi * pi * f_rabi * f_rabi / rate);
}

double adiabaticity(double f_rabi, double rate) {
  if (!(rate > 0)) return std::numeric_limits<double>::infinity();
  return f_rabi * f_rabi / rate;
}

double adiabatic_inversion(double f_rabi, double depth, double duration) {
  if (!(depth > 0) || !(duration > 0)) throw std::invalid_argument("chirp needs positive depth and duration");
  return landau_zener_probability(f_rabi, 2.0 * depth / duration);
}

double adiabatic_inversion(const Transition& t, double center, double depth, double duration,
                           double f_rabi) {
  if (std::abs(t.frequency - center) > depth) return 0.0;
  return adiabatic_inversion(f_rabi, depth, duration);
}

double adiabatic_inversion_numeric(double f_rabi, double depth, double duration, double offset, int steps) {
  if (steps < 1 || !(duration > 0)) throw std::invalid_argument("bad chirp integration grid");
  const double dt = duration / steps;
  Eigen::Vector2cd psi(1.0, 0.0);
  for (int k = 0; k < steps; ++k) {
    const double tm = (k + 0.5) * dt;
    const double detuning = -depth + 2.0 * depth * tm / duration - offset;
    psi = rwa_unitary(detuning, f_rabi, 0.0, dt) * psi;
  }
  return std::norm(psi(1));
}

}  // namespace donorsim
