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

#include "donorsim/hamiltonians.hpp"

#include <cmath>
#include <stdexcept>

namespace donorsim {

QuadrupoleTensor::QuadrupoleTensor(const Eigen::Matrix3d& q) : q_(q) {
  const double scale = q.cwiseAbs().maxCoeff();
  if (!q.allFinite() || (q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("quadrupole tensor must be real symmetric");
  q_ = 0.5 * (q + q.transpose());
}

QuadrupoleTensor QuadrupoleTensor::axial(double fq) {
  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  q(0, 0) = fq / 6.0;
  q(1, 1) = fq / 6.0;
  q(2, 2) = -fq / 3.0;
  return QuadrupoleTensor(q);
}

bool QuadrupoleTensor::is_traceless(double rel_tol) const {
  const double scale = q_.cwiseAbs().maxCoeff();
  return std::abs(q_.trace()) <= rel_tol * scale;
}

namespace {

CMatrix quadrupole_matrix(const SpinOperatorSet& s, const QuadrupoleTensor& q) {
  const CMatrix* ops[3] = {&s.ix, &s.iy, &s.iz};
  CMatrix h = CMatrix::Zero(s.dim, s.dim);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (q.matrix()(a, b) != 0.0) h += q.matrix()(a, b) * (*ops[a]) * (*ops[b]);
  return h;
}

struct NeutralOps {
  SpinOperatorSet e, n;
  CMatrix sx, sy, sz, ix, iy, iz;
};

NeutralOps neutral_ops(HalfInt nuclear_spin) {
  NeutralOps o{spin_operators(kHalf), spin_operators(nuclear_spin), {}, {}, {}, {}, {}, {}};
  const CMatrix ie = CMatrix::Identity(2, 2);
  const CMatrix in = CMatrix::Identity(o.n.dim, o.n.dim);
  o.sx = kron(o.e.ix, in);
  o.sy = kron(o.e.iy, in);
  o.sz = kron(o.e.iz, in);
  o.ix = kron(ie, o.n.ix);
  o.iy = kron(ie, o.n.iy);
  o.iz = kron(ie, o.n.iz);
  return o;
}

}  // namespace

HermitianOperator h_ionised(const DeviceParams& p, const QuadrupoleTensor& q) {
  const SpinOperatorSet s = spin_operators(p.nuclear_spin);
  CMatrix h = -p.b0 * p.gamma_n * s.iz + quadrupole_matrix(s, q);
  return HermitianOperator(std::move(h));
}

HermitianOperator h_ionised(const DeviceParams& p) {
  return h_ionised(p, QuadrupoleTensor::axial(p.fq_plus));
}

HermitianOperator h_neutral(const DeviceParams& p, const QuadrupoleTensor& q) {
  const NeutralOps o = neutral_ops(p.nuclear_spin);
  CMatrix h = p.b0 * (-p.gamma_n * o.iz + p.gamma_e * o.sz) +
              p.a * (o.sx * o.ix + o.sy * o.iy + o.sz * o.iz) +
              kron(CMatrix::Identity(2, 2), quadrupole_matrix(o.n, q));
  return HermitianOperator(std::move(h));
}

HermitianOperator h_neutral(const DeviceParams& p) {
  return h_neutral(p, QuadrupoleTensor::axial(p.fq_neutral));
}

HermitianOperator h_neutral_secular(const DeviceParams& p, const QuadrupoleTensor& q) {
  const NeutralOps o = neutral_ops(p.nuclear_spin);
  CMatrix h = p.b0 * (-p.gamma_n * o.iz + p.gamma_e * o.sz) + p.a * (o.sz * o.iz) +
              kron(CMatrix::Identity(2, 2), quadrupole_matrix(o.n, q));
  return HermitianOperator(std::move(h));
}

HermitianOperator h_static(const DeviceParams& p, ChargeState c) {
  return c == ChargeState::Ionised ? h_ionised(p) : h_neutral(p);
}

std::vector<BasisLabel> basis_labels(const DeviceParams& p, ChargeState c) {
  return product_basis_labels(p.nuclear_spin, c == ChargeState::Neutral);
}

void DriveSpec::validate() const {
  if (!(duration > 0)) throw std::invalid_argument("drive duration must be positive");
  if (!(amplitude >= 0)) throw std::invalid_argument("drive amplitude must be non-negative");
  if (!std::isfinite(frequency) || !std::isfinite(phase))
    throw std::invalid_argument("drive frequency and phase must be finite");
  if (!(calibration >= 0)) throw std::invalid_argument("drive calibration must be non-negative");
  if (const auto* c = std::get_if<AdiabaticChirp>(&envelope)) {
    if (!(c->depth > 0) || !(c->rate > 0))
      throw std::invalid_argument("adiabatic chirp needs positive depth and rate");
    if (std::abs(c->rate * duration - 2.0 * c->depth) > 1e-9 * 2.0 * c->depth)
      throw std::invalid_argument("adiabatic chirp: rate * duration must equal 2 * depth");
  }
}

void check_compatible(Mechanism m, ChargeState c) {
  const bool needs_neutral = m == Mechanism::ESR || m == Mechanism::EDSR;
  const bool needs_ionised = m == Mechanism::NER1 || m == Mechanism::NER2;
  if (needs_neutral && c != ChargeState::Neutral)
    throw std::invalid_argument(std::string(to_string(m)) + " requires the neutral donor");
  if (needs_ionised && c != ChargeState::Ionised)
    throw std::invalid_argument(std::string(to_string(m)) + " requires the ionised donor");
}

HermitianOperator unit_drive_operator(Mechanism m, ChargeState c, HalfInt nuclear_spin,
                                      const QuadrupoleQuadratures& w) {
  check_compatible(m, c);
  const SpinOperatorSet n = spin_operators(nuclear_spin);
  auto embed = [&](const CMatrix& nuc) {
    if (c == ChargeState::Ionised) return nuc;
    return kron(CMatrix::Identity(2, 2), nuc);
  };
  switch (m) {
    case Mechanism::NMR:
      return HermitianOperator(embed(n.ix));
    case Mechanism::NER1:
      return HermitianOperator(embed(w.w_a * (n.ix * n.iz + n.iz * n.ix) +
                                     w.w_b * (n.iy * n.iz + n.iz * n.iy)));
    case Mechanism::NER2:
      return HermitianOperator(embed(w.w_a * (n.ix * n.ix - n.iy * n.iy) +
                                     w.w_b * (n.ix * n.iy + n.iy * n.ix)));
    case Mechanism::ESR:
    case Mechanism::EDSR: {
      const NeutralOps o = neutral_ops(nuclear_spin);
      if (m == Mechanism::ESR) return HermitianOperator(o.sx);
      return HermitianOperator(o.sx * o.ix + o.sy * o.iy);
    }
  }
  throw std::invalid_argument("unknown mechanism");
}

HermitianOperator drive_operator(const DriveSpec& spec, const DeviceParams& p) {
  check_compatible(spec.mechanism, spec.charge_state);
  if (!(spec.amplitude >= 0)) throw std::invalid_argument("drive amplitude must be non-negative");
  const Mechanism m = spec.mechanism;
  if (m == Mechanism::NMR || m == Mechanism::ESR) {
    if (spec.charge_state == ChargeState::Ionised) {
      const SpinOperatorSet n = spin_operators(p.nuclear_spin);
      return HermitianOperator(CMatrix(-spec.amplitude * p.gamma_n * n.ix));
    }
    const NeutralOps o = neutral_ops(p.nuclear_spin);
    return HermitianOperator(CMatrix(spec.amplitude * (p.gamma_e * o.sx - p.gamma_n * o.ix)));
  }
  return unit_drive_operator(m, spec.charge_state, p.nuclear_spin, spec.quadratures) *
         spec.amplitude;
}

HermitianOperator hyperfine_dispersive_operator(double delta_a, HalfInt nuclear_spin) {
  const NeutralOps o = neutral_ops(nuclear_spin);
  return HermitianOperator(CMatrix(delta_a * o.sz * o.iz));
}

}  // namespace donorsim
