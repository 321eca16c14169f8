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

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "donorsim/device_params.hpp"
#include "donorsim/spin_algebra.hpp"

namespace donorsim {

// Nuclear quadrupole coupling H_Q = sum_ab Q_ab I_a I_b, Hz.
class QuadrupoleTensor {
 public:
  QuadrupoleTensor() : q_(Eigen::Matrix3d::Zero()) {}
  // Throws std::invalid_argument unless symmetric.
  explicit QuadrupoleTensor(const Eigen::Matrix3d& q);

  // Traceless axial tensor diag(fq/6, fq/6, -fq/3). Its Iz^2 part is -fq/2,
  // so E(m-1) - E(m) picks up exactly (m - 1/2) fq.
  static QuadrupoleTensor axial(double fq);

  const Eigen::Matrix3d& matrix() const { return q_; }
  double trace() const { return q_.trace(); }
  bool is_traceless(double rel_tol = 1e-9) const;

 private:
  Eigen::Matrix3d q_;
};

// H = -gamma_n B0 Iz + sum Q_ab Ia Ib, 2I+1 levels.
HermitianOperator h_ionised(const DeviceParams& p, const QuadrupoleTensor& q);
HermitianOperator h_ionised(const DeviceParams& p);

// H = B0 (-gamma_n Iz + gamma_e Sz) + A S.I + sum Q_ab Ia Ib, electron factor first.
HermitianOperator h_neutral(const DeviceParams& p, const QuadrupoleTensor& q);
HermitianOperator h_neutral(const DeviceParams& p);
// Same with the hyperfine reduced to A Sz Iz.
HermitianOperator h_neutral_secular(const DeviceParams& p, const QuadrupoleTensor& q);

HermitianOperator h_static(const DeviceParams& p, ChargeState c);
std::vector<BasisLabel> basis_labels(const DeviceParams& p, ChargeState c);

struct RectangularEnvelope {};
// Linear sweep from f - depth to f + depth; rate * duration = 2 depth.
struct AdiabaticChirp {
  double depth = 0.0;  // Hz
  double rate = 0.0;   // Hz/s

  static AdiabaticChirp over(double depth, double duration) { return {depth, 2.0 * depth / duration}; }
};
using Envelope = std::variant<RectangularEnvelope, AdiabaticChirp>;

// Relative weights of the two quadratures of each electric quadrupole drive.
// NER1: w_a (IxIz+IzIx) + w_b (IyIz+IzIy); NER2: w_a (Ix^2-Iy^2) + w_b (IxIy+IyIx).
struct QuadrupoleQuadratures {
  double w_a = 1.0;
  double w_b = 0.0;
};

struct DriveSpec {
  Mechanism mechanism = Mechanism::NMR;
  ChargeState charge_state = ChargeState::Ionised;
  double frequency = 0.0;   // Hz
  // B1 in T for NMR/ESR; dQ in Hz for NER; dA in Hz for EDSR
  double amplitude = 0.0;
  // rotating-frame axis angle, rad (0 drives about x, pi/2 about y)
  double phase = 0.0;
  double duration = 0.0;    // s
  Envelope envelope = RectangularEnvelope{};
  QuadrupoleQuadratures quadratures;
  // multiplies the predicted Rabi rate, 1 for an ideal drive line
  double calibration = 1.0;

  void validate() const;
};

// Throws std::invalid_argument for mechanism / charge-state combinations that
// have no drive term (ESR/EDSR on the ionised donor, NER on the neutral one).
void check_compatible(Mechanism m, ChargeState c);

// Amplitude operator V with H(t) = H_static + V cos(2 pi f t + phi).
// The magnetic drive on the neutral donor couples to both spins,
// B1 (gamma_e Sx - gamma_n Ix).
HermitianOperator drive_operator(const DriveSpec& spec, const DeviceParams& p);

// Dimensionless operator used for matrix elements and selection rules:
// NMR Ix, ESR Sx, NER1 IxIz+IzIx, NER2 Ix^2-Iy^2, EDSR SxIx+SyIy.
HermitianOperator unit_drive_operator(Mechanism m, ChargeState c, HalfInt nuclear_spin,
                                      const QuadrupoleQuadratures& w = {});

// Dispersive part of a hyperfine modulation, dA Sz Iz. Diagonal in the
// product basis, so it shifts levels and never flips them.
HermitianOperator hyperfine_dispersive_operator(double delta_a, HalfInt nuclear_spin);

}  // namespace donorsim
