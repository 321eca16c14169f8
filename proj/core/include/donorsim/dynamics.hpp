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

#include <vector>

#include <Eigen/Dense>

#include "donorsim/device_params.hpp"
#include "donorsim/hamiltonians.hpp"
#include "donorsim/spectroscopy.hpp"
#include "donorsim/spin_algebra.hpp"

namespace donorsim {

// Normalized state vector.
class QuantumState {
 public:
  QuantumState() = default;
  // Throws std::invalid_argument unless | |psi| - 1 | <= 1e-9.
  explicit QuantumState(CVector amplitudes);
  static QuantumState basis(Eigen::Index dim, Eigen::Index k);

  const CVector& amplitudes() const { return psi_; }
  Eigen::Index dim() const { return psi_.size(); }
  double population(Eigen::Index k) const { return std::norm(psi_(k)); }
  double norm() const { return psi_.norm(); }

 private:
  CVector psi_;
};

// Drive strength per unit matrix element, Hz:
// gamma_n B1 (ionised NMR), gamma_n B1 (1 + A/(2 gamma_n B0)) (neutral NMR),
// gamma_e B1 (ESR), dQ (NER), dA (EDSR), times spec.calibration.
double amplitude_factor(const DriveSpec& spec, const DeviceParams& p);

// f_Rabi = amplitude_factor * t.matrix_element.
// Throws std::invalid_argument if the drive does not match the transition.
double rabi_rate(const Transition& t, const DriveSpec& spec, const DeviceParams& p);

// Rotating-frame two-level propagator. Basis {|0>, |1>} = {lower, upper}
// level; H = (d/2) sz + (f_R/2)(cos(phi) sx + sin(phi) sy) with
// d = f_drive - f_qubit. Frequencies in Hz.
Eigen::Matrix2cd rwa_unitary(double detuning, double f_rabi, double phase, double duration);

QuantumState evolve_rwa(const QuantumState& psi0, double detuning, double f_rabi, double phase,
                        double duration);

// f_R^2/(f_R^2 + d^2) sin^2(pi sqrt(f_R^2 + d^2) t)
double rabi_flip_probability(double detuning, double f_rabi, double duration);

// One cosine tone V cos(2 pi f t + phi), switched on over [t_on, t_off).
struct DriveTone {
  HermitianOperator v;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
  double t_on = 0.0;       // s
  double t_off = 0.0;      // s
};

// Tone for a rectangular DriveSpec starting at t_on.
DriveTone make_tone(const DriveSpec& spec, const DeviceParams& p, double t_on);

struct Trajectory {
  std::vector<double> times;
  std::vector<QuantumState> states;
};

// Piecewise-constant propagation with one eigendecomposition per step. The
// drive is replaced by its exact average over each step. `sample_times`
// must be ascending and >= 0; the state at t = 0 is psi0.
// Throws std::invalid_argument if max_step > 1/(20 f_max), f_max being the
// highest tone frequency.
Trajectory evolve_full(const HermitianOperator& h0, const std::vector<DriveTone>& drives,
                       const QuantumState& psi0, const std::vector<double>& sample_times,
                       double max_step);

// Largest step evolve_full accepts for these tones.
double max_step_for(const std::vector<DriveTone>& drives);

// Landau-Zener single-passage flip probability 1 - exp(-pi^2 f_R^2 / rate).
double landau_zener_probability(double f_rabi, double rate);
// f_R^2 / rate
double adiabaticity(double f_rabi, double rate);

// Linear chirp over [center - depth, center + depth] in `duration`. A
// transition outside the swept window is not inverted.
double adiabatic_inversion(const Transition& t, double center, double depth, double duration,
                           double f_rabi);
double adiabatic_inversion(double f_rabi, double depth, double duration);

// Rotating-frame integration of the same chirp, resonance offset by
// `offset` from the sweep center. Validation path for the closed form.
double adiabatic_inversion_numeric(double f_rabi, double depth, double duration, double offset = 0.0,
                                   int steps = 20000);

}  // namespace donorsim
