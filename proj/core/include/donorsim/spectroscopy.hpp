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
#include <string>
#include <vector>

#include "donorsim/device_params.hpp"
#include "donorsim/hamiltonians.hpp"
#include "donorsim/spin_algebra.hpp"

namespace donorsim {

// A resonance between two labeled eigenstates. `from` carries the lower m_I
// (then the lower m_S), so `to` is the upper-m_I label of the pair.
struct Transition {
  BasisLabel from;
  BasisLabel to;
  double frequency = 0.0;       // Hz, |E_to - E_from|
  Mechanism mechanism = Mechanism::NMR;
  double matrix_element = 0.0;  // |<from|V_unit|to>|
  double energy_from = 0.0;     // Hz
  double energy_to = 0.0;       // Hz

  ChargeState charge_state() const {
    return from.has_electron ? ChargeState::Neutral : ChargeState::Ionised;
  }
  const BasisLabel& lower_level() const { return energy_from <= energy_to ? from : to; }
  const BasisLabel& upper_level() const { return energy_from <= energy_to ? to : from; }
  // "from:to"
  std::string id() const;
};

// Label rule for a mechanism, independent of matrix elements.
bool selection_rule(Mechanism m, const BasisLabel& a, const BasisLabel& b);

// Emits every pair obeying the mechanism's label rule with a matrix element
// above kMatrixElementFloor, sorted by frequency.
// Throws std::invalid_argument on an unlabeled eigensystem.
std::vector<Transition> transitions(const EigenSystem& es, const HermitianOperator& v_unit,
                                    Mechanism mechanism);

inline constexpr double kMatrixElementFloor = 1e-9;

// Diagonalizes the static Hamiltonian and lists the mechanism's transitions.
// For neutral NMR, `branch` restricts the list to one electron manifold.
std::vector<Transition> compute_transitions(const DeviceParams& p, Mechanism m, ChargeState c,
                                            std::optional<ElectronBranch> branch = std::nullopt,
                                            const QuadrupoleQuadratures& w = {});

// First-order ionised line gamma_n B0 + (m - 1/2) fq_plus for the pair
// (m-1, m). Throws std::invalid_argument unless m is in {-I+1 .. I}.
double nmr_plus_frequency(const DeviceParams& p, HalfInt m_upper);

struct SpectrumLine {
  double center = 0.0;  // Hz
  double height = 1.0;
  double fwhm = 0.0;    // Hz
};

struct FrequencyGrid {
  double f_min = 0.0;
  double f_max = 0.0;
  int points = 0;
};

struct SampledCurve {
  std::vector<double> x;
  std::vector<double> y;
  bool empty() const { return x.empty(); }
};

std::vector<SpectrumLine> spectrum_lines(const std::vector<Transition>& lines, double fwhm);
// Sum of unit-height Lorentzians. Empty input gives an empty curve.
// Throws std::invalid_argument if fwhm <= 0, the grid is degenerate or it
// does not cover every center.
SampledCurve spectrum(const std::vector<Transition>& lines, double fwhm, const FrequencyGrid& grid);
// Grid spanning all centers with `pad` fwhm margins on each side.
FrequencyGrid grid_around(const std::vector<Transition>& lines, double fwhm, int points,
                          double pad = 5.0);
// Local maxima of a sampled curve, ascending in x.
std::vector<double> curve_maxima(const SampledCurve& c);

void write_transitions_csv(std::ostream& out, const std::vector<Transition>& lines);
// Reads the table written above; '#' lines are skipped.
std::vector<Transition> read_transitions_csv(std::istream& in);

Mechanism parse_mechanism(const std::string& s);

}  // namespace donorsim
