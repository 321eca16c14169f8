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

#include <cstdint>

#include "donorsim/spin_algebra.hpp"

namespace donorsim {

// Linear (and optional quadratic) voltage response of the Hamiltonian
// parameters. All slopes per volt of gate detuning.
struct StarkModel {
  double dA_dV = 9.8e6;             // Hz/V
  double dGammaEB0_dV = -1.4e6;     // Hz/V
  double dfq_plus_dV = -2.07e3;     // Hz/V
  double dfq0_dV = -300e3;          // Hz/V
  double eta1 = 0.0;                // m/V
  double eta2 = 0.0;                // m^2/V^2
  double field_per_volt = 1.0;      // V -> E map, (V/m)/V
  double linear_window = 0.5;       // V

  // hyperfine slope from ESR fan-outs (the default)
  static StarkModel esr_calibrated();
  // hyperfine slope from NMR fan-outs
  static StarkModel nmr_calibrated();

  void validate() const;
  bool operator==(const StarkModel&) const = default;
};

// Measured coherence figures, used as fit fixtures only.
struct CoherenceParams {
  double t2star_nmr_plus = 29.4e-3;        // s
  double t2star_ner_plus = 29.8e-3;        // s
  double middle_enhancement = 1.5;
  double t2star_phosphorus = 24.5e-3;      // s
  double t2star_electron = 11.06e-6;       // s
  double t2hahn_electron = 510e-6;         // s
  double beta_hahn_electron = 1.67;
  double t2hahn_nmr0 = 247e-6;             // s
  double t1_electron = 2.44;               // s

  void validate() const;
  bool operator==(const CoherenceParams&) const = default;
};

struct DeviceParams {
  HalfInt nuclear_spin = kSevenHalves;
  double gamma_n = 5.55e6;          // Hz/T
  double gamma_e = 27.97e9;         // Hz/T
  double b0 = 0.9995;               // T
  double a = 96.584e6;              // Hz
  double fq_plus = -44.1e3;         // Hz
  double fq_neutral = -52.5e3;      // Hz
  StarkModel stark;
  CoherenceParams coherence;

  double nuclear_zeeman() const { return gamma_n * b0; }
  double electron_zeeman() const { return gamma_e * b0; }

  // Throws std::invalid_argument on a broken regime assumption.
  void validate() const;

  static DeviceParams antimony() { return {}; }
  // I = 1/2 reference donor; the quadrupole terms vanish identically.
  static DeviceParams phosphorus();

  bool operator==(const DeviceParams&) const = default;
};

enum class Mechanism { NMR, ESR, NER1, NER2, EDSR };
enum class ChargeState { Ionised, Neutral };
enum class ElectronBranch { Down, Up };

const char* to_string(Mechanism m);
const char* to_string(ChargeState c);
const char* to_string(ElectronBranch b);

}  // namespace donorsim
