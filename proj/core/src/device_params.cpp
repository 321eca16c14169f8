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

#include "donorsim/device_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace donorsim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

StarkModel StarkModel::esr_calibrated() { return {}; }

StarkModel StarkModel::nmr_calibrated() {
  StarkModel s;
  s.dA_dV = 11.57e6;
  return s;
}

void StarkModel::validate() const {
  for (double v : {dA_dV, dGammaEB0_dV, dfq_plus_dV, dfq0_dV, eta1, eta2, field_per_volt})
    require(std::isfinite(v), "stark slopes must be finite");
  require(std::isfinite(linear_window) && linear_window > 0, "stark linear_window must be > 0");
}

void CoherenceParams::validate() const {
  for (double v : {t2star_nmr_plus, t2star_ner_plus, middle_enhancement, t2star_phosphorus,
                   t2star_electron, t2hahn_electron, beta_hahn_electron, t2hahn_nmr0, t1_electron})
    require(std::isfinite(v) && v > 0, "coherence parameters must be positive");
}

void DeviceParams::validate() const {
  require(nuclear_spin.twice() >= 1, "nuclear spin must be at least 1/2");
  for (double v : {gamma_n, gamma_e, b0, a, fq_plus, fq_neutral})
    require(std::isfinite(v), "device parameters must be finite");
  require(electron_zeeman() > 0, "gamma_e * B0 must be positive");
  require(a >= 0, "hyperfine A must be non-negative");
  const double nz = std::abs(nuclear_zeeman());
  require(std::abs(fq_plus) < nz || (fq_plus == 0 && nz == 0), "|fq_plus| must be below gamma_n B0");
  require(std::abs(fq_neutral) < nz || (fq_neutral == 0 && nz == 0),
          "|fq_neutral| must be below gamma_n B0");
  stark.validate();
  coherence.validate();
}

DeviceParams DeviceParams::phosphorus() {
  DeviceParams p;
  p.nuclear_spin = kHalf;
  p.gamma_n = 17.23e6;
  p.a = 117.53e6;
  p.fq_plus = 0.0;
  p.fq_neutral = 0.0;
  p.stark.dfq_plus_dV = 0.0;
  p.stark.dfq0_dV = 0.0;
  return p;
}

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::NMR: return "nmr";
    case Mechanism::ESR: return "esr";
    case Mechanism::NER1: return "ner1";
    case Mechanism::NER2: return "ner2";
    case Mechanism::EDSR: return "edsr";
  }
  return "?";
}

const char* to_string(ChargeState c) { return c == ChargeState::Ionised ? "ionised" : "neutral"; }

const char* to_string(ElectronBranch b) { return b == ElectronBranch::Down ? "down" : "up"; }

}  // namespace donorsim
