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

#include <map>
#include <vector>

#include "donorsim/device_params.hpp"
#include "donorsim/rational.hpp"
#include "donorsim/spectroscopy.hpp"

namespace donorsim {

// Second-order flip-flop coefficients, in units of A^2/(gamma_e B0).
// Pair maps are keyed by the upper m_I of the (m-1, m) pair.
struct SecondOrderCoefficients {
  std::map<HalfInt, Rational> g_down;  // NMR, electron down manifold
  std::map<HalfInt, Rational> g_up;    // NMR, electron up manifold
  std::map<HalfInt, Rational> b;       // ESR absolute, keyed by m_I
  std::map<HalfInt, Rational> c;       // ESR spacing f(m) - f(m-1)
};

// Exact level shift f2(m_S, m_I) in units of A^2/(gamma_e B0), from the
// flip-flop sum with bare electron-Zeeman denominators.
Rational second_order_coefficient(HalfInt m_s, HalfInt m_i, HalfInt spin);

SecondOrderCoefficients second_order_coefficients(HalfInt spin);

// Flip-flop shift with bare electron-Zeeman denominators, Hz.
double second_order_shift(double a, double gamma_e, double b0, HalfInt m_s, HalfInt m_i,
                          HalfInt spin = kSevenHalves);

// How the closed forms are evaluated.
//  Tabulated: first order plus the coefficient tables above (bare Zeeman
//    denominators). Errors reach several kHz at spin 7/2.
//  Secular: same flip-flop sum, denominators taken from the secular levels
//    (Zeeman + A Sz Iz + quadrupole). Tracks exact diagonalization to
//    ~100 Hz at the default constants.
enum class ClosedForm { Tabulated, Secular };

// Flip-flop shift of one level, Hz. The secular denominators use fq_neutral.
double second_order_shift(const DeviceParams& p, HalfInt m_s, HalfInt m_i,
                          ClosedForm form = ClosedForm::Secular);

// Secular first-order level plus the second-order shift, Hz.
double perturbative_level(const DeviceParams& p, HalfInt m_s, HalfInt m_i,
                          ClosedForm form = ClosedForm::Secular);

// NMR line of the (m-1, m) pair in one electron manifold.
double nmr0_frequency(const DeviceParams& p, HalfInt m_upper, ElectronBranch branch,
                      ClosedForm form = ClosedForm::Secular);
double esr_frequency(const DeviceParams& p, HalfInt m_i, ClosedForm form = ClosedForm::Secular);
// f(m) - f(m-1). Tabulated form: A (1 + c A / ((gamma_e + gamma_n) B0)).
double esr_spacing(const DeviceParams& p, HalfInt m_upper, ClosedForm form = ClosedForm::Tabulated);
// Flip-flop line |dn, m> <-> |up, m-1>.
double edsr_frequency(const DeviceParams& p, HalfInt m_upper, ClosedForm form = ClosedForm::Secular);

// Seven NMR lines of a manifold, index k <-> m_upper = -I+1+k.
std::vector<double> nmr0_lines(const DeviceParams& p, ElectronBranch branch,
                               ClosedForm form = ClosedForm::Secular);
// Eight ESR lines, index k <-> m_I = -I+k.
std::vector<double> esr_lines(const DeviceParams& p, ClosedForm form = ClosedForm::Secular);

// Hyperfine constant from the three symmetric pair sums of an NMR manifold:
// each pair obeys A^2/(2 gamma_e B0) +- A + 2 gamma_n B0 = f_k + f_{6-k}
// (upper sign for the down manifold), solved exactly and averaged.
// `lines` ordered by m_upper ascending. Throws on a wrong line count.
double extract_A_from_nmr0(const std::vector<double>& lines, const DeviceParams& p,
                           ElectronBranch branch = ElectronBranch::Down);
// Same from labeled transitions (sorted internally).
double extract_A_from_nmr0(const std::vector<Transition>& lines, const DeviceParams& p);

// Quadrupole splitting by least squares of the closed form (with `a`
// substituted) against the lines, with a free common offset.
double extract_fq(const std::vector<double>& lines, const DeviceParams& p, double a,
                  ElectronBranch branch = ElectronBranch::Down,
                  ClosedForm form = ClosedForm::Secular);
double extract_fq(const std::vector<Transition>& lines, const DeviceParams& p, double a,
                  ClosedForm form = ClosedForm::Secular);

// B0 = f_middle / gamma_n.
double extract_B0_from_nmr_plus(double middle_line, double gamma_n);
// Picks the (-1/2, +1/2) line out of the seven ionised NMR lines.
double extract_B0_from_nmr_plus(const std::vector<Transition>& lines, double gamma_n);
// Slope of the ionised lines against (m - 1/2).
double extract_fq_plus(const std::vector<Transition>& lines);

// Middle ESR spacing f(+1/2) - f(-1/2), which carries no tabulated
// second-order term. `lines` ordered by m_I ascending.
double extract_A_from_esr(const std::vector<double>& lines);
double extract_A_from_esr(const std::vector<Transition>& lines);

}  // namespace donorsim
