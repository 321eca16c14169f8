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

#include <random>

#include "donorsim/perturbation.hpp"
#include "oracles.hpp"

namespace donorsim {
namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

std::vector<double> exact_lines(const DeviceParams& p, Mechanism m, std::optional<ElectronBranch> b = {}) {
  std::vector<double> out;
  for (const auto& t : compute_transitions(p, m, ChargeState::Neutral, b)) out.push_back(t.frequency);
  return out;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Coefficients, NmrTableIsExact) {
  const auto c = second_order_coefficients(kSevenHalves);
  const std::vector<Rational> g = {Rational(7, 4), Rational(5, 4), Rational(3, 4), Rational(1, 4),
                                   Rational(-1, 4), Rational(-3, 4), Rational(-5, 4)};
  int k = 0;
  for (int twice = -5; twice <= 7; twice += 2, ++k) EXPECT_EQ(c.g_down.at(h(twice)), g[k]) << twice;
  EXPECT_EQ(k, 7);
}

TEST(Coefficients, EsrSpacingTableIsExact) {
  const auto c = second_order_coefficients(kSevenHalves);
  int expected = 3;
  for (int twice = -5; twice <= 7; twice += 2, --expected) EXPECT_EQ(c.c.at(h(twice)), Rational(expected));
}

// The level coefficient is the flip-flop sum written out independently:
// |<up, m-1| S+I- |dn, m>|^2 / 4 over +1 and the reverse over -1, both in
// units of A^2 / (gamma_e B0).
TEST(Coefficients, LevelShiftsMatchLadderSums) {
  const double j = 3.5;
  for (int twice = -7; twice <= 7; twice += 2) {
    const double m = twice / 2.0;
    const double down = -0.25 * (j * (j + 1) - m * (m - 1));  // |dn, m> couples to |up, m-1>
    const double up = 0.25 * (j * (j + 1) - m * (m + 1));     // |up, m> couples to |dn, m+1>
    EXPECT_NEAR(second_order_coefficient(-kHalf, h(twice), kSevenHalves).to_double(), down, 1e-15);
    EXPECT_NEAR(second_order_coefficient(kHalf, h(twice), kSevenHalves).to_double(), up, 1e-15);
  }
}

TEST(ClosedForms, AgreeWithExactDiagonalizationAtDefaults) {
  const DeviceParams p;
  for (auto b : {ElectronBranch::Down, ElectronBranch::Up}) {
    const auto ex = sorted(exact_lines(p, Mechanism::NMR, b));
    const auto cf = sorted(nmr0_lines(p, b));
    ASSERT_EQ(ex.size(), cf.size());
    for (std::size_t k = 0; k < ex.size(); ++k) EXPECT_LT(std::abs(ex[k] - cf[k]), 2e3);
  }
  const auto ex = sorted(exact_lines(p, Mechanism::ESR));
  const auto cf = sorted(esr_lines(p));
  for (std::size_t k = 0; k < ex.size(); ++k) EXPECT_LT(std::abs(ex[k] - cf[k]), 2e3);
}

TEST(ClosedForms, SweepWithinTwentyPercent) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.8, 1.2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    DeviceParams p;
    p.gamma_n *= u(rng);
    p.gamma_e *= u(rng);
    p.b0 *= u(rng);
    p.a *= u(rng);
    p.fq_neutral *= u(rng);
    const auto a = sorted(exact_lines(p, Mechanism::NMR, ElectronBranch::Down));
    const auto b = sorted(nmr0_lines(p, ElectronBranch::Down));
    const auto c = sorted(exact_lines(p, Mechanism::ESR));
    const auto d = sorted(esr_lines(p));
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    for (std::size_t k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(c[k] - d[k]));
  }
  EXPECT_LT(worst, 2e3);
}

TEST(ClosedForms, TabulatedFormIsCoarser) {
  const DeviceParams p;
  const auto ex = sorted(exact_lines(p, Mechanism::NMR, ElectronBranch::Down));
  const auto tab = sorted(nmr0_lines(p, ElectronBranch::Down, ClosedForm::Tabulated));
  double worst = 0.0;
  for (std::size_t k = 0; k < ex.size(); ++k) worst = std::max(worst, std::abs(ex[k] - tab[k]));
  // within the full second-order scale, not within the secular tolerance
  EXPECT_LT(worst, 4 * p.a * p.a / p.electron_zeeman() * 0.05);
}

TEST(ClosedForms, MiddleEsrSpacing) {
  const DeviceParams p;
  EXPECT_NEAR(esr_spacing(p, kHalf), p.a, 1e-6);
  // the exact spacing differs from A at the 10 kHz level
  const auto ex = sorted(exact_lines(p, Mechanism::ESR));
  EXPECT_NEAR(ex[4] - ex[3] - p.a, -8637, 50);
  EXPECT_NEAR(extract_A_from_esr(ex), ex[4] - ex[3], 1e-6);
}

TEST(ClosedForms, EdsrAgreesWithExact) {
  const DeviceParams p;
  for (const auto& t : compute_transitions(p, Mechanism::EDSR, ChargeState::Neutral)) {
    const HalfInt m_upper = std::max(t.from.m_i, t.to.m_i);
    EXPECT_LT(std::abs(edsr_frequency(p, m_upper) - t.frequency), 2e3) << t.id();
  }
}

TEST(Extraction, HyperfineFromNeutralNmr) {
  const DeviceParams p;
  const auto lines = compute_transitions(p, Mechanism::NMR, ChargeState::Neutral, ElectronBranch::Down);
  EXPECT_NEAR(extract_A_from_nmr0(lines, p), 96.584e6, 2e3);
  EXPECT_NEAR(extract_A_from_nmr0(nmr0_lines(p, ElectronBranch::Down, ClosedForm::Tabulated), p, ElectronBranch::Down),
              p.a, 1e-6 * p.a);
}

TEST(Extraction, QuadrupoleFromNeutralNmr) {
  const DeviceParams p;
  const auto lines = compute_transitions(p, Mechanism::NMR, ChargeState::Neutral, ElectronBranch::Down);
  const double a = extract_A_from_nmr0(lines, p);
  EXPECT_NEAR(extract_fq(lines, p, a), -52.5e3, 500);
  EXPECT_NEAR(extract_fq(nmr0_lines(p, ElectronBranch::Down), p, p.a), p.fq_neutral, 1.0);
}

TEST(Extraction, FieldAndIonisedQuadrupole) {
  const DeviceParams p;
  const auto lines = compute_transitions(p, Mechanism::NMR, ChargeState::Ionised);
  EXPECT_NEAR(extract_B0_from_nmr_plus(lines, p.gamma_n), 0.9995, 1e-12);
  EXPECT_NEAR(extract_fq_plus(lines), -44.1e3, 1e-6);
  EXPECT_THROW(extract_A_from_nmr0(std::vector<double>{1, 2, 3}, p), std::invalid_argument);
}

}  // namespace
}  // namespace donorsim
