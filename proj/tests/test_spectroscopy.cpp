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

#include <map>
#include <sstream>

#include "donorsim/spectroscopy.hpp"
#include "oracles.hpp"

namespace donorsim {
namespace {

std::vector<double> oracle_levels(ChargeState c) {
  const oracle::Params op;
  return oracle::jacobi_hermitian(c == ChargeState::Ionised ? oracle::h_ionised(op) : oracle::h_neutral(op))
      .values;
}

TEST(Spectroscopy, LineCountsPerMechanism) {
  const DeviceParams p;
  EXPECT_EQ(compute_transitions(p, Mechanism::NMR, ChargeState::Ionised).size(), 7u);
  EXPECT_EQ(compute_transitions(p, Mechanism::NER1, ChargeState::Ionised).size(), 6u);
  EXPECT_EQ(compute_transitions(p, Mechanism::NER2, ChargeState::Ionised).size(), 6u);
  EXPECT_EQ(compute_transitions(p, Mechanism::ESR, ChargeState::Neutral).size(), 8u);
  EXPECT_EQ(compute_transitions(p, Mechanism::EDSR, ChargeState::Neutral).size(), 7u);
  EXPECT_EQ(compute_transitions(p, Mechanism::NMR, ChargeState::Neutral).size(), 14u);
  EXPECT_EQ(compute_transitions(p, Mechanism::NMR, ChargeState::Neutral, ElectronBranch::Down).size(), 7u);
}

TEST(Spectroscopy, IonisedNmrLinesEquallySpacedByFq) {
  const DeviceParams p;
  const auto lines = compute_transitions(p, Mechanism::NMR, ChargeState::Ionised);
  for (std::size_t k = 1; k < lines.size(); ++k)
    EXPECT_NEAR(lines[k].frequency - lines[k - 1].frequency, 44.1e3, 1e-6);
  EXPECT_NEAR(lines[3].frequency, 5.547225e6, 1e-6);
  EXPECT_NEAR(nmr_plus_frequency(p, kHalf), 5.547225e6, 1e-6);
}

TEST(Spectroscopy, FrequenciesAreOracleLevelDifferences) {
  const DeviceParams p;
  for (ChargeState c : {ChargeState::Ionised, ChargeState::Neutral}) {
    const auto lv = oracle_levels(c);
    std::vector<Mechanism> ms = c == ChargeState::Ionised
                                    ? std::vector<Mechanism>{Mechanism::NMR, Mechanism::NER1, Mechanism::NER2}
                                    : std::vector<Mechanism>{Mechanism::NMR, Mechanism::ESR, Mechanism::EDSR};
    for (Mechanism m : ms)
      for (const auto& t : compute_transitions(p, m, c)) {
        // every line must be some difference of oracle levels to <= 1e-6 rel
        double best = 1e300;
        for (double a : lv)
          for (double b : lv)
            if (b > a) best = std::min(best, std::abs((b - a) - t.frequency));
        EXPECT_LT(best, 1e-6 * std::max(1.0, t.frequency)) << t.id();
      }
  }
}

// Brute force over all eigenstate pairs with the operators written out here.
TEST(Spectroscopy, SelectionRulesByBruteForce) {
  const DeviceParams p;
  const EigenSystem es = eigensystem(h_ionised(p), basis_labels(p, ChargeState::Ionised));
  ASSERT_TRUE(es.labeled());
  const auto o = oracle::spin(3.5);
  CMatrix ner1(8, 8);
  const auto xz = oracle::add(oracle::mul(o.x, o.z), oracle::mul(o.z, o.x));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) ner1(i, j) = xz[i][j];
  const CMatrix v = es.eigenvectors().adjoint() * ner1 * es.eigenvectors();
  const auto mid_lo = *es.index_of({false, HalfInt(), -kHalf});
  const auto mid_hi = *es.index_of({false, HalfInt(), kHalf});
  EXPECT_LT(std::abs(v(mid_lo, mid_hi)), 1e-12);
  for (const auto& t : compute_transitions(p, Mechanism::NER1, ChargeState::Ionised))
    EXPECT_FALSE(t.from.m_i == -kHalf && t.to.m_i == kHalf);
  // the NMR set does contain the middle line
  bool middle = false;
  for (const auto& t : compute_transitions(p, Mechanism::NMR, ChargeState::Ionised))
    middle |= t.from.m_i == -kHalf && t.to.m_i == kHalf;
  EXPECT_TRUE(middle);
}

TEST(Spectroscopy, Ner2LinesAreSumsOfBracketingLines) {
  const DeviceParams p;
  std::map<int, double> single;
  for (const auto& t : compute_transitions(p, Mechanism::NMR, ChargeState::Ionised)) single[t.from.m_i.twice()] = t.frequency;
  for (const auto& t : compute_transitions(p, Mechanism::NER2, ChargeState::Ionised)) {
    const double sum = single.at(t.from.m_i.twice()) + single.at(t.from.m_i.twice() + 2);
    EXPECT_NEAR(t.frequency / sum, 1.0, 1e-9) << t.id();
  }
}

TEST(Spectroscopy, EdsrConservesTotalProjection) {
  const DeviceParams p;
  for (const auto& t : compute_transitions(p, Mechanism::EDSR, ChargeState::Neutral)) {
    EXPECT_EQ(t.from.total_projection(), t.to.total_projection());
    EXPECT_NE(t.from.m_s, t.to.m_s);
  }
}

TEST(Spectroscopy, TransitionsSortedAndOriented) {
  const DeviceParams p;
  const auto lines = compute_transitions(p, Mechanism::ESR, ChargeState::Neutral);
  for (std::size_t k = 1; k < lines.size(); ++k) EXPECT_LT(lines[k - 1].frequency, lines[k].frequency);
  for (const auto& t : lines) {
    EXPECT_EQ(t.from.m_i, t.to.m_i);
    EXPECT_NEAR(t.frequency, std::abs(t.energy_to - t.energy_from), 1e-6);
  }
}

TEST(Spectroscopy, SelectionRuleTable) {
  const BasisLabel a{false, HalfInt(), -kHalf}, b{false, HalfInt(), kHalf}, c{false, HalfInt(), HalfInt::from_twice(3)};
  EXPECT_TRUE(selection_rule(Mechanism::NMR, a, b));
  EXPECT_FALSE(selection_rule(Mechanism::NER2, a, b));
  EXPECT_TRUE(selection_rule(Mechanism::NER2, a, c));
  const BasisLabel d{true, kHalf, -kHalf}, e{true, -kHalf, kHalf};
  EXPECT_TRUE(selection_rule(Mechanism::EDSR, d, e));
  EXPECT_FALSE(selection_rule(Mechanism::ESR, d, e));
}

TEST(Spectrum, EmptyAndPeaks) {
  const DeviceParams p;
  EXPECT_TRUE(spectrum({}, 1e3, {0, 1, 10}).empty());
  const auto lines = compute_transitions(p, Mechanism::NMR, ChargeState::Ionised);
  const auto grid = grid_around(lines, 2e3, 4001);
  const auto curve = spectrum(lines, 2e3, grid);
  const auto peaks = curve_maxima(curve);
  ASSERT_EQ(peaks.size(), 7u);
  const double step = (grid.f_max - grid.f_min) / (grid.points - 1);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_NEAR(peaks[k], lines[k].frequency, step);
  EXPECT_THROW(spectrum(lines, -1.0, grid), std::invalid_argument);
}

TEST(Spectrum, CsvRoundTrip) {
  const DeviceParams p;
  const auto lines = compute_transitions(p, Mechanism::EDSR, ChargeState::Neutral);
  std::stringstream ss;
  write_transitions_csv(ss, lines);
  const auto back = read_transitions_csv(ss);
  ASSERT_EQ(back.size(), lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    EXPECT_EQ(back[k].from, lines[k].from);
    EXPECT_EQ(back[k].to, lines[k].to);
    EXPECT_EQ(back[k].frequency, lines[k].frequency);
    EXPECT_EQ(back[k].mechanism, Mechanism::EDSR);
  }
  EXPECT_THROW(parse_mechanism("xyz"), std::invalid_argument);
}

}  // namespace
}  // namespace donorsim
