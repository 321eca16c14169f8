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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "donorsim/coherence.hpp"
#include "donorsim/perturbation.hpp"

namespace donorsim {
namespace {

Transition ionised_line(const DeviceParams& p, int twice_from) {
  for (const auto& t : compute_transitions(p, Mechanism::NMR, ChargeState::Ionised))
    if (t.from.m_i.twice() == twice_from || t.to.m_i.twice() == twice_from) {
      if (std::min(t.from.m_i, t.to.m_i).twice() == twice_from) return t;
    }
  throw std::runtime_error("missing line");
}

std::vector<double> grid(double t_max, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(t_max * k / (n - 1));
  return out;
}

TEST(Sensitivity, MiddleIonisedLineIsElectricallyImmune) {
  const DeviceParams p;
  const Transition mid = ionised_line(p, -1);
  const auto s = transition_sensitivity(mid, p);
  EXPECT_LT(std::abs(s.df_dfq), 1e-12);
  EXPECT_NEAR(s.df_db0, p.gamma_n, 1e-3 * p.gamma_n);
  // outer lines move with fq by (m - 1/2)
  const auto outer = transition_sensitivity(ionised_line(p, 5), p);
  EXPECT_NEAR(std::abs(outer.df_dfq), 3.0, 1e-6);
  NoiseModel n;
  n.sigma_fq = 500;
  EXPECT_LT(dephasing_rate(mid, n, p).sigma_f, 1e-9);
  EXPECT_TRUE(std::isinf(dephasing_rate(mid, n, p).t2_star));
}

TEST(Dephasing, TwoSpeciesScaleWithGyromagneticRatio) {
  const DeviceParams sb, ph = DeviceParams::phosphorus();
  NoiseModel n;
  n.sigma_b = 1e-6;
  const auto t_sb = compute_transitions(sb, Mechanism::NMR, ChargeState::Ionised)[3];
  const auto t_p = compute_transitions(ph, Mechanism::NMR, ChargeState::Ionised).front();
  const double ratio = dephasing_rate(t_sb, n, sb).t2_star / dephasing_rate(t_p, n, ph).t2_star;
  EXPECT_NEAR(ratio, ph.gamma_n / sb.gamma_n, 1e-6 * ratio);
  EXPECT_NEAR(ratio, 3.104, 0.01 * 3.104);
}

TEST(Dephasing, MonteCarloSpeciesRatio) {
  const DeviceParams sb, ph = DeviceParams::phosphorus();
  NoiseModel n;
  n.sigma_b = 1e-6;
  n.readout_flip = 0;
  const auto t_sb = compute_transitions(sb, Mechanism::NMR, ChargeState::Ionised)[3];
  const auto t_p = compute_transitions(ph, Mechanism::NMR, ChargeState::Ionised).front();
  const double ts = dephasing_rate(t_sb, n, sb).t2_star, tp = dephasing_rate(t_p, n, ph).t2_star;
  const auto cs = simulate_decay(DecaySequence::Ramsey, t_sb, n, sb, grid(3 * ts, 40), 2000, 101);
  const auto cp = simulate_decay(DecaySequence::Ramsey, t_p, n, ph, grid(3 * tp, 40), 2000, 202);
  const auto fs = fit_decay(cs, DecayModel::Gaussian), fp = fit_decay(cp, DecayModel::Gaussian);
  ASSERT_TRUE(fs.ok());
  ASSERT_TRUE(fp.ok());
  EXPECT_NEAR(fs.t2 / ts, 1.0, 0.05);
  EXPECT_NEAR(fp.t2 / tp, 1.0, 0.05);
  EXPECT_NEAR(fs.t2 / fp.t2, 3.104, 0.05 * 3.104);
}

TEST(Dephasing, HahnRefocusesStaticNoise) {
  const DeviceParams p;
  NoiseModel n;
  n.sigma_b = 2e-6;
  n.sigma_fq = 200;
  n.readout_flip = 0;
  const Transition t = ionised_line(p, 5);
  const double t2 = dephasing_rate(t, n, p).t2_star;
  const auto ramsey = simulate_decay(DecaySequence::Ramsey, t, n, p, {3 * t2}, 500, 7);
  const auto hahn = simulate_decay(DecaySequence::Hahn, t, n, p, grid(3 * t2, 7), 500, 7);
  EXPECT_LT(std::abs(2 * ramsey.probability[0] - 1), 0.05);
  for (double pr : hahn.probability) EXPECT_GE(std::abs(1 - 2 * pr), 0.999);
}

TEST(Dephasing, CalibratedElectricNoiseGivesRequestedRatio) {
  const DeviceParams p;
  const Transition outer = ionised_line(p, 5), mid = ionised_line(p, -1);
  const double sigma_b = 1e-6;
  const double sfq = calibrate_sigma_fq(outer, mid, p, sigma_b, 1.5);
  EXPECT_GT(sfq, 0.0);
  NoiseModel n;
  n.sigma_b = sigma_b;
  n.sigma_fq = sfq;
  EXPECT_NEAR(dephasing_rate(mid, n, p).t2_star / dephasing_rate(outer, n, p).t2_star, 1.5, 1e-9);
  EXPECT_THROW(calibrate_sigma_fq(outer, mid, p, sigma_b, 0.5), std::invalid_argument);
}

TEST(Fits, StretchedExponentialRoundTrip) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2e-3);
  const auto tau = grid(2e-3, 60);
  std::vector<double> y;
  for (double t : tau) y.push_back(decay_model(t, 510e-6, 1.67, 0.48, 0.5) + g(rng));
  const auto f = fit_decay(tau, y, DecayModel::StretchedExp);
  ASSERT_TRUE(f.ok()) << to_string(f.status);
  EXPECT_NEAR(f.t2 / 510e-6, 1.0, 0.02);
  EXPECT_NEAR(f.beta / 1.67, 1.0, 0.02);
}

TEST(Fits, GaussianFixtureRoundTrip) {
  const DeviceParams p;
  const auto tau = grid(80e-3, 50);
  std::vector<double> y;
  for (double t : tau) y.push_back(decay_model(t, p.coherence.t2star_phosphorus, 2.0, 0.5, 0.5));
  const auto f = fit_decay(tau, y, DecayModel::Gaussian);
  ASSERT_TRUE(f.ok());
  EXPECT_NEAR(f.t2 / p.coherence.t2star_phosphorus, 1.0, 0.02);
  EXPECT_DOUBLE_EQ(f.beta, 2.0);
  const auto s = fit_decay(tau, y, DecayModel::StretchedExp);
  ASSERT_TRUE(s.ok());
  EXPECT_NEAR(s.beta, 2.0, 0.02);
}

TEST(Fits, FlatDataIsNotDecaying) {
  const auto tau = grid(1e-3, 20);
  const std::vector<double> y(tau.size(), 0.7);
  EXPECT_EQ(fit_decay(tau, y, DecayModel::Gaussian).status, FitStatus::NotDecaying);
  EXPECT_THROW(fit_decay(tau, std::vector<double>(3, 0.0), DecayModel::Gaussian), std::invalid_argument);
}

TEST(Fits, SinusoidRecoversFrequency) {
  const auto x = grid(5e-3, 80);
  std::vector<double> y;
  for (double t : x) y.push_back(0.5 + 0.4 * std::cos(2 * std::numbers::pi * 1234.5 * t + 0.3));
  const auto f = fit_sinusoid(x, y);
  ASSERT_TRUE(f.ok());
  EXPECT_NEAR(f.frequency, 1234.5, 1e-6);
  EXPECT_NEAR(std::abs(f.amplitude), 0.4, 1e-9);
  EXPECT_NEAR(f.offset, 0.5, 1e-9);
}

TEST(Shock, SurvivalFollowsPerShotFlipRate) {
  const std::vector<double> probs = {0, 0, 0, 0, 0, 0, 0, 1};
  const int runs = 2000, shots = 300;
  const double flip = 1e-3;
  int survived = 0;
  for (int r = 0; r < runs; ++r) survived += readout_with_shock(probs, shots, flip, 1000 + r).survived;
  const double expected = std::pow(1 - flip, shots);
  EXPECT_NEAR(expected, std::exp(-0.3), 1e-3);
  EXPECT_NEAR(static_cast<double>(survived) / runs, expected, 3 * std::sqrt(expected * (1 - expected) / runs));
}

TEST(Shock, NoFlipsGivesMultinomialCounts) {
  const std::vector<double> probs = {0.1, 0.2, 0.3, 0.15, 0.05, 0.1, 0.05, 0.05};
  const int shots = 20000;
  const auto r = readout_with_shock(probs, shots, 0.0, 9);
  EXPECT_EQ(r.flips, 0);
  EXPECT_TRUE(r.survived);
  long total = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    total += r.counts[k];
    const double sd = std::sqrt(shots * probs[k] * (1 - probs[k]));
    EXPECT_NEAR(r.counts[k], shots * probs[k], 5 * sd) << k;
  }
  EXPECT_EQ(total, shots);
}

TEST(Shock, CertainFlipsNeverSurviveAndEdgesStep) {
  std::vector<double> probs(8, 0.0);
  probs.front() = 1.0;
  const auto r = readout_with_shock(probs, 100, 1.0, 4, true);
  EXPECT_FALSE(r.survived);
  EXPECT_EQ(r.flips, 100);
  // every shot moves the label before it is recorded, so the start level is
  // seen only after an even number of steps
  long total = 0;
  for (long c : r.counts) total += c;
  EXPECT_EQ(total, 100);
  const auto single = readout_with_shock(probs, 1, 1.0, 4, true);
  EXPECT_EQ(single.counts[1], 1);
  EXPECT_THROW(readout_with_shock({0.5, 0.6}, 10, 0.0, 1), std::invalid_argument);
}

TEST(Relaxation, ElectronT1Survival) {
  EXPECT_NEAR(t1_survival(2.44, 2.44), std::exp(-1.0), 1e-15);
  EXPECT_EQ(t1_survival(0.0, 2.44), 1.0);
}

TEST(DecayCsv, HeaderAndRows) {
  DecayCurve c{{0.0, 1e-3}, {1.0, 0.75}, {0.0, 0.01}};
  std::stringstream ss;
  write_decay_csv(ss, c);
  EXPECT_EQ(ss.str(), "tau_s,probability,stderr\n0,1,0\n0.001,0.75,0.01\n");
}

}  // namespace
}  // namespace donorsim
