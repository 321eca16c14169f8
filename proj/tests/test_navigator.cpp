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

#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "donorsim/navigator.hpp"
#include "oracles.hpp"

namespace donorsim {
namespace {

constexpr Mechanism kAll[] = {Mechanism::NMR, Mechanism::ESR, Mechanism::NER1, Mechanism::NER2, Mechanism::EDSR};

std::set<Mechanism> subset(int bits) {
  std::set<Mechanism> out;
  for (int k = 0; k < 5; ++k)
    if (bits & (1 << k)) out.insert(kAll[k]);
  return out;
}

// Selection rules written out on the labels alone.
bool allowed(Mechanism m, ChargeState c, const BasisLabel& a, const BasisLabel& b) {
  const int dm = std::abs(a.m_i.twice() - b.m_i.twice()) / 2;
  const bool same_s = a.m_s == b.m_s;
  const bool middle = std::min(a.m_i.twice(), b.m_i.twice()) == -1 && dm == 1;
  if (c == ChargeState::Ionised) {
    if (m == Mechanism::NMR) return dm == 1;
    if (m == Mechanism::NER1) return dm == 1 && !middle;
    if (m == Mechanism::NER2) return dm == 2;
    return false;
  }
  if (m == Mechanism::NMR) return same_s && dm == 1;
  if (m == Mechanism::ESR) return !same_s && dm == 0;
  if (m == Mechanism::EDSR) return !same_s && dm == 1 && a.total_projection() == b.total_projection();
  return false;
}

std::vector<std::pair<int, int>> oracle_edges(const std::vector<BasisLabel>& n, ChargeState c,
                                              const std::set<Mechanism>& ms) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < n.size(); ++i)
    for (std::size_t j = i + 1; j < n.size(); ++j) {
      bool any = false;
      for (Mechanism m : ms) any |= allowed(m, c, n[i], n[j]);
      if (any) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  return out;
}

std::vector<std::string> strings(const std::vector<BasisLabel>& v) {
  std::vector<std::string> out;
  for (const auto& l : v) out.push_back(l.str());
  return out;
}

// Every shortest path by exhaustive search, smallest label sequence kept.
std::vector<std::string> best_shortest_path(const std::vector<BasisLabel>& nodes,
                                            const std::vector<std::pair<int, int>>& edges, int from, int to,
                                            int length) {
  std::vector<std::vector<int>> adj(nodes.size());
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::string> best;
  std::vector<int> path = {from};
  std::function<void(int)> walk = [&](int u) {
    if (static_cast<int>(path.size()) - 1 == length) {
      if (u != to) return;
      std::vector<std::string> s;
      for (int k : path) s.push_back(nodes[k].str());
      if (best.empty() || s < best) best = s;
      return;
    }
    for (int w : adj[u]) {
      path.push_back(w);
      walk(w);
      path.pop_back();
    }
  };
  walk(from);
  return best;
}

TEST(Graph, NodesAndEdgesMatchSelectionRules) {
  const DeviceParams p;
  for (ChargeState c : {ChargeState::Ionised, ChargeState::Neutral}) {
    const TransitionGraph g(p, c, subset(31));
    const auto& n = g.nodes();
    EXPECT_EQ(n.size(), c == ChargeState::Ionised ? 8u : 16u);
    EXPECT_TRUE(std::is_sorted(n.begin(), n.end(), [](auto& a, auto& b) { return a.str() < b.str(); }));
    std::set<std::pair<int, int>> got;
    for (const auto& e : g.edges()) {
      EXPECT_LT(e.a, e.b);
      EXPECT_GT(e.pi_time, 0.0);
      got.emplace(static_cast<int>(e.a), static_cast<int>(e.b));
    }
    const auto want = oracle_edges(n, c, subset(31));
    const std::set<std::pair<int, int>> want_set(want.begin(), want.end());
    EXPECT_EQ(got, want_set);
    EXPECT_TRUE(g.connected());
  }
}

TEST(Route, HopCountsMatchBfsForEverySubset) {
  const DeviceParams p;
  for (ChargeState c : {ChargeState::Ionised, ChargeState::Neutral})
    for (int bits = 0; bits < 32; ++bits) {
      const auto ms = subset(bits);
      const TransitionGraph g(p, c, ms);
      const auto& n = g.nodes();
      const auto edges = oracle_edges(n, c, ms);
      for (std::size_t i = 0; i < n.size(); ++i) {
        const auto dist = oracle::bfs(static_cast<int>(n.size()), edges, static_cast<int>(i));
        for (std::size_t j = 0; j < n.size(); ++j) {
          const Route r = route(g, n[i], n[j], RouteCost::Hops);
          ASSERT_EQ(r.found, dist[j] >= 0) << n[i].str() << " -> " << n[j].str() << " bits " << bits;
          if (!r.found) continue;
          EXPECT_EQ(static_cast<int>(r.hops.size()), dist[j]);
          EXPECT_EQ(r.cost, dist[j]);
          ASSERT_EQ(r.nodes.size(), r.hops.size() + 1);
          EXPECT_EQ(r.nodes.front(), n[i]);
          EXPECT_EQ(r.nodes.back(), n[j]);
          for (const auto& h : r.hops) EXPECT_TRUE(ms.count(h.transition.mechanism));
        }
      }
    }
}

TEST(Route, TieBreakIsLexicographic) {
  const DeviceParams p;
  for (ChargeState c : {ChargeState::Ionised, ChargeState::Neutral})
    for (int bits : {31, 1, 1 | 2, 4 | 8, 2 | 16}) {
      const auto ms = subset(bits);
      const TransitionGraph g(p, c, ms);
      const auto& n = g.nodes();
      const auto edges = oracle_edges(n, c, ms);
      for (std::size_t i = 0; i < n.size(); ++i) {
        const auto dist = oracle::bfs(static_cast<int>(n.size()), edges, static_cast<int>(i));
        for (std::size_t j = 0; j < n.size(); ++j) {
          if (dist[j] < 0) continue;
          const auto want = best_shortest_path(n, edges, static_cast<int>(i), static_cast<int>(j), dist[j]);
          EXPECT_EQ(strings(route(g, n[i], n[j], RouteCost::Hops).nodes), want);
        }
      }
    }
}

TEST(Route, TimeCostMatchesFloydWarshall) {
  const DeviceParams p;
  const TransitionGraph g(p, ChargeState::Neutral, subset(31));
  const std::size_t n = g.nodes().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t k = 0; k < n; ++k) d[k][k] = 0;
  for (const auto& e : g.edges()) d[e.a][e.b] = d[e.b][e.a] = std::min(d[e.a][e.b], e.pi_time);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Route r = route(g, g.nodes()[i], g.nodes()[j], RouteCost::Time);
      ASSERT_TRUE(r.found);
      EXPECT_NEAR(r.cost, d[i][j], 1e-12 * std::max(1.0, d[i][j]));
      double sum = 0;
      for (const auto& h : r.hops) sum += h.pi_time;
      EXPECT_NEAR(sum, r.cost, 1e-15);
    }
}

TEST(Route, SpecialCases) {
  const DeviceParams p;
  const BasisLabel lo{false, HalfInt(), -kHalf}, hi{false, HalfInt(), kHalf};
  EXPECT_FALSE(route(lo, hi, {Mechanism::NER1}, RouteCost::Hops, p).found);
  const Route nmr = route(lo, hi, {Mechanism::NER1, Mechanism::NMR}, RouteCost::Hops, p);
  EXPECT_EQ(nmr.hops.size(), 1u);
  const BasisLabel d{true, -kHalf, kHalf}, u{true, kHalf, kHalf};
  const Route esr = route(d, u, {Mechanism::ESR}, RouteCost::Hops, p);
  ASSERT_EQ(esr.hops.size(), 1u);
  EXPECT_EQ(esr.hops[0].transition.mechanism, Mechanism::ESR);
  const Route self = route(d, d, {Mechanism::ESR}, RouteCost::Hops, p);
  EXPECT_TRUE(self.found);
  EXPECT_TRUE(self.hops.empty());
  EXPECT_THROW(route(lo, d, {Mechanism::NMR}, RouteCost::Hops, p), std::invalid_argument);
  std::stringstream ss;
  write_route_json(ss, esr, RouteCost::Hops);
  const auto j = nlohmann::json::parse(ss.str());
  EXPECT_EQ(j.at("hops").size(), esr.hops.size());
  EXPECT_EQ(j.at("found"), true);
}

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

TEST(Plan, KnownStartChain) {
  const DeviceParams p;
  const auto plan = plan_initialization(h(-7), h(7), p);
  EXPECT_EQ(plan.size(), 28u);
  EXPECT_EQ(microwave_pulse_count(plan), 21u);
  EXPECT_EQ(plan.front().kind, PlanStepKind::LoadElectron);
  EXPECT_TRUE(plan_initialization(h(3), h(3), p).empty());
  const auto down = plan_initialization(h(7), h(-7), p);
  EXPECT_EQ(down.size(), 14u);
  EXPECT_EQ(down[1].subspace, 7);
  EXPECT_EQ(down.back().subspace, 1);
  EXPECT_THROW(plan_initialization(h(9), h(7), p), std::invalid_argument);
}

TEST(Plan, UnknownStartRounds) {
  const DeviceParams p;
  PlanOptions o;
  o.repetitions = 2;
  const auto plan = plan_initialization(std::nullopt, h(1), p, o);
  std::vector<int> order;
  for (const auto& s : plan)
    if (s.kind == PlanStepKind::LoadElectron) order.push_back(s.subspace);
  const std::vector<int> round = {1, 2, 3, 4, 7, 6, 5};
  std::vector<int> want = round;
  want.insert(want.end(), round.begin(), round.end());
  EXPECT_EQ(order, want);
  EXPECT_EQ(plan_initialization(std::nullopt, h(1), p).size(), 440u);
}

TEST(Plan, IqIdentitiesHoldExactly) {
  const DeviceParams p;
  const PlanOptions o;
  for (int k = 1; k <= 7; ++k) {
    const auto s = raise_sequence(k, p, o);
    ASSERT_EQ(s.size(), 4u);
    const double carrier = s[3].target->frequency;
    EXPECT_EQ(s[1].carrier, carrier);
    EXPECT_EQ(s[1].iq_offset, -p.a / 2 - p.nuclear_zeeman() - o.depth);
    EXPECT_EQ(s[2].iq_offset, p.a / 2 - p.nuclear_zeeman() - o.depth);
    EXPECT_EQ(s[1].sweep, 2 * o.depth);
    EXPECT_EQ(s[3].iq_offset, o.depth);
    EXPECT_EQ(s[3].sweep, -2 * o.depth);
    EXPECT_EQ(s[3].target->mechanism, Mechanism::EDSR);
    // each chirp crosses its line
    for (int j = 1; j <= 3; ++j) EXPECT_LT(std::abs(s[j].center() - s[j].target->frequency), o.depth);
  }
  PlanOptions exact = o;
  exact.source = FrequencySource::Oracle;
  for (int k = 1; k <= 7; ++k)
    for (const auto& s : raise_sequence(k, p, exact))
      if (s.target) EXPECT_NEAR(s.center(), s.target->frequency, 1e-6);
}

std::vector<double> at(HalfInt m, const DeviceParams& p) {
  std::vector<double> v(p.nuclear_spin.twice() + 1, 0.0);
  v[(p.nuclear_spin - m).twice() / 2] = 1.0;
  return v;
}

TEST(Verify, PlanReachesTarget) {
  const DeviceParams p;
  NoiseModel n;
  n.readout_flip = 0;
  const auto plan = plan_initialization(h(-7), h(7), p);
  const auto v = verify_plan(plan, at(h(-7), p), h(7), p, n);
  double bound = 1.0;
  for (double q : v.step_probabilities)
    if (q > 0) bound *= q;
  EXPECT_GE(v.target_population, bound - 1e-12);
  EXPECT_GT(v.target_population, 0.99);
  // from a uniform mixture the repeated rounds still converge
  const std::vector<double> uniform(8, 1.0 / 8);
  EXPECT_GT(verify_plan(plan_initialization(std::nullopt, h(1), p), uniform, h(1), p, n).target_population, 0.99);
}

TEST(Verify, WrongOffsetsMissTheLines) {
  const DeviceParams p;
  NoiseModel n;
  n.readout_flip = 0;
  auto plan = plan_initialization(h(-7), h(7), p);
  for (auto& s : plan) s.iq_offset += 5e6;
  EXPECT_LT(verify_plan(plan, at(h(-7), p), h(7), p, n).target_population, 1e-9);
}

TEST(Verify, RepeatingAConvergedPlanChangesNothing) {
  const DeviceParams p;
  NoiseModel n;
  n.readout_flip = 0;
  const auto plan = plan_initialization(std::nullopt, h(-3), p);
  const auto once = verify_plan(plan, std::vector<double>(8, 0.125), h(-3), p, n);
  const auto twice = verify_plan(plan, once.nuclear_populations, h(-3), p, n);
  EXPECT_NEAR(twice.target_population, once.target_population, 1e-6);
  std::stringstream ss;
  write_plan_json(ss, plan);
  const auto j = nlohmann::json::parse(ss.str());
  EXPECT_EQ(j.at("steps").size(), plan.size());
}

}  // namespace
}  // namespace donorsim
