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

#include "donorsim/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "donorsim/dynamics.hpp"
#include "donorsim/hamiltonians.hpp"

namespace donorsim {

double drive_amplitude(Mechanism m, const DriveStrengths& d) {
  switch (m) {
    case Mechanism::NMR: return d.nmr_b1;
    case Mechanism::ESR: return d.esr_b1;
    case Mechanism::NER1:
    case Mechanism::NER2: return d.ner_dq;
    case Mechanism::EDSR: return d.edsr_da;
  }
  return 0.0;
}

namespace {

bool exists_in(Mechanism m, ChargeState c) {
  switch (m) {
    case Mechanism::NMR: return true;
    case Mechanism::ESR:
    case Mechanism::EDSR: return c == ChargeState::Neutral;
    case Mechanism::NER1:
    case Mechanism::NER2: return c == ChargeState::Ionised;
  }
  return false;
}

double line_rabi(const Transition& t, const DeviceParams& p, const DriveStrengths& d) {
  DriveSpec spec;
  spec.mechanism = t.mechanism;
  spec.charge_state = t.charge_state();
  spec.frequency = t.frequency;
  spec.amplitude = drive_amplitude(t.mechanism, d);
  return rabi_rate(t, spec, p);
}

}  // namespace

TransitionGraph::TransitionGraph(const DeviceParams& p, ChargeState c, const std::set<Mechanism>& enabled,
                                 const DriveStrengths& d)
    : charge_(c), nodes_(basis_labels(p, c)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const BasisLabel& a, const BasisLabel& b) { return a.str() < b.str(); });
  for (Mechanism m : enabled) {
    if (!exists_in(m, c)) continue;
    for (const auto& t : compute_transitions(p, m, c)) {
      const double fr = line_rabi(t, p, d);
      if (!(fr > 0)) continue;
      std::size_t a = *index_of(t.from), b = *index_of(t.to);
      if (a > b) std::swap(a, b);
      edges_.push_back({a, b, t, 1.0 / (2.0 * fr)});
    }
  }
}

std::optional<std::size_t> TransitionGraph::index_of(const BasisLabel& l) const {
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    if (nodes_[k] == l) return k;
  return std::nullopt;
}

bool TransitionGraph::connected() const {
  if (nodes_.empty()) return true;
  std::vector<std::vector<std::size_t>> adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    for (std::size_t m : adj[n])
      if (!seen[m]) {
        seen[m] = true;
        stack.push_back(m);
      }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
}

const char* to_string(RouteCost c) { return c == RouteCost::Hops ? "hops" : "time"; }

RouteCost parse_route_cost(const std::string& s) {
  if (s == "hops") return RouteCost::Hops;
  if (s == "time") return RouteCost::Time;
  throw std::invalid_argument("unknown route cost '" + s + "' (hops, time)");
}

Route route(const TransitionGraph& g, const BasisLabel& from, const BasisLabel& to, RouteCost cost) {
  const auto ia = g.index_of(from), ib = g.index_of(to);
  if (!ia || !ib)
    throw std::invalid_argument("route endpoints " + from.str() + ", " + to.str() + " are not " +
                                to_string(g.charge_state()) + " states");
  const std::size_t n = g.nodes().size();

  // best edge per node pair: fastest, then lowest mechanism
  std::map<std::pair<std::size_t, std::size_t>, const GraphEdge*> best;
  for (const auto& e : g.edges()) {
    auto& slot = best[{e.a, e.b}];
    if (!slot || e.pi_time < slot->pi_time ||
        (e.pi_time == slot->pi_time && e.transition.mechanism < slot->transition.mechanism))
      slot = &e;
  }
  std::vector<std::vector<std::pair<std::size_t, const GraphEdge*>>> adj(n);
  for (const auto& [key, e] : best) {
    adj[key.first].push_back({key.second, e});
    adj[key.second].push_back({key.first, e});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  auto weight = [&](const GraphEdge* e) { return cost == RouteCost::Hops ? 1.0 : e->pi_time; };

  // distances to the destination, then a greedy walk that takes the
  // smallest-labeled neighbour still on an optimal path
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[*ib] = 0.0;
  queue.push({0.0, *ib});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, e] : adj[u])
      if (d + weight(e) < dist[v]) {
        dist[v] = d + weight(e);
        queue.push({dist[v], v});
      }
  }

  Route r;
  if (dist[*ia] == inf) return r;
  r.found = true;
  r.cost = dist[*ia];
  std::size_t cur = *ia;
  r.nodes.push_back(g.nodes()[cur]);
  while (cur != *ib) {
    const GraphEdge* step = nullptr;
    std::size_t next = cur;
    for (const auto& [v, e] : adj[cur]) {
      const double slack = dist[cur] - (weight(e) + dist[v]);
      if (std::abs(slack) <= 1e-12 * std::max(1.0, dist[cur])) {
        step = e;
        next = v;
        break;
      }
    }
    if (!step) throw std::logic_error("route reconstruction lost the optimal path");
    r.hops.push_back({g.nodes()[cur], g.nodes()[next], step->transition, step->pi_time});
    r.nodes.push_back(g.nodes()[next]);
    cur = next;
  }
  return r;
}

Route route(const BasisLabel& from, const BasisLabel& to, const std::set<Mechanism>& enabled, RouteCost cost,
            const DeviceParams& p, const DriveStrengths& d) {
  if (from.has_electron != to.has_electron)
    throw std::invalid_argument("route endpoints must share a charge state");
  const ChargeState c = from.has_electron ? ChargeState::Neutral : ChargeState::Ionised;
  return route(TransitionGraph(p, c, enabled, d), from, to, cost);
}

void write_route_json(std::ostream& out, const Route& r, RouteCost cost) {
  nlohmann::ordered_json j;
  j["found"] = r.found;
  j["cost_kind"] = to_string(cost);
  j["cost"] = r.cost;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : r.nodes) j["nodes"].push_back(n.str());
  j["hops"] = nlohmann::json::array();
  for (const auto& h : r.hops)
    j["hops"].push_back({{"from", h.from.str()},
                         {"to", h.to.str()},
                         {"mechanism", to_string(h.transition.mechanism)},
                         {"frequency_hz", h.transition.frequency},
                         {"pi_time_s", h.pi_time}});
  out << j.dump(2) << '\n';
}

const char* to_string(PlanStepKind k) {
  switch (k) {
    case PlanStepKind::LoadElectron: return "load-electron";
    case PlanStepKind::AdiabaticESR: return "aESR";
    case PlanStepKind::AdiabaticEDSR: return "aEDSR";
    case PlanStepKind::Read: return "read";
  }
  return "?";
}

namespace {

struct SubspaceLines {
  Transition esr_lower;
  Transition esr_upper;
  Transition edsr;
};

SubspaceLines subspace_lines(int subspace, const DeviceParams& p) {
  const HalfInt spin = p.nuclear_spin;
  if (subspace < 1 || subspace > spin.twice())
    throw std::invalid_argument("subspace index outside 1.." + std::to_string(spin.twice()));
  const HalfInt m_lo = -spin + (subspace - 1), m_hi = m_lo + 1;
  SubspaceLines s;
  bool lo = false, hi = false, flip = false;
  for (const auto& t : compute_transitions(p, Mechanism::ESR, ChargeState::Neutral)) {
    if (t.from.m_i == m_lo) {
      s.esr_lower = t;
      lo = true;
    }
    if (t.from.m_i == m_hi) {
      s.esr_upper = t;
      hi = true;
    }
  }
  const BasisLabel up_lo{true, kHalf, m_lo}, dn_hi{true, -kHalf, m_hi};
  for (const auto& t : compute_transitions(p, Mechanism::EDSR, ChargeState::Neutral))
    if ((t.from == up_lo && t.to == dn_hi) || (t.from == dn_hi && t.to == up_lo)) {
      s.edsr = t;
      flip = true;
    }
  if (!lo || !hi || !flip) throw std::runtime_error("subspace lines not found");
  return s;
}

PlanStep load_step(int subspace) {
  PlanStep s;
  s.kind = PlanStepKind::LoadElectron;
  s.subspace = subspace;
  return s;
}

PlanStep edsr_step(int subspace, const SubspaceLines& l, const PlanOptions& o) {
  PlanStep s;
  s.kind = PlanStepKind::AdiabaticEDSR;
  s.subspace = subspace;
  s.carrier = l.edsr.frequency;
  s.iq_offset = o.depth;
  s.sweep = -2.0 * o.depth;
  s.duration = o.duration;
  s.target = l.edsr;
  return s;
}

void check_options(const PlanOptions& o) {
  if (!(o.depth > 0) || !(o.duration > 0)) throw std::invalid_argument("adiabatic depth and duration must be positive");
  if (o.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
}

}  // namespace

std::vector<PlanStep> raise_sequence(int subspace, const DeviceParams& p, const PlanOptions& o) {
  check_options(o);
  const SubspaceLines l = subspace_lines(subspace, p);
  const double carrier = l.edsr.frequency;
  const double nz = p.nuclear_zeeman();
  PlanStep lo, hi;
  lo.kind = hi.kind = PlanStepKind::AdiabaticESR;
  lo.subspace = hi.subspace = subspace;
  lo.carrier = hi.carrier = carrier;
  lo.sweep = hi.sweep = 2.0 * o.depth;
  lo.duration = hi.duration = o.duration;
  if (o.source == FrequencySource::Identity) {
    lo.iq_offset = -p.a / 2 - nz - o.depth;
    hi.iq_offset = p.a / 2 - nz - o.depth;
  } else {
    lo.iq_offset = l.esr_lower.frequency - carrier - o.depth;
    hi.iq_offset = l.esr_upper.frequency - carrier - o.depth;
  }
  lo.target = l.esr_lower;
  hi.target = l.esr_upper;
  return {load_step(subspace), lo, hi, edsr_step(subspace, l, o)};
}

std::vector<PlanStep> lower_sequence(int subspace, const DeviceParams& p, const PlanOptions& o) {
  check_options(o);
  return {load_step(subspace), edsr_step(subspace, subspace_lines(subspace, p), o)};
}

std::vector<PlanStep> plan_initialization(std::optional<HalfInt> current, HalfInt target, const DeviceParams& p,
                                          const PlanOptions& o) {
  check_options(o);
  const HalfInt spin = p.nuclear_spin;
  auto check = [&](HalfInt m, const char* what) {
    if (m < -spin || m > spin || (m.twice() + spin.twice()) % 2 != 0)
      throw std::invalid_argument(std::string(what) + " m_I " + m.str() + " is not a nuclear level");
  };
  check(target, "target");
  // subspace k has upper level -I + k
  const int k_target = (target + spin).twice() / 2;
  const int k_max = spin.twice();
  std::vector<PlanStep> plan;
  auto append = [&](std::vector<PlanStep> s) { plan.insert(plan.end(), s.begin(), s.end()); };
  if (current) {
    check(*current, "current");
    const int k_current = (*current + spin).twice() / 2;
    for (int k = k_current + 1; k <= k_target; ++k) append(raise_sequence(k, p, o));
    for (int k = k_current; k > k_target; --k) append(lower_sequence(k, p, o));
    return plan;
  }
  for (int rep = 0; rep < o.repetitions; ++rep) {
    for (int k = 1; k <= k_target; ++k) append(raise_sequence(k, p, o));
    for (int k = k_max; k > k_target; --k) append(lower_sequence(k, p, o));
  }
  return plan;
}

std::size_t microwave_pulse_count(const std::vector<PlanStep>& plan) {
  return std::count_if(plan.begin(), plan.end(), [](const PlanStep& s) {
    return s.kind == PlanStepKind::AdiabaticESR || s.kind == PlanStepKind::AdiabaticEDSR;
  });
}

void write_plan_json(std::ostream& out, const std::vector<PlanStep>& plan) {
  nlohmann::ordered_json j;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : plan) {
    nlohmann::ordered_json e;
    e["kind"] = to_string(s.kind);
    e["subspace"] = s.subspace;
    e["carrier_hz"] = s.carrier;
    e["iq_offset_hz"] = s.iq_offset;
    e["sweep_hz"] = s.sweep;
    e["duration_s"] = s.duration;
    if (s.target) e["line"] = s.target->id();
    j["steps"].push_back(e);
  }
  out << j.dump(2) << '\n';
}

PlanVerification verify_plan(const std::vector<PlanStep>& plan, const std::vector<double>& initial_nuclear,
                             HalfInt target, const DeviceParams& p, const NoiseModel& noise,
                             const DriveStrengths& d) {
  noise.validate();
  const HalfInt spin = p.nuclear_spin;
  const std::size_t nn = static_cast<std::size_t>(spin.twice()) + 1;
  if (initial_nuclear.size() != nn) throw std::invalid_argument("initial distribution needs 2I+1 entries");
  double total = 0.0;
  for (double v : initial_nuclear) {
    if (!(v >= 0)) throw std::invalid_argument("initial populations must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("initial populations must sum to 1");

  // product basis: electron index 0 is up, 1 is down; nuclear index 0 is +I
  const auto labels = basis_labels(p, ChargeState::Neutral);
  auto index = [&](const BasisLabel& l) {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == l) return k;
    throw std::logic_error("label outside the neutral basis");
  };
  std::vector<double> pop(labels.size(), 0.0);
  for (std::size_t n = 0; n < nn; ++n) pop[nn + n] = initial_nuclear[n];

  const auto esr = compute_transitions(p, Mechanism::ESR, ChargeState::Neutral);
  const auto edsr = compute_transitions(p, Mechanism::EDSR, ChargeState::Neutral);

  auto shock = [&] {
    const double q = noise.readout_flip;
    if (q == 0) return;
    std::vector<double> next(pop.size(), 0.0);
    for (std::size_t e = 0; e < 2; ++e)
      for (std::size_t n = 0; n < nn; ++n) {
        const double v = pop[e * nn + n];
        next[e * nn + n] += (1 - q) * v;
        const bool has_lo = n > 0, has_hi = n + 1 < nn;
        const int neighbours = int(has_lo) + int(has_hi);
        if (!neighbours) {
          next[e * nn + n] += q * v;
          continue;
        }
        if (has_lo) next[e * nn + n - 1] += q * v / neighbours;
        if (has_hi) next[e * nn + n + 1] += q * v / neighbours;
      }
    pop = next;
  };

  PlanVerification out;
  for (const auto& s : plan) {
    if (s.kind == PlanStepKind::LoadElectron) {
      for (std::size_t n = 0; n < nn; ++n) {
        pop[nn + n] += pop[n];
        pop[n] = 0.0;
      }
      shock();
      continue;
    }
    if (s.kind == PlanStepKind::Read) {
      shock();
      continue;
    }
    if (!(s.duration > 0) || s.sweep == 0) throw std::invalid_argument("adiabatic step needs a sweep and duration");
    const auto& lines = s.kind == PlanStepKind::AdiabaticESR ? esr : edsr;
    const double depth = 0.5 * std::abs(s.sweep);
    double hit = 0.0;
    for (const auto& t : lines) {
      const double prob = adiabatic_inversion(t, s.center(), depth, s.duration, line_rabi(t, p, d));
      if (prob == 0.0) continue;
      const std::size_t a = index(t.from), b = index(t.to);
      const double pa = pop[a], pb = pop[b];
      pop[a] = (1 - prob) * pa + prob * pb;
      pop[b] = (1 - prob) * pb + prob * pa;
      if (s.target && t.id() == s.target->id()) hit = prob;
    }
    out.step_probabilities.push_back(hit);
  }
  out.nuclear_populations.assign(nn, 0.0);
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t n = 0; n < nn; ++n) out.nuclear_populations[n] += pop[e * nn + n];
  out.target_population = out.nuclear_populations[static_cast<std::size_t>((spin - target).twice() / 2)];
  return out;
}

}  // namespace donorsim
