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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "donorsim/dynamics.hpp"
#include "donorsim/gst.hpp"
#include "donorsim/hamiltonians.hpp"
#include "donorsim/params_io.hpp"
#include "donorsim/perturbation.hpp"
#include "donorsim/spectroscopy.hpp"
#include "donorsim/stark.hpp"

namespace donorsim::cli {
namespace {

using nlohmann::ordered_json;

struct RunKey {
  const char* name;
  std::function<void(Session&, double)> set;
  std::function<double(const Session&)> get;
};

int as_int(const std::string& key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(key + " must be an integer");
  return static_cast<int>(v);
}

const std::vector<RunKey>& run_keys() {
  static const std::vector<RunKey> keys = {
      {"drive.nmr_b1", [](Session& s, double v) { s.drives.nmr_b1 = v; },
       [](const Session& s) { return s.drives.nmr_b1; }},
      {"drive.esr_b1", [](Session& s, double v) { s.drives.esr_b1 = v; },
       [](const Session& s) { return s.drives.esr_b1; }},
      {"drive.ner_dq", [](Session& s, double v) { s.drives.ner_dq = v; },
       [](const Session& s) { return s.drives.ner_dq; }},
      {"drive.edsr_da", [](Session& s, double v) { s.drives.edsr_da = v; },
       [](const Session& s) { return s.drives.edsr_da; }},
      {"plan.repetitions", [](Session& s, double v) { s.plan.repetitions = as_int("plan.repetitions", v); },
       [](const Session& s) { return static_cast<double>(s.plan.repetitions); }},
      {"plan.depth", [](Session& s, double v) { s.plan.depth = v; },
       [](const Session& s) { return s.plan.depth; }},
      {"plan.duration", [](Session& s, double v) { s.plan.duration = v; },
       [](const Session& s) { return s.plan.duration; }},
      {"noise.sigma_b", [](Session& s, double v) { s.noise.sigma_b = v; },
       [](const Session& s) { return s.noise.sigma_b; }},
      {"noise.sigma_fq", [](Session& s, double v) { s.noise.sigma_fq = v; },
       [](const Session& s) { return s.noise.sigma_fq; }},
      {"noise.readout_flip", [](Session& s, double v) { s.noise.readout_flip = v; },
       [](const Session& s) { return s.noise.readout_flip; }},
      {"noise.t1_electron", [](Session& s, double v) { s.noise.t1_electron = v; },
       [](const Session& s) { return s.noise.t1_electron; }},
  };
  return keys;
}

std::string fmt(double v) { return format_double(v); }

std::string csv_header(const std::string& command, const Echo& options, const Session& s) {
  std::ostringstream out;
  out << "# donorsim " << command << '\n';
  for (const auto& [k, v] : options) out << "# option " << k << " = " << v << '\n';
  for (const auto& [k, v] : s.config) out << "# config " << k << " = " << v << '\n';
  return out.str();
}

std::string json_report(const std::string& command, const Echo& options, const Session& s,
                        const ordered_json& result) {
  ordered_json j;
  j["command"] = command;
  j["options"] = ordered_json::object();
  for (const auto& [k, v] : options) j["options"][k] = v;
  j["config"] = ordered_json::object();
  for (const auto& [k, v] : s.config) j["config"][k] = v;
  j["result"] = result;
  return j.dump(2) + "\n";
}

std::vector<double> linspace(double hi, int points, const char* what) {
  if (points < 2) throw UsageError(std::string(what) + " needs at least 2 points");
  if (!(hi > 0) || !std::isfinite(hi)) throw UsageError(std::string(what) + " must be positive");
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) v[static_cast<std::size_t>(k)] = hi * k / (points - 1);
  return v;
}

// Lower m_I first, then lower m_S.
bool label_order(const BasisLabel& a, const BasisLabel& b) {
  if (a.m_i != b.m_i) return a.m_i < b.m_i;
  return a.m_s < b.m_s;
}

std::string pair_id(BasisLabel a, BasisLabel b) {
  if (label_order(b, a)) std::swap(a, b);
  return a.str() + ":" + b.str();
}

StarkModel stark_preset(const Session& s, const std::string& preset) {
  if (preset == "config") return s.params.stark;
  if (preset == "esr") return StarkModel::esr_calibrated();
  if (preset == "nmr") return StarkModel::nmr_calibrated();
  throw UsageError("unknown stark preset '" + preset + "' (config, esr, nmr)");
}

HalfInt parse_nuclear(const std::string& text) {
  std::string_view v = text;
  if (!v.empty() && v.front() == 'm') v.remove_prefix(1);
  try {
    return HalfInt::parse(v);
  } catch (const std::invalid_argument&) {
    throw UsageError("bad nuclear projection '" + text + "'");
  }
}

BasisLabel parse_label(const std::string& text) {
  try {
    return BasisLabel::parse(text);
  } catch (const std::invalid_argument&) {
    throw UsageError("bad state label '" + text + "'");
  }
}

Transition find_transition(const Session& s, const std::string& id) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw UsageError("transition must read 'from:to'");
  const BasisLabel a = parse_label(id.substr(0, colon));
  const BasisLabel b = parse_label(id.substr(colon + 1));
  if (a.has_electron != b.has_electron) throw UsageError("transition endpoints must share a charge state");
  const ChargeState c = a.has_electron ? ChargeState::Neutral : ChargeState::Ionised;
  const std::string want = pair_id(a, b);
  const auto mechanisms = c == ChargeState::Neutral
                              ? std::vector<Mechanism>{Mechanism::NMR, Mechanism::ESR, Mechanism::EDSR}
                              : std::vector<Mechanism>{Mechanism::NMR, Mechanism::NER2};
  for (Mechanism m : mechanisms)
    for (const auto& t : compute_transitions(s.params, m, c))
      if (t.id() == want) return t;
  throw UsageError("no allowed transition " + id);
}

std::string decay_command(const Session& s, const DecayArgs& a, DecaySequence kind) {
  const bool ramsey = kind == DecaySequence::Ramsey;
  const Transition t = find_transition(s, a.transition);
  NoiseModel noise = s.noise;
  if (a.sigma_b) noise.sigma_b = *a.sigma_b;
  if (a.sigma_fq) noise.sigma_fq = *a.sigma_fq;
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const DephasingEstimate est = dephasing_rate(t, noise, s.params);
  double tau_max = 0.0;
  if (a.tau_max) {
    tau_max = *a.tau_max;
  } else {
    if (!std::isfinite(est.t2_star))
      throw UsageError("--tau-max is required when the noise model does not dephase the line");
    tau_max = 3.0 * est.t2_star;
  }
  const auto tau = linspace(tau_max, a.points, "tau");
  if (a.draws < 100) throw UsageError("--draws must be at least 100");
  const DecayCurve curve = simulate_decay(kind, t, noise, s.params, tau, a.draws, a.seed, a.detuning);

  const Echo options = {{"transition", t.id()},
                        {"sigma_b", fmt(noise.sigma_b)},
                        {"sigma_fq", fmt(noise.sigma_fq)},
                        {"detuning", fmt(a.detuning)},
                        {"tau_max", fmt(tau_max)},
                        {"points", std::to_string(a.points)},
                        {"draws", std::to_string(a.draws)},
                        {"seed", std::to_string(a.seed)}};
  std::ostringstream out;
  out << csv_header(ramsey ? "ramsey" : "hahn", options, s);
  out << "# result mechanism = " << to_string(t.mechanism) << '\n';
  out << "# result frequency_hz = " << fmt(t.frequency) << '\n';
  out << "# result sigma_f_hz = " << fmt(est.sigma_f) << '\n';
  out << "# result t2star_s = " << fmt(est.t2_star) << '\n';
  if (ramsey && a.detuning != 0.0) {
    const SinusoidFit f = fit_sinusoid(curve.tau, curve.probability);
    out << "# fit model = sinusoid\n";
    out << "# fit status = " << to_string(f.status) << '\n';
    if (f.ok()) out << "# fit frequency_hz = " << fmt(f.frequency) << '\n';
  } else {
    const DecayFit f = fit_decay(curve, ramsey ? DecayModel::Gaussian : DecayModel::StretchedExp);
    out << "# fit model = " << (ramsey ? "gaussian" : "stretched") << '\n';
    out << "# fit status = " << to_string(f.status) << '\n';
    if (f.ok()) {
      out << "# fit t2_s = " << fmt(f.t2) << '\n';
      out << "# fit beta = " << fmt(f.beta) << '\n';
    }
  }
  write_decay_csv(out, curve);
  return out.str();
}

ordered_json parse_json(const std::string& text) { return ordered_json::parse(text); }

}  // namespace

Session load_session(const std::string& path) {
  Session s;
  KeyValues kv;
  if (!path.empty()) {
    try {
      kv = load_key_values(path);
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
  }
  std::map<std::string, const RunKey*> known;
  for (const auto& k : run_keys()) known[k.name] = &k;
  for (const auto& [k, v] : kv)
    if (!is_device_key(k) && !known.count(k)) throw UsageError("unknown config key '" + k + "'");
  try {
    s.params = device_params_from(kv);
    s.params.validate();
    for (const auto& [k, v] : kv)
      if (auto it = known.find(k); it != known.end()) it->second->set(s, parse_double(k, v));
    s.noise.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  s.plan.drives = s.drives;
  s.config = device_params_entries(s.params);
  for (const auto& k : run_keys()) s.config.emplace_back(k.name, fmt(k.get(s)));
  return s;
}

MechanismChoice parse_mechanism_choice(const std::string& s) {
  if (s == "nmr+") return {Mechanism::NMR, ChargeState::Ionised};
  if (s == "nmr0") return {Mechanism::NMR, ChargeState::Neutral};
  if (s == "ner1+") return {Mechanism::NER1, ChargeState::Ionised};
  if (s == "ner2+") return {Mechanism::NER2, ChargeState::Ionised};
  if (s == "esr") return {Mechanism::ESR, ChargeState::Neutral};
  if (s == "edsr") return {Mechanism::EDSR, ChargeState::Neutral};
  throw UsageError("unknown mechanism '" + s + "' (nmr+, nmr0, ner1+, ner2+, esr, edsr)");
}

namespace {

std::optional<ElectronBranch> parse_branch(const SpectrumArgs& a, const MechanismChoice& c) {
  if (a.branch == "both") return std::nullopt;
  if (c.mechanism != Mechanism::NMR || c.charge != ChargeState::Neutral)
    throw UsageError("--branch applies to nmr0 only");
  if (a.branch == "down") return ElectronBranch::Down;
  if (a.branch == "up") return ElectronBranch::Up;
  throw UsageError("unknown branch '" + a.branch + "' (both, down, up)");
}

Echo spectrum_options(const SpectrumArgs& a) {
  return {{"mechanism", a.mechanism},
          {"branch", a.branch},
          {"linewidth", fmt(a.linewidth)},
          {"points", std::to_string(a.points)}};
}

std::vector<Transition> spectrum_transitions(const Session& s, const SpectrumArgs& a) {
  const MechanismChoice c = parse_mechanism_choice(a.mechanism);
  return compute_transitions(s.params, c.mechanism, c.charge, parse_branch(a, c));
}

}  // namespace

std::string cmd_spectrum(const Session& s, const SpectrumArgs& a) {
  const auto lines = spectrum_transitions(s, a);
  std::ostringstream out;
  out << csv_header("spectrum", spectrum_options(a), s);
  write_transitions_csv(out, lines);
  return out.str();
}

std::string cmd_spectrum_curve(const Session& s, const SpectrumArgs& a) {
  const auto lines = spectrum_transitions(s, a);
  if (!(a.linewidth > 0)) throw UsageError("--linewidth must be positive");
  if (a.points < 2) throw UsageError("--points must be at least 2");
  std::ostringstream out;
  out << csv_header("spectrum", spectrum_options(a), s);
  out << "frequency_hz,intensity\n";
  if (lines.empty()) return out.str();
  const SampledCurve c = spectrum(lines, a.linewidth, grid_around(lines, a.linewidth, a.points));
  for (std::size_t k = 0; k < c.x.size(); ++k) out << fmt(c.x[k]) << ',' << fmt(c.y[k]) << '\n';
  return out.str();
}

std::string cmd_rabi(const Session& s, const RabiArgs& a) {
  const MechanismChoice c = parse_mechanism_choice(a.mechanism);
  const double amplitude = a.amplitude ? *a.amplitude : drive_amplitude(c.mechanism, s.drives);
  if (!(amplitude > 0)) throw UsageError("--amplitude must be positive");

  // every label pair the mechanism could connect, drivable or not
  const auto labels = basis_labels(s.params, c.charge);
  std::vector<std::pair<BasisLabel, BasisLabel>> pairs;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t k = i + 1; k < labels.size(); ++k)
      if (selection_rule(c.mechanism, labels[i], labels[k])) {
        auto p = std::pair{labels[i], labels[k]};
        if (label_order(p.second, p.first)) std::swap(p.first, p.second);
        pairs.push_back(p);
      }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& x, const auto& y) { return label_order(x.first, y.first); });
  std::map<std::string, Transition> allowed;
  for (const auto& t : compute_transitions(s.params, c.mechanism, c.charge)) allowed[t.id()] = t;

  DriveSpec spec;
  spec.mechanism = c.mechanism;
  spec.charge_state = c.charge;
  spec.amplitude = amplitude;
  spec.duration = 1.0;
  const Echo options = {{"mechanism", a.mechanism}, {"amplitude", fmt(amplitude)}};
  std::ostringstream out;
  out << csv_header("rabi", options, s);
  out << "line,frequency_hz,matrix_element,rabi_hz,pi_time_s\n";
  for (const auto& [from, to] : pairs) {
    const std::string id = pair_id(from, to);
    out << id;
    if (auto it = allowed.find(id); it != allowed.end()) {
      const Transition& t = it->second;
      spec.frequency = t.frequency;
      const double f = rabi_rate(t, spec, s.params);
      out << ',' << fmt(t.frequency) << ',' << fmt(t.matrix_element) << ',' << fmt(f) << ','
          << fmt(0.5 / f);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string cmd_stark_scan(const Session& s, const StarkScanArgs& a) {
  FanoutKind kind;
  if (a.mechanism == "esr")
    kind = FanoutKind::ESR;
  else if (a.mechanism == "nmr0")
    kind = FanoutKind::NMRNeutral;
  else if (a.mechanism == "nmr+")
    kind = FanoutKind::NMRIonised;
  else
    throw UsageError("stark-scan follows esr, nmr0 or nmr+ lines");
  const StarkModel model = stark_preset(s, a.preset);
  if (!(a.vmax > 0) || !std::isfinite(a.vmax)) throw UsageError("--vmax must be positive");
  if (a.points < 2) throw UsageError("--points must be at least 2");
  const auto voltages = voltage_grid(a.vmax, a.points);
  DeviceParams p = s.params;
  p.stark = model;
  const FanoutScan scan = fanout_scan(p, model, kind, voltages);
  const StarkSlopes sl = extract_stark_slopes(scan, p);

  const Echo options = {{"mechanism", a.mechanism},
                        {"vmax", fmt(a.vmax)},
                        {"points", std::to_string(a.points)},
                        {"preset", a.preset}};
  std::ostringstream out;
  out << csv_header("stark-scan", options, s);
  out << "# result outside_linear_window = " << (a.vmax > model.linear_window ? "true" : "false") << '\n';
  if (sl.dA_dV) out << "# slope dA_dV = " << fmt(*sl.dA_dV) << '\n';
  if (sl.dGammaEB0_dV) out << "# slope dGammaEB0_dV = " << fmt(*sl.dGammaEB0_dV) << '\n';
  if (sl.dfq_plus_dV) out << "# slope dfq_plus_dV = " << fmt(*sl.dfq_plus_dV) << '\n';
  if (sl.dfq0_dV) out << "# slope dfq0_dV = " << fmt(*sl.dfq0_dV) << '\n';
  write_fanout_csv(out, scan);
  return out.str();
}

std::string cmd_ramsey(const Session& s, const DecayArgs& a) { return decay_command(s, a, DecaySequence::Ramsey); }

std::string cmd_hahn(const Session& s, const DecayArgs& a) { return decay_command(s, a, DecaySequence::Hahn); }

std::string cmd_stark_echo(const Session& s, const StarkEchoArgs& a) {
  StarkPulse pulse;
  try {
    pulse = parse_stark_pulse(a.pulse);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const StarkModel model = stark_preset(s, a.preset);
  const auto tau = linspace(a.tau_max, a.points, "--tau-max");
  const StarkEchoResult r = stark_echo(s.params, model, pulse, a.voltage, tau);

  const Echo options = {{"pulse", a.pulse},
                        {"voltage", fmt(a.voltage)},
                        {"tau_max", fmt(a.tau_max)},
                        {"points", std::to_string(a.points)},
                        {"preset", a.preset}};
  std::ostringstream out;
  out << csv_header("stark-echo", options, s);
  out << "# result target = " << r.target.id() << '\n';
  out << "# result fringe_hz = " << fmt(r.fringe_frequency) << '\n';
  out << "tau_s,probability\n";
  for (std::size_t k = 0; k < r.tau.size(); ++k) out << fmt(r.tau[k]) << ',' << fmt(r.probability[k]) << '\n';
  return out.str();
}

std::string cmd_plan_init(const Session& s, const PlanArgs& a) {
  const HalfInt spin = s.params.nuclear_spin;
  const HalfInt target = parse_nuclear(a.target);
  std::optional<HalfInt> current;
  if (!a.current.empty() && a.current != "unknown") current = parse_nuclear(a.current);
  PlanOptions o = s.plan;
  if (a.repetitions) o.repetitions = *a.repetitions;
  if (a.depth) o.depth = *a.depth;
  if (a.duration) o.duration = *a.duration;
  if (a.source == "identity")
    o.source = FrequencySource::Identity;
  else if (a.source == "oracle")
    o.source = FrequencySource::Oracle;
  else
    throw UsageError("unknown frequency source '" + a.source + "' (identity, oracle)");
  const auto plan = plan_initialization(current, target, s.params, o);

  std::ostringstream ps;
  write_plan_json(ps, plan);
  ordered_json result = parse_json(ps.str());
  result["microwave_pulses"] = microwave_pulse_count(plan);
  if (a.verify) {
    const std::size_t n = static_cast<std::size_t>(spin.twice()) + 1;
    std::vector<double> initial(n, current ? 0.0 : 1.0 / static_cast<double>(n));
    if (current) initial[static_cast<std::size_t>((spin.twice() - current->twice()) / 2)] = 1.0;
    const auto v = verify_plan(plan, initial, target, s.params, s.noise, o.drives);
    result["verification"] = {{"target_population", v.target_population},
                              {"nuclear_populations", v.nuclear_populations}};
  }
  const Echo options = {{"target", target.str()},
                        {"current", current ? current->str() : std::string("unknown")},
                        {"repetitions", std::to_string(o.repetitions)},
                        {"depth", fmt(o.depth)},
                        {"duration", fmt(o.duration)},
                        {"source", a.source},
                        {"verify", a.verify ? "true" : "false"}};
  return json_report("plan-init", options, s, result);
}

std::string cmd_route(const Session& s, const RouteArgs& a) {
  std::set<Mechanism> enabled;
  std::stringstream list(a.mechanisms);
  for (std::string tok; std::getline(list, tok, ',');) {
    if (!tok.empty() && (tok.back() == '+' || tok.back() == '0')) tok.pop_back();
    try {
      enabled.insert(parse_mechanism(tok));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (enabled.empty()) throw UsageError("--mechanisms names no mechanism");
  RouteCost cost;
  try {
    cost = parse_route_cost(a.cost);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const BasisLabel from = parse_label(a.from);
  const BasisLabel to = parse_label(a.to);
  const Route r = route(from, to, enabled, cost, s.params, s.drives);
  std::ostringstream rs;
  write_route_json(rs, r, cost);
  const Echo options = {{"from", from.str()}, {"to", to.str()}, {"mechanisms", a.mechanisms}, {"cost", a.cost}};
  return json_report("route", options, s, parse_json(rs.str()));
}

std::string cmd_gst(const Session& s, const GstArgs& a) {
  GstOptions o;
  o.max_depth = a.max_depth;
  o.shots = a.shots;
  o.bootstrap = a.bootstrap;
  o.rabi_frequency = a.rabi;
  o.seed = a.seed;
  const GateReport r = gst_lite({a.over_rotation_x, a.over_rotation_y, a.detuning}, o);
  std::ostringstream rs;
  write_gate_report_json(rs, r);
  const Echo options = {{"over_rotation_x", fmt(a.over_rotation_x)},
                        {"over_rotation_y", fmt(a.over_rotation_y)},
                        {"detuning", fmt(a.detuning)},
                        {"max_depth", std::to_string(a.max_depth)},
                        {"shots", std::to_string(a.shots)},
                        {"bootstrap", std::to_string(a.bootstrap)},
                        {"rabi", fmt(a.rabi)},
                        {"seed", std::to_string(a.seed)}};
  return json_report("gst", options, s, parse_json(rs.str()));
}

std::string cmd_extract(const Session& s, const ExtractArgs& a) {
  if (a.inputs.empty()) throw UsageError("--input names no file");
  std::vector<Transition> lines;
  for (const auto& path : a.inputs) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    const auto more = read_transitions_csv(in);
    lines.insert(lines.end(), more.begin(), more.end());
  }
  std::vector<Transition> nmr_plus, nmr_down, esr;
  for (const auto& t : lines) {
    if (t.mechanism == Mechanism::NMR && t.charge_state() == ChargeState::Ionised) nmr_plus.push_back(t);
    if (t.mechanism == Mechanism::NMR && t.charge_state() == ChargeState::Neutral && t.from.m_s < HalfInt())
      nmr_down.push_back(t);
    if (t.mechanism == Mechanism::ESR) esr.push_back(t);
  }
  std::vector<std::pair<std::string, double>> rows;
  if (!nmr_plus.empty()) {
    rows.emplace_back("b0_from_nmr_plus", extract_B0_from_nmr_plus(nmr_plus, s.params.gamma_n));
    rows.emplace_back("fq_plus_from_nmr_plus", extract_fq_plus(nmr_plus));
  }
  if (!nmr_down.empty()) {
    const double a_hz = extract_A_from_nmr0(nmr_down, s.params);
    rows.emplace_back("a_from_nmr0", a_hz);
    rows.emplace_back("fq_neutral_from_nmr0", extract_fq(nmr_down, s.params, a_hz));
  }
  if (!esr.empty()) rows.emplace_back("a_from_esr", extract_A_from_esr(esr));
  if (rows.empty()) throw UsageError("input holds no nmr+, electron-down nmr0 or esr lines");

  std::ostringstream out;
  Echo options;
  for (const auto& path : a.inputs) options.emplace_back("input", path);
  out << csv_header("extract", options, s);
  out << "quantity,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << fmt(v) << '\n';
  return out.str();
}

}  // namespace donorsim::cli
