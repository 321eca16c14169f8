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

#include "donorsim/stark.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

#include "donorsim/coherence.hpp"
#include "donorsim/dynamics.hpp"
#include "donorsim/params_io.hpp"

namespace donorsim {

using std::numbers::pi;

VoltageParams params_at_voltage(const DeviceParams& p, const StarkModel& s, double dv) {
  s.validate();
  if (!std::isfinite(dv)) throw std::invalid_argument("voltage must be finite");
  VoltageParams out{p, std::abs(dv) > s.linear_window};
  DeviceParams& q = out.params;
  const double e = s.field_per_volt * dv;
  q.a = p.a + s.dA_dV * dv + p.a * s.eta2 * e * e;
  if (p.b0 != 0) q.gamma_e = p.gamma_e + s.dGammaEB0_dV * dv / p.b0;
  q.fq_plus = p.fq_plus + s.dfq_plus_dV * dv;
  q.fq_neutral = p.fq_neutral + s.dfq0_dV * dv;
  return out;
}

const char* to_string(FanoutKind k) {
  switch (k) {
    case FanoutKind::ESR: return "esr";
    case FanoutKind::NMRNeutral: return "nmr0";
    case FanoutKind::NMRIonised: return "nmr+";
  }
  return "?";
}

FanoutKind parse_fanout_kind(const std::string& s) {
  if (s == "esr") return FanoutKind::ESR;
  if (s == "nmr0") return FanoutKind::NMRNeutral;
  if (s == "nmr+" || s == "nmr") return FanoutKind::NMRIonised;
  throw std::invalid_argument("unknown fan-out kind '" + s + "' (esr, nmr0, nmr+)");
}

namespace {

std::vector<Transition> lines_for(const DeviceParams& p, FanoutKind kind) {
  switch (kind) {
    case FanoutKind::ESR: return compute_transitions(p, Mechanism::ESR, ChargeState::Neutral);
    case FanoutKind::NMRNeutral:
      return compute_transitions(p, Mechanism::NMR, ChargeState::Neutral, ElectronBranch::Down);
    case FanoutKind::NMRIonised: return compute_transitions(p, Mechanism::NMR, ChargeState::Ionised);
  }
  return {};
}

// Twice the mean m_I of a line; mirrored lines have opposite keys.
int mirror_key(const Transition& t) { return (t.from.m_i + t.to.m_i).twice(); }

}  // namespace

FanoutScan fanout_scan(const DeviceParams& p, const StarkModel& s, FanoutKind kind,
                       const std::vector<double>& voltages) {
  if (voltages.empty()) throw std::invalid_argument("empty voltage grid");
  FanoutScan scan;
  scan.kind = kind;
  scan.voltages = voltages;
  for (const auto& t : lines_for(p, kind)) scan.lines.push_back({t.id(), t, {}});
  std::sort(scan.lines.begin(), scan.lines.end(),
            [](const FanoutLine& a, const FanoutLine& b) { return mirror_key(a.transition) < mirror_key(b.transition); });
  for (double v : voltages) {
    const DeviceParams q = params_at_voltage(p, s, v).params;
    std::map<std::string, double> at;
    for (const auto& t : lines_for(q, kind)) at[t.id()] = t.frequency;
    for (auto& line : scan.lines) {
      auto it = at.find(line.label);
      if (it == at.end()) throw std::runtime_error("line " + line.label + " lost along the voltage grid");
      line.frequencies.push_back(it->second);
    }
  }
  return scan;
}

std::vector<double> voltage_grid(double v_max, int points) {
  if (points < 2 || !(v_max > 0)) throw std::invalid_argument("voltage grid needs v_max > 0 and >= 2 points");
  std::vector<double> v(points);
  for (int k = 0; k < points; ++k) v[k] = -v_max + 2.0 * v_max * k / (points - 1);
  return v;
}

void write_fanout_csv(std::ostream& out, const FanoutScan& scan) {
  out << "voltage_v,line_label,frequency_hz\n";
  for (std::size_t k = 0; k < scan.voltages.size(); ++k)
    for (const auto& line : scan.lines)
      out << format_double(scan.voltages[k]) << ',' << line.label << ',' << format_double(line.frequencies[k])
          << '\n';
}

std::vector<double> line_slopes(const FanoutScan& scan) {
  const auto& v = scan.voltages;
  if (std::set<double>(v.begin(), v.end()).size() < 2)
    throw std::invalid_argument("slope fits need at least two distinct voltages");
  double vm = 0.0;
  for (double x : v) vm += x / v.size();
  double sxx = 0.0;
  for (double x : v) sxx += (x - vm) * (x - vm);
  std::vector<double> out;
  for (const auto& line : scan.lines) {
    if (line.frequencies.size() != v.size()) throw std::invalid_argument("line length differs from the grid");
    double fm = 0.0;
    for (double f : line.frequencies) fm += f / v.size();
    double sxy = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) sxy += (v[k] - vm) * (line.frequencies[k] - fm);
    out.push_back(sxy / sxx);
  }
  return out;
}

namespace {

enum Unknown { kA = 0, kG = 1, kQplus = 2, kQ0 = 3 };

// d f / d (A, gamma_e B0, fq_plus, fq_neutral) by central differences.
Eigen::Vector4d sensitivities(const Transition& t, const DeviceParams& p) {
  Eigen::Vector4d d;
  auto diff = [&](auto setter, double h) {
    DeviceParams lo = p, hi = p;
    setter(lo, -h);
    setter(hi, +h);
    return (transition_frequency(t, hi) - transition_frequency(t, lo)) / (2 * h);
  };
  d(kA) = diff([](DeviceParams& q, double h) { q.a += h; }, 1e-4 * std::max(std::abs(p.a), 1e6));
  const double hg = 1e-6 * std::max(std::abs(p.electron_zeeman()), 1e9);
  d(kG) = diff([&](DeviceParams& q, double h) { q.gamma_e += h / p.b0; }, hg);
  d(kQplus) = diff([](DeviceParams& q, double h) { q.fq_plus += h; }, std::max(1e3, 0.05 * std::abs(p.fq_plus)));
  d(kQ0) = diff([](DeviceParams& q, double h) { q.fq_neutral += h; },
                std::max(1e3, 0.05 * std::abs(p.fq_neutral)));
  return d;
}

std::vector<int> unknowns_of(FanoutKind k) {
  switch (k) {
    case FanoutKind::ESR: return {kA, kG};
    case FanoutKind::NMRNeutral: return {kA, kQ0};
    case FanoutKind::NMRIonised: return {kQplus};
  }
  return {};
}

}  // namespace

StarkSlopes extract_stark_slopes(const std::vector<FanoutScan>& scans, const DeviceParams& p) {
  std::array<double, 4> sum{};
  std::array<int, 4> count{};
  for (const auto& scan : scans) {
    const std::vector<double> slopes = line_slopes(scan);
    const std::vector<int> unk = unknowns_of(scan.kind);
    std::map<int, std::vector<std::size_t>> by_key;
    for (std::size_t k = 0; k < scan.lines.size(); ++k) by_key[mirror_key(scan.lines[k].transition)].push_back(k);
    for (const auto& [key, idx] : by_key) {
      if (key < 0) continue;
      // a line and its mirror image share one small system
      std::vector<std::size_t> group = idx;
      if (key > 0) {
        auto it = by_key.find(-key);
        if (it == by_key.end()) continue;
        group.insert(group.end(), it->second.begin(), it->second.end());
      }
      Eigen::MatrixXd m(group.size(), unk.size());
      Eigen::VectorXd rhs(group.size());
      for (std::size_t r = 0; r < group.size(); ++r) {
        const Eigen::Vector4d d = sensitivities(scan.lines[group[r]].transition, p);
        for (std::size_t c = 0; c < unk.size(); ++c) m(r, c) = d(unk[c]);
        rhs(r) = slopes[group[r]];
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      if (sv.size() < static_cast<Eigen::Index>(unk.size()) || !(sv(sv.size() - 1) > 1e-6 * sv(0))) continue;
      const Eigen::VectorXd x = svd.solve(rhs);
      for (std::size_t c = 0; c < unk.size(); ++c) {
        sum[unk[c]] += x(c);
        ++count[unk[c]];
      }
    }
  }
  StarkSlopes out;
  auto avg = [&](int k) -> std::optional<double> {
    if (!count[k]) return std::nullopt;
    return sum[k] / count[k];
  };
  out.dA_dV = avg(kA);
  out.dGammaEB0_dV = avg(kG);
  out.dfq_plus_dV = avg(kQplus);
  out.dfq0_dV = avg(kQ0);
  return out;
}

StarkSlopes extract_stark_slopes(const FanoutScan& scan, const DeviceParams& p) {
  return extract_stark_slopes(std::vector<FanoutScan>{scan}, p);
}

const char* to_string(StarkPulse k) {
  switch (k) {
    case StarkPulse::None: return "none";
    case StarkPulse::Unipolar: return "unipolar";
    case StarkPulse::Bipolar: return "bipolar";
  }
  return "?";
}

StarkPulse parse_stark_pulse(const std::string& s) {
  if (s == "none") return StarkPulse::None;
  if (s == "unipolar") return StarkPulse::Unipolar;
  if (s == "bipolar") return StarkPulse::Bipolar;
  throw std::invalid_argument("unknown pulse '" + s + "' (none, unipolar, bipolar)");
}

StarkEchoResult stark_echo(const DeviceParams& p, const StarkModel& s, StarkPulse pulse, double v_dc,
                           const std::vector<double>& tau) {
  StarkEchoResult r;
  const std::string id = "dn_m-7/2:dn_m-5/2";
  bool found = false;
  for (const auto& t : compute_transitions(p, Mechanism::NMR, ChargeState::Neutral, ElectronBranch::Down))
    if (t.id() == id) {
      r.target = t;
      found = true;
    }
  if (!found) throw std::runtime_error("echo transition " + id + " not found");

  auto shift = [&](double v) { return transition_frequency(r.target, params_at_voltage(p, s, v).params) - r.target.frequency; };
  switch (pulse) {
    case StarkPulse::None: r.fringe_frequency = 0.0; break;
    case StarkPulse::Unipolar: r.fringe_frequency = v_dc == 0 ? 0.0 : shift(v_dc); break;
    case StarkPulse::Bipolar: r.fringe_frequency = v_dc == 0 ? 0.0 : 0.5 * (shift(v_dc) + shift(-v_dc)); break;
  }

  const Eigen::Matrix2cd x2 = rwa_unitary(0.0, 1.0, 0.0, 0.25);
  const Eigen::Matrix2cd x1 = rwa_unitary(0.0, 1.0, 0.0, 0.5);
  for (double tk : tau) {
    if (!(tk >= 0)) throw std::invalid_argument("tau must be non-negative");
    // the frame follows the unshifted line, so the pulsed arm precesses
    // at -fringe and the quiet arm not at all
    const Eigen::Matrix2cd arm = rwa_unitary(-r.fringe_frequency, 0.0, 0.0, tk);
    const Eigen::Vector2cd psi = x2 * x1 * arm * x2 * Eigen::Vector2cd(1.0, 0.0);
    r.tau.push_back(tk);
    r.probability.push_back(std::norm(psi(0)));
  }
  return r;
}

}  // namespace donorsim
