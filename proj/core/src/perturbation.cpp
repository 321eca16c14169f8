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

#include "donorsim/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace donorsim {

namespace {

void check_projection(HalfInt m, HalfInt spin) {
  if (m > spin || m < -spin || (spin.twice() - m.twice()) % 2 != 0)
    throw std::invalid_argument("projection " + m.str() + " outside spin " + spin.str());
}

void check_electron(HalfInt m_s) {
  if (m_s != kHalf && m_s != -kHalf) throw std::invalid_argument("m_S must be +-1/2");
}

void check_upper(HalfInt m_upper, HalfInt spin) {
  check_projection(m_upper, spin);
  if (m_upper == -spin) throw std::invalid_argument("m_I " + m_upper.str() + " has no lower partner");
}

// I(I+1) - m' m with m' = m +- 1, the squared flip-flop ladder product.
Rational ladder_sq(HalfInt spin, HalfInt m, HalfInt m_partner) {
  const Rational j = Rational::of(spin);
  return j * (j + 1) - Rational::of(m_partner) * Rational::of(m);
}

// secular first-order level
double secular_level(const DeviceParams& p, HalfInt m_s, HalfInt m_i) {
  const double ms = m_s.value(), m = m_i.value(), j = p.nuclear_spin.value();
  const double fq = p.fq_neutral;
  return p.electron_zeeman() * ms - p.nuclear_zeeman() * m + p.a * ms * m +
         fq / 6.0 * j * (j + 1.0) - 0.5 * fq * m * m;
}

double level_difference(const DeviceParams& p, HalfInt ms_a, HalfInt mi_a, HalfInt ms_b, HalfInt mi_b,
                        ClosedForm form) {
  return perturbative_level(p, ms_a, mi_a, form) - perturbative_level(p, ms_b, mi_b, form);
}

HalfInt branch_ms(ElectronBranch b) { return b == ElectronBranch::Up ? kHalf : -kHalf; }

}  // namespace

Rational second_order_coefficient(HalfInt m_s, HalfInt m_i, HalfInt spin) {
  check_electron(m_s);
  check_projection(m_i, spin);
  // S+ I- couples (dn, m) to (up, m-1); S- I+ couples (up, m) to (dn, m+1).
  // With bare Zeeman denominators E(state) - E(partner) = gamma_e B0 (m_S - m_S').
  const HalfInt partner = m_s == -kHalf ? m_i - 1 : m_i + 1;
  if (partner > spin || partner < -spin) return Rational(0);
  const Rational delta = m_s == -kHalf ? Rational(-1) : Rational(1);
  return Rational(1, 4) * ladder_sq(spin, m_i, partner) / delta;
}

SecondOrderCoefficients second_order_coefficients(HalfInt spin) {
  SecondOrderCoefficients c;
  const auto f2 = [&](HalfInt ms, HalfInt m) { return second_order_coefficient(ms, m, spin); };
  for (HalfInt m = -spin; m <= spin; m = m + 1) {
    c.b[m] = f2(kHalf, m) - f2(-kHalf, m);
    if (m == -spin) continue;
    c.g_down[m] = f2(-kHalf, m - 1) - f2(-kHalf, m);
    c.g_up[m] = f2(kHalf, m - 1) - f2(kHalf, m);
  }
  for (HalfInt m = -spin + 1; m <= spin; m = m + 1) c.c[m] = c.b[m] - c.b[m - 1];
  return c;
}

double second_order_shift(double a, double gamma_e, double b0, HalfInt m_s, HalfInt m_i, HalfInt spin) {
  return second_order_coefficient(m_s, m_i, spin).to_double() * a * a / (gamma_e * b0);
}

double second_order_shift(const DeviceParams& p, HalfInt m_s, HalfInt m_i, ClosedForm form) {
  if (form == ClosedForm::Tabulated)
    return second_order_shift(p.a, p.gamma_e, p.b0, m_s, m_i, p.nuclear_spin);
  check_electron(m_s);
  check_projection(m_i, p.nuclear_spin);
  const HalfInt ms_partner = -m_s;
  const HalfInt mi_partner = m_s == -kHalf ? m_i - 1 : m_i + 1;
  if (mi_partner > p.nuclear_spin || mi_partner < -p.nuclear_spin) return 0.0;
  const double num = 0.25 * p.a * p.a * ladder_sq(p.nuclear_spin, m_i, mi_partner).to_double();
  const double den = secular_level(p, m_s, m_i) - secular_level(p, ms_partner, mi_partner);
  return num / den;
}

double perturbative_level(const DeviceParams& p, HalfInt m_s, HalfInt m_i, ClosedForm form) {
  return secular_level(p, m_s, m_i) + second_order_shift(p, m_s, m_i, form);
}

double nmr0_frequency(const DeviceParams& p, HalfInt m_upper, ElectronBranch branch, ClosedForm form) {
  if (branch != ElectronBranch::Down && branch != ElectronBranch::Up)
    throw std::invalid_argument("invalid electron branch");
  check_upper(m_upper, p.nuclear_spin);
  const HalfInt ms = branch_ms(branch);
  return std::abs(level_difference(p, ms, m_upper - 1, ms, m_upper, form));
}

double esr_frequency(const DeviceParams& p, HalfInt m_i, ClosedForm form) {
  check_projection(m_i, p.nuclear_spin);
  return level_difference(p, kHalf, m_i, -kHalf, m_i, form);
}

double esr_spacing(const DeviceParams& p, HalfInt m_upper, ClosedForm form) {
  check_upper(m_upper, p.nuclear_spin);
  if (form == ClosedForm::Secular)
    return esr_frequency(p, m_upper, form) - esr_frequency(p, m_upper - 1, form);
  const double c = (Rational(1, 2) - Rational::of(m_upper)).to_double();
  return p.a * (1.0 + c * p.a / ((p.gamma_e + p.gamma_n) * p.b0));
}

double edsr_frequency(const DeviceParams& p, HalfInt m_upper, ClosedForm form) {
  check_upper(m_upper, p.nuclear_spin);
  return std::abs(level_difference(p, kHalf, m_upper - 1, -kHalf, m_upper, form));
}

std::vector<double> nmr0_lines(const DeviceParams& p, ElectronBranch branch, ClosedForm form) {
  std::vector<double> out;
  for (HalfInt m = -p.nuclear_spin + 1; m <= p.nuclear_spin; m = m + 1)
    out.push_back(nmr0_frequency(p, m, branch, form));
  return out;
}

std::vector<double> esr_lines(const DeviceParams& p, ClosedForm form) {
  std::vector<double> out;
  for (HalfInt m = -p.nuclear_spin; m <= p.nuclear_spin; m = m + 1) out.push_back(esr_frequency(p, m, form));
  return out;
}

double extract_A_from_nmr0(const std::vector<double>& lines, const DeviceParams& p, ElectronBranch branch) {
  const int n = p.nuclear_spin.twice();
  if (static_cast<int>(lines.size()) != n)
    throw std::invalid_argument("expected " + std::to_string(n) + " NMR lines, got " +
                                std::to_string(lines.size()));
  const int pairs = n / 2;
  if (pairs == 0) throw std::invalid_argument("spin 1/2 has no symmetric NMR pairs");
  const double ez = p.electron_zeeman();
  double sum = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const double s = lines[k] + lines[n - 1 - k];
    if (branch == ElectronBranch::Down) {
      // A^2/(2 ez) + A = s - 2 nz, positive root in cancellation-free form
      const double r = s - 2.0 * p.nuclear_zeeman();
      sum += 2.0 * r / (1.0 + std::sqrt(1.0 + 2.0 * r / ez));
    } else {
      // A^2/(2 ez) - A = -(s + 2 nz), small root
      const double r = s + 2.0 * p.nuclear_zeeman();
      const double disc = 1.0 - 2.0 * r / ez;
      if (disc < 0) throw std::invalid_argument("pair sum has no real hyperfine solution");
      sum += 2.0 * r / (1.0 + std::sqrt(disc));
    }
  }
  return sum / pairs;
}

namespace {

struct NmrSet {
  std::vector<double> freqs;
  ElectronBranch branch = ElectronBranch::Down;
};

NmrSet sort_neutral_nmr(const std::vector<Transition>& lines, HalfInt spin) {
  if (static_cast<int>(lines.size()) != spin.twice())
    throw std::invalid_argument("expected " + std::to_string(spin.twice()) + " NMR lines, got " +
                                std::to_string(lines.size()));
  std::vector<Transition> sorted = lines;
  std::sort(sorted.begin(), sorted.end(),
            [](const Transition& a, const Transition& b) { return a.to.m_i < b.to.m_i; });
  NmrSet out;
  const HalfInt ms = sorted.front().from.m_s;
  out.branch = ms == kHalf ? ElectronBranch::Up : ElectronBranch::Down;
  HalfInt expect = -spin + 1;
  for (const auto& t : sorted) {
    if (t.mechanism != Mechanism::NMR || !t.from.has_electron || t.from.m_s != ms || t.to.m_s != ms ||
        t.to.m_i != expect || t.from.m_i != expect - 1)
      throw std::invalid_argument("lines are not one complete neutral NMR manifold");
    out.freqs.push_back(t.frequency);
    expect = expect + 1;
  }
  return out;
}

}  // namespace

double extract_A_from_nmr0(const std::vector<Transition>& lines, const DeviceParams& p) {
  const NmrSet s = sort_neutral_nmr(lines, p.nuclear_spin);
  return extract_A_from_nmr0(s.freqs, p, s.branch);
}

double extract_fq(const std::vector<double>& lines, const DeviceParams& p, double a, ElectronBranch branch,
                  ClosedForm form) {
  const int n = p.nuclear_spin.twice();
  if (static_cast<int>(lines.size()) != n)
    throw std::invalid_argument("expected " + std::to_string(n) + " NMR lines, got " +
                                std::to_string(lines.size()));
  DeviceParams q = p;
  q.a = a;
  // The down manifold moves by +(m - 1/2) fq, the up manifold by the opposite sign.
  const double sign = branch == ElectronBranch::Down ? 1.0 : -1.0;
  auto residuals = [&](double fq, double offset) {
    q.fq_neutral = fq;
    Eigen::VectorXd r(n);
    int k = 0;
    for (HalfInt m = -p.nuclear_spin + 1; m <= p.nuclear_spin; m = m + 1, ++k)
      r(k) = lines[k] - nmr0_frequency(q, m, branch, form) - offset;
    return r;
  };
  // first-order start: regress the lines on (m - 1/2)
  double sxx = 0, sxy = 0, mean = 0;
  for (double f : lines) mean += f / n;
  {
    int k = 0;
    for (HalfInt m = -p.nuclear_spin + 1; m <= p.nuclear_spin; m = m + 1, ++k) {
      const double x = m.value() - 0.5;
      sxx += x * x;
      sxy += x * (lines[k] - mean);
    }
  }
  double fq = sign * sxy / sxx;
  double offset = 0.0;
  // Gauss-Newton on (fq, offset); the model is nearly linear in both.
  for (int it = 0; it < 20; ++it) {
    const Eigen::VectorXd r0 = residuals(fq, offset);
    const double h = std::max(1.0, 1e-6 * std::abs(fq));
    Eigen::MatrixXd jac(n, 2);
    jac.col(0) = (residuals(fq + h, offset) - residuals(fq - h, offset)) / (2 * h);
    jac.col(1) = Eigen::VectorXd::Constant(n, -1.0);
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-r0);
    fq += step(0);
    offset += step(1);
    if (std::abs(step(0)) < 1e-9 * std::max(1.0, std::abs(fq))) break;
  }
  return fq;
}

double extract_fq(const std::vector<Transition>& lines, const DeviceParams& p, double a, ClosedForm form) {
  const NmrSet s = sort_neutral_nmr(lines, p.nuclear_spin);
  return extract_fq(s.freqs, p, a, s.branch, form);
}

double extract_B0_from_nmr_plus(double middle_line, double gamma_n) {
  if (!(gamma_n != 0)) throw std::invalid_argument("gamma_n must be nonzero");
  return middle_line / gamma_n;
}

double extract_B0_from_nmr_plus(const std::vector<Transition>& lines, double gamma_n) {
  if (lines.size() % 2 == 0 || lines.empty())
    throw std::invalid_argument("expected an odd number of ionised NMR lines");
  for (const auto& t : lines)
    if (!t.from.has_electron && t.from.m_i == -kHalf && t.to.m_i == kHalf)
      return extract_B0_from_nmr_plus(t.frequency, gamma_n);
  throw std::invalid_argument("no -1/2 <-> +1/2 line present");
}

double extract_fq_plus(const std::vector<Transition>& lines) {
  if (lines.size() < 2) throw std::invalid_argument("need at least two ionised NMR lines");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lines.size());
  for (const auto& t : lines) {
    const double x = t.to.m_i.value() - 0.5;
    sx += x;
    sy += t.frequency;
    sxx += x * x;
    sxy += x * t.frequency;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) throw std::invalid_argument("degenerate line set");
  return (n * sxy - sx * sy) / den;
}

double extract_A_from_esr(const std::vector<double>& lines) {
  if (lines.size() < 2 || lines.size() % 2 != 0)
    throw std::invalid_argument("expected an even number (2I+1) of ESR lines");
  const std::size_t mid = lines.size() / 2;
  return lines[mid] - lines[mid - 1];
}

double extract_A_from_esr(const std::vector<Transition>& lines) {
  std::vector<Transition> sorted = lines;
  std::sort(sorted.begin(), sorted.end(),
            [](const Transition& a, const Transition& b) { return a.from.m_i < b.from.m_i; });
  std::vector<double> f;
  for (const auto& t : sorted) {
    if (t.mechanism != Mechanism::ESR) throw std::invalid_argument("not an ESR line");
    f.push_back(t.frequency);
  }
  return extract_A_from_esr(f);
}

}  // namespace donorsim
