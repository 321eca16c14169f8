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

#include "donorsim/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "donorsim/params_io.hpp"

namespace donorsim {

std::string Transition::id() const { return from.str() + ":" + to.str(); }

bool selection_rule(Mechanism m, const BasisLabel& a, const BasisLabel& b) {
  const int dms = std::abs(a.m_s.twice() - b.m_s.twice());
  const int dmi = std::abs(a.m_i.twice() - b.m_i.twice());
  switch (m) {
    case Mechanism::NMR:
    case Mechanism::NER1:
      return dms == 0 && dmi == 2;
    case Mechanism::NER2:
      return dms == 0 && dmi == 4;
    case Mechanism::ESR:
      return dms == 2 && dmi == 0;
    case Mechanism::EDSR:
      return dms == 2 && dmi == 2 && a.total_projection() == b.total_projection();
  }
  return false;
}

std::vector<Transition> transitions(const EigenSystem& es, const HermitianOperator& v_unit,
                                    Mechanism mechanism) {
  if (!es.labeled()) throw std::invalid_argument("transitions() needs a labeled eigensystem");
  if (v_unit.dim() != es.dim()) throw std::invalid_argument("drive operator dimension mismatch");
  const CMatrix vm = es.eigenvectors().adjoint() * v_unit.matrix() * es.eigenvectors();
  std::vector<Transition> out;
  const auto& labels = es.labels();
  for (Eigen::Index i = 0; i < es.dim(); ++i) {
    for (Eigen::Index j = i + 1; j < es.dim(); ++j) {
      if (!selection_rule(mechanism, labels[i], labels[j])) continue;
      const double me = std::abs(vm(i, j));
      if (me <= kMatrixElementFloor) continue;
      Eigen::Index a = i, b = j;
      const auto key = [&](Eigen::Index k) { return std::pair(labels[k].m_i, labels[k].m_s); };
      if (key(b) < key(a)) std::swap(a, b);
      Transition t;
      t.from = labels[a];
      t.to = labels[b];
      t.energy_from = es.eigenvalues()(a);
      t.energy_to = es.eigenvalues()(b);
      t.frequency = std::abs(t.energy_to - t.energy_from);
      t.mechanism = mechanism;
      t.matrix_element = me;
      out.push_back(t);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Transition& x, const Transition& y) {
    if (x.frequency != y.frequency) return x.frequency < y.frequency;
    return std::pair(x.from, x.to) < std::pair(y.from, y.to);
  });
  return out;
}

std::vector<Transition> compute_transitions(const DeviceParams& p, Mechanism m, ChargeState c,
                                            std::optional<ElectronBranch> branch,
                                            const QuadrupoleQuadratures& w) {
  check_compatible(m, c);
  const EigenSystem es = eigensystem(h_static(p, c), basis_labels(p, c));
  auto lines = transitions(es, unit_drive_operator(m, c, p.nuclear_spin, w), m);
  if (branch && c == ChargeState::Neutral && m == Mechanism::NMR) {
    const HalfInt ms = *branch == ElectronBranch::Up ? kHalf : -kHalf;
    std::erase_if(lines, [&](const Transition& t) { return t.from.m_s != ms; });
  }
  return lines;
}

double nmr_plus_frequency(const DeviceParams& p, HalfInt m_upper) {
  if (m_upper > p.nuclear_spin || m_upper <= -p.nuclear_spin ||
      (m_upper.twice() - p.nuclear_spin.twice()) % 2 != 0)
    throw std::invalid_argument("m_I " + m_upper.str() + " does not label an upper NMR level");
  return p.nuclear_zeeman() + (m_upper.value() - 0.5) * p.fq_plus;
}

std::vector<SpectrumLine> spectrum_lines(const std::vector<Transition>& lines, double fwhm) {
  if (!(fwhm > 0)) throw std::invalid_argument("fwhm must be positive");
  std::vector<SpectrumLine> out;
  for (const auto& t : lines) out.push_back({t.frequency, 1.0, fwhm});
  return out;
}

SampledCurve spectrum(const std::vector<Transition>& lines, double fwhm, const FrequencyGrid& grid) {
  if (!(fwhm > 0)) throw std::invalid_argument("fwhm must be positive");
  if (lines.empty()) return {};
  if (grid.points < 2 || !(grid.f_max > grid.f_min))
    throw std::invalid_argument("degenerate frequency grid");
  for (const auto& t : lines)
    if (t.frequency < grid.f_min || t.frequency > grid.f_max)
      throw std::invalid_argument("frequency grid does not cover every line");
  SampledCurve c;
  c.x.resize(grid.points);
  c.y.assign(grid.points, 0.0);
  const double step = (grid.f_max - grid.f_min) / (grid.points - 1);
  const double hw = 0.5 * fwhm;
  for (int k = 0; k < grid.points; ++k) {
    const double f = grid.f_min + k * step;
    c.x[k] = f;
    for (const auto& t : lines) {
      const double u = (f - t.frequency) / hw;
      c.y[k] += 1.0 / (1.0 + u * u);
    }
  }
  return c;
}

FrequencyGrid grid_around(const std::vector<Transition>& lines, double fwhm, int points, double pad) {
  if (lines.empty()) return {0.0, 0.0, 0};
  auto [lo, hi] = std::minmax_element(lines.begin(), lines.end(),
                                      [](const auto& a, const auto& b) { return a.frequency < b.frequency; });
  return {lo->frequency - pad * fwhm, hi->frequency + pad * fwhm, points};
}

std::vector<double> curve_maxima(const SampledCurve& c) {
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 < c.y.size(); ++k)
    if (c.y[k] > c.y[k - 1] && c.y[k] >= c.y[k + 1]) out.push_back(c.x[k]);
  return out;
}

void write_transitions_csv(std::ostream& out, const std::vector<Transition>& lines) {
  out << "mechanism,from,to,frequency_hz,matrix_element\n";
  for (const auto& t : lines) {
    out << to_string(t.mechanism) << ',' << t.from.str() << ',' << t.to.str() << ','
        << format_double(t.frequency) << ',' << format_double(t.matrix_element) << '\n';
  }
}

Mechanism parse_mechanism(const std::string& s) {
  if (s == "nmr") return Mechanism::NMR;
  if (s == "esr") return Mechanism::ESR;
  if (s == "ner1") return Mechanism::NER1;
  if (s == "ner2") return Mechanism::NER2;
  if (s == "edsr") return Mechanism::EDSR;
  throw std::invalid_argument("unknown mechanism '" + s + "'");
}

std::vector<Transition> read_transitions_csv(std::istream& in) {
  std::vector<Transition> out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "mechanism,from,to,frequency_hz,matrix_element")
        throw std::invalid_argument("unexpected transitions CSV header: " + line);
      header = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 5) throw std::invalid_argument("transitions CSV row needs 5 columns: " + line);
    Transition t;
    t.mechanism = parse_mechanism(cols[0]);
    t.from = BasisLabel::parse(cols[1]);
    t.to = BasisLabel::parse(cols[2]);
    t.frequency = parse_double("frequency_hz", cols[3]);
    t.matrix_element = parse_double("matrix_element", cols[4]);
    out.push_back(t);
  }
  if (!header) throw std::invalid_argument("transitions CSV has no header");
  return out;
}

}  // namespace donorsim
