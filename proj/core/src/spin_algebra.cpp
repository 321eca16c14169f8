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

#include "donorsim/spin_algebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace donorsim {

HalfInt HalfInt::from_double(double v) {
  const double t = 2.0 * v;
  const double r = std::round(t);
  if (!std::isfinite(v) || std::abs(t - r) > 1e-9)
    throw std::invalid_argument("not a half-integer: " + std::to_string(v));
  return HalfInt(static_cast<int>(r));
}

HalfInt HalfInt::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty half-integer");
  std::string_view s = text;
  int sign = 1;
  if (s.front() == '+' || s.front() == '-') {
    if (s.front() == '-') sign = -1;
    s.remove_prefix(1);
  }
  auto to_int = [&](std::string_view part) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      throw std::invalid_argument("bad half-integer: " + std::string(text));
    return v;
  };
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    int num = to_int(s.substr(0, slash));
    int den = to_int(s.substr(slash + 1));
    if (den == 1) return HalfInt(sign * 2 * num);
    if (den != 2) throw std::invalid_argument("bad half-integer: " + std::string(text));
    return HalfInt(sign * num);
  }
  if (s.find('.') != std::string_view::npos)
    return from_double(sign * std::stod(std::string(s)));
  return HalfInt(sign * 2 * to_int(s));
}

std::string HalfInt::str() const {
  if (twice_ == 0) return "0";
  std::string out = twice_ > 0 ? "+" : "-";
  const int a = std::abs(twice_);
  if (a % 2 == 0)
    out += std::to_string(a / 2);
  else
    out += std::to_string(a) + "/2";
  return out;
}

std::string BasisLabel::str() const {
  std::string nuc = "m" + m_i.str();
  if (!has_electron) return nuc;
  return (m_s.twice() > 0 ? "up_" : "dn_") + nuc;
}

BasisLabel BasisLabel::parse(std::string_view text) {
  BasisLabel out;
  std::string_view s = text;
  if (s.starts_with("up_") || s.starts_with("dn_")) {
    out.has_electron = true;
    out.m_s = s.starts_with("up_") ? kHalf : -kHalf;
    s.remove_prefix(3);
  }
  if (!s.starts_with("m")) throw std::invalid_argument("bad state label: " + std::string(text));
  s.remove_prefix(1);
  out.m_i = HalfInt::parse(s);
  return out;
}

std::vector<BasisLabel> product_basis_labels(HalfInt nuclear_spin, bool with_electron) {
  if (nuclear_spin.twice() < 0) throw std::invalid_argument("negative spin");
  std::vector<BasisLabel> out;
  const int n = nuclear_spin.twice() + 1;
  if (!with_electron) {
    for (int k = 0; k < n; ++k) out.push_back({false, HalfInt(), nuclear_spin - k});
    return out;
  }
  for (HalfInt ms : {kHalf, -kHalf})
    for (int k = 0; k < n; ++k) out.push_back({true, ms, nuclear_spin - k});
  return out;
}

HermitianOperator::HermitianOperator(CMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator is not square");
  const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  const double dev = m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (!std::isfinite(scale) || dev > 1e-9 * std::max(scale, 1e-300))
    throw std::invalid_argument("operator is not Hermitian");
  matrix_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

double HermitianOperator::max_abs_entry() const {
  return matrix_.size() ? matrix_.cwiseAbs().maxCoeff() : 0.0;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("dimension mismatch");
  HermitianOperator r;
  r.matrix_ = matrix_ + o.matrix_;
  return r;
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("dimension mismatch");
  HermitianOperator r;
  r.matrix_ = matrix_ - o.matrix_;
  return r;
}

HermitianOperator HermitianOperator::operator*(double s) const {
  HermitianOperator r;
  r.matrix_ = matrix_ * s;
  return r;
}

Eigen::Index SpinOperatorSet::index_of(HalfInt m) const {
  const int k = (spin.twice() - m.twice());
  if (k < 0 || k % 2 != 0 || k / 2 >= dim)
    throw std::invalid_argument("projection " + m.str() + " outside spin " + spin.str());
  return k / 2;
}

HalfInt SpinOperatorSet::projection_at(Eigen::Index index) const {
  if (index < 0 || index >= dim) throw std::out_of_range("spin index");
  return spin - static_cast<int>(index);
}

SpinOperatorSet spin_operators(HalfInt spin) {
  if (spin.twice() < 0) throw std::invalid_argument("negative spin");
  SpinOperatorSet s;
  s.spin = spin;
  s.dim = spin.twice() + 1;
  const double j = spin.value();
  s.iz = CMatrix::Zero(s.dim, s.dim);
  s.iplus = CMatrix::Zero(s.dim, s.dim);
  for (Eigen::Index k = 0; k < s.dim; ++k) {
    const double m = j - static_cast<double>(k);
    s.iz(k, k) = m;
    // <m+1|I+|m> sits one row above the column of m
    if (k > 0) s.iplus(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  s.iminus = s.iplus.adjoint();
  s.ix = 0.5 * (s.iplus + s.iminus);
  s.iy = Complex(0.0, -0.5) * (s.iplus - s.iminus);
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

EigenSystem::EigenSystem(RVector eigenvalues, CMatrix eigenvectors, std::vector<BasisLabel> labels,
                         std::vector<double> overlaps, bool labeled)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      labels_(std::move(labels)),
      overlaps_(std::move(overlaps)),
      labeled_(labeled) {}

std::optional<Eigen::Index> EigenSystem::index_of(const BasisLabel& label) const {
  if (!labeled_) return std::nullopt;
  for (std::size_t k = 0; k < labels_.size(); ++k)
    if (labels_[k] == label) return static_cast<Eigen::Index>(k);
  return std::nullopt;
}

double EigenSystem::energy(const BasisLabel& label) const {
  auto k = index_of(label);
  if (!k) throw std::out_of_range("no eigenstate labeled " + label.str());
  return eigenvalues_(*k);
}

namespace {

void fix_phases(CMatrix& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    Eigen::Index imax = 0;
    v.col(k).cwiseAbs2().maxCoeff(&imax);
    const Complex c = v(imax, k);
    if (std::abs(c) > 0) v.col(k) *= std::conj(c) / std::abs(c);
    v(imax, k) = std::abs(v(imax, k));
  }
}

EigenSystem decompose(const HermitianOperator& h, const std::vector<BasisLabel>* basis) {
  if (h.dim() == 0) throw std::invalid_argument("empty operator");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  CMatrix v = es.eigenvectors();
  fix_phases(v);
  if (!basis) return EigenSystem(es.eigenvalues(), std::move(v), {}, {}, false);

  if (static_cast<Eigen::Index>(basis->size()) != h.dim())
    throw std::invalid_argument("basis label count does not match operator dimension");
  std::vector<BasisLabel> labels;
  std::vector<double> overlaps;
  std::vector<char> used(basis->size(), 0);
  bool ok = true;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    Eigen::Index imax = 0;
    const double w = v.col(k).cwiseAbs2().maxCoeff(&imax);
    labels.push_back((*basis)[imax]);
    overlaps.push_back(w);
    if (used[imax] || w < EigenSystem::kLabelOverlapThreshold) ok = false;
    used[imax] = 1;
  }
  return EigenSystem(es.eigenvalues(), std::move(v), std::move(labels), std::move(overlaps), ok);
}

}  // namespace

EigenSystem eigensystem(const HermitianOperator& h) { return decompose(h, nullptr); }

EigenSystem eigensystem(const HermitianOperator& h, const std::vector<BasisLabel>& basis) {
  return decompose(h, &basis);
}

}  // namespace donorsim
