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

#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace donorsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Half-integer quantum number (spin or projection), stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  // Throws std::invalid_argument unless 2*v is an integer.
  static HalfInt from_double(double v);
  // Parses "7/2", "-5/2", "+1/2", "1", "0.5".
  static HalfInt parse(std::string_view text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr HalfInt operator+(int n) const { return HalfInt(twice_ + 2 * n); }
  constexpr HalfInt operator-(int n) const { return HalfInt(twice_ - 2 * n); }

  constexpr bool operator==(const HalfInt&) const = default;
  constexpr auto operator<=>(const HalfInt&) const = default;

  // Signed fraction form: "+7/2", "-1/2", "0", "+1".
  std::string str() const;

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

inline constexpr HalfInt kHalf = HalfInt::from_twice(1);
inline constexpr HalfInt kSevenHalves = HalfInt::from_twice(7);

// Zeeman product-basis tag (m_S, m_I). Ionised (nuclear-only) states carry
// has_electron == false and m_s == 0.
struct BasisLabel {
  bool has_electron = false;
  HalfInt m_s;
  HalfInt m_i;

  HalfInt total_projection() const { return m_s + m_i; }

  bool operator==(const BasisLabel&) const = default;
  auto operator<=>(const BasisLabel&) const = default;

  // "m-7/2" for nuclear-only labels, "dn_m-7/2" / "up_m+5/2" otherwise.
  std::string str() const;
  static BasisLabel parse(std::string_view text);
};

// Product-basis tags in the storage order used by every operator in the
// library: electron factor first (m_S = +1/2, -1/2), nuclear factor second
// with m_I descending from +I to -I.
std::vector<BasisLabel> product_basis_labels(HalfInt nuclear_spin, bool with_electron);

// Dense complex Hermitian matrix, entries in Hz (E/h) unless stated otherwise.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Throws std::invalid_argument if `m` is not square or not Hermitian to
  // 1e-9 * max|entry|. The stored matrix is the exact Hermitian part.
  explicit HermitianOperator(CMatrix m);

  static HermitianOperator zero(Eigen::Index dim);
  static HermitianOperator identity(Eigen::Index dim);

  Eigen::Index dim() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }
  double max_abs_entry() const;
  // Spectral-norm proxy used for relative tolerances (Frobenius norm).
  double norm() const { return matrix_.norm(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

 private:
  CMatrix matrix_;
};

// Angular-momentum matrices for one spin, hbar = 1.
// Iz is diagonal with entries descending from +spin to -spin.
struct SpinOperatorSet {
  HalfInt spin;
  Eigen::Index dim = 0;
  CMatrix ix, iy, iz, iplus, iminus;

  // Index of projection m in the descending ordering.
  Eigen::Index index_of(HalfInt m) const;
  HalfInt projection_at(Eigen::Index index) const;
};

// Throws std::invalid_argument for a negative spin.
SpinOperatorSet spin_operators(HalfInt spin);

CMatrix kron(const CMatrix& a, const CMatrix& b);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

// Labeled spectral decomposition. Eigenvalues ascending; each eigenvector's
// largest-magnitude component is real and positive.
class EigenSystem {
 public:
  EigenSystem() = default;
  EigenSystem(RVector eigenvalues, CMatrix eigenvectors, std::vector<BasisLabel> labels,
              std::vector<double> overlaps, bool labeled);

  Eigen::Index dim() const { return eigenvalues_.size(); }
  const RVector& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  CVector eigenvector(Eigen::Index k) const { return eigenvectors_.col(k); }

  // True when every eigenvector maps to a distinct product-basis tag with
  // maximal overlap >= kLabelOverlapThreshold.
  bool labeled() const { return labeled_; }
  const std::vector<BasisLabel>& labels() const { return labels_; }
  // |<basis tag|v_k>|^2 for the assigned tag.
  const std::vector<double>& overlaps() const { return overlaps_; }

  std::optional<Eigen::Index> index_of(const BasisLabel& label) const;
  // Throws std::out_of_range when the label is absent.
  double energy(const BasisLabel& label) const;

  static constexpr double kLabelOverlapThreshold = 0.7;

 private:
  RVector eigenvalues_;
  CMatrix eigenvectors_;
  std::vector<BasisLabel> labels_;
  std::vector<double> overlaps_;
  bool labeled_ = false;
};

// Unlabeled decomposition.
EigenSystem eigensystem(const HermitianOperator& h);
// Decomposition labeled against the given product-basis tags (one per row).
EigenSystem eigensystem(const HermitianOperator& h, const std::vector<BasisLabel>& basis);

}  // namespace donorsim
