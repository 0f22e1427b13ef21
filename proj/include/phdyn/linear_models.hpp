#pragma once

#include "phdyn/common.hpp"

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace phdyn::linear {

// d×d integer matrix with |det| = 1.  Dimensions 1..3 are accepted so that
// circle maps share the plumbing; spectral work needs d ∈ {2, 3}.
class IntegerMatrix {
 public:
  explicit IntegerMatrix(const std::vector<std::vector<long long>>& rows);
  static IntegerMatrix identity(int d);

  int dim() const { return d_; }
  long long operator()(int i, int j) const { return a_[3 * i + j]; }
  long long det() const { return det_; }
  bool is_identity() const;
  Mat to_real() const;
  // Exact integer inverse (adjugate times det, since det = ±1).
  IntegerMatrix inverse() const;
  IntegerMatrix operator*(const IntegerMatrix& o) const;
  std::vector<std::vector<long long>> rows() const;

 private:
  IntegerMatrix() = default;
  int d_ = 0;
  std::array<long long, 9> a_{};
  long long det_ = 0;
};

// Ascending coefficients c_0..c_d of det(M − λI).
std::vector<long long> char_poly(const IntegerMatrix& m);

enum class SpectralClass { anosov_real, anosov_complex_pair, partially_hyperbolic_center, non_partially_hyperbolic };
std::string to_string(SpectralClass c);

struct SpectralData {
  std::vector<std::complex<double>> eigenvalues;  // ascending modulus
  std::vector<double> moduli;
  SpectralClass classification = SpectralClass::non_partially_hyperbolic;
  bool irreducible_over_rationals = false;
  std::vector<long long> char_poly;
};

inline constexpr double kUnitModulusTol = 1e-9;

SpectralData spectral_classify(const IntegerMatrix& m);

enum class Label { stable, center, unstable };
std::string to_string(Label l);

struct Subspace {
  Mat basis;      // d×k, orthonormal columns
  Mat projector;  // spectral projector along the other subspaces
  // Raw eigen-coordinates: columns of the real eigenbasis V belonging to this
  // label and the matching rows of V⁻¹.  A acts on them by a block that is
  // diagonal (real eigenvalues) or |λ|·rotation (complex pair).
  Mat columns;
  Mat dual_rows;
  double min_modulus = 0.0;
  double max_modulus = 0.0;
};

struct Splitting {
  std::map<Label, Subspace> subspaces;
  double basis_condition = 1.0;
  bool has(Label l) const { return subspaces.count(l) != 0; }
  const Subspace& at(Label l) const { return subspaces.at(l); }
};

Splitting invariant_splitting(const SpectralData& s, const IntegerMatrix& m);

}  // namespace phdyn::linear
