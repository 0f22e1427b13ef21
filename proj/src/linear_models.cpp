#include "phdyn/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phdyn::linear {

namespace {

long long det_of(int d, const std::array<long long, 9>& a) {
  auto at = [&](int i, int j) { return a[3 * i + j]; };
  switch (d) {
    case 1: return at(0, 0);
    case 2: return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    default:
      return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
             at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
             at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }
}

using cd = std::complex<double>;

// Monic χ(λ) = det(λI − M), descending Horner evaluation with its derivative.
void eval_monic(const std::vector<long long>& c, cd z, cd& p, cd& dp) {
  const int d = static_cast<int>(c.size()) - 1;
  const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
  p = 0.0;
  dp = 0.0;
  for (int k = d; k >= 0; --k) {
    dp = dp * z + p;
    p = p * z + sgn * static_cast<double>(c[k]);
  }
}

cd polish(const std::vector<long long>& c, cd z) {
  for (int it = 0; it < 100; ++it) {
    cd p, dp;
    eval_monic(c, z, p, dp);
    if (p == 0.0 || std::abs(dp) == 0.0) break;
    cd step = p / dp;
    z -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

// Index of the largest-magnitude component, first one on ties.
template <class V>
int dominant_index(const V& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-14) best = i;
  return best;
}

Eigen::VectorXd real_null_vector(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(m.cols() - 1);
  v.normalize();
  if (v(dominant_index(v)) < 0) v = -v;
  return v;
}

// Real/imaginary parts of a complex eigenvector with the phase fixed so that
// they are orthogonal, |re| ≥ |im|, and |re|² + |im|² = 2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> complex_null_pair(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  Eigen::VectorXcd v = svd.matrixV().col(m.cols() - 1);
  v *= std::sqrt(2.0) / v.norm();
  cd z = 0.0;
  for (int k = 0; k < v.size(); ++k) z += v(k) * v(k);
  double phi = std::abs(z) > 1e-14 ? -std::arg(z) / 2.0 : 0.0;
  v *= std::polar(1.0, phi);
  Eigen::VectorXd re = v.real(), im = v.imag();
  if (re(dominant_index(re)) < 0) {
    re = -re;
    im = -im;
  }
  return {re, im};
}

}  // namespace

IntegerMatrix::IntegerMatrix(const std::vector<std::vector<long long>>& rows) {
  const int d = static_cast<int>(rows.size());
  if (d < 1 || d > 3) throw InputError("integer matrix must be 1x1, 2x2 or 3x3");
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != d) throw InputError("integer matrix must be square");
  d_ = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (std::llabs(rows[i][j]) > (1LL << 20)) throw InputError("integer matrix entry too large");
      a_[3 * i + j] = rows[i][j];
    }
  det_ = det_of(d_, a_);
  if (std::llabs(det_) != 1) {
    std::ostringstream os;
    os << "integer matrix has det " << det_ << ", expected +1 or -1";
    throw InputError(os.str());
  }
}

IntegerMatrix IntegerMatrix::identity(int d) {
  std::vector<std::vector<long long>> r(d, std::vector<long long>(d, 0));
  for (int i = 0; i < d; ++i) r[i][i] = 1;
  return IntegerMatrix(r);
}

bool IntegerMatrix::is_identity() const {
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

Mat IntegerMatrix::to_real() const {
  Mat m(d_, d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
  return m;
}

IntegerMatrix IntegerMatrix::inverse() const {
  std::vector<std::vector<long long>> r(d_, std::vector<long long>(d_, 0));
  const auto& m = *this;
  if (d_ == 1) {
    r[0][0] = m(0, 0);  // ±1
  } else if (d_ == 2) {
    r = {{m(1, 1) * det_, -m(0, 1) * det_}, {-m(1, 0) * det_, m(0, 0) * det_}};
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        // cofactor C_ji goes to position (i, j)
        int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        long long cof = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
        r[i][j] = cof * det_;
      }
  }
  return IntegerMatrix(r);
}

IntegerMatrix IntegerMatrix::operator*(const IntegerMatrix& o) const {
  if (o.d_ != d_) throw InputError("dimension mismatch in integer matrix product");
  std::vector<std::vector<long long>> r(d_, std::vector<long long>(d_, 0));
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < d_; ++k) r[i][j] += (*this)(i, k) * o(k, j);
  return IntegerMatrix(r);
}

std::vector<std::vector<long long>> IntegerMatrix::rows() const {
  std::vector<std::vector<long long>> r(d_, std::vector<long long>(d_));
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) r[i][j] = (*this)(i, j);
  return r;
}

std::vector<long long> char_poly(const IntegerMatrix& m) {
  const int d = m.dim();
  if (d == 1) return {m(0, 0), -1};
  long long tr = 0;
  for (int i = 0; i < d; ++i) tr += m(i, i);
  if (d == 2) return {m.det(), -tr, 1};
  long long c2 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) c2 += m(i, i) * m(j, j) - m(i, j) * m(j, i);
  return {m.det(), -c2, tr, -1};
}

std::string to_string(SpectralClass c) {
  switch (c) {
    case SpectralClass::anosov_real: return "anosov_real";
    case SpectralClass::anosov_complex_pair: return "anosov_complex_pair";
    case SpectralClass::partially_hyperbolic_center: return "partially_hyperbolic_center";
    default: return "non_partially_hyperbolic";
  }
}

std::string to_string(Label l) {
  switch (l) {
    case Label::stable: return "stable";
    case Label::center: return "center";
    default: return "unstable";
  }
}

SpectralData spectral_classify(const IntegerMatrix& m) {
  const int d = m.dim();
  if (d < 2) throw InputError("spectral classification needs d = 2 or 3");
  SpectralData out;
  out.char_poly = char_poly(m);
  const auto& c = out.char_poly;
  const double sgn = (d % 2 == 0) ? 1.0 : -1.0;

  // Companion matrix of the monic polynomial λ^d + a_{d-1}λ^{d-1} + … + a_0.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int k = 0; k < d; ++k) comp(k, d - 1) = -sgn * static_cast<double>(c[k]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);

  std::vector<cd> ev;
  for (int k = 0; k < d; ++k) ev.push_back(polish(c, es.eigenvalues()(k)));
  // Snap nearly-real roots to the real line and make conjugate pairs exact.
  for (auto& z : ev)
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z))) z = cd(polish(c, cd(z.real(), 0.0)).real(), 0.0);
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = i + 1; j < ev.size(); ++j)
      if (ev[i].imag() != 0.0 && std::abs(ev[i] - std::conj(ev[j])) < 1e-8 * std::max(1.0, std::abs(ev[i]))) {
        cd avg = 0.5 * (ev[i] + std::conj(ev[j]));
        ev[i] = cd(avg.real(), -std::abs(avg.imag()));
        ev[j] = cd(avg.real(), std::abs(avg.imag()));
      }
  std::sort(ev.begin(), ev.end(), [](cd a, cd b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  out.eigenvalues = ev;
  for (auto z : ev) out.moduli.push_back(std::abs(z));

  int unit = 0, plus_minus_one = 0;
  bool complex_present = false;
  for (auto z : ev) {
    if (std::abs(std::abs(z) - 1.0) <= kUnitModulusTol) ++unit;
    if (z.imag() == 0.0 && std::abs(std::abs(z.real()) - 1.0) <= kUnitModulusTol) ++plus_minus_one;
    if (z.imag() != 0.0) complex_present = true;
  }
  if (unit == 0)
    out.classification = complex_present ? SpectralClass::anosov_complex_pair : SpectralClass::anosov_real;
  else if (d == 3 && unit == 1 && plus_minus_one == 1)
    out.classification = SpectralClass::partially_hyperbolic_center;
  else
    out.classification = SpectralClass::non_partially_hyperbolic;

  // Rational roots of a monic integer polynomial with constant term ±1 can only be ±1.
  auto eval_int = [&](long long x) {
    long long v = 0;
    for (int k = d; k >= 0; --k) v = v * x + c[k];
    return v;
  };
  out.irreducible_over_rationals = eval_int(1) != 0 && eval_int(-1) != 0;
  return out;
}

Splitting invariant_splitting(const SpectralData& s, const IntegerMatrix& m) {
  if (s.classification == SpectralClass::non_partially_hyperbolic)
    throw InputError("invariant splitting requested for a non partially hyperbolic matrix");
  const int d = m.dim();
  const auto& ev = s.eigenvalues;
  for (int i = 0; i + 1 < d; ++i)
    if (std::abs(ev[i] - ev[i + 1]) < 1e-9) throw NumericError("repeated eigenvalue; splitting is not simple");

  Eigen::MatrixXd A = m.to_real();
  Eigen::MatrixXd V(d, d);
  std::vector<Label> col_label(d);
  auto label_of = [](double mod) {
    if (mod < 1.0 - kUnitModulusTol) return Label::stable;
    if (mod > 1.0 + kUnitModulusTol) return Label::unstable;
    return Label::center;
  };
  for (int i = 0; i < d;) {
    const cd lam = ev[i];
    if (lam.imag() == 0.0) {
      V.col(i) = real_null_vector(A - lam.real() * Eigen::MatrixXd::Identity(d, d));
      col_label[i] = label_of(std::abs(lam));
      ++i;
    } else {
      // ev[i] has negative imaginary part; use the conjugate with Im > 0.
      const cd up = std::conj(lam);
      Eigen::MatrixXcd Mc = A.cast<cd>() - up * Eigen::MatrixXcd::Identity(d, d);
      auto [re, im] = complex_null_pair(Mc);
      V.col(i) = re;
      V.col(i + 1) = im;
      col_label[i] = col_label[i + 1] = label_of(std::abs(lam));
      i += 2;
    }
  }

  Eigen::MatrixXd Vn = V;
  for (int j = 0; j < d; ++j) Vn.col(j).normalize();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Vn);
  const auto sv = svd.singularValues();
  Splitting out;
  out.basis_condition = sv(0) / sv(d - 1);
  if (!(out.basis_condition <= 1e8)) {
    std::ostringstream os;
    os << "eigenbasis condition number " << out.basis_condition << " exceeds 1e8";
    throw NumericError(os.str());
  }
  Eigen::MatrixXd W = V.inverse();

  for (Label l : {Label::stable, Label::center, Label::unstable}) {
    std::vector<int> cols;
    for (int j = 0; j < d; ++j)
      if (col_label[j] == l) cols.push_back(j);
    if (cols.empty()) continue;
    const int k = static_cast<int>(cols.size());
    Subspace sub;
    sub.columns.resize(d, k);
    sub.dual_rows.resize(k, d);
    sub.min_modulus = 1e300;
    sub.max_modulus = 0.0;
    for (int t = 0; t < k; ++t) {
      sub.columns.col(t) = V.col(cols[t]);
      sub.dual_rows.row(t) = W.row(cols[t]);
      sub.min_modulus = std::min(sub.min_modulus, s.moduli[cols[t]]);
      sub.max_modulus = std::max(sub.max_modulus, s.moduli[cols[t]]);
    }
    sub.projector = sub.columns * sub.dual_rows;
    Eigen::MatrixXd cm = sub.columns;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(cm);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    // Orient each basis vector like the raw eigen-column it came from.
    for (int t = 0; t < k; ++t)
      if (Q.col(t).dot(cm.col(t)) < 0) Q.col(t) = -Q.col(t);
    sub.basis = Q;
    out.subspaces[l] = sub;
  }
  return out;
}

}  // namespace phdyn::linear
