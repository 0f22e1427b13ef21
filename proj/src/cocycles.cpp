#include "phdyn/cocycles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace phdyn::cocycles {

namespace {

constexpr int kScanNodes = 2048;

Matrix orth(const Matrix& B) {
  Eigen::HouseholderQR<Matrix> qr{B};
  Matrix Q = qr.householderQ() * Matrix::Identity(B.rows(), B.cols());
  return Q;
}

double op_norm(const Matrix& M) { return Eigen::JacobiSVD<Matrix>(M).singularValues()(0); }

// Rescale by a power of two only when entries drift far from 1, so short
// products stay bit-exact.
void renormalize(Matrix& M, double& log_scale) {
  const double m = M.cwiseAbs().maxCoeff();
  if (m > 0x1p100 || (m > 0.0 && m < 0x1p-100)) {
    int e = 0;
    std::frexp(m, &e);
    M = M * std::ldexp(1.0, -e);
    log_scale += e * std::numbers::ln2;
  }
}

std::vector<std::complex<double>> eigenvalues(const Matrix& M) {
  Eigen::EigenSolver<Matrix> es(M, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + M.rows());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  return ev;
}

// Sign-insensitive discriminant of R_θ-composed return map, divided by ‖M‖².
double normalized_disc(const PeriodicCocycle& c, double theta) {
  const Matrix R = rotation(theta);
  Matrix M = Matrix::Identity(2, 2);
  double ls = 0.0;
  for (int i = 0; i < c.period(); ++i) {
    M = R * c[i] * M;
    renormalize(M, ls);
  }
  const double tr = M.trace(), det = M.determinant();
  return (tr * tr - 4.0 * det) / M.squaredNorm();
}

PeriodicCocycle rotated(const PeriodicCocycle& c, double theta) {
  const Matrix R = rotation(theta);
  std::vector<Matrix> m;
  m.reserve(c.matrices().size());
  for (const auto& A : c.matrices()) m.push_back(R * A);
  return PeriodicCocycle(std::move(m));
}

}  // namespace

PeriodicCocycle::PeriodicCocycle(std::vector<Matrix> matrices) : mats_(std::move(matrices)) {
  if (mats_.empty()) throw InputError("cocycle needs at least one matrix");
  const auto d = mats_[0].rows();
  if (d < 1 || mats_[0].cols() != d) throw InputError("cocycle matrices must be square");
  K_ = 1.0;
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    const Matrix& A = mats_[i];
    if (A.rows() != d || A.cols() != d) throw InputError("cocycle matrix " + std::to_string(i) + " has the wrong size");
    if (!A.allFinite()) throw InputError("cocycle matrix " + std::to_string(i) + " is not finite");
    const double det = A.determinant();
    if (!(std::abs(det) > 1e-12)) throw InputError("cocycle matrix " + std::to_string(i) + " is not invertible");
    log_det_ += std::log(std::abs(det));
    if (det < 0) det_sign_ = -det_sign_;
    K_ = std::max({K_, op_norm(A), op_norm(A.inverse())});
  }
}

Matrix PeriodicCocycle::scaled_product(double* log_scale) const {
  Matrix M = Matrix::Identity(dim(), dim());
  double ls = 0.0;
  for (const auto& A : mats_) {
    M = A * M;
    renormalize(M, ls);
  }
  if (log_scale) *log_scale = ls;
  return M;
}

Matrix PeriodicCocycle::product() const {
  Matrix M = Matrix::Identity(dim(), dim());
  for (const auto& A : mats_) M = A * M;
  return M;
}

ExponentVector exponents(const PeriodicCocycle& c) {
  double ls = 0.0;
  const Matrix M = c.scaled_product(&ls);
  const auto ev = eigenvalues(M);
  const int d = c.dim();
  const double pi = c.period();
  ExponentVector out;
  std::vector<double> logs(d);
  for (int j = 0; j < d; ++j) logs[j] = std::log(std::abs(ev[j])) + ls;
  if (d == 2) {
    // The small modulus follows from the determinant; no cancellation.
    logs[0] = c.log_abs_det() - logs[1];
    if (std::abs(ev[0].imag()) > 0.0) logs[0] = logs[1] = 0.5 * c.log_abs_det();
  }
  for (double l : logs) out.sigma.push_back(l / pi);
  std::sort(out.sigma.begin(), out.sigma.end());
  for (int j = 0; j + 1 < d; ++j)
    if (std::abs(ev[j] - ev[j + 1]) <= 1e-8 * std::max(1.0, std::abs(ev[j + 1]))) {
      Eigen::EigenSolver<Matrix> es(M, true);
      const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
      const auto& s = svd.singularValues();
      if (!(s(d - 1) > 1e-8 * s(0))) out.defective_cluster = true;
    }
  return out;
}

double distance(const PeriodicCocycle& a, const PeriodicCocycle& b) {
  if (a.period() != b.period() || a.dim() != b.dim()) throw InputError("cocycles differ in period or dimension");
  double d = 0.0;
  for (int i = 0; i < a.period(); ++i)
    d = std::max({d, op_norm(a[i] - b[i]), op_norm(a[i].inverse() - b[i].inverse())});
  return d;
}

DominationCheck check_domination_cocycle(const PeriodicCocycle& c, const Matrix& E, const Matrix& F, int ell) {
  const int d = c.dim();
  if (ell < 1) throw InputError("ell must be >= 1");
  if (E.rows() != d || F.rows() != d || E.cols() < 1 || F.cols() < 1 || E.cols() + F.cols() != d)
    throw InputError("E and F must be complementary subspaces");
  const int pi = c.period();
  std::vector<Matrix> Es{orth(E)}, Fs{orth(F)};
  for (int i = 0; i < pi; ++i) {
    Es.push_back(orth(c[i] * Es.back()));
    Fs.push_back(orth(c[i] * Fs.back()));
  }
  auto proj = [](const Matrix& B) -> Matrix { return B * B.transpose(); };
  if ((proj(Es[pi]) - proj(Es[0])).norm() > 1e-8)
    throw InputError("E is not invariant: it does not return to itself at index 0 after one period");
  if ((proj(Fs[pi]) - proj(Fs[0])).norm() > 1e-8)
    throw InputError("F is not invariant: it does not return to itself at index 0 after one period");
  DominationCheck r;
  r.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pi; ++i) {
    Matrix P = Matrix::Identity(d, d);
    for (int j = 0; j < ell; ++j) P = c[i + j] * P;
    const auto se = Eigen::JacobiSVD<Matrix>(P * Es[i]).singularValues();
    const auto sf = Eigen::JacobiSVD<Matrix>(P * Fs[i]).singularValues();
    const double m = 0.5 * sf.minCoeff() - se.maxCoeff();
    if (m < r.margin) r.margin = m, r.worst_index = i;
  }
  r.pass = r.margin > 0.0;
  return r;
}

DiameterEstimate lyapunov_diameter(const std::vector<PeriodicCocycle>& family) {
  DiameterEstimate est;
  for (const auto& c : family) {
    const auto s = exponents(c).sigma;
    est.table.emplace_back(c.period(), s.back() - s.front());
  }
  std::stable_sort(est.table.begin(), est.table.end(), [](auto a, auto b) { return a.first < b.first; });
  int distinct = 0;
  for (std::size_t i = 0; i < est.table.size(); ++i)
    if (i == 0 || est.table[i].first != est.table[i - 1].first) ++distinct;
  if (distinct < 3) throw InputError("lyapunov_diameter needs at least 3 distinct periods");
  const std::size_t n = est.table.size(), keep = (n + 2) / 3;
  est.delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = n - keep; i < n; ++i) est.delta = std::min(est.delta, est.table[i].second);
  return est;
}

Matrix rotation(double theta) {
  Matrix R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

PerturbationPath equalize_2d(const PeriodicCocycle& c, double step_cap) {
  if (c.dim() != 2) throw InputError("equalize_2d needs a 2-dimensional cocycle");
  if (!(step_cap > 0.0)) throw InputError("equalize_2d needs a positive step cap");
  if (c.det_sign() < 0) throw InputError("equalize_2d needs det M > 0");
  if (c.log_abs_det() > 1e-12) throw InputError("equalize_2d needs |det M| <= 1");

  PerturbationPath path;
  double theta_star = 0.0;
  if (normalized_disc(c, 0.0) > 0.0) {
    double lo = 0.0, hi = -1.0;
    for (int j = 1; j <= kScanNodes; ++j) {
      const double t = std::numbers::pi * j / kScanNodes;
      if (normalized_disc(c, t) <= 0.0) {
        hi = t;
        break;
      }
      lo = t;
    }
    if (hi < 0.0) throw NumericError("equalize_2d: discriminant never changes sign on [0, pi]");
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (normalized_disc(c, mid) <= 0.0 ? hi : lo) = mid;
    }
    theta_star = hi;
  }
  path.theta_star = theta_star;
  // ‖R_a·A − R_b·A‖ ≤ |a − b|·‖A‖ and likewise for inverses, so K·Δθ ≤ cap
  // bounds each step; the measured distances are rechecked anyway.
  int m = theta_star > 0.0 ? static_cast<int>(std::ceil(theta_star * c.bound() / step_cap)) : 0;
  const bool sink = c.log_abs_det() < 0.0;
  for (int attempt = 0;; ++attempt) {
    path.steps.clear();
    path.thetas.clear();
    bool fits = true;
    for (int j = 0; j <= m; ++j) {
      const double t = j == m ? theta_star : theta_star * j / m;
      path.steps.push_back(j == 0 ? c : rotated(c, t));
      path.thetas.push_back(t);
      if (j > 0 && distance(path.steps[j - 1], path.steps[j]) > step_cap) fits = false;
    }
    if (fits) break;
    if (attempt == 8) throw NumericError("equalize_2d: step cap cannot be met");
    m *= 2;
  }
  for (const auto& step : path.steps) {
    const bool ok = !sink || exponents(step).sigma.front() < 0.0;
    path.in_sink_class.push_back(ok ? 1 : 0);
    path.sink_preserved = path.sink_preserved && ok;
    path.diameter = std::max(path.diameter, distance(step, c));
  }
  double ls = 0.0;
  const Matrix M = path.steps.back().scaled_product(&ls);
  const auto ev = eigenvalues(M);
  for (const auto& z : ev) path.endpoint_moduli.push_back(std::exp(std::log(std::abs(z)) + ls));
  return path;
}

double line_angle(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double cross = a(0) * b(1) - a(1) * b(0), dot = a.dot(b);
  const double t = std::abs(std::atan2(cross, dot));
  return std::min(t, std::numbers::pi - t);
}

SteerResult steer_vector(const std::vector<Matrix>& mats, const Eigen::Vector2d& v, const Eigen::Vector2d& w,
                         double eps) {
  if (mats.empty()) throw InputError("steer_vector needs at least one matrix");
  if (!(eps > 0.0)) throw InputError("steer_vector needs eps > 0");
  if (v.norm() == 0.0 || w.norm() == 0.0) throw InputError("steer_vector needs nonzero vectors");
  for (const auto& A : mats)
    if (A.rows() != 2 || A.cols() != 2) throw InputError("steer_vector works with 2x2 matrices");
  SteerResult r;
  Eigen::Vector2d t = v.normalized(), cur = w.normalized();
  Eigen::Vector2d pv = t, pw = cur;
  for (const auto& A : mats) {
    t = (A * t).normalized();
    cur = (A * cur).normalized();
    pv = A * pv;
    pw = A * pw;
    // Signed angle taking line(cur) onto line(t), folded into (−π/2, π/2].
    double phi = std::atan2(cur(0) * t(1) - cur(1) * t(0), cur.dot(t));
    if (phi > std::numbers::pi / 2) phi -= std::numbers::pi;
    if (phi <= -std::numbers::pi / 2) phi += std::numbers::pi;
    const double a = std::clamp(phi, -eps, eps);
    r.angles.push_back(a);
    if (a != 0.0) cur = (rotation(a) * cur).normalized();
  }
  r.growth_hypothesis = pv.norm() >= 0.5 * pw.norm();
  // Residual from an independent recomposition of the returned rotations.
  Eigen::Vector2d achieved = w.normalized(), target = v.normalized();
  for (std::size_t j = 0; j < mats.size(); ++j) {
    achieved = (rotation(r.angles[j]) * mats[j] * achieved).normalized();
    target = (mats[j] * target).normalized();
  }
  r.residual = line_angle(achieved, target);
  r.success = r.residual <= 1e-9;
  return r;
}

}  // namespace phdyn::cocycles
