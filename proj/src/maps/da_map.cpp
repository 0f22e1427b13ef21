#include "phdyn/maps/da_map.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace phdyn::maps {

namespace {

Eigen::Matrix2d rot(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

const Eigen::Matrix2d kJ = (Eigen::Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();

std::string point_str(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << format_real(x(i));
  os << ")";
  return os.str();
}

}  // namespace

double smooth_step(double z, double* deriv) {
  if (z <= 0.0 || z >= 1.0) {
    if (deriv) *deriv = 0.0;
    return z <= 0.0 ? 0.0 : 1.0;
  }
  // (70/3)·∫ (8z⁶ − 24z⁵ + 27z⁴ − 14z³ + 3z²)
  const double z2 = z * z, z3 = z2 * z;
  if (deriv) *deriv = 70.0 / 3.0 * z2 * (((8.0 * z - 24.0) * z + 27.0) * z2 - 14.0 * z + 3.0);
  return z3 * (70.0 / 3.0 + z * (-245.0 / 3.0 + z * (126.0 + z * (-280.0 / 3.0 + z * 80.0 / 3.0))));
}

DAMap::DAMap(linear::IntegerMatrix A, DAParams p) : TorusLiftMap(std::move(A)), p_(std::move(p)) {
  if (d_ != 3) throw InputError("DA construction needs a 3x3 linear part");
  q_ = p_.fixed_point.size() == 0 ? Vec::Zero(3) : p_.fixed_point;
  if (q_.size() != 3) throw InputError("DA fixed_point must have 3 coordinates");
  Vec drift = A_ * q_ - q_;
  for (int i = 0; i < 3; ++i)
    if (std::abs(drift(i) - std::round(drift(i))) > 1e-12)
      throw InputError("DA fixed_point is not fixed by A on the torus");
  if (!(p_.delta > 0.0 && p_.delta < 0.25)) throw InputError("DA delta must lie in (0, 1/4)");
  const double a = p_.lambda_weak, b = p_.lambda_strong;
  if (!(a > 0.0 && a < 1.0 && b > 1.0 && a * b > 1.0))
    throw InputError("DA stable-block eigenvalues must satisfy 0 < a < 1 < b and a*b > 1");
  if (!(p_.log_span > 0.0)) throw InputError("DA log_span must be positive");

  auto spec = linear::spectral_classify(lin_);
  if (spec.classification != linear::SpectralClass::anosov_complex_pair)
    throw InputError("DA construction needs a hyperbolic linear part with a complex eigenvalue pair");
  auto split = linear::invariant_splitting(spec, lin_);
  if (!split.has(linear::Label::stable) || split.at(linear::Label::stable).columns.cols() != 2 ||
      spec.eigenvalues[0].imag() == 0.0)
    throw InputError("DA construction needs the complex pair on the stable side");
  const auto& st = split.at(linear::Label::stable);
  const auto& un = split.at(linear::Label::unstable);

  T_.resize(3, 3);
  T_.col(0) = st.columns.col(0);
  T_.col(1) = st.columns.col(1);
  T_.col(2) = un.columns.col(0).normalized();
  Tinv_ = T_.inverse();
  Mat At = Tinv_ * A_ * T_;
  Eigen::Matrix2d As = At.topLeftCorner(2, 2);
  mu_ = std::sqrt(std::abs(As.determinant()));
  psi_ = std::atan2(As(1, 0), As(0, 0));
  if ((As - mu_ * rot(psi_)).norm() > 1e-9) throw NumericError("stable block is not conformal in the chosen basis");

  Q_ = rot(p_.eigen_angle);
  k1_ = a / mu_;
  k2_ = b / mu_;

  du_ = p_.unstable_halfwidth > 0.0 ? p_.unstable_halfwidth : 0.6 * p_.delta;
  if (p_.core_radius > 0.0) {
    R_ = p_.core_radius;
  } else {
    double lo = 0.0, hi = p_.delta;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (extent_for(mid, du_, 720) <= 0.9 * p_.delta ? lo : hi) = mid;
    }
    R_ = lo;
  }
  if (!(R_ > 0.0)) throw ConstructionError("DA support does not fit inside the delta ball");
  extent_ = extent_for(R_, du_, 7200);
  if (extent_ >= p_.delta)
    throw ConstructionError("DA support extends to distance " + format_real(extent_) + " >= delta");

  Mat Dpsi = Mat::Identity(3, 3);
  Dpsi.topLeftCorner(2, 2) = E(1.0);
  B_ = A_ * T_ * Dpsi * Tinv_;

  validate();
}

double DAMap::extent_for(double R, double du, int n_angles) const {
  double m = 0.0;
  for (int k = 0; k < n_angles; ++k) {
    double t = 2.0 * std::numbers::pi * k / n_angles;
    for (double u : {-du, du}) {
      Vec v(3);
      v << R * std::cos(t), R * std::sin(t), u;
      m = std::max(m, (T_ * v).norm());
    }
  }
  return m;
}

Eigen::Matrix2d DAMap::E(double t) const {
  Eigen::Matrix2d D = Eigen::Vector2d(std::pow(k1_, t), std::pow(k2_, t)).asDiagonal();
  return rot(-t * psi_) * Q_ * D * Q_.transpose();
}

Eigen::Matrix2d DAMap::dE(double t) const {
  Eigen::Matrix2d D = Eigen::Vector2d(std::log(k1_) * std::pow(k1_, t), std::log(k2_) * std::pow(k2_, t)).asDiagonal();
  return -psi_ * kJ * E(t) + rot(-t * psi_) * Q_ * D * Q_.transpose();
}

DAMap::Local DAMap::localize(const Vec& x) const {
  Local loc;
  Vec y = x - q_;
  for (int i = 0; i < 3; ++i) y(i) -= std::round(y(i));
  if (y.norm() >= p_.delta) return loc;
  Vec c = Tinv_ * y;
  loc.s = Eigen::Vector2d(c(0), c(1));
  loc.u = c(2);
  loc.inside = loc.s.norm() < R_ && std::abs(loc.u) < du_;
  return loc;
}

double DAMap::tau(const Eigen::Vector2d& s, double u, Eigen::Vector2d* grad_s, double* d_u) const {
  double dh = 0.0;
  const double au = std::abs(u);
  const double h = 1.0 - smooth_step((au / du_ - 0.5) / 0.5, &dh);
  dh = -dh * 2.0 / du_ * (u < 0 ? -1.0 : 1.0);
  const double r = s.norm();
  double g = 1.0, dg = 0.0;
  if (r >= R_) {
    g = 0.0;
  } else if (r > 0.0) {
    double dz = 0.0;
    g = smooth_step(std::log(R_ / r) / p_.log_span, &dz);
    dg = dz / p_.log_span;  // derivative in log(R/r)
  }
  if (grad_s) *grad_s = (r > 0.0 && r < R_) ? Eigen::Vector2d(-h * dg * s / (r * r)) : Eigen::Vector2d::Zero();
  if (d_u) *d_u = dh * g;
  return h * g;
}

double DAMap::twist(const Vec& x) const {
  auto loc = localize(x);
  return loc.inside ? tau(loc.s, loc.u, nullptr, nullptr) : 0.0;
}

Vec DAMap::phi(const Vec& x) const {
  auto loc = localize(x);
  if (!loc.inside) return Vec::Zero(3);
  const double t = tau(loc.s, loc.u, nullptr, nullptr);
  Eigen::Vector2d ds = (E(t) - Eigen::Matrix2d::Identity()) * loc.s;
  Vec step = T_.col(0) * ds(0) + T_.col(1) * ds(1);
  return A_ * step;
}

Mat DAMap::dphi(const Vec& x) const {
  auto loc = localize(x);
  if (!loc.inside) return Mat::Zero(3, 3);
  Eigen::Vector2d gs;
  double gu = 0.0;
  const double t = tau(loc.s, loc.u, &gs, &gu);
  const Eigen::Vector2d dEs = dE(t) * loc.s;
  Mat D = Mat::Zero(3, 3);
  D.topLeftCorner(2, 2) = E(t) + dEs * gs.transpose() - Eigen::Matrix2d::Identity();
  D(0, 2) = dEs(0) * gu;
  D(1, 2) = dEs(1) * gu;
  return A_ * T_ * D * Tinv_;
}

Vec DAMap::inverse(const Vec& y) const {
  Vec z = Ainv_ * y;
  Vec w = z - q_;
  Vec shift(3);
  for (int i = 0; i < 3; ++i) {
    shift(i) = std::round(w(i));
    w(i) -= shift(i);
  }
  Vec c = Tinv_ * w;
  const Eigen::Vector2d target(c(0), c(1));
  const double u = c(2);
  if (w.norm() >= p_.delta || target.norm() >= R_ || std::abs(u) >= du_) return z;
  Eigen::Vector2d s = target;
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector2d gs;
    const double t = tau(s, u, &gs, nullptr);
    Eigen::Vector2d r = E(t) * s - target;
    if (r.norm() <= 1e-17 + 1e-15 * target.norm()) break;
    Eigen::Matrix2d J = E(t) + (dE(t) * s) * gs.transpose();
    Eigen::Vector2d step = J.partialPivLu().solve(r);
    // Damp steps that would jump out of the cylinder.
    double lam = 1.0;
    while (lam > 1e-4 && (s - lam * step).norm() >= R_) lam *= 0.5;
    s -= lam * step;
  }
  Vec out(3);
  out << s(0), s(1), u;
  return q_ + shift + T_ * out;
}

Mat DAMap::stable_plane() const {
  Eigen::MatrixXd cols = T_.leftCols(2);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
  Eigen::MatrixXd Qm = qr.householderQ() * Eigen::MatrixXd::Identity(3, 2);
  return Qm;
}

void DAMap::validate() {
  // Polar grid in the conformal stable plane, log-spaced toward q, times u.
  min_det_ = 1e300;
  Vec worst = q_;
  double sup_norm = Eigen::JacobiSVD<Mat>(A_).singularValues()(0);
  const int n_log = 60, n_lin = 30, n_ang = 48, n_u = 21;
  std::vector<double> radii;
  for (int i = 0; i < n_log; ++i) radii.push_back(R_ * std::exp(-(p_.log_span + 1.0) * (i + 0.5) / n_log));
  for (int i = 0; i < n_lin; ++i) radii.push_back(R_ * (i + 0.5) / n_lin);
  for (double r : radii)
    for (int k = 0; k < n_ang; ++k) {
      const double th = 2.0 * std::numbers::pi * (k + 0.25) / n_ang;
      for (int j = 0; j < n_u; ++j) {
        const double u = du_ * (-1.0 + 2.0 * (j + 0.5) / n_u);
        Vec c(3);
        c << r * std::cos(th), r * std::sin(th), u;
        Vec x = q_ + T_ * c;
        Mat J = A_ + dphi(x);
        const double det = std::abs(J.determinant());
        if (det < min_det_) {
          min_det_ = det;
          worst = x;
        }
        sup_norm = std::max(sup_norm, Eigen::JacobiSVD<Mat>(J).singularValues()(0));
      }
    }
  if (min_det_ < 1e-6)
    throw ConstructionError("DA blend is not invertible: |det Df| = " + format_real(min_det_) + " at " + point_str(worst));
  lipschitz_ = 1.05 * sup_norm;
  heuristic_ = true;

  double max_dev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    Eigen::Matrix2d D = E(i / 1000.0) - Eigen::Matrix2d::Identity();
    max_dev = std::max(max_dev, Eigen::JacobiSVD<Eigen::Matrix2d>(D).singularValues()(0));
  }
  Mat ATs = A_ * T_.leftCols(2);
  c0_ = 1.01 * Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(ATs)).singularValues()(0) * R_ * max_dev;
}

}  // namespace phdyn::maps
