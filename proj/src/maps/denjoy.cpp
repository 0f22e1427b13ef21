#include "phdyn/maps/denjoy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phdyn::maps {

namespace {

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

void check_params(const DenjoyParams& p) {
  if (!(p.rotation_number > 0.0 && p.rotation_number < 1.0)) throw InputError("denjoy rotation_number must lie in (0, 1)");
  if (!(p.ratio > 0.0 && p.ratio < 1.0)) throw InputError("denjoy ratio must lie in (0, 1)");
  if (!(p.inserted_mass > 0.0 && p.inserted_mass < 1.0)) throw InputError("denjoy inserted_mass must lie in (0, 1)");
  if (!(p.tail_tol > 0.0 && p.tail_tol < 1e-3)) throw InputError("denjoy tail_tol must lie in (0, 1e-3)");
}

}  // namespace

DenjoyCircleMap::DenjoyCircleMap(DenjoyParams p) : TorusLiftMap(linear::IntegerMatrix::identity(1)), p_(p) {
  check_params(p_);
  const double r = p_.ratio, rho = p_.rotation_number;
  const double c = p_.inserted_mass * (1.0 - r) / (1.0 + r);
  while (2.0 * c * std::pow(r, M_ + 1) / (1.0 - r) > p_.tail_tol) {
    if (++M_ > 200000) throw InputError("denjoy truncation too deep");
  }
  const int N = 2 * M_ + 1;
  std::vector<std::pair<double, int>> pts;
  pts.reserve(N);
  for (int n = -M_; n <= M_; ++n) pts.emplace_back(frac(n * rho), n);
  std::sort(pts.begin(), pts.end());
  for (int j = 0; j + 1 < N; ++j)
    if (!(pts[j + 1].first > pts[j].first)) throw InputError("denjoy rotation number is rational at this truncation depth");

  theta_.resize(N);
  len_.resize(N);
  left_.resize(N);
  cum_.assign(N + 1, 0.0);
  n_of_pos_.resize(N);
  pos_of_n_.resize(N);
  for (int j = 0; j < N; ++j) {
    theta_[j] = pts[j].first;
    n_of_pos_[j] = pts[j].second;
    pos_of_n_[pts[j].second + M_] = j;
    len_[j] = c * std::pow(r, std::abs(pts[j].second));
  }
  // Summing in ascending size keeps the total reproducible and accurate.
  std::vector<double> sorted_len = len_;
  std::sort(sorted_len.begin(), sorted_len.end());
  scale_ = 1.0 - std::accumulate(sorted_len.begin(), sorted_len.end(), 0.0);
  for (int j = 0; j < N; ++j) {
    cum_[j + 1] = cum_[j] + len_[j];
    left_[j] = scale_ * theta_[j] + cum_[j];
  }
  lipschitz_ = (1.0 / r) * (1.0 + 1e-9);
  c0_ = 1.0 + rho;
}

double DenjoyCircleMap::interval_left(int n) const {
  if (std::abs(n) > M_) throw InputError("inserted interval index beyond truncation");
  return left_[pos(n)];
}

double DenjoyCircleMap::interval_length(int n) const {
  if (std::abs(n) > M_) throw InputError("inserted interval index beyond truncation");
  return len_[pos(n)];
}

std::optional<int> DenjoyCircleMap::interval_index(double s) const {
  const double f = frac(s);
  const int j = static_cast<int>(std::upper_bound(left_.begin(), left_.end(), f) - left_.begin()) - 1;
  if (j >= 0 && f < left_[j] + len_[j]) return n_of_pos_[j];
  return std::nullopt;
}

double DenjoyCircleMap::point_image(double theta) const {
  const auto k = std::lower_bound(theta_.begin(), theta_.end(), theta) - theta_.begin();
  return scale_ * theta + cum_[k];
}

double DenjoyCircleMap::gap_theta(int j, double f) const {
  double th = (f - cum_[j + 1]) / scale_;
  const double lo = j >= 0 ? theta_[j] : 0.0;
  const double hi = j + 1 < static_cast<int>(theta_.size()) ? theta_[j + 1] : 1.0;
  return std::clamp(th, lo, hi);
}

double DenjoyCircleMap::lift_value(double s) const {
  const double k0 = std::floor(s);
  const double f = s - k0;
  const double rho = p_.rotation_number;
  const int j = static_cast<int>(std::upper_bound(left_.begin(), left_.end(), f) - left_.begin()) - 1;
  if (j >= 0 && f < left_[j] + len_[j]) {
    const int n = n_of_pos_[j];
    if (n < M_) {
      const int jj = pos(n + 1);
      const double carry = std::round(theta_[j] + rho - theta_[jj]);
      return k0 + carry + left_[jj] + (f - left_[j]) * (len_[jj] / len_[j]);
    }
    const double ph = theta_[j] + rho;
    const double carry = std::floor(ph);
    return k0 + carry + point_image(ph - carry);
  }
  const double ph = gap_theta(j, f) + rho;
  const double carry = std::floor(ph);
  return k0 + carry + point_image(ph - carry);
}

double DenjoyCircleMap::lift_inverse(double s) const {
  const double k0 = std::floor(s);
  const double f = s - k0;
  const double rho = p_.rotation_number;
  const int j = static_cast<int>(std::upper_bound(left_.begin(), left_.end(), f) - left_.begin()) - 1;
  if (j >= 0 && f < left_[j] + len_[j]) {
    const int n = n_of_pos_[j];
    if (n > -M_) {
      const int jj = pos(n - 1);
      const double carry = std::round(theta_[j] - rho - theta_[jj]);
      return k0 + carry + left_[jj] + (f - left_[j]) * (len_[jj] / len_[j]);
    }
    const double ph = theta_[j] - rho;
    const double carry = std::floor(ph);
    return k0 + carry + point_image(ph - carry);
  }
  const double ph = gap_theta(j, f) - rho;
  const double carry = std::floor(ph);
  return k0 + carry + point_image(ph - carry);
}

double DenjoyCircleMap::derivative(double s) const {
  const double f = frac(s);
  const int j = static_cast<int>(std::upper_bound(left_.begin(), left_.end(), f) - left_.begin()) - 1;
  if (j >= 0 && f < left_[j] + len_[j]) {
    const int n = n_of_pos_[j];
    return n < M_ ? len_[pos(n + 1)] / len_[j] : 0.0;
  }
  return 1.0;
}

Vec DenjoyCircleMap::inverse(const Vec& y) const {
  Vec out(1);
  out(0) = lift_inverse(y(0));
  return out;
}

Vec DenjoyCircleMap::phi(const Vec& x) const {
  Vec out(1);
  out(0) = lift_value(x(0)) - x(0);
  return out;
}

Mat DenjoyCircleMap::dphi(const Vec& x) const {
  Mat out(1, 1);
  out(0, 0) = derivative(x(0)) - 1.0;
  return out;
}

PseudoRotationMap::PseudoRotationMap(DenjoyParams base, DenjoyParams fiber, TwistParams twist)
    : TorusLiftMap(linear::IntegerMatrix::identity(2)), base_(base), fiber_(fiber), tw_(twist) {
  if (!(tw_.margin > 0.0 && tw_.margin < 0.5)) throw InputError("twist margin must lie in (0, 1/2)");
  if (!std::isfinite(tw_.amplitude)) throw InputError("twist amplitude must be finite");
  const double l = base_.interval_left(tw_.interval), len = base_.interval_length(tw_.interval);
  lo_ = l + tw_.margin * len;
  hi_ = l + len - tw_.margin * len;
  double max_slope = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    double d = 0.0;
    twist_value(lo_ + (hi_ - lo_) * k / 4000.0, &d);
    max_slope = std::max(max_slope, std::abs(d));
  }
  lipschitz_ = std::max(base_.lipschitz_hint(), fiber_.lipschitz_hint()) + 1.01 * max_slope;
  c0_ = std::hypot(base_.c0_bound(), fiber_.c0_bound() + std::abs(tw_.amplitude));
}

double PseudoRotationMap::twist_value(double s, double* deriv) const {
  const double f = frac(s);
  if (deriv) *deriv = 0.0;
  if (f <= lo_ || f >= hi_) return 0.0;
  const double w = hi_ - lo_;
  const double z = (f - lo_) / w, y = 1.0 - z;
  if (deriv) *deriv = tw_.amplitude * 192.0 * z * z * y * y * (1.0 - 2.0 * z) / w;
  return tw_.amplitude * 64.0 * z * z * z * y * y * y;
}

Vec PseudoRotationMap::phi(const Vec& x) const {
  Vec out(2);
  out(0) = base_.lift_value(x(0)) - x(0);
  out(1) = fiber_.lift_value(x(1)) + twist_value(x(0)) - x(1);
  return out;
}

Mat PseudoRotationMap::dphi(const Vec& x) const {
  double da = 0.0;
  twist_value(x(0), &da);
  Mat out(2, 2);
  out << base_.derivative(x(0)) - 1.0, 0.0, da, fiber_.derivative(x(1)) - 1.0;
  return out;
}

Vec PseudoRotationMap::inverse(const Vec& y) const {
  Vec out(2);
  out(0) = base_.lift_inverse(y(0));
  out(1) = fiber_.lift_inverse(y(1) - twist_value(out(0)));
  return out;
}

}  // namespace phdyn::maps
