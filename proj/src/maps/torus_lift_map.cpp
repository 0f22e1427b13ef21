#include "phdyn/maps/map.hpp"

#include <cmath>
#include <numbers>

namespace phdyn::maps {

namespace {

void require_finite(const Vec& x, int d) {
  if (x.size() != d) throw InputError("point has wrong dimension");
  for (int i = 0; i < x.size(); ++i)
    if (!std::isfinite(x(i))) throw NumericError("non-finite coordinate in evaluation point");
}

Domain unit_cube(int d) {
  Domain dom;
  dom.kind = DomainKind::torus;
  dom.lower = Vec::Zero(d);
  dom.upper = Vec::Ones(d);
  return dom;
}

}  // namespace

bool Domain::contains(const Vec& x) const {
  for (int i = 0; i < x.size(); ++i)
    if (!(x(i) >= lower(i) && x(i) < upper(i))) return false;
  return true;
}

std::optional<Vec> Map::apply(const Vec& x) const {
  require_finite(x, d_);
  return apply_impl(x);
}

std::optional<Evaluation> Map::evaluate(const Vec& x) const {
  require_finite(x, d_);
  return evaluate_impl(x);
}

Mat Map::axis_lipschitz() const { return Mat::Constant(d_, d_, lipschitz_); }

bool Map::box_may_escape(const Vec&, const Vec&) const { return false; }

TorusLiftMap::TorusLiftMap(linear::IntegerMatrix A)
    : Map(A.dim(), unit_cube(A.dim())), lin_(A), A_(A.to_real()), Ainv_(A.inverse().to_real()) {}

std::optional<Evaluation> TorusLiftMap::evaluate_impl(const Vec& x) const {
  return Evaluation{A_ * x + phi(x), A_ + dphi(x)};
}

Vec TorusLiftMap::inverse(const Vec& y) const {
  Vec x = Ainv_ * y;
  for (int it = 0; it < 60; ++it) {
    Vec r = A_ * x + phi(x) - y;
    if (r.norm() <= 1e-15 * (1.0 + y.norm())) return x;
    Mat J = A_ + dphi(x);
    x -= J.partialPivLu().solve(r);
  }
  Vec r = A_ * x + phi(x) - y;
  if (r.norm() > 1e-11 * (1.0 + y.norm())) throw NumericError("lift inverse did not converge");
  return x;
}

LinearMap::LinearMap(linear::IntegerMatrix A) : TorusLiftMap(std::move(A)) {
  lipschitz_ = Eigen::JacobiSVD<Mat>(A_).singularValues()(0);
  c0_ = 0.0;
}

TranslationMap::TranslationMap(Vec shift)
    : TorusLiftMap(linear::IntegerMatrix::identity(static_cast<int>(shift.size()))), shift_(std::move(shift)) {
  lipschitz_ = 1.0;
  c0_ = shift_.norm();
}

CircleProductMap::CircleProductMap(std::vector<Factor> factors)
    : TorusLiftMap(linear::IntegerMatrix::identity(static_cast<int>(factors.size()))), factors_(std::move(factors)) {
  double lip = 0.0, c0sq = 0.0;
  for (const auto& f : factors_) {
    double slope = 2.0 * std::numbers::pi * std::abs(f.amplitude) * f.frequency;
    // Orientation needs 1 − slope > 0.
    if (slope >= 1.0) throw ConstructionError("circle factor is not a homeomorphism (2π|a|k >= 1)");
    lip = std::max(lip, 1.0 + slope);
    c0sq += std::pow(std::abs(f.shift) + std::abs(f.amplitude), 2);
  }
  lipschitz_ = lip;
  c0_ = std::sqrt(c0sq);
}

Vec CircleProductMap::phi(const Vec& x) const {
  Vec out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const auto& f = factors_[i];
    out(i) = f.shift + f.amplitude * std::sin(2.0 * std::numbers::pi * f.frequency * x(i));
  }
  return out;
}

Mat CircleProductMap::dphi(const Vec& x) const {
  Mat out = Mat::Zero(x.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    const auto& f = factors_[i];
    const double w = 2.0 * std::numbers::pi * f.frequency;
    out(i, i) = f.amplitude * w * std::cos(w * x(i));
  }
  return out;
}

double torus_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    double t = a(i) - b(i);
    t -= std::round(t);
    s += t * t;
  }
  return std::sqrt(s);
}

Vec reduce_mod1(const Vec& x) {
  Vec out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    out(i) = x(i) - std::floor(x(i));
    if (out(i) >= 1.0) out(i) = 0.0;
  }
  return out;
}

}  // namespace phdyn::maps
