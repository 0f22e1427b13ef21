#include "phdyn/maps/horseshoe_map.hpp"

#include <cmath>
#include <sstream>

namespace phdyn::maps {

namespace {

// Vertex-matched quadratic: ((t−v)/w)² − 1 with w chosen per side so the zeros
// sit at prescribed points.
double split_quadratic(double t, double vertex, double w_left, double w_right, double* deriv) {
  const double w = t <= vertex ? w_left : w_right;
  const double z = (t - vertex) / w;
  if (deriv) *deriv = 2.0 * z / w;
  return z * z - 1.0;
}

Domain horseshoe_region() {
  Domain d;
  d.kind = DomainKind::region;
  d.lower = Vec(3);
  d.upper = Vec(3);
  d.lower << 0.0, 0.0, kFiberLo;
  d.upper << 5.0, 5.0, kFiberHi;
  return d;
}

}  // namespace

double HorseshoeSpec::shape(int band, double t, double* deriv) {
  switch (band) {
    case 0: return split_quadratic(t, 3.55, 3.55, 0.45, deriv);  // zeros 0, 4
    case 1:
      if (deriv) *deriv = 2.0 * t - 7.0;
      return (t - 3.0) * (t - 4.0);
    case 2:
      if (deriv) *deriv = 2.0 * t - 3.0;
      return (t - 1.0) * (t - 2.0);
    default: return split_quadratic(t, 1.45, 0.45, 3.55, deriv);  // zeros 1, 5
  }
}

double HorseshoeSpec::fiber(int band, double t) const {
  return t + eta[band] * shape(band, t) / normalizer + fiber_shift[band];
}

double HorseshoeSpec::fiber_derivative(int band, double t) const {
  double d = 0.0;
  shape(band, t, &d);
  return 1.0 + eta[band] * d / normalizer;
}

int HorseshoeSpec::band_of(double y) const {
  for (int i = 0; i < 4; ++i)
    if (y >= offsets[i] && y < offsets[i] + 1.0) return i;
  return -1;
}

HorseshoeCheck verify_horseshoe(const HorseshoeSpec& s) {
  HorseshoeCheck out;
  auto fail = [&](const std::string& msg) {
    out.ok = false;
    out.violations.push_back(msg);
  };
  if (!(s.normalizer > 0.0) || !std::isfinite(s.normalizer)) fail("normalizer C must be positive");
  for (int i = 0; i < 4; ++i)
    if (!std::isfinite(s.eta[i]) || !std::isfinite(s.offsets[i]) || !std::isfinite(s.fiber_shift[i]))
      fail("non-finite horseshoe parameter");
  if (!out.ok) return out;

  for (int i = 0; i + 1 < 4; ++i)
    if (!(s.offsets[i] + 1.0 < s.offsets[i + 1])) fail("bands: strips must be pairwise disjoint and ordered");
  if (!(s.offsets[0] > 0.0 && s.offsets[1] + 1.0 < 7.0 / 3.0)) fail("bands: I1, I2 must lie in (0, 7/3)");
  if (!(s.offsets[2] > 8.0 / 3.0 && s.offsets[3] + 1.0 < 5.0)) fail("bands: I3, I4 must lie in (8/3, 5)");

  const int n = 10000;
  out.min_slope = 1e300;
  out.max_slope = -1e300;
  for (int b = 0; b < 4; ++b) {
    if (!(s.eta[b] > 0.0)) fail("sign pattern: eta_" + std::to_string(b + 1) + " must be positive for the derivative sign pattern");
    double amp = 0.0;
    bool p2 = true, sign_ok = true;
    for (int k = 0; k <= n; ++k) {
      const double t = kFiberLo + (kFiberHi - kFiberLo) * k / n;
      const double g1 = s.fiber_derivative(b, t);
      out.min_slope = std::min(out.min_slope, g1);
      out.max_slope = std::max(out.max_slope, g1);
      amp = std::max(amp, std::abs(g1 - 1.0));
      if (!(g1 > 0.8 && g1 < 1.2)) p2 = false;
      if (b <= 1 && t <= 3.5 && !(g1 < 1.0)) sign_ok = false;
      if (b >= 2 && t >= 1.5 && !(g1 > 1.0)) sign_ok = false;
    }
    const std::string tag = "band " + std::to_string(b + 1);
    if (!p2) fail("slope: " + tag + " violates 4/5 < g' < 6/5 on [-1,6]");
    if (amp > 0.2) fail("slope: " + tag + " amplitude sup|eta*P'|/C exceeds 1/5");
    if (!sign_ok)
      fail(b <= 1 ? "sign pattern: " + tag + " needs g' < 1 on [-1, 3.5]" : "sign pattern: " + tag + " needs g' > 1 on [1.5, 6]");

    // Fixed points: sign changes of g(t) − t on the grid, then bisection.
    auto h = [&](double t) { return s.fiber(b, t) - t; };
    std::vector<double> roots;
    double tp = kFiberLo, hp = h(tp);
    if (hp == 0.0) roots.push_back(tp);
    for (int k = 1; k <= n; ++k) {
      const double t = kFiberLo + (kFiberHi - kFiberLo) * k / n;
      const double ht = h(t);
      if (ht == 0.0) {
        roots.push_back(t);
      } else if (hp != 0.0 && (hp < 0) != (ht < 0)) {
        double lo = tp, hi = t, hlo = hp;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double hm = h(mid);
          if (hm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((hm < 0) == (hlo < 0)) {
            lo = mid;
            hlo = hm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      tp = t;
      hp = ht;
    }
    out.fixed_points[b] = roots;
    bool match = roots.size() == 2;
    for (std::size_t r = 0; match && r < 2; ++r)
      if (std::abs(roots[r] - kFiberFixedPoints[b][r]) > 1e-10) match = false;
    if (!match) {
      std::ostringstream os;
      os << "fixed points: " << tag << " fixed points in [-1,6] are {";
      for (std::size_t r = 0; r < roots.size(); ++r) os << (r ? ", " : "") << format_real(roots[r]);
      os << "}, expected {" << kFiberFixedPoints[b][0] << ", " << kFiberFixedPoints[b][1] << "}";
      fail(os.str());
    }
    for (double r : roots)
      if (std::abs(s.fiber_derivative(b, r) - 1.0) < 1e-12) fail("fixed points: " + tag + " has a non-hyperbolic fixed point");
  }
  return out;
}

HorseshoeMap::HorseshoeMap(HorseshoeSpec spec, bool validate) : Map(3, horseshoe_region()), spec_(spec) {
  if (validate) {
    auto chk = verify_horseshoe(spec_);
    if (!chk.ok) {
      std::string msg = "horseshoe parameters rejected:";
      for (const auto& v : chk.violations) msg += " [" + v + "]";
      throw ConstructionError(msg);
    }
    fiber_lip_ = chk.max_slope;
  } else {
    double m = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k <= 10000; ++k) m = std::max(m, std::abs(spec_.fiber_derivative(b, kFiberLo + 7.0 * k / 10000)));
    fiber_lip_ = m;
  }
  lipschitz_ = std::max(5.0, fiber_lip_);
  heuristic_ = false;
}

Mat HorseshoeMap::axis_lipschitz() const {
  Mat L = Mat::Zero(3, 3);
  L(0, 0) = 0.2;
  L(1, 1) = 5.0;
  L(2, 2) = fiber_lip_;
  return L;
}

bool HorseshoeMap::box_may_escape(const Vec& lo, const Vec& hi) const {
  for (int i = 0; i < 3; ++i)
    if (lo(i) < domain_.lower(i) || hi(i) > domain_.upper(i)) return true;
  int b = -1;
  for (int i = 0; i < 4; ++i)
    if (lo(1) >= spec_.offsets[i] && hi(1) <= spec_.offsets[i] + 1.0) b = i;
  if (b < 0) return true;
  // g_b is increasing, so the fiber image of [lo, hi) is [g(lo), g(hi)).
  return spec_.fiber(b, lo(2)) < kFiberLo || spec_.fiber(b, hi(2)) > kFiberHi;
}

std::optional<Vec> HorseshoeMap::apply_impl(const Vec& x) const {
  if (!domain_.contains(x)) return std::nullopt;
  const int b = spec_.band_of(x(1));
  if (b < 0) return std::nullopt;
  Vec y(3);
  y << x(0) / 5.0 + spec_.offsets[b], 5.0 * (x(1) - spec_.offsets[b]), spec_.fiber(b, x(2));
  if (!domain_.contains(y)) return std::nullopt;
  return y;
}

std::optional<Evaluation> HorseshoeMap::evaluate_impl(const Vec& x) const {
  auto y = apply_impl(x);
  if (!y) return std::nullopt;
  const int b = spec_.band_of(x(1));
  Mat J = Mat::Zero(3, 3);
  J(0, 0) = 0.2;
  J(1, 1) = 5.0;
  J(2, 2) = spec_.fiber_derivative(b, x(2));
  return Evaluation{*y, J};
}

}  // namespace phdyn::maps
