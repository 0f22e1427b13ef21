#include "phdyn/cones.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace phdyn::cones {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat orthonormalize(const Mat& B) {
  if (B.cols() == 0 || B.rows() < B.cols()) throw InputError("bundle basis has bad shape");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(B)};
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols());
  // Orient like the input so constant bundles keep their sign convention.
  for (int j = 0; j < Q.cols(); ++j)
    if (Q.col(j).dot(B.col(j)) < 0) Q.col(j) *= -1.0;
  if (qr.matrixQR().diagonal().cwiseAbs().minCoeff() < 1e-12) throw InputError("bundle basis is rank deficient");
  return Q;
}

Mat complement(const Mat& E) {
  const int d = static_cast<int>(E.rows()), k = static_cast<int>(E.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(E)};
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(d - k);
}

Vec point_for(const maps::Map& map, const Vec& y) { return map.is_torus() ? maps::reduce_mod1(y) : y; }

// Evaluates fn on every sample and reduces in sample order, so the report does
// not depend on the worker count.
template <class Fn>
Report run_samples(const maps::Map& map, const Sampling& s, const std::string& mode, int iterates, Fn fn) {
  const bool explicit_pts = !s.points.empty();
  const std::size_t n = explicit_pts ? s.points.size() : static_cast<std::size_t>(std::max(s.n_samples, 0));
  if (n == 0) throw InputError("verifier needs at least one sample");
  const int d = map.dim();
  const auto& dom = map.domain();
  std::vector<std::optional<double>> margin(n);
  std::vector<Vec> pts(n);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Vec x(d);
      if (explicit_pts) {
        x = s.points[i];
        if (x.size() != d) throw InputError("sample point has wrong dimension");
      } else {
        Rng rng(derive_seed(s.seed, i));
        for (int k = 0; k < d; ++k) x(k) = rng.uniform(dom.lower(k), dom.upper(k));
      }
      pts[i] = x;
      if (s.mask && !s.mask(x)) continue;
      margin[i] = fn(x);
    }
  };
  const int w = std::max(1, std::min<int>(clamp_workers(s.workers), static_cast<int>(std::min<std::size_t>(n, 64))));
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < w; ++t) jobs.push_back(std::async(std::launch::async, work, n * t / w, n * (t + 1) / w));
  for (auto& j : jobs) j.get();

  Report r;
  r.mode = mode;
  r.iterates = iterates;
  r.seed = s.seed;
  r.worst_margin = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (!margin[i]) {
      ++r.skipped;
      continue;
    }
    ++r.samples;
    if (!r.witness || *margin[i] < r.worst_margin) {
      r.worst_margin = *margin[i];
      r.witness = pts[i];
    }
  }
  r.pass = r.samples > 0 && r.worst_margin > 0.0;
  return r;
}

// Product of Jacobians along n steps of the orbit of x, or nullopt on escape.
std::optional<Mat> orbit_jacobian(const maps::Map& map, const Vec& x, int n) {
  Mat P = Mat::Identity(x.size(), x.size());
  Vec y = x;
  for (int i = 0; i < n; ++i) {
    auto ev = map.evaluate(y);
    if (!ev) return std::nullopt;
    P = ev->jacobian * P;
    y = point_for(map, ev->image);
  }
  return P;
}

Eigen::VectorXd singular_values(const Mat& M) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(M)).singularValues();
}

}  // namespace

Bundle constant_bundle(Mat basis) {
  Mat B = orthonormalize(basis);
  return [B](const Vec&) { return B; };
}

ConeField constant_cone(Mat basis, double aperture) {
  if (!(aperture > 0.0)) throw InputError("cone aperture must be positive");
  return {constant_bundle(std::move(basis)), [aperture](const Vec&) { return aperture; }};
}

Report verify_cone_invariance(const maps::Map& map, const ConeField& cone, const Sampling& s) {
  const int d = map.dim();
  auto margin = [&](const Vec& x) -> std::optional<double> {
    auto ev = map.evaluate(x);
    if (!ev) return std::nullopt;
    const Vec fx = point_for(map, ev->image);
    if (!map.is_torus() && !map.domain().contains(fx)) return std::nullopt;
    const Mat E = cone.base(x);
    const int k = static_cast<int>(E.cols());
    if (k < 1 || k > d) throw InputError("cone dimension out of range");
    if (k == d) return kInf;
    const double a = cone.aperture(x), a2 = cone.aperture(fx);
    if (!(a > 0.0) || !(a2 > 0.0)) throw InputError("cone aperture must be positive");
    const Mat N = complement(E);
    const Mat E2 = cone.base(fx);
    const Mat N2 = complement(E2);
    const Mat J = ev->jacobian;
    auto ratio = [&](const Vec& v) {
      const Vec im = J * v;
      const double e = (E2.transpose() * im).norm(), w = (N2.transpose() * im).norm();
      return e > 0.0 ? w / e : kInf;
    };
    double worst = 0.0;
    if (d == 2) {
      for (double sg : {1.0, -1.0}) worst = std::max(worst, ratio(E.col(0) + sg * a * N.col(0)));
    } else {
      // One free circle: the normal direction (k = 1) or the axis direction (k = 2).
      auto vec = [&](double t) -> Vec {
        if (k == 1) return E.col(0) + a * (std::cos(t) * N.col(0) + std::sin(t) * N.col(1));
        return std::cos(t) * E.col(0) + std::sin(t) * E.col(1) + a * N.col(0);
      };
      const int m = 72;
      const double step = 2.0 * std::numbers::pi / m;
      int best = 0;
      double bv = -1.0;
      for (int i = 0; i < m; ++i) {
        const double r = ratio(vec(i * step));
        if (r > bv) bv = r, best = i;
      }
      double lo = (best - 1) * step, hi = (best + 1) * step;
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = hi - g * (hi - lo), e = lo + g * (hi - lo);
      double fc = ratio(vec(c)), fe = ratio(vec(e));
      for (int it = 0; it < 60; ++it) {
        if (fc > fe) {
          hi = e, e = c, fe = fc;
          c = hi - g * (hi - lo);
          fc = ratio(vec(c));
        } else {
          lo = c, c = e, fc = fe;
          e = lo + g * (hi - lo);
          fe = ratio(vec(e));
        }
      }
      worst = std::max({bv, fc, fe});
    }
    return std::atan(a2) - std::atan(worst);
  };
  return run_samples(map, s, "cone_invariance", 1, margin);
}

Report verify_domination(const maps::Map& map, const Bundle& E, const Bundle& F, int ell, const Sampling& s) {
  if (ell < 1) throw InputError("domination needs ell >= 1");
  auto margin = [&](const Vec& x) -> std::optional<double> {
    const Mat e = E(x), f = F(x);
    if (e.cols() + f.cols() > map.dim() || e.cols() == 0 || f.cols() == 0)
      throw InputError("domination bundles must have complementary positive dimensions");
    auto P = orbit_jacobian(map, x, ell);
    if (!P) return std::nullopt;
    const auto sf = singular_values(*P * f), se = singular_values(*P * e);
    return 0.5 * sf.minCoeff() - se.maxCoeff();
  };
  return run_samples(map, s, "domination", ell, margin);
}

std::string to_string(Uniformity u) {
  switch (u) {
    case Uniformity::contract: return "contract";
    case Uniformity::expand: return "expand";
    case Uniformity::vol_contract: return "vol_contract";
    case Uniformity::vol_expand: return "vol_expand";
  }
  return "?";
}

Report verify_uniformity(const maps::Map& map, const Bundle& E, int N, Uniformity mode, const Sampling& s) {
  if (N < 1) throw InputError("uniformity needs N >= 1");
  auto margin = [&](const Vec& x) -> std::optional<double> {
    auto P = orbit_jacobian(map, x, N);
    if (!P) return std::nullopt;
    const auto sv = singular_values(*P * E(x));
    switch (mode) {
      case Uniformity::contract: return 0.5 - sv.maxCoeff();
      case Uniformity::expand: return sv.minCoeff() - 2.0;
      case Uniformity::vol_contract: return 0.5 - sv.prod();
      case Uniformity::vol_expand: return sv.prod() - 2.0;
    }
    return std::nullopt;
  };
  return run_samples(map, s, to_string(mode), N, margin);
}

ExponentEstimate finite_time_exponents(const maps::Map& map, const Vec& x, int n, int warmup) {
  if (n < 1) throw InputError("finite_time_exponents needs n >= 1");
  if (warmup < 0) throw InputError("finite_time_exponents needs warmup >= 0");
  const int d = map.dim();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(d, d);
  std::vector<double> sums(d, 0.0);
  double logdet = 0.0;
  Vec y = x;
  ExponentEstimate est;
  est.warmup = warmup;
  for (int i = 0; i < warmup + n; ++i) {
    auto ev = map.evaluate(y);
    if (!ev) {
      est.truncated = true;
      break;
    }
    const double det = std::abs(ev->jacobian.determinant());
    if (!(det >= 1e-300)) throw NumericError("degenerate Jacobian along the orbit");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(ev->jacobian) * Q);
    Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    // Keep R's diagonal positive so Q is a continuous frame.
    for (int j = 0; j < d; ++j)
      if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    y = point_for(map, ev->image);
    if (i < warmup) continue;
    logdet += std::log(det);
    for (int j = 0; j < d; ++j) sums[j] += std::log(std::abs(R(j, j)));
    ++est.n;
  }
  if (est.n == 0) throw InputError("orbit escapes before the first averaged step");
  for (double v : sums) est.exponents.push_back(v / est.n);
  std::sort(est.exponents.begin(), est.exponents.end());
  est.orthogonality_residual = (Q.transpose() * Q - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  est.mean_log_det = logdet / est.n;
  return est;
}

std::string to_string(PHLabel l) {
  switch (l) {
    case PHLabel::hyperbolic: return "hyperbolic";
    case PHLabel::strong_partially_hyperbolic: return "strong_partially_hyperbolic";
    case PHLabel::volume_hyperbolic: return "volume_hyperbolic";
    case PHLabel::partially_hyperbolic: return "partially_hyperbolic";
    case PHLabel::volume_partially_hyperbolic: return "volume_partially_hyperbolic";
    case PHLabel::none: return "none";
  }
  return "?";
}

PHLabel ph_classify(const PHReports& r) {
  const int k = static_cast<int>(r.bundle_dims.size());
  if (k == 0) throw InputError("ph_classify needs at least one bundle");
  int total = 0;
  for (int dd : r.bundle_dims) {
    if (dd < 1) throw InputError("bundle dimensions must be positive");
    total += dd;
  }
  if (total != r.dim) throw InputError("bundles overlap or do not span the tangent space");
  if (static_cast<int>(r.dominations.size()) != k - 1)
    throw InputError("expected one domination report per consecutive bundle pair");
  for (const auto& u : r.uniformity)
    if (u.first < 0 || u.last >= k || u.first > u.last) throw InputError("uniformity claim has a bad bundle range");

  for (const auto& dom : r.dominations)
    if (!dom.pass) return PHLabel::none;
  auto holds = [&](int first, int last, Uniformity mode) {
    for (const auto& u : r.uniformity)
      if (u.first == first && u.last == last && u.mode == mode && u.report.pass) return true;
    return false;
  };
  // Uniform contraction implies volume contraction, likewise for expansion.
  auto contracted = [&](int a, int b) { return holds(a, b, Uniformity::contract); };
  auto expanded = [&](int a, int b) { return holds(a, b, Uniformity::expand); };
  auto vol_c = [&](int a, int b) { return contracted(a, b) || holds(a, b, Uniformity::vol_contract); };
  auto vol_e = [&](int a, int b) { return expanded(a, b) || holds(a, b, Uniformity::vol_expand); };

  bool hyp = k == 1 && (contracted(0, 0) || expanded(0, 0));
  for (int j = 1; j < k && !hyp; ++j) hyp = contracted(0, j - 1) && expanded(j, k - 1);
  if (hyp) return PHLabel::hyperbolic;
  const bool ph = contracted(0, 0) || expanded(k - 1, k - 1);
  const bool vph = vol_c(0, 0) && vol_e(k - 1, k - 1);
  if (contracted(0, 0) && expanded(k - 1, k - 1)) return PHLabel::strong_partially_hyperbolic;
  if (ph && vph) return PHLabel::volume_hyperbolic;
  if (ph) return PHLabel::partially_hyperbolic;
  if (vph) return PHLabel::volume_partially_hyperbolic;
  return PHLabel::none;
}

}  // namespace phdyn::cones
