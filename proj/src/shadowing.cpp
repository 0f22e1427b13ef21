#include "phdyn/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace phdyn::shadowing {

using linear::Label;

namespace {

double opnorm(const Eigen::MatrixXd& m) { return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0); }

Vec torus_step(const maps::TorusLiftMap& f, const Vec& x) { return maps::reduce_mod1(f.lift(x)); }

}  // namespace

double tail_at_depth(const Semiconjugacy& s, int N) {
  const double c0 = s.map->c0_bound();
  if (c0 == 0.0) return 0.0;
  return s.kappa_u * c0 * std::pow(s.mu_u, N + 1) / (1.0 - s.mu_u) +
         s.kappa_s * c0 * std::pow(s.mu_s, N) / (1.0 - s.mu_s);
}

Semiconjugacy build_semiconjugacy(maps::TorusMapPtr map, double tol) {
  if (!map) throw InputError("semiconjugacy needs a torus map");
  if (!(tol > 0.0)) throw InputError("semiconjugacy tolerance must be positive");
  const auto& A = map->linear_part();
  if (A.dim() < 2) throw InputError("semiconjugacy needs d >= 2");
  auto spec = linear::spectral_classify(A);
  if (spec.classification != linear::SpectralClass::anosov_real &&
      spec.classification != linear::SpectralClass::anosov_complex_pair)
    throw InputError("semiconjugacy needs an Anosov linear part, got " + linear::to_string(spec.classification));
  Semiconjugacy s;
  s.map = map;
  s.requested_tol = tol;
  s.splitting = linear::invariant_splitting(spec, A);
  const auto& st = s.splitting.at(Label::stable);
  const auto& un = s.splitting.at(Label::unstable);
  s.mu_s = st.max_modulus;
  s.mu_u = 1.0 / un.min_modulus;
  s.mu = std::max(s.mu_s, s.mu_u);
  if (!(s.mu < 1.0)) throw ConstructionError("adapted contraction factor mu >= 1");
  s.kappa_s = opnorm(st.columns) * opnorm(st.dual_rows);
  s.kappa_u = opnorm(un.columns) * opnorm(un.dual_rows);
  Eigen::MatrixXd Ar = map->linear_real();
  s.Ds = Eigen::MatrixXd(st.dual_rows) * Ar * Eigen::MatrixXd(st.columns);
  s.Du_inv = (Eigen::MatrixXd(un.dual_rows) * Ar * Eigen::MatrixXd(un.columns)).inverse();

  const double c0 = map->c0_bound();
  s.shadow_bound = c0 * (s.kappa_s / (1.0 - s.mu_s) + s.kappa_u * s.mu_u / (1.0 - s.mu_u));
  s.depth = 0;
  while (tail_at_depth(s, s.depth) > tol) {
    if (++s.depth > 100000) throw ConstructionError("semiconjugacy depth exceeds 100000");
  }
  s.tail_bound = tail_at_depth(s, s.depth);
  return s;
}

Vec eval_H(const Semiconjugacy& s, const Vec& x) {
  if (s.depth == 0) return x;
  const auto& f = *s.map;
  const auto& st = s.splitting.at(Label::stable);
  const auto& un = s.splitting.at(Label::unstable);
  const int N = s.depth;

  // Unstable part: Σ_{n<N} D_u^{−(n+1)} W_u φ(Fⁿx), accumulated in eigen-coordinates.
  Eigen::VectorXd zu = Eigen::VectorXd::Zero(un.columns.cols());
  {
    Vec xn = maps::reduce_mod1(x);
    Eigen::MatrixXd pw = s.Du_inv;
    for (int n = 0; n < N; ++n) {
      Eigen::VectorXd ph = f.displacement(xn);
      zu += pw * (Eigen::MatrixXd(un.dual_rows) * ph);
      pw = s.Du_inv * pw;
      if (n + 1 < N) xn = torus_step(f, xn);
    }
  }
  // Stable part: −Σ_{n=1}^{N} D_s^{n−1} W_s φ(F^{−n}x).
  Eigen::VectorXd zs = Eigen::VectorXd::Zero(st.columns.cols());
  {
    Vec xn = maps::reduce_mod1(x);
    Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(st.columns.cols(), st.columns.cols());
    for (int n = 1; n <= N; ++n) {
      xn = maps::reduce_mod1(f.inverse(xn));
      Eigen::VectorXd ph = f.displacement(xn);
      zs -= pw * (Eigen::MatrixXd(st.dual_rows) * ph);
      pw = s.Ds * pw;
    }
  }
  Eigen::VectorXd h = Eigen::MatrixXd(un.columns) * zu + Eigen::MatrixXd(st.columns) * zs;
  return x + Vec(h);
}

EquivarianceReport verify_equivariance(const Semiconjugacy& s, int n_samples, std::uint64_t seed, int workers,
                                       bool keep_rows) {
  if (n_samples < 1) throw InputError("verify_equivariance needs at least one sample");
  EquivarianceReport rep;
  rep.n_samples = n_samples;
  rep.seed = seed;
  const Mat& A = s.map->linear_real();
  rep.bound = (1.0 + Eigen::JacobiSVD<Mat>(A).singularValues()(0)) * s.tail_bound;
  const int d = s.map->dim();
  std::vector<EquivarianceRow> rows(n_samples);
  auto work = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      Vec x(d);
      for (int k = 0; k < d; ++k) x(k) = rng.uniform();
      Vec hx = eval_H(s, x);
      Vec hfx = eval_H(s, s.map->lift(x));
      rows[i].x = x;
      rows[i].hx = hx;
      rows[i].residual = (hfx - A * hx).norm();
    }
  };
  const int w = std::max(1, std::min(clamp_workers(workers), n_samples));
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < w; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(n_samples) * t / w);
    const int hi = static_cast<int>(static_cast<long long>(n_samples) * (t + 1) / w);
    jobs.push_back(std::async(std::launch::async, work, lo, hi));
  }
  for (auto& j : jobs) j.get();
  for (const auto& r : rows) {
    rep.max_residual = std::max(rep.max_residual, r.residual);
    rep.max_shift = std::max(rep.max_shift, (r.hx - r.x).norm());
  }
  if (keep_rows) rep.rows = std::move(rows);
  return rep;
}

FiberReport fiber_probe(const Semiconjugacy& s, const Vec& y, int n_samples, double radius, std::uint64_t seed) {
  if (n_samples < 2 || !(radius > 0.0)) throw InputError("fiber_probe needs n_samples >= 2 and radius > 0");
  const int d = s.map->dim();
  FiberReport rep;
  rep.probes = n_samples;
  const double step = radius / std::pow(static_cast<double>(n_samples), 1.0 / d);
  rep.hit_tolerance = s.tail_bound + step;
  const auto& st = s.splitting.at(Label::stable);
  const Eigen::MatrixXd Es = st.basis;
  const Eigen::VectorXd eu = s.splitting.at(Label::unstable).basis.col(0);

  Rng rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    Vec x(d);
    if (i % 2 == 0) {
      // Uniform in the ball by rejection from the cube.
      do {
        for (int k = 0; k < d; ++k) x(k) = rng.uniform(-1.0, 1.0);
      } while (x.norm() > 1.0);
      x = y + radius * x;
    } else {
      Eigen::VectorXd c(Es.cols());
      do {
        for (int k = 0; k < c.size(); ++k) c(k) = rng.uniform(-1.0, 1.0);
      } while (c.norm() > 1.0);
      x = y + Vec(radius * (Es * c));
    }
    for (int it = 0; it < 40; ++it) {
      Vec r = y - eval_H(s, x);
      x += r;
      if (r.norm() <= 1e-14) break;
    }
    if ((eval_H(s, x) - y).norm() <= rep.hit_tolerance && (x - y).norm() <= 2.0 * radius + 2.0 * s.shadow_bound)
      rep.hit_points.push_back(x);
  }
  rep.hits = static_cast<int>(rep.hit_points.size());
  if (rep.hits == 0) throw NumericError("fiber_probe found no preimage hit; enlarge the search radius");
  for (std::size_t i = 0; i < rep.hit_points.size(); ++i)
    for (std::size_t j = i + 1; j < rep.hit_points.size(); ++j)
      rep.diameter = std::max(rep.diameter, (rep.hit_points[i] - rep.hit_points[j]).norm());

  // Unstable arcs through (up to 16) hits: images must be strictly monotone along
  // e_u and pairwise separated by more than 2·tail.
  const int arcs = std::min(rep.hits, 16);
  const int m = 33;
  for (int a = 0; a < arcs && rep.unstable_injective; ++a) {
    std::vector<Vec> img;
    for (int k = 0; k < m; ++k) {
      const double t = radius * (-1.0 + 2.0 * k / (m - 1));
      img.push_back(eval_H(s, rep.hit_points[a] + Vec(t * eu)));
    }
    for (int k = 0; k + 1 < m; ++k) {
      const double dp = (img[k + 1] - img[k]).dot(Vec(eu));
      if (!(dp > 0.0)) rep.unstable_injective = false;
    }
    for (int k = 0; k < m && rep.unstable_injective; ++k)
      for (int l = k + 1; l < m; ++l)
        if ((img[k] - img[l]).norm() <= 2.0 * s.tail_bound) {
          rep.unstable_injective = false;
          break;
        }
  }
  return rep;
}

}  // namespace phdyn::shadowing
