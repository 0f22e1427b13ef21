#include "phdyn/cocycles.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <algorithm>

#include <cmath>
#include <numbers>

using namespace phdyn;
using namespace phdyn::cocycles;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix diag(double a, double b) { return m2(a, 0, 0, b); }

Matrix random_sl2(Rng& rng) {
  Matrix m = m2(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
  const double det = m.determinant();
  if (std::abs(det) < 0.1) return random_sl2(rng);
  m.row(0) /= det;
  return m;
}

}  // namespace

TEST_CASE("exponents of a diagonal cocycle") {
  const auto e = exponents(PeriodicCocycle({diag(2, 0.5)}));
  REQUIRE(e.sigma.size() == 2);
  CHECK(e.sigma[0] == -std::log(2.0));
  CHECK(e.sigma[1] == std::log(2.0));

  // Period 3 with product diag(8, 1/8): σ = ±log 2.
  const auto p = exponents(PeriodicCocycle({diag(2, 0.5), diag(2, 0.5), diag(2, 0.5)}));
  CHECK(std::abs(p.sigma[1] - std::log(2.0)) < 1e-15);
}

TEST_CASE("exponents are invariant under cyclic shift") {
  Rng rng(1);
  std::vector<Matrix> ms;
  for (int i = 0; i < 7; ++i) ms.push_back(random_sl2(rng));
  const auto a = exponents(PeriodicCocycle(ms)).sigma;
  std::rotate(ms.begin(), ms.begin() + 3, ms.end());
  const auto b = exponents(PeriodicCocycle(ms)).sigma;
  for (int j = 0; j < 2; ++j) CHECK(std::abs(a[j] - b[j]) < 1e-10);
}

TEST_CASE("long products do not overflow") {
  std::vector<Matrix> ms(2000, diag(10, 0.1));
  const auto e = exponents(PeriodicCocycle(ms));
  CHECK(std::abs(e.sigma[1] - std::log(10.0)) < 1e-12);
  CHECK(std::abs(e.sigma[0] + std::log(10.0)) < 1e-12);
}

TEST_CASE("complex pair shares the exponent") {
  const auto e = exponents(PeriodicCocycle({0.5 * rotation(1.0)}));
  CHECK(std::abs(e.sigma[0] - std::log(0.5)) < 1e-15);
  CHECK(std::abs(e.sigma[1] - std::log(0.5)) < 1e-15);
}

TEST_CASE("distance and domination") {
  const PeriodicCocycle a({diag(4, 0.25)});
  CHECK(distance(a, a) == 0.0);
  CHECK(std::abs(distance(a, PeriodicCocycle({diag(4.5, 0.25)})) - 0.5) < 1e-15);
  Matrix E(2, 1), F(2, 1);
  E << 0, 1;
  F << 1, 0;
  const auto d = check_domination_cocycle(a, E, F, 1);
  CHECK(d.pass);
  CHECK(std::abs(d.margin - (0.5 * 4 - 0.25)) < 1e-15);
  CHECK_FALSE(check_domination_cocycle(a, F, E, 1).pass);
  Matrix G(2, 1);
  G << 1, 1;
  CHECK_THROWS_AS(check_domination_cocycle(a, G, F, 1), InputError);  // not invariant
}

TEST_CASE("lyapunov diameter") {
  std::vector<PeriodicCocycle> fam;
  for (int n : {1, 2, 4, 8, 16, 32}) {
    // Product diag(2^(1+1/n)·…): gap shrinks to 2·log 2 as n grows.
    std::vector<Matrix> ms(static_cast<std::size_t>(n), diag(2, 0.5));
    ms[0] = diag(4, 0.25);
    fam.emplace_back(ms);
  }
  const auto d = lyapunov_diameter(fam);
  CHECK(d.table.size() == 6);
  CHECK(std::abs(d.delta - 2 * std::log(2.0) * (1 + 1.0 / 32)) < 1e-12);
  CHECK_THROWS_AS(lyapunov_diameter({fam[0], fam[1]}), InputError);
}

TEST_CASE("equalize a diagonal cocycle") {
  const PeriodicCocycle c({diag(2, 1.0 / 3)});
  const auto p = equalize_2d(c, 0.05);
  CHECK(std::abs(std::pow(std::cos(p.theta_star), 2) - 24.0 / 49) < 1e-10);
  REQUIRE(p.endpoint_moduli.size() == 2);
  for (double m : p.endpoint_moduli) CHECK(std::abs(m - std::sqrt(2.0 / 3)) < 1e-8);
  REQUIRE(!p.steps.empty());
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    CHECK(std::abs(p.steps[i].product().determinant() - 2.0 / 3) < 1e-15);
    CHECK(distance(c, p.steps[i]) <= p.diameter + 1e-15);
    if (i > 0) CHECK(distance(p.steps[i - 1], p.steps[i]) <= 0.05 + 1e-15);
  }
  const auto end = exponents(p.steps.back()).sigma;
  CHECK(std::abs(end[1] - end[0]) < 1e-6);
  CHECK(p.sink_preserved);
}

TEST_CASE("equalize a longer orbit") {
  Rng rng(2);
  std::vector<Matrix> ms;
  for (int i = 0; i < 5; ++i) ms.push_back(0.9 * random_sl2(rng));
  PeriodicCocycle c(ms);
  if (c.det_sign() < 0) {
    ms[0].row(0) *= -1;
    c = PeriodicCocycle(ms);
  }
  const auto p = equalize_2d(c, 0.1);
  const auto end = exponents(p.steps.back()).sigma;
  CHECK(std::abs(end[1] - end[0]) < 1e-6);
  CHECK(std::abs(p.steps.back().log_abs_det() - c.log_abs_det()) < 1e-12);
}

TEST_CASE("equalize rejects bad input") {
  CHECK_THROWS_AS(equalize_2d(PeriodicCocycle({diag(2, -1.0 / 3)}), 0.1), InputError);
  CHECK_THROWS_AS(equalize_2d(PeriodicCocycle({diag(2, 1.0)}), 0.1), InputError);
  CHECK_THROWS_AS(equalize_2d(PeriodicCocycle({diag(2, 0.25)}), 0.0), InputError);
}

TEST_CASE("steer a vector") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Matrix> ms;
    for (int i = 0; i < 30; ++i) ms.push_back(random_sl2(rng));
    const Eigen::Vector2d v(1.0, rng.uniform(-1, 1)), w(rng.uniform(-1, 1), 1.0);
    const auto r = steer_vector(ms, v, w, 0.3);
    REQUIRE(r.angles.size() == ms.size());
    Eigen::Vector2d a = w, b = v;
    for (std::size_t j = 0; j < ms.size(); ++j) {
      CHECK(std::abs(r.angles[j]) <= 0.3);
      a = rotation(r.angles[j]) * ms[j] * a;
      b = ms[j] * b;
      a.normalize();
      b.normalize();
    }
    CHECK(std::abs(line_angle(a, b) - r.residual) < 1e-12);
    if (r.success) CHECK(line_angle(a, b) <= 1e-9);
  }
  // Identity matrices: ε·ℓ must cover the initial angle.
  const std::vector<Matrix> ids(10, diag(1, 1));
  CHECK(steer_vector(ids, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 0.2).success);
  CHECK_FALSE(steer_vector(ids, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 0.1).success);
}

TEST_CASE("line angle") {
  CHECK(line_angle(Eigen::Vector2d(1, 0), Eigen::Vector2d(-3, 0)) == 0.0);
  CHECK(std::abs(line_angle(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)) - std::numbers::pi / 4) < 1e-15);
}

TEST_CASE("exponent examples") {
  const auto r = exponents(PeriodicCocycle({rotation(std::numbers::pi / 2), rotation(std::numbers::pi / 2)})).sigma;
  CHECK(std::abs(r[0]) < 1e-15);
  CHECK(std::abs(r[1]) < 1e-15);

  // Explicit product A₃A₂A₁ and a general eigen solver.
  Rng rng(7);
  std::vector<Matrix> ms;
  for (int i = 0; i < 3; ++i) ms.push_back(m2(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
  const Matrix M = ms[2] * ms[1] * ms[0];
  Eigen::EigenSolver<Matrix> es(M);
  std::vector<double> want = {std::log(std::abs(es.eigenvalues()(0))) / 3, std::log(std::abs(es.eigenvalues()(1))) / 3};
  std::sort(want.begin(), want.end());
  const auto got = exponents(PeriodicCocycle(ms)).sigma;
  for (int k = 0; k < 2; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-10 * std::max(1.0, std::abs(want[k])));
}

TEST_CASE("domination examples") {
  Matrix E(2, 1), F(2, 1);
  E << 0, 1;
  F << 1, 0;
  const PeriodicCocycle half({diag(2, 0.5)});
  const auto d = check_domination_cocycle(half, E, F, 1);
  CHECK(d.pass);
  CHECK(std::abs(d.margin - 0.5) < 1e-15);
  CHECK_FALSE(check_domination_cocycle(half, F, E, 1).pass);

  // Weak diagonal gaps: the minimal ℓ against a brute-force scan of explicit
  // ℓ-fold products from every starting position.
  const std::vector<Matrix> ms = {diag(1.2, 1.0), diag(1.5, 0.9), diag(1.1, 1.05)};
  const PeriodicCocycle c(ms);
  auto brute = [&](int ell) {
    double worst = 1e300;
    for (int i = 0; i < 3; ++i) {
      Matrix P = Matrix::Identity(2, 2);
      for (int j = 0; j < ell; ++j) P = ms[(i + j) % 3] * P;
      worst = std::min(worst, 0.5 * std::abs(P(0, 0)) - std::abs(P(1, 1)));
    }
    return worst > 0;
  };
  int want = 0, got = 0;
  for (int ell = 1; ell <= 20 && !want; ++ell)
    if (brute(ell)) want = ell;
  for (int ell = 1; ell <= 20 && !got; ++ell)
    if (check_domination_cocycle(c, E, F, ell).pass) got = ell;
  REQUIRE(want > 1);
  CHECK(got == want);
}

TEST_CASE("diameter examples") {
  std::vector<PeriodicCocycle> iso, pw;
  for (int n : {1, 2, 3, 5, 8, 13}) {
    iso.emplace_back(std::vector<Matrix>(static_cast<std::size_t>(n), rotation(0.3)));
    pw.emplace_back(std::vector<Matrix>(static_cast<std::size_t>(n), diag(2, 0.5)));
  }
  CHECK(std::abs(lyapunov_diameter(iso).delta) < 1e-12);
  CHECK(std::abs(lyapunov_diameter(pw).delta - 2 * std::log(2.0)) < 1e-12);

  Rng rng(5);
  std::vector<PeriodicCocycle> eq;
  for (int n : {3, 6, 9, 12, 15, 18}) {
    std::vector<Matrix> ms;
    for (int i = 0; i < n; ++i) ms.push_back(0.95 * random_sl2(rng));
    if (PeriodicCocycle(ms).det_sign() < 0) ms[0].row(0) *= -1;
    const auto p = equalize_2d(PeriodicCocycle(ms), 0.2);
    eq.push_back(p.steps.back());
  }
  CHECK(std::abs(lyapunov_diameter(eq).delta) < 1e-6);
}

TEST_CASE("equalize a rotation") {
  const auto p = equalize_2d(PeriodicCocycle({rotation(0.7)}), 0.1);
  CHECK(p.theta_star == 0.0);
  CHECK(p.steps.size() <= 1);
  for (double t : p.thetas) CHECK(t == 0.0);
}

TEST_CASE("equalize a period-10 contracting cocycle") {
  Rng rng(11);
  std::vector<Matrix> ms;
  for (int i = 0; i < 10; ++i) ms.push_back(0.9 * random_sl2(rng));
  if (PeriodicCocycle(ms).det_sign() < 0) ms[0].row(0) *= -1;
  const PeriodicCocycle c(ms);
  const auto p = equalize_2d(c, 0.1);
  const double target = std::sqrt(std::abs(c.product().determinant()));
  REQUIRE(p.endpoint_moduli.size() == 2);
  // Eigen oracle on every recorded step, from an explicit product.
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    Matrix M = Matrix::Identity(2, 2);
    for (int i = 0; i < 10; ++i) M = p.steps[s][i] * M;
    Eigen::EigenSolver<Matrix> es(M);
    const double lo = std::min(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1)));
    CHECK(std::log(lo) / 10 < 0.0);
    CHECK(p.in_sink_class[s]);
    if (s + 1 == p.steps.size()) {
      const double hi = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1)));
      CHECK(std::abs(lo - target) < 1e-8);
      CHECK(std::abs(hi - target) < 1e-8);
    }
  }
  for (double m : p.endpoint_moduli) CHECK(std::abs(m - target) < 1e-8);
}

TEST_CASE("steer examples") {
  const std::vector<Matrix> hyp(40, diag(2, 0.5));
  const Eigen::Vector2d e1(1, 0), diag45(std::sqrt(0.5), std::sqrt(0.5));
  const auto same = steer_vector(hyp, e1, e1, 0.1);
  CHECK(same.success);
  for (double a : same.angles) CHECK(a == 0.0);

  const auto r = steer_vector(hyp, e1, diag45, 0.1);
  REQUIRE(r.success);
  Eigen::Vector2d a = diag45, b = e1;
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    CHECK(std::abs(r.angles[j]) <= 0.1);
    a = (rotation(r.angles[j]) * hyp[j] * a).normalized();
    b = (hyp[j] * b).normalized();
  }
  CHECK(line_angle(a, b) < 1e-9);
}
