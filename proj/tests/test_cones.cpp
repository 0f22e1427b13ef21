#include "fixtures.hpp"
#include "phdyn/cones.hpp"

#include <doctest.h>

#include <numeric>

using namespace phdyn;
using namespace phdyn::cones;

namespace {

const double kLu = (3 + std::sqrt(5.0)) / 2;
const double kLs = (3 - std::sqrt(5.0)) / 2;

Mat cat_line(double lambda) {
  Mat b(2, 1);
  b << 1, lambda - 2;
  return b.normalized();
}

Report passing(double margin) {
  Report r;
  r.pass = margin > 0;
  r.worst_margin = margin;
  return r;
}

PHReports three_bundles(bool dom, bool c1, bool e3, bool vc1, bool ve3, bool c12 = false, bool e23 = false) {
  PHReports r;
  r.dim = 3;
  r.bundle_dims = {1, 1, 1};
  r.dominations = {passing(dom ? 1 : -1), passing(dom ? 1 : -1)};
  auto add = [&](int a, int b, Uniformity u, bool ok) { r.uniformity.push_back({a, b, u, passing(ok ? 1 : -1)}); };
  add(0, 0, Uniformity::contract, c1);
  add(2, 2, Uniformity::expand, e3);
  add(0, 0, Uniformity::vol_contract, vc1);
  add(2, 2, Uniformity::vol_expand, ve3);
  add(0, 1, Uniformity::contract, c12);
  add(1, 2, Uniformity::expand, e23);
  return r;
}

}  // namespace

TEST_CASE("cat domination margin") {
  const auto m = fx::cat();
  Sampling s;
  s.n_samples = 200;
  s.seed = 3;
  const auto r = verify_domination(*m, constant_bundle(cat_line(kLs)), constant_bundle(cat_line(kLu)), 1, s);
  CHECK(r.pass);
  CHECK(r.samples == 200);
  CHECK(std::abs(r.worst_margin - (0.5 * kLu - kLs)) < 1e-12);
  // Reversed roles must fail.
  const auto bad = verify_domination(*m, constant_bundle(cat_line(kLu)), constant_bundle(cat_line(kLs)), 1, s);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("cat cone margin") {
  const double alpha = 0.3;
  Sampling s;
  s.n_samples = 100;
  const auto r = verify_cone_invariance(*fx::cat(), constant_cone(cat_line(kLu), alpha), s);
  CHECK(r.pass);
  CHECK(std::abs(r.worst_margin - (std::atan(alpha) - std::atan(alpha * kLs / kLu))) < 1e-12);
}

TEST_CASE("cat exponents") {
  const auto e = finite_time_exponents(*fx::cat(), fx::vec({0.2, 0.7}), 100);
  REQUIRE(e.exponents.size() == 2);
  CHECK(std::abs(e.exponents[0] + std::log(kLu)) < 1e-9);
  CHECK(std::abs(e.exponents[1] - std::log(kLu)) < 1e-9);
  CHECK(e.n == 100);
  CHECK(e.orthogonality_residual < 1e-12);
}

TEST_CASE("exponent sum matches mean log det") {
  Rng rng(4);
  const maps::HorseshoeMap hs(maps::HorseshoeSpec{});
  for (int i = 0; i < 10; ++i) {
    const Vec x = fx::vec({rng.uniform(), rng.uniform(), rng.uniform()});
    const auto e = finite_time_exponents(*fx::da(), x, 500);
    CHECK(std::abs(std::accumulate(e.exponents.begin(), e.exponents.end(), 0.0) - e.mean_log_det) < 1e-6);
    CHECK(std::is_sorted(e.exponents.begin(), e.exponents.end()));
  }
  // The fixed point p1 of the horseshoe: base exponents ±log 5.
  // Short orbit: the representation error of 5/24 grows by 5 per step.
  const auto e = finite_time_exponents(hs, fx::vec({5.0 / 24, 5.0 / 24, 0.0}), 10, 0);
  CHECK_FALSE(e.truncated);
  CHECK(std::abs(e.exponents.front() + std::log(5.0)) < 1e-9);
  CHECK(std::abs(e.exponents.back() - std::log(5.0)) < 1e-9);
}

TEST_CASE("escaping orbits are truncated") {
  const maps::HorseshoeMap hs(maps::HorseshoeSpec{});
  const auto e = finite_time_exponents(hs, fx::vec({0.5, 0.5, 0.0}), 50, 0);
  CHECK(e.truncated);
  CHECK(e.n < 50);
}

TEST_CASE("DA unstable cone is invariant") {
  const auto m = fx::da();
  Mat u(3, 1);
  u.col(0) = m->unstable_direction();
  Sampling s;
  s.n_samples = 2000;
  s.seed = 5;
  s.workers = 2;
  const auto r = verify_cone_invariance(*m, constant_cone(u, 0.3), s);
  CHECK(r.pass);
  CHECK(r.samples == 2000);
  s.workers = 1;
  CHECK(verify_cone_invariance(*m, constant_cone(u, 0.3), s).worst_margin == r.worst_margin);
}

TEST_CASE("cat uniformity") {
  const auto m = fx::cat();
  Sampling s;
  s.n_samples = 50;
  const auto E = constant_bundle(cat_line(kLs)), F = constant_bundle(cat_line(kLu));
  auto margin = [&](const Bundle& b, Uniformity u) { return verify_uniformity(*m, b, 2, u, s).worst_margin; };
  CHECK(margin(E, Uniformity::contract) == doctest::Approx(0.5 - kLs * kLs).epsilon(1e-12));
  CHECK(margin(F, Uniformity::expand) == doctest::Approx(kLu * kLu - 2).epsilon(1e-12));
  CHECK(margin(F, Uniformity::contract) < 0);
  CHECK(margin(E, Uniformity::vol_contract) > 0);
}

TEST_CASE("taxonomy") {
  CHECK(ph_classify(three_bundles(true, true, true, true, true)) == PHLabel::strong_partially_hyperbolic);
  CHECK(ph_classify(three_bundles(true, true, false, true, false)) == PHLabel::partially_hyperbolic);
  CHECK(ph_classify(three_bundles(true, false, false, true, true)) == PHLabel::volume_partially_hyperbolic);
  CHECK(ph_classify(three_bundles(true, false, false, false, false)) == PHLabel::none);
  CHECK(ph_classify(three_bundles(false, true, true, true, true)) == PHLabel::none);
  CHECK(ph_classify(three_bundles(true, true, true, true, true, false, true)) == PHLabel::hyperbolic);
  CHECK(ph_classify(three_bundles(true, true, false, true, true)) == PHLabel::volume_hyperbolic);

  PHReports bad = three_bundles(true, true, true, true, true);
  bad.bundle_dims = {1, 2};
  CHECK_THROWS_AS(ph_classify(bad), InputError);
}

TEST_CASE("cat cones at 10^4 samples") {
  const auto m = fx::cat();
  Sampling a, b;
  a.n_samples = b.n_samples = 10000;
  a.seed = 1;
  b.seed = 2;
  const auto ra = verify_cone_invariance(*m, constant_cone(cat_line(kLu), 0.2), a);
  const auto rb = verify_cone_invariance(*m, constant_cone(cat_line(kLu), 0.2), b);
  CHECK(ra.pass);
  CHECK(std::abs(ra.worst_margin - rb.worst_margin) < 1e-3);
  CHECK_FALSE(verify_cone_invariance(*m, constant_cone(cat_line(kLs), 0.2), a).pass);
}

TEST_CASE("DA stable plane is dominated at three iterates") {
  const auto m = fx::da();
  Mat u(3, 1);
  u.col(0) = m->unstable_direction();
  Sampling s;
  s.n_samples = 1000;
  s.seed = 1;
  const auto r = verify_domination(*m, constant_bundle(m->stable_plane()), constant_bundle(u), 3, s);
  CHECK(r.pass);
  CHECK(r.worst_margin > 0.0);
}

TEST_CASE("one-step uniformity") {
  Sampling s;
  s.n_samples = 100;
  const auto E = constant_bundle(cat_line(kLs));
  CHECK(verify_uniformity(*fx::cat(), E, 1, Uniformity::contract, s).pass);
  CHECK_FALSE(verify_uniformity(*fx::cat(), E, 1, Uniformity::expand, s).pass);

  // det B on the stable plane is 0.8·1.3 > 1 at q.
  const auto m = fx::da();
  Sampling q;
  q.points = {m->fixed_point()};
  const auto r = verify_uniformity(*m, constant_bundle(m->stable_plane()), 1, Uniformity::vol_contract, q);
  CHECK_FALSE(r.pass);
  CHECK(r.worst_margin == doctest::Approx(0.5 - 0.8 * 1.3).epsilon(1e-9));
}

TEST_CASE("identity has zero exponents") {
  const maps::LinearMap id(linear::IntegerMatrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  const auto e = finite_time_exponents(id, fx::vec({0.1, 0.2, 0.3}), 50);
  for (double v : e.exponents) CHECK(v == 0.0);
}

TEST_CASE("classification from measured reports") {
  SUBCASE("cat map") {
    const auto m = fx::cat();
    Sampling s;
    s.n_samples = 200;
    const auto E = constant_bundle(cat_line(kLs)), F = constant_bundle(cat_line(kLu));
    PHReports r;
    r.dim = 2;
    r.bundle_dims = {1, 1};
    r.dominations = {verify_domination(*m, E, F, 1, s)};
    r.uniformity = {{0, 0, Uniformity::contract, verify_uniformity(*m, E, 2, Uniformity::contract, s)},
                    {1, 1, Uniformity::expand, verify_uniformity(*m, F, 2, Uniformity::expand, s)}};
    CHECK(ph_classify(r) == PHLabel::hyperbolic);
  }
  SUBCASE("DA map") {
    const auto m = fx::da();
    Mat u(3, 1);
    u.col(0) = m->unstable_direction();
    const auto E = constant_bundle(m->stable_plane()), F = constant_bundle(u);
    Sampling s;
    s.n_samples = 1000;
    s.seed = 1;
    PHReports r;
    r.dim = 3;
    r.bundle_dims = {2, 1};
    r.dominations = {verify_domination(*m, E, F, 3, s)};
    r.uniformity = {{0, 0, Uniformity::contract, verify_uniformity(*m, E, 2, Uniformity::contract, s)},
                    {1, 1, Uniformity::expand, verify_uniformity(*m, F, 2, Uniformity::expand, s)}};
    CHECK(r.dominations[0].pass);
    CHECK_FALSE(r.uniformity[0].report.pass);
    CHECK(ph_classify(r) == PHLabel::partially_hyperbolic);
    // The centre-stable plane also contracts volume after two steps, which
    // refines the label one level up the chain.
    r.uniformity.push_back({0, 0, Uniformity::vol_contract, verify_uniformity(*m, E, 2, Uniformity::vol_contract, s)});
    CHECK(ph_classify(r) == PHLabel::volume_hyperbolic);
  }
}
