#include "fixtures.hpp"
#include "phdyn/rotation.hpp"

#include <doctest.h>

using namespace phdyn;
using namespace phdyn::rotation;

namespace {

std::vector<Vec> grid_starts(int k, int d) {
  std::vector<Vec> s;
  for (int i = 0; i < k; ++i) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x(j) = (i + 0.5) / k * (j + 1) - std::floor((i + 0.5) / k * (j + 1));
    s.push_back(x);
  }
  return s;
}

}  // namespace

TEST_CASE("translation rotation vector is the shift") {
  const maps::TranslationMap m(fx::vec({0.25, 0.375}));
  const auto r = rotation_vector(m, grid_starts(4, 2), 1000);
  CHECK(r.pooled(0) == 0.25);
  CHECK(r.pooled(1) == 0.375);
  CHECK(r.spread == 0.0);
  const auto shifted = rotation_vector(m, grid_starts(2, 2), 1000, fx::vec({1, -2}));
  CHECK(shifted.pooled(0) == 1.25);
  CHECK(shifted.pooled(1) == -1.625);
  CHECK_THROWS_AS(rotation_vector(m, grid_starts(2, 2), 10, fx::vec({0.5, 0})), InputError);
}

TEST_CASE("pseudo-rotation rotation vector") {
  const auto m = fx::pseudo_rotation();
  const auto r = rotation_vector(*m, grid_starts(8, 2), 20000);
  // Semiconjugate to the rotation: |error| ≤ 1/n per coordinate.
  CHECK(std::abs(r.pooled(0) - (std::sqrt(2.0) - 1)) < 1e-4);
  CHECK(std::abs(r.pooled(1) - (std::sqrt(3.0) - 1)) < 1e-4);
  CHECK(r.spread < 2e-4);
  CHECK(r.displacement_bound <= m->c0_bound() + 1e-12);
}

TEST_CASE("Dehn twist uses the first coordinate") {
  const maps::LinearMap m(linear::IntegerMatrix({{1, 0}, {1, 1}}));
  const auto r = rotation_vector(m, grid_starts(3, 2), 100, fx::vec({1, 0}));
  CHECK(r.first_coordinate_only);
  CHECK(r.pooled(0) == 1.0);
  CHECK_THROWS_AS(rotation_vector(*fx::cat(), grid_starts(2, 2), 10), InputError);
  const maps::LinearMap other(linear::IntegerMatrix({{1, 1}, {0, 1}}));
  CHECK_THROWS_AS(rotation_vector(other, grid_starts(2, 2), 10), InputError);
}

TEST_CASE("nonresonance") {
  const auto ok = nonresonance_check(fx::vec({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1}), 50, 1e-9);
  CHECK(ok.pass);
  REQUIRE(ok.relation.size() == 3);
  const double res = ok.relation[0] * (std::sqrt(2.0) - 1) + ok.relation[1] * (std::sqrt(3.0) - 1) + ok.relation[2];
  CHECK(std::abs(std::abs(res) - ok.residual) < 1e-12);
  CHECK(ok.residual > 1e-9);

  const auto bad = nonresonance_check(fx::vec({1.0 / 3, std::sqrt(2.0)}), 10, 1e-9);
  CHECK_FALSE(bad.pass);
  CHECK(bad.relation == std::vector<long long>{3, 0, -1});

  // Two relations of max-norm 2: the smaller L1 norm wins.
  const auto two = nonresonance_check(fx::vec({0.5, 0.25}), 5, 1e-12);
  CHECK_FALSE(two.pass);
  long long mx = 0, l1 = 0;
  for (long long c : two.relation) {
    mx = std::max(mx, std::abs(c));
    l1 += std::abs(c);
  }
  CHECK(mx == 2);
  CHECK(l1 == 3);
  CHECK(std::abs(0.5 * two.relation[0] + 0.25 * two.relation[1] + two.relation[2]) < 1e-12);
}

TEST_CASE("transitivity of a minimal translation") {
  const maps::TranslationMap m(fx::vec({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1}));
  const auto t = transitivity_probe(m, 32, 1.0 / 32);
  CHECK(t.single_class);
  CHECK(t.n_classes == 1);
  CHECK(t.recurrent_fraction == 1.0);
  CHECK(t.n_boxes == 1024);
}

TEST_CASE("transitivity fails for a gradient map") {
  const maps::CircleProductMap m({{0.0, 0.1, 1}, {0.0, 0.1, 1}});
  const auto t = transitivity_probe(m, 16, 0.0);
  CHECK_FALSE(t.single_class);
  CHECK(t.n_recurrent_classes > 1);
}

TEST_CASE("rotation vector examples") {
  const maps::TranslationMap t(fx::vec({0.3, 0.55}));
  const auto r = rotation_vector(t, grid_starts(5, 2), 777);
  CHECK(std::abs(r.pooled(0) - 0.3) < 1e-12);
  CHECK(std::abs(r.pooled(1) - 0.55) < 1e-12);
  CHECK(r.spread < 1e-12);

  const auto m = fx::pseudo_rotation();
  const int n = 100000;
  const auto p = rotation_vector(*m, grid_starts(20, 2), n);
  CHECK(std::abs(p.pooled(0) - (std::sqrt(2.0) - 1)) <= 3.0 / n);
  CHECK(std::abs(p.pooled(1) - (std::sqrt(3.0) - 1)) <= 3.0 / n);
  const auto q = rotation_vector(*m, grid_starts(20, 2), n, fx::vec({1, 0}));
  CHECK(q.pooled(0) - p.pooled(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(q.pooled(1) - p.pooled(1)) < 1e-12);
}

TEST_CASE("nonresonance examples") {
  const auto half = nonresonance_check(fx::vec({0.5, 1.0 / 3}), 3, 1e-12);
  CHECK_FALSE(half.pass);
  CHECK(half.relation == std::vector<long long>{2, 0, -1});
  const double a = std::sqrt(2.0) - 1;
  const auto same = nonresonance_check(fx::vec({a, a}), 1, 1e-12);
  CHECK_FALSE(same.pass);
  CHECK(same.relation == std::vector<long long>{1, -1, 0});
}

TEST_CASE("transitivity at 64 boxes per side") {
  const maps::TranslationMap t(fx::vec({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1}));
  CHECK(transitivity_probe(t, 64, 1.0 / 64).single_class);
  CHECK(transitivity_probe(*fx::pseudo_rotation(), 64, 1.0 / 32).single_class);
}
