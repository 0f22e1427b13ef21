#pragma once

#include "phdyn/maps/map_spec.hpp"

#include <cmath>
#include <memory>

namespace fx {

using namespace phdyn;

inline linear::IntegerMatrix cat_matrix() { return linear::IntegerMatrix({{2, 1}, {1, 1}}); }
inline linear::IntegerMatrix da_matrix() { return linear::IntegerMatrix({{1, 1, 0}, {0, 0, 1}, {1, 0, 0}}); }

inline std::shared_ptr<const maps::LinearMap> cat() { return std::make_shared<maps::LinearMap>(cat_matrix()); }

inline std::shared_ptr<const maps::DAMap> da() {
  static auto m = std::make_shared<maps::DAMap>(da_matrix(), maps::DAParams{});
  return m;
}

inline std::shared_ptr<const maps::PseudoRotationMap> pseudo_rotation() {
  maps::DenjoyParams b, f;
  b.rotation_number = std::sqrt(2.0) - 1.0;
  f.rotation_number = std::sqrt(3.0) - 1.0;
  static auto m = std::make_shared<maps::PseudoRotationMap>(b, f, maps::TwistParams{});
  return m;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vec uniform_point(Rng& rng, const maps::Domain& d) {
  Vec x(d.lower.size());
  for (int k = 0; k < x.size(); ++k) x(k) = rng.uniform(d.lower(k), d.upper(k));
  return x;
}

}  // namespace fx
