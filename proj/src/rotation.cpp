#include "phdyn/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phdyn::rotation {

namespace {

// Neumaier compensated sum.
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

}  // namespace

RotationEstimate rotation_vector(const maps::TorusLiftMap& map, const std::vector<Vec>& starts, int n,
                                 const Vec& lift_shift) {
  const int d = map.dim();
  if (n < 1) throw InputError("rotation_vector needs n >= 1");
  if (starts.empty()) throw InputError("rotation_vector needs at least one start");
  const auto& A = map.linear_part();
  RotationEstimate est;
  est.n = n;
  est.starts = starts;
  est.lift_shift = lift_shift.size() == 0 ? Vec(Vec::Zero(d)) : lift_shift;
  if (est.lift_shift.size() != d) throw InputError("lift shift has the wrong dimension");
  for (int k = 0; k < d; ++k)
    if (est.lift_shift(k) != std::round(est.lift_shift(k))) throw InputError("lift shift must be an integer vector");
  if (!A.is_identity()) {
    bool first_fixed = A(0, 0) == 1;
    for (int j = 1; j < d; ++j) first_fixed = first_fixed && A(0, j) == 0;
    if (!first_fixed) throw InputError("rotation_vector needs a linear part that is the identity or fixes the first coordinate");
    est.first_coordinate_only = true;
  }
  const int m = est.first_coordinate_only ? 1 : d;
  for (const Vec& z : starts) {
    if (z.size() != d) throw InputError("start point has the wrong dimension");
    std::vector<Sum> sums(m);
    Vec x = maps::reduce_mod1(z);
    for (int i = 0; i < n; ++i) {
      const Vec phi = map.displacement(x);
      est.displacement_bound = std::max(est.displacement_bound, phi.norm());
      // The lift step from a reduced point; the orbit itself stays in [0,1)ᵈ.
      const Vec y = map.lift(x);
      for (int k = 0; k < m; ++k) sums[k].add(y(k) - x(k));
      x = maps::reduce_mod1(y);
    }
    Vec r(m);
    for (int k = 0; k < m; ++k) r(k) = sums[k].value() / n + est.lift_shift(k);
    est.per_start.push_back(r);
  }
  est.pooled = Vec::Zero(m);
  for (const auto& r : est.per_start) est.pooled += r;
  est.pooled /= static_cast<double>(est.per_start.size());
  for (std::size_t i = 0; i < est.per_start.size(); ++i)
    for (std::size_t j = i + 1; j < est.per_start.size(); ++j)
      est.spread = std::max(est.spread, (est.per_start[i] - est.per_start[j]).norm());
  return est;
}

Resonance nonresonance_check(const Vec& v, int Q, double tol) {
  const int k = static_cast<int>(v.size());
  if (Q < 1) throw InputError("nonresonance_check needs Q >= 1");
  if (k < 1) throw InputError("nonresonance_check needs a nonempty vector");
  if (!(tol >= 0.0)) throw InputError("nonresonance_check needs tol >= 0");
  Resonance res;
  std::vector<long long> best;
  double best_res = std::numeric_limits<double>::infinity();
  auto key = [](const std::vector<long long>& c) {
    long long mx = 0, l1 = 0;
    for (long long x : c) mx = std::max(mx, std::llabs(x)), l1 += std::llabs(x);
    return std::make_pair(mx, l1);
  };
  auto better_offender = [&](const std::vector<long long>& a, const std::vector<long long>& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return a < b;
  };
  std::vector<long long> p(k, -Q);
  for (;;) {
    // Canonical sign: first nonzero coefficient positive.
    int first = 0;
    while (first < k && p[first] == 0) ++first;
    if (first < k && p[first] > 0) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += static_cast<double>(p[i]) * v(i);
      const long long r = -std::llround(s);
      if (std::llabs(r) <= Q) {
        const double resid = std::abs(s + static_cast<double>(r));
        std::vector<long long> rel(p);
        rel.push_back(r);
        if (resid <= tol) {
          if (res.pass || better_offender(rel, res.relation)) {
            res.pass = false;
            res.relation = rel;
            res.residual = resid;
          }
        } else if (res.pass && (resid < best_res || (resid == best_res && rel < best))) {
          best_res = resid;
          best = rel;
        }
      }
    }
    int i = k - 1;
    while (i >= 0 && p[i] == Q) p[i--] = -Q;
    if (i < 0) break;
    ++p[i];
  }
  if (res.pass) {
    res.relation = best;
    res.residual = best_res;
  }
  return res;
}

TransitivityReport transitivity_probe(const maps::Map& map, int per_axis, double epsilon, double lipschitz,
                                      int workers) {
  if (!map.is_torus()) throw InputError("transitivity_probe needs a torus map");
  const auto grid = conley::BoxGrid::for_map(map, per_axis);
  conley::GraphOptions opt;
  opt.epsilon = epsilon;
  opt.lipschitz = lipschitz;
  opt.workers = workers;
  const auto g = conley::build_graph(map, grid, opt);
  const auto dec = conley::chain_classes(g);
  TransitivityReport r;
  r.n_boxes = grid.size();
  r.n_edges = g.n_edges();
  r.epsilon = epsilon;
  r.lipschitz = g.lipschitz;
  r.lipschitz_heuristic = g.lipschitz_heuristic;
  r.n_classes = dec.n_classes;
  std::size_t rec = 0;
  for (auto f : dec.recurrent) rec += f;
  for (auto f : dec.class_recurrent) r.n_recurrent_classes += f;
  r.recurrent_fraction = static_cast<double>(rec) / static_cast<double>(grid.size());
  r.single_class = dec.n_classes == 1 && rec == grid.size();
  return r;
}

}  // namespace phdyn::rotation
