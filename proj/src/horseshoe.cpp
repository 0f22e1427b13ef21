#include "phdyn/horseshoe.hpp"

#include "phdyn/conley.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace phdyn::horseshoe {

namespace {

constexpr double kTarget = 5.0;
constexpr double kReachLo = -1.0, kReachHi = 8.0;

double g_max(const HorseshoeSpec& s, double t) {
  double m = s.fiber(0, t);
  for (int b = 1; b < 4; ++b) m = std::max(m, s.fiber(b, t));
  return m;
}

double g_min(const HorseshoeSpec& s, double t) {
  double m = s.fiber(0, t);
  for (int b = 1; b < 4; ++b) m = std::min(m, s.fiber(b, t));
  return m;
}

struct Root {
  double param, lo, hi, residual;
};

Root bisect(const Family& family, const Word& w, double lo, double hi) {
  auto f = [&](double e) { return fiber_reach(family(e), w).value - kTarget; };
  double flo = f(lo), fhi = f(hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, lo, hi, 0.0};
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? Root{lo, lo, hi, std::abs(flo)} : Root{hi, lo, hi, std::abs(fhi)};
}

}  // namespace

void check_word(const Word& w) {
  if (w.empty()) throw InputError("symbolic word must be nonempty");
  for (int c : w)
    if (c < 1 || c > 4) throw InputError("symbolic word letters must be in 1..4, got " + std::to_string(c));
}

PeriodicOrbit periodic_point(const HorseshoeSpec& spec, const Word& w) {
  check_word(w);
  const int k = static_cast<int>(w.size());
  double ax = 0.0, by = 0.0;
  for (int c : w) {
    ax = ax / 5.0 + spec.offsets[c - 1];
    by = 5.0 * (by - spec.offsets[c - 1]);
  }
  const double p5 = std::pow(5.0, k);
  PeriodicOrbit orb;
  orb.base << ax / (1.0 - 1.0 / p5), -by / (p5 - 1.0);
  orb.base_multipliers << 1.0 / p5, p5;

  auto compose = [&](double t, double* deriv, bool* inside) {
    double d = 1.0;
    bool in = true;
    for (int c : w) {
      d *= spec.fiber_derivative(c - 1, t);
      t = spec.fiber(c - 1, t);
      in = in && t >= maps::kFiberLo && t <= maps::kFiberHi;
    }
    if (deriv) *deriv = d;
    if (inside) *inside = in;
    return t;
  };
  auto h = [&](double t) { return compose(t, nullptr, nullptr) - t; };

  std::vector<double> roots;
  const int n = 7000;
  const double L = maps::kFiberLo, H = maps::kFiberHi;
  double tp = L, hp = h(tp);
  if (hp == 0.0) roots.push_back(tp);
  for (int i = 1; i <= n; ++i) {
    const double t = L + (H - L) * i / n;
    const double ht = h(t);
    if (ht == 0.0) {
      roots.push_back(t);
    } else if (hp != 0.0 && (hp > 0.0) != (ht > 0.0)) {
      double lo = tp, hi = t, hlo = hp;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double hm = h(mid);
        if (hm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((hm > 0.0) == (hlo > 0.0)) {
          lo = mid;
          hlo = hm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi);
    }
    tp = t;
    hp = ht;
  }

  const maps::HorseshoeMap map(spec, false);
  for (double r : roots) {
    FiberPoint fp;
    fp.t = r;
    bool inside = false;
    compose(r, &fp.multiplier, &inside);
    if (!inside) continue;
    fp.stable_dimension = 1 + (std::abs(fp.multiplier) < 1.0 ? 1 : 0);
    Vec x(3);
    x << orb.base(0), orb.base(1), r;
    Vec y = x;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      auto z = map.apply(y);
      if (!z) ok = false;
      else y = *z;
    }
    fp.closure_error = ok ? (y - x).norm() : std::numeric_limits<double>::infinity();
    orb.fiber.push_back(fp);
  }
  orb.escaping = orb.fiber.empty();
  return orb;
}

Reach fiber_reach(const HorseshoeSpec& spec, const Word& w, double start) {
  check_word(w);
  Reach r;
  r.value = start;
  for (int c : w) {
    r.value = spec.fiber(c - 1, r.value);
    if (!(r.value >= kReachLo && r.value <= kReachHi)) {
      r.escaped = true;
      break;
    }
  }
  return r;
}

Family eta2_family(HorseshoeSpec base) {
  return [base](double eta) {
    HorseshoeSpec s = base;
    s.eta[1] = eta;
    return s;
  };
}

double unstable_line_x(const HorseshoeSpec& spec, const Word& w) {
  double x = 5.0 * spec.offsets[0] / 4.0;
  for (int c : w) x = x / 5.0 + spec.offsets[c - 1];
  return x;
}

double q4_height(const HorseshoeSpec& spec) { return 5.0 * spec.offsets[3] / 4.0; }

std::vector<ConnectionEvent> heteroclinic_scan(const Family& family, const ScanOptions& opt) {
  if (!(opt.lo < opt.hi)) throw InputError("scan range must have lo < hi");
  if (opt.max_length < 1) throw InputError("scan needs max_length >= 1");
  if (opt.nodes < 2) throw InputError("scan needs at least 2 parameter nodes");
  if (!(opt.tol > 0.0)) throw InputError("scan needs tol > 0");
  if (opt.validate)
    for (double e : {opt.lo, 0.5 * (opt.lo + opt.hi), opt.hi}) {
      const auto chk = maps::verify_horseshoe(family(e));
      if (!chk.ok) throw InputError("scan family violates the fiber constraints at parameter " + format_real(e) + ": " + chk.violations.front());
    }

  const int m = opt.nodes;
  std::vector<double> eta(m);
  std::vector<HorseshoeSpec> specs;
  for (int j = 0; j < m; ++j) {
    eta[j] = j == m - 1 ? opt.hi : opt.lo + (opt.hi - opt.lo) * j / (m - 1);
    specs.push_back(family(eta[j]));
  }

  std::vector<ConnectionEvent> events;
  std::set<std::pair<Word, std::pair<double, double>>> seen;
  Word word;

  // Whether some extension by 1..rem letters could still cross the target.
  auto alive = [&](const std::vector<double>& t, int rem) {
    bool any_up = false, any_down = false;
    for (int j = 0; j < m; ++j) {
      double up = t[j], lo = t[j], a = t[j], b = t[j];
      bool ru = false, rd = false;
      for (int s = 0; s < rem; ++s) {
        a = g_max(specs[j], a);
        b = g_min(specs[j], b);
        up = std::max(up, a);
        lo = std::min(lo, b);
        ru = ru || a >= kTarget;
        rd = rd || b <= kTarget;
      }
      any_up = any_up || ru || up >= kTarget;
      any_down = any_down || rd || lo <= kTarget;
    }
    return any_up && any_down;
  };

  std::function<void(const std::vector<double>&)> dfs = [&](const std::vector<double>& t) {
    const int rem = opt.max_length - static_cast<int>(word.size());
    if (rem <= 0 || !alive(t, rem)) return;
    for (int c = 1; c <= 4; ++c) {
      word.push_back(c);
      std::vector<double> u(m);
      for (int j = 0; j < m; ++j) u[j] = specs[j].fiber(c - 1, t[j]);
      for (int j = 0; j + 1 < m; ++j) {
        const double a = u[j] - kTarget, b = u[j + 1] - kTarget;
        if ((a > 0.0) == (b > 0.0) && a != 0.0 && b != 0.0) continue;
        if (a == 0.0 && j > 0) continue;  // already bracketed by the previous pair
        const Root r = bisect(family, word, eta[j], eta[j + 1]);
        if (!seen.insert({word, {eta[j], eta[j + 1]}}).second) continue;
        const HorseshoeSpec s = family(r.param);
        ConnectionEvent ev;
        ev.word = word;
        ev.parameter = r.param;
        ev.point << unstable_line_x(s, word), q4_height(s), kTarget;
        ev.bracket_lo = r.lo;
        ev.bracket_hi = r.hi;
        ev.residual = r.residual;
        events.push_back(ev);
      }
      dfs(u);
      word.pop_back();
    }
  };
  dfs(std::vector<double>(m, 0.0));
  return events;
}

IsolationReport isolation_probe(const HorseshoeSpec& spec, const std::optional<ConnectionEvent>& event,
                                const Eigen::Vector3d& control, const std::vector<int>& resolutions, double radius,
                                int workers) {
  if (!event) throw InputError("isolation_probe needs a connection event; the scan found none");
  if (resolutions.size() < 2) throw InputError("isolation_probe needs at least two resolutions");
  if (!(radius > 0.0)) throw InputError("isolation_probe needs radius > 0");
  const maps::HorseshoeMap map(spec, false);
  IsolationReport rep;
  rep.radius = radius;
  rep.x = event->point;
  rep.control = control;
  for (int n : resolutions) {
    if (n < 1) throw InputError("resolution must be positive");
    const conley::BoxGrid grid(map.domain(), {n, n, n});
    conley::GraphOptions opt;
    opt.enclosure = conley::Enclosure::axis_box;
    opt.epsilon = 0.0;
    opt.workers = workers;
    const auto g = conley::build_graph(map, grid, opt);
    const auto dec = conley::chain_classes(g);
    IsolationRow row;
    row.resolution = n;
    for (std::size_t v = 0; v < grid.size(); ++v) {
      if (!dec.recurrent[v]) continue;
      ++row.recurrent;
      const Vec c = grid.center(v);
      const Eigen::Vector3d cc(c(0), c(1), c(2));
      if ((cc - rep.x).norm() <= radius) ++row.near_x;
      if ((cc - control).norm() <= radius) ++row.near_control;
    }
    rep.rows.push_back(row);
  }
  const auto& a = rep.rows.front();
  const auto& b = rep.rows.back();
  rep.growth_x = (b.near_x + 1.0) / (a.near_x + 1.0);
  rep.growth_control = (b.near_control + 1.0) / (a.near_control + 1.0);
  rep.signature = rep.growth_x < rep.growth_control;
  return rep;
}

}  // namespace phdyn::horseshoe
