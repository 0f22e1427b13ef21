#include "phdyn/conley.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace phdyn::conley {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::uint8_t> mask_of(const BoxGrid& g, const std::vector<Node>& U) {
  std::vector<std::uint8_t> m(g.size(), 0);
  for (Node v : U) {
    if (v >= g.size()) throw InputError("box index out of range");
    m[v] = 1;
  }
  return m;
}

}  // namespace

std::vector<Node> inflate(const BoxGrid& grid, const std::vector<Node>& U, int rings) {
  auto in = mask_of(grid, U);
  std::vector<std::uint8_t> out = in;
  const int d = grid.dim();
  for (std::size_t v = 0; v < grid.size(); ++v) {
    if (!in[v]) continue;
    const Multi m = grid.multi_index(v);
    Multi off{0, 0, 0};
    for (int k = 0; k < d; ++k) off[k] = -rings;
    for (;;) {
      Multi t{0, 0, 0};
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        long long j = m[k] + off[k];
        const int n = grid.resolution()[k];
        if (grid.periodic()) {
          j = ((j % n) + n) % n;
        } else if (j < 0 || j >= n) {
          ok = false;
        }
        t[k] = static_cast<int>(j);
      }
      if (ok) out[grid.flat(t)] = 1;
      int k = d - 1;
      while (k >= 0 && off[k] == rings) {
        off[k] = -rings;
        --k;
      }
      if (k < 0) break;
      ++off[k];
    }
  }
  std::vector<Node> res;
  for (std::size_t v = 0; v < grid.size(); ++v)
    if (out[v]) res.push_back(static_cast<Node>(v));
  return res;
}

TrappingCertificate certify_trapping(const maps::Map& map, const BoxGrid& grid, std::vector<Node> U,
                                     const GraphOptions& opt) {
  if (U.empty()) throw InputError("trapping certificate needs a nonempty box set");
  std::sort(U.begin(), U.end());
  U.erase(std::unique(U.begin(), U.end()), U.end());
  TrappingCertificate cert;
  cert.boxes = U;
  const auto in = mask_of(grid, U);
  if (grid.periodic() && U.size() == grid.size()) {
    cert.margin = kInf;
    cert.pass = true;
    return cert;
  }

  const int d = grid.dim();
  const Vec& h = grid.width();
  const bool ball = opt.enclosure == Enclosure::ball;
  const bool user_L = opt.lipschitz > 0.0;
  const double L = user_L ? opt.lipschitz : map.lipschitz_hint();
  Mat Lax = user_L ? Mat::Constant(d, d, L) : map.axis_lipschitz();
  Vec pad(d);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += Lax(i, j) * h(j);
    pad(i) = ball ? L * grid.diameter() / 2.0 : s / 2.0;
  }
  const double r = L * grid.diameter() / 2.0;
  const auto& lo = grid.region().lower;
  const auto& hi = grid.region().upper;

  cert.margin = kInf;
  for (Node v : U) {
    double m = kInf;
    const Vec c = grid.center(v);
    std::optional<Vec> y;
    if (!grid.periodic()) {
      const Vec lc = grid.lower_corner(v);
      if (!map.box_may_escape(lc, lc + h)) y = map.apply(c);
    } else {
      y = map.apply(c);
    }
    if (!y) {
      m = -kInf;
    } else {
      if (!grid.periodic())
        for (int k = 0; k < d; ++k) {
          const double pk = ball ? r : pad(k);
          m = std::min({m, (*y)(k) - lo(k) - pk, hi(k) - (*y)(k) - pk});
        }
      // Scan a window of boxes around the image for complement boxes.
      std::array<long long, kMaxDim> a{}, b{};
      double window = kInf;
      for (int k = 0; k < d; ++k) {
        const long long w = static_cast<long long>(std::ceil(2.0 * pad(k) / h(k))) + 2;
        const long long base = static_cast<long long>(std::floor(((*y)(k) - lo(k)) / h(k)));
        a[k] = base - w;
        b[k] = base + w;
        window = std::min(window, (w - 1) * h(k) - pad(k));
      }
      bool found = false;
      std::array<long long, kMaxDim> cidx = a;
      for (;;) {
        Multi t{0, 0, 0};
        bool valid = true;
        for (int k = 0; k < d; ++k) {
          long long j = cidx[k];
          const int n = grid.resolution()[k];
          if (grid.periodic()) j = ((j % n) + n) % n;
          else if (j < 0 || j >= n) valid = false;
          t[k] = static_cast<int>(j);
        }
        if (valid && !in[grid.flat(t)]) {
          found = true;
          double sep;
          if (ball) {
            double dist2 = 0.0;
            for (int k = 0; k < d; ++k) {
              const double bl = lo(k) + cidx[k] * h(k), bh = bl + h(k);
              const double gap = (*y)(k) < bl ? bl - (*y)(k) : ((*y)(k) > bh ? (*y)(k) - bh : 0.0);
              dist2 += gap * gap;
            }
            sep = std::sqrt(dist2) - r;
          } else {
            sep = -kInf;
            for (int k = 0; k < d; ++k) {
              const double bl = lo(k) + cidx[k] * h(k), bh = bl + h(k);
              sep = std::max(sep, std::max(bl - ((*y)(k) + pad(k)), ((*y)(k) - pad(k)) - bh));
            }
          }
          m = std::min(m, sep);
        }
        int k = d - 1;
        while (k >= 0 && cidx[k] == b[k]) {
          cidx[k] = a[k];
          --k;
        }
        if (k < 0) break;
        ++cidx[k];
      }
      if (!found) m = std::min(m, window);
    }
    if (m < cert.margin || !cert.witness) {
      if (m < cert.margin) cert.margin = m;
      if (!cert.witness || m <= cert.margin) cert.witness = v;
    }
    if (m == -kInf) break;
  }
  cert.pass = cert.margin > 0.0;
  return cert;
}

std::vector<QuasiAttractor> quasi_attractors(const ChainDecomposition& dec, const TransitionGraph& g,
                                             const maps::Map& map, int max_rounds) {
  GraphOptions opt;
  opt.lipschitz = g.lipschitz;
  opt.enclosure = g.enclosure;
  // Keep per-axis bounds when the graph itself used the map's hint.
  if (std::abs(g.lipschitz - map.lipschitz_hint()) == 0.0) opt.lipschitz = 0.0;

  std::vector<std::vector<Node>> members(dec.n_classes);
  for (Node v = 0; v < g.grid.size(); ++v) members[dec.class_of[v]].push_back(v);

  std::vector<QuasiAttractor> out;
  for (Node c = 0; c < dec.n_classes; ++c) {
    if (!dec.is_terminal(c) || !dec.class_recurrent[c]) continue;
    if (dec.exterior_class && *dec.exterior_class == c) continue;
    QuasiAttractor qa;
    qa.class_id = c;
    qa.boxes = members[c];
    std::vector<Node> U = qa.boxes;
    for (int round = 0;; ++round) {
      qa.certificate = certify_trapping(map, g.grid, U, opt);
      qa.certificate.rounds = round;
      if (qa.certificate.pass) break;
      if (round == max_rounds) {
        qa.certificate.inconclusive = true;
        break;
      }
      U = inflate(g.grid, U);
    }
    out.push_back(std::move(qa));
  }
  return out;
}

std::optional<PseudoOrbit> pseudo_orbit_path(const TransitionGraph& g, Node a, Node b) {
  const std::size_t nb = g.grid.size();
  if (a >= nb || b >= nb) throw InputError("pseudo_orbit_path: box index out of range");
  PseudoOrbit po;
  if (a == b && g.has_edge(a, a)) {
    po.boxes = {a, a};
  } else {
    const Node none = std::numeric_limits<Node>::max();
    std::vector<Node> parent(g.n_nodes(), none);
    std::deque<Node> q;
    // Seed with a's successors so a == b asks for a genuine cycle.
    for (Node w : g.successors(a)) {
      if (w >= nb || parent[w] != none) continue;
      parent[w] = a;
      q.push_back(w);
    }
    bool found = parent[b] != none;
    while (!q.empty() && !found) {
      const Node v = q.front();
      q.pop_front();
      for (Node w : g.successors(v)) {
        if (w >= nb || parent[w] != none) continue;
        parent[w] = v;
        if (w == b) {
          found = true;
          break;
        }
        q.push_back(w);
      }
    }
    if (!found) return std::nullopt;
    std::vector<Node> rev{b};
    Node v = b;
    do {
      v = parent[v];
      rev.push_back(v);
    } while (v != a);
    po.boxes.assign(rev.rbegin(), rev.rend());
  }
  for (Node v : po.boxes) po.centers.push_back(g.grid.center(v));
  return po;
}

}  // namespace phdyn::conley
