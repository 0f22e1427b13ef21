#include "phdyn/conley.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>

namespace phdyn::conley {

bool TransitionGraph::has_edge(Node a, Node b) const {
  auto s = successors(a);
  return std::binary_search(s.begin(), s.end(), b);
}

namespace {

struct Sample {
  Vec image;
  double scale;  // 0.5 for the center, 1 for corners (distance to the farthest box point)
};

// Boxes meeting the enclosure around y; returns true if the enclosure leaves
// a region grid.
bool enclose(const BoxGrid& g, const Vec& y, const Vec& pad, bool ball, double radius, std::vector<Node>& out) {
  const int d = g.dim();
  const Vec& h = g.width();
  const auto& lo = g.region().lower;
  std::array<long long, kMaxDim> a{}, b{};
  bool outside = false;
  for (int k = 0; k < d; ++k) {
    a[k] = static_cast<long long>(std::floor((y(k) - pad(k) - lo(k)) / h(k)));
    b[k] = static_cast<long long>(std::floor((y(k) + pad(k) - lo(k)) / h(k)));
    const long long n = g.resolution()[k];
    if (g.periodic()) {
      if (b[k] - a[k] + 1 >= n) {
        a[k] = 0;
        b[k] = n - 1;
      }
    } else {
      if (a[k] < 0) {
        a[k] = 0;
        outside = true;
      }
      if (b[k] > n - 1) {
        b[k] = n - 1;
        outside = true;
      }
      if (a[k] > b[k]) return true;
    }
  }
  std::array<long long, kMaxDim> c = a;
  for (;;) {
    bool keep = true;
    if (ball) {
      double dist2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double bl = lo(k) + c[k] * h(k), bh = bl + h(k);
        const double gap = y(k) < bl ? bl - y(k) : (y(k) > bh ? y(k) - bh : 0.0);
        dist2 += gap * gap;
      }
      keep = dist2 <= radius * radius;
    }
    if (keep) {
      Multi m{0, 0, 0};
      for (int k = 0; k < d; ++k) {
        long long j = c[k];
        if (g.periodic()) {
          const long long n = g.resolution()[k];
          j %= n;
          if (j < 0) j += n;
        }
        m[k] = static_cast<int>(j);
      }
      out.push_back(static_cast<Node>(g.flat(m)));
    }
    int k = d - 1;
    while (k >= 0 && c[k] == b[k]) {
      c[k] = a[k];
      --k;
    }
    if (k < 0) break;
    ++c[k];
  }
  return outside;
}

}  // namespace

TransitionGraph build_graph(const maps::Map& map, const BoxGrid& grid, const GraphOptions& opt) {
  if (!(opt.epsilon >= 0.0)) throw InputError("graph epsilon must be >= 0");
  if (map.dim() != grid.dim()) throw InputError("grid dimension does not match the map");
  TransitionGraph g{grid, 0.0, 0.0, false, Enclosure::ball, false, {}, {}};
  g.epsilon = opt.epsilon;
  g.enclosure = opt.enclosure;
  const bool user_L = opt.lipschitz > 0.0;
  g.lipschitz = user_L ? opt.lipschitz : map.lipschitz_hint();
  g.lipschitz_heuristic = user_L ? false : map.lipschitz_is_heuristic();
  g.has_exterior = !grid.periodic();

  const int d = grid.dim();
  const Vec& h = grid.width();
  const bool ball = opt.enclosure == Enclosure::ball;
  Mat Lax = user_L ? Mat::Constant(d, d, g.lipschitz) : map.axis_lipschitz();
  // Half-widths of the enclosure around a center image and around a corner image.
  Vec pad_center(d), pad_corner(d);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += Lax(i, j) * h(j);
    pad_center(i) = ball ? g.lipschitz * grid.diameter() / 2.0 + opt.epsilon : s / 2.0 + opt.epsilon;
    pad_corner(i) = ball ? g.lipschitz * grid.diameter() + opt.epsilon : s + opt.epsilon;
  }
  const double r_center = g.lipschitz * grid.diameter() / 2.0 + opt.epsilon;
  const double r_corner = g.lipschitz * grid.diameter() + opt.epsilon;

  const std::size_t nb = grid.size();
  const int w = std::max(1, std::min<int>(clamp_workers(opt.workers), static_cast<int>(std::min<std::size_t>(nb, 64))));
  std::atomic<std::size_t> total{0};
  std::atomic<bool> over{false};

  struct Chunk {
    std::vector<std::uint32_t> counts;
    std::vector<Node> targets;
  };
  std::vector<Chunk> chunks(w);
  auto work = [&](int t) {
    const std::size_t lo = nb * t / w, hi = nb * (t + 1) / w;
    Chunk& ch = chunks[t];
    ch.counts.reserve(hi - lo);
    std::vector<Node> buf;
    for (std::size_t i = lo; i < hi && !over.load(std::memory_order_relaxed); ++i) {
      buf.clear();
      bool exterior = false;
      const Vec c = grid.center(i);
      auto yc = map.apply(c);
      if (grid.periodic()) {
        exterior |= enclose(grid, *yc, pad_center, ball, r_center, buf);
      } else {
        const Vec lo_c = grid.lower_corner(i), hi_c = lo_c + h;
        exterior |= map.box_may_escape(lo_c, hi_c);
        if (yc) {
          exterior |= enclose(grid, *yc, pad_center, ball, r_center, buf);
        } else {
          exterior = true;
          // Corner images (nudged inside) stand in for the escaped center.
          for (int mask = 0; mask < (1 << d); ++mask) {
            Vec x(d);
            for (int k = 0; k < d; ++k) x(k) = (mask >> k & 1) ? hi_c(k) - 1e-9 * h(k) : lo_c(k) + 1e-9 * h(k);
            if (auto y = map.apply(x)) exterior |= enclose(grid, *y, pad_corner, ball, r_corner, buf);
          }
        }
      }
      std::sort(buf.begin(), buf.end());
      buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
      if (exterior) buf.push_back(g.exterior());
      if (total.fetch_add(buf.size(), std::memory_order_relaxed) + buf.size() > opt.edge_budget) over = true;
      ch.counts.push_back(static_cast<std::uint32_t>(buf.size()));
      ch.targets.insert(ch.targets.end(), buf.begin(), buf.end());
    }
  };
  if (w == 1) {
    work(0);
  } else {
    std::vector<std::future<void>> jobs;
    for (int t = 0; t < w; ++t) jobs.push_back(std::async(std::launch::async, work, t));
    for (auto& j : jobs) j.get();
  }
  if (over) throw CapacityError("transition graph exceeds the edge budget of " + std::to_string(opt.edge_budget));

  const std::size_t nn = nb + (g.has_exterior ? 1 : 0);
  g.offsets.assign(nn + 1, 0);
  g.targets.reserve(total.load());
  std::size_t v = 0;
  for (auto& ch : chunks) {
    for (auto cnt : ch.counts) {
      g.offsets[v + 1] = g.offsets[v] + cnt;
      ++v;
    }
    g.targets.insert(g.targets.end(), ch.targets.begin(), ch.targets.end());
    ch = Chunk{};
  }
  if (g.has_exterior) {
    g.offsets[nn] = g.offsets[nn - 1] + 1;
    g.targets.push_back(g.exterior());
  }
  return g;
}

}  // namespace phdyn::conley
