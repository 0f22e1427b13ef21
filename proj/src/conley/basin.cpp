#include "phdyn/conley.hpp"

#include <future>

namespace phdyn::conley {

BasinEstimate basin_fraction(const maps::Map& map, const BoxGrid& grid, const std::vector<std::uint8_t>& target,
                             std::size_t n_samples, int horizon, int settle, std::uint64_t seed, int workers) {
  if (!(horizon > settle && settle >= 1)) throw InputError("basin_fraction needs horizon > settle >= 1");
  if (target.size() != grid.size()) throw InputError("basin target mask has the wrong size");
  if (n_samples == 0) throw InputError("basin_fraction needs samples");
  const int d = grid.dim();
  const auto& dom = map.domain();
  auto run = [&](std::size_t lo, std::size_t hi) {
    std::size_t hits = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng(derive_seed(seed, i));
      Vec x(d);
      for (int k = 0; k < d; ++k) x(k) = rng.uniform(dom.lower(k), dom.upper(k));
      bool ok = true;
      for (int t = 1; t <= horizon && ok; ++t) {
        auto y = map.apply(x);
        if (!y) {
          ok = false;
          break;
        }
        x = map.is_torus() ? maps::reduce_mod1(*y) : *y;
        if (t > horizon - settle) {
          auto b = grid.box_of(x);
          ok = b && target[*b];
        }
      }
      hits += ok ? 1 : 0;
    }
    return hits;
  };
  const int w = std::max(1, std::min<int>(clamp_workers(workers), static_cast<int>(std::min<std::size_t>(n_samples, 64))));
  std::vector<std::future<std::size_t>> jobs;
  for (int t = 0; t < w; ++t)
    jobs.push_back(std::async(std::launch::async, run, n_samples * t / w, n_samples * (t + 1) / w));
  BasinEstimate est;
  for (auto& j : jobs) est.hits += j.get();
  est.n_samples = n_samples;
  est.horizon = horizon;
  est.settle = settle;
  est.seed = seed;
  est.fraction = static_cast<double>(est.hits) / static_cast<double>(n_samples);
  return est;
}

}  // namespace phdyn::conley
