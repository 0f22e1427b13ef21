#include "phdyn/conley.hpp"

#include <cmath>

namespace phdyn::conley {

BoxGrid::BoxGrid(maps::Domain region, std::vector<int> resolution)
    : d_(static_cast<int>(resolution.size())), region_(std::move(region)), res_(std::move(resolution)), size_(1) {
  if (d_ < 1 || d_ > kMaxDim) throw InputError("box grid dimension must be 1..3");
  if (region_.lower.size() != d_ || region_.upper.size() != d_) throw InputError("box grid region has wrong dimension");
  h_.resize(d_);
  for (int i = 0; i < d_; ++i) {
    if (res_[i] < 1 || res_[i] > (1 << 20)) throw InputError("box grid resolution must lie in 1..2^20");
    if (!(region_.upper(i) > region_.lower(i))) throw InputError("box grid region is empty");
    h_(i) = (region_.upper(i) - region_.lower(i)) / res_[i];
    size_ *= static_cast<std::size_t>(res_[i]);
  }
  if (size_ >= (std::size_t{1} << 31)) throw CapacityError("box grid has too many boxes");
}

BoxGrid BoxGrid::for_map(const maps::Map& m, int per_axis) {
  return BoxGrid(m.domain(), std::vector<int>(m.dim(), per_axis));
}

Multi BoxGrid::multi_index(std::size_t i) const {
  Multi m{0, 0, 0};
  for (int k = d_ - 1; k >= 0; --k) {
    m[k] = static_cast<int>(i % res_[k]);
    i /= res_[k];
  }
  return m;
}

std::size_t BoxGrid::flat(const Multi& m) const {
  std::size_t i = 0;
  for (int k = 0; k < d_; ++k) i = i * res_[k] + m[k];
  return i;
}

Vec BoxGrid::lower_corner(std::size_t i) const {
  Multi m = multi_index(i);
  Vec x(d_);
  for (int k = 0; k < d_; ++k) x(k) = region_.lower(k) + m[k] * h_(k);
  return x;
}

Vec BoxGrid::center(std::size_t i) const { return lower_corner(i) + 0.5 * h_; }

std::optional<std::size_t> BoxGrid::box_of(const Vec& x) const {
  Multi m{0, 0, 0};
  for (int k = 0; k < d_; ++k) {
    double t = (x(k) - region_.lower(k)) / h_(k);
    long long j = static_cast<long long>(std::floor(t));
    if (periodic()) {
      j %= res_[k];
      if (j < 0) j += res_[k];
    } else if (j < 0 || j >= res_[k]) {
      return std::nullopt;
    }
    m[k] = static_cast<int>(j);
  }
  return flat(m);
}

}  // namespace phdyn::conley
