#pragma once

#include "phdyn/maps/map.hpp"

#include <array>
#include <string>
#include <vector>

namespace phdyn::maps {

// Four-band affine horseshoe on [0,5]² crossed with band-dependent fiber maps
// g_i(t) = t + η_i·P_i(t)/C (+ an additive shift used only by synthetic test
// families).  Bands are numbered 1..4 in the public API, 0..3 internally.
struct HorseshoeSpec {
  std::array<double, 4> offsets{1.0 / 6.0, 5.0 / 4.0, 11.0 / 4.0, 23.0 / 6.0};
  std::array<double, 4> eta{0.008, 0.008, 0.008, 0.008};
  double normalizer = 1.0;
  std::array<double, 4> fiber_shift{0.0, 0.0, 0.0, 0.0};

  static double shape(int band, double t, double* deriv = nullptr);
  double fiber(int band, double t) const;
  double fiber_derivative(int band, double t) const;
  // Band (0..3) whose horizontal strip [o_i, o_i + 1) contains y, or -1.
  int band_of(double y) const;
};

// Nominal fixed-point sets of the four fiber maps inside [−1, 6].
inline constexpr std::array<std::array<double, 2>, 4> kFiberFixedPoints{{{0.0, 4.0}, {3.0, 4.0}, {1.0, 2.0}, {1.0, 5.0}}};
inline constexpr double kFiberLo = -1.0;
inline constexpr double kFiberHi = 6.0;

struct HorseshoeCheck {
  bool ok = true;
  std::vector<std::string> violations;
  double min_slope = 0.0;
  double max_slope = 0.0;
  std::array<std::vector<double>, 4> fixed_points;
};

HorseshoeCheck verify_horseshoe(const HorseshoeSpec& spec);

class HorseshoeMap : public Map {
 public:
  // validate = false skips the fiber checks (synthetic families only).
  explicit HorseshoeMap(HorseshoeSpec spec, bool validate = true);
  std::string kind() const override { return "horseshoe"; }
  const HorseshoeSpec& spec() const { return spec_; }
  Mat axis_lipschitz() const override;
  bool box_may_escape(const Vec& lo, const Vec& hi) const override;

 protected:
  std::optional<Vec> apply_impl(const Vec& x) const override;
  std::optional<Evaluation> evaluate_impl(const Vec& x) const override;

 private:
  HorseshoeSpec spec_;
  double fiber_lip_ = 1.2;
};

}  // namespace phdyn::maps
