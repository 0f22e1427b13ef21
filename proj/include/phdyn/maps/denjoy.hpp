#pragma once

#include "phdyn/maps/map.hpp"

#include <optional>
#include <vector>

namespace phdyn::maps {

struct DenjoyParams {
  double rotation_number = 0.0;  // irrational in (0, 1)
  double ratio = 0.9;            // ℓ_n = c·ratio^|n|
  double inserted_mass = 0.5;    // Σ ℓ_n
  double tail_tol = 1e-12;       // mass of the intervals that are not materialized
};

// Denjoy circle homeomorphism: the orbit {nρ} is blown up into intervals I_n of
// length ℓ_n that are mapped affinely I_n → I_{n+1}; off the intervals the map
// is conjugate to the rotation by ρ.  Only |n| ≤ M are materialized, with M the
// smallest index whose tail mass is below tail_tol.
class DenjoyCircleMap : public TorusLiftMap {
 public:
  explicit DenjoyCircleMap(DenjoyParams p);
  std::string kind() const override { return "denjoy"; }
  Vec inverse(const Vec& y) const override;

  double lift_value(double s) const;
  double lift_inverse(double s) const;
  double derivative(double s) const;

  const DenjoyParams& params() const { return p_; }
  int truncation() const { return M_; }
  double interval_left(int n) const;
  double interval_length(int n) const;
  // Inserted interval containing s mod 1, if any.
  std::optional<int> interval_index(double s) const;
  double base_point() const { return interval_left(0) + 0.5 * interval_length(0); }

 protected:
  Vec phi(const Vec& x) const override;
  Mat dphi(const Vec& x) const override;

 private:
  int pos(int n) const { return pos_of_n_[n + M_]; }
  double point_image(double theta) const;  // semiconjugacy-side coordinate → circle
  double gap_theta(int j, double f) const;

  DenjoyParams p_;
  int M_ = 0;
  double scale_ = 1.0;
  std::vector<double> theta_, left_, len_, cum_;  // sorted by θ; cum_[j] = Σ len_[0..j)
  std::vector<int> n_of_pos_, pos_of_n_;
};

struct TwistParams {
  int interval = 0;         // index n of the base interval carrying the twist
  double amplitude = 0.05;
  double margin = 0.1;      // fraction of the interval kept twist-free at each end
};

// Skew product (s, t) ↦ (g₁(s), g₂(t) + a(s)) with a supported strictly inside
// one wandering interval of g₁.
class PseudoRotationMap : public TorusLiftMap {
 public:
  PseudoRotationMap(DenjoyParams base, DenjoyParams fiber, TwistParams twist);
  std::string kind() const override { return "pseudo_rotation"; }
  Vec inverse(const Vec& y) const override;

  const DenjoyCircleMap& base() const { return base_; }
  const DenjoyCircleMap& fiber() const { return fiber_; }
  const TwistParams& twist() const { return tw_; }
  double twist_value(double s, double* deriv = nullptr) const;

 protected:
  Vec phi(const Vec& x) const override;
  Mat dphi(const Vec& x) const override;

 private:
  DenjoyCircleMap base_, fiber_;
  TwistParams tw_;
  double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace phdyn::maps
