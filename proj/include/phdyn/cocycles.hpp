#pragma once

#include "phdyn/common.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace phdyn::cocycles {

using Matrix = Eigen::MatrixXd;

// A_0 … A_{π−1} over a periodic orbit; the return map is M = A_{π−1}·…·A_0.
class PeriodicCocycle {
 public:
  explicit PeriodicCocycle(std::vector<Matrix> matrices);

  int period() const { return static_cast<int>(mats_.size()); }
  int dim() const { return static_cast<int>(mats_[0].rows()); }
  const Matrix& operator[](int i) const { return mats_[static_cast<std::size_t>(i % period())]; }
  const std::vector<Matrix>& matrices() const { return mats_; }
  double bound() const { return K_; }  // max ‖A_i‖, ‖A_i⁻¹‖
  double log_abs_det() const { return log_det_; }
  int det_sign() const { return det_sign_; }

  // M/scale with log(scale) returned separately; avoids overflow on long periods.
  Matrix scaled_product(double* log_scale) const;
  Matrix product() const;

 private:
  std::vector<Matrix> mats_;
  double K_ = 1.0;
  double log_det_ = 0.0;
  int det_sign_ = 1;
};

struct ExponentVector {
  std::vector<double> sigma;  // ascending
  bool defective_cluster = false;
};

ExponentVector exponents(const PeriodicCocycle& c);

// Operator-norm distance: max over positions of ‖A_i − B_i‖ and ‖A_i⁻¹ − B_i⁻¹‖.
double distance(const PeriodicCocycle& a, const PeriodicCocycle& b);

struct DominationCheck {
  bool pass = false;
  double margin = 0.0;  // min over positions of ½·σ_min(Aˡ|F) − σ_max(Aˡ|E)
  int worst_index = 0;
};

// E and F are bases at position 0 and get propagated along the orbit.
DominationCheck check_domination_cocycle(const PeriodicCocycle& c, const Matrix& E, const Matrix& F, int ell);

struct DiameterEstimate {
  double delta = 0.0;
  std::vector<std::pair<int, double>> table;  // (period, σᵈ − σ¹), sorted by period
};

DiameterEstimate lyapunov_diameter(const std::vector<PeriodicCocycle>& family);

Matrix rotation(double theta);

struct PerturbationPath {
  std::vector<PeriodicCocycle> steps;
  std::vector<double> thetas;
  double theta_star = 0.0;
  double diameter = 0.0;
  int preserved_index = 1;
  std::vector<std::uint8_t> in_sink_class;  // per step: σ¹ < 0 whenever |det M| < 1
  bool sink_preserved = true;
  std::vector<double> endpoint_moduli;  // eigenvalue moduli of the endpoint's M
};

// Composes every A_i with R_θ and increases θ until the return map has
// equal-modulus eigenvalues.
PerturbationPath equalize_2d(const PeriodicCocycle& c, double step_cap);

struct SteerResult {
  bool success = false;
  std::vector<double> angles;  // R_j = rotation(angles[j])
  double residual = 0.0;       // final angle between achieved and target lines
  bool growth_hypothesis = false;
};

// Greedy rotations of size ≤ ε so that R_ℓA_ℓ…R_1A_1·ℝw = A_ℓ…A_1·ℝv.
SteerResult steer_vector(const std::vector<Matrix>& mats, const Eigen::Vector2d& v, const Eigen::Vector2d& w,
                         double eps);

// Angle in [0, π/2] between the lines spanned by a and b.
double line_angle(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

}  // namespace phdyn::cocycles
