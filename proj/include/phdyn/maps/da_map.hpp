#pragma once

#include "phdyn/maps/map.hpp"

namespace phdyn::maps {

struct DAParams {
  Vec fixed_point;  // lift of a fixed point of A; empty means the origin
  double delta = 0.2;
  // Eigenvalues a < 1 < b of the deformed stable block, a·b > 1.
  double lambda_weak = 0.8;
  double lambda_strong = 1.3;
  // Angle of the eigenbasis of the new stable block in conformal coordinates.
  double eigen_angle = 1.5;
  double core_radius = 0.0;         // 0 picks the largest radius fitting 0.9·δ
  double unstable_halfwidth = 0.0;  // 0 means 0.6·δ
  double log_span = 16.0;
};

// Derived-from-Anosov deformation of a hyperbolic automorphism whose stable
// plane carries a complex pair.  F = A∘Ψ where Ψ keeps the unstable coordinate,
// acts on the stable plane by s ↦ E(τ)s, and is the identity off a small
// cylinder around q.  E(1) turns the stable block of A into the target block,
// so Df(q) = B; τ fades out logarithmically in |s| so Ψ stays C¹-close in the
// cone sense everywhere.
class DAMap : public TorusLiftMap {
 public:
  DAMap(linear::IntegerMatrix A, DAParams p);
  std::string kind() const override { return "da"; }
  Vec inverse(const Vec& y) const override;

  const DAParams& params() const { return p_; }
  const Vec& fixed_point() const { return q_; }
  const Mat& target_jacobian() const { return B_; }
  // Orthonormal basis of the stable plane of A and the unit unstable direction.
  Mat stable_plane() const;
  Vec unstable_direction() const { return T_.col(2); }
  double core_radius() const { return R_; }
  double unstable_halfwidth() const { return du_; }
  double support_extent() const { return extent_; }
  double min_jacobian_det() const { return min_det_; }
  double twist(const Vec& x) const;

 protected:
  Vec phi(const Vec& x) const override;
  Mat dphi(const Vec& x) const override;

 private:
  struct Local {
    bool inside = false;
    Eigen::Vector2d s;
    double u = 0.0;
  };
  Local localize(const Vec& x) const;
  double tau(const Eigen::Vector2d& s, double u, Eigen::Vector2d* grad_s, double* d_u) const;
  Eigen::Matrix2d E(double t) const;
  Eigen::Matrix2d dE(double t) const;
  double extent_for(double R, double du, int n_angles) const;
  void validate();

  DAParams p_;
  Vec q_;
  Mat T_, Tinv_;
  double mu_ = 0.0, psi_ = 0.0;
  Eigen::Matrix2d Q_;
  double k1_ = 1.0, k2_ = 1.0;
  double R_ = 0.0, du_ = 0.0;
  double extent_ = 0.0, min_det_ = 0.0;
  Mat B_;
};

// C² step: 0 below 0, 1 above 1, S′ ∝ z²(1−z)²(1+8(z−½)²) in between.
double smooth_step(double z, double* deriv = nullptr);

}  // namespace phdyn::maps
