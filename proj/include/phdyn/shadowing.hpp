#pragma once

#include "phdyn/linear_models.hpp"
#include "phdyn/maps/map.hpp"

#include <cstdint>
#include <vector>

namespace phdyn::shadowing {

// H = id + h_u + h_s with
//   h_u(x) =  Σ_{n=0}^{N−1} A^{−(n+1)} P_u φ(Fⁿx),
//   h_s(x) = −Σ_{n=1}^{N}   A^{n−1}   P_s φ(F^{−n}x).
// Powers are applied in eigen-coordinates so roundoff never gets amplified.
struct Semiconjugacy {
  maps::TorusMapPtr map;
  linear::Splitting splitting;
  double mu_s = 0.0;     // largest stable modulus
  double mu_u = 0.0;     // 1 / smallest unstable modulus
  double mu = 0.0;       // max(mu_s, mu_u)
  double kappa_s = 1.0;  // ‖V_s‖·‖W_s‖
  double kappa_u = 1.0;
  int depth = 0;
  double tail_bound = 0.0;
  double shadow_bound = 0.0;  // K₁ ≥ sup ‖H(x) − x‖
  double requested_tol = 0.0;
  // Block of A in each eigen-coordinate system (conformal or diagonal).
  Eigen::MatrixXd Ds, Du_inv;
};

// Tail of the truncated series at depth N.
double tail_at_depth(const Semiconjugacy& s, int N);

Semiconjugacy build_semiconjugacy(maps::TorusMapPtr map, double tol);

Vec eval_H(const Semiconjugacy& s, const Vec& x);

struct EquivarianceRow {
  Vec x, hx;
  double residual = 0.0;
};

struct EquivarianceReport {
  int n_samples = 0;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  double bound = 0.0;  // (1 + ‖A‖)·tail_bound
  double max_shift = 0.0;  // sup sampled ‖H(x) − x‖
  std::vector<EquivarianceRow> rows;
};

// Samples uniform in [0,1)ᵈ; sample i uses the stream derive_seed(seed, i).
EquivarianceReport verify_equivariance(const Semiconjugacy& s, int n_samples, std::uint64_t seed, int workers = 1,
                                       bool keep_rows = false);

struct FiberReport {
  double diameter = 0.0;
  bool unstable_injective = true;
  int hits = 0;
  int probes = 0;
  double hit_tolerance = 0.0;
  std::vector<Vec> hit_points;
};

// Heuristic preimage search: half the probes fill the ball B(y, radius), half
// the stable-space disc through y; each probe is corrected by x ← x + (y − H(x)).
FiberReport fiber_probe(const Semiconjugacy& s, const Vec& y, int n_samples, double radius, std::uint64_t seed);

}  // namespace phdyn::shadowing
