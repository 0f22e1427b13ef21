#pragma once

#include "phdyn/conley.hpp"
#include "phdyn/maps/map.hpp"

#include <array>
#include <vector>

namespace phdyn::rotation {

struct RotationEstimate {
  int n = 0;
  std::vector<Vec> starts;
  std::vector<Vec> per_start;  // (Fⁿ(z) − z)/n
  Vec pooled;
  double spread = 0.0;              // max pairwise distance of per_start
  double displacement_bound = 0.0;  // sup ‖φ‖ seen along the orbits
  Vec lift_shift;
  bool first_coordinate_only = false;
};

// Linear part must be the identity, or fix the first coordinate (first row
// e₁ᵀ), in which case only p₁ is averaged.  lift_shift selects the lift F + γ.
RotationEstimate rotation_vector(const maps::TorusLiftMap& map, const std::vector<Vec>& starts, int n,
                                 const Vec& lift_shift = Vec());

struct Resonance {
  bool pass = true;
  std::vector<long long> relation;  // (p₁, …, p_k, r) with Σ pᵢvᵢ + r ≈ 0
  double residual = 0.0;
};

// Exhaustive over integer vectors with max-norm ≤ Q.  On failure the relation
// is the smallest offender by (max-norm, L1, lexicographic); on success it is
// the one with the smallest residual.
Resonance nonresonance_check(const Vec& v, int Q, double tol);

struct TransitivityReport {
  bool single_class = false;  // every box in one recurrent SCC
  std::size_t n_classes = 0;
  std::size_t n_recurrent_classes = 0;
  double recurrent_fraction = 0.0;
  std::size_t n_boxes = 0;
  std::size_t n_edges = 0;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  bool lipschitz_heuristic = false;
};

TransitivityReport transitivity_probe(const maps::Map& map, int per_axis, double epsilon, double lipschitz = 0.0,
                                      int workers = 1);

}  // namespace phdyn::rotation
