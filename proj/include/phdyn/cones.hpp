#pragma once

#include "phdyn/maps/map.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phdyn::cones {

// x ↦ d×k matrix with orthonormal columns.
using Bundle = std::function<Mat(const Vec&)>;

Bundle constant_bundle(Mat basis);  // columns are orthonormalized

struct ConeField {
  Bundle base;
  std::function<double(const Vec&)> aperture;
};

ConeField constant_cone(Mat basis, double aperture);

// Where the verifiers look.  Explicit points win over random sampling; the
// mask (if any) drops samples before they are counted.
struct Sampling {
  int n_samples = 1000;
  std::uint64_t seed = 0;
  std::vector<Vec> points;
  std::function<bool(const Vec&)> mask;
  int workers = 1;
};

struct Report {
  std::string mode;
  int iterates = 1;  // ℓ or N
  int samples = 0;
  int skipped = 0;   // escaped or masked
  std::uint64_t seed = 0;
  bool pass = false;
  double worst_margin = 0.0;
  std::optional<Vec> witness;
};

// Margin: atan α(f x) − atan(‖w′‖/‖e′‖) minimized over boundary vectors of the
// cone at x, where e′ + w′ is the image split along E(f x) ⊕ E(f x)^⊥.
Report verify_cone_invariance(const maps::Map& map, const ConeField& cone, const Sampling& s);

// Margin: ½·σ_min(Dfˡ|F) − σ_max(Dfˡ|E) along the actual orbit.
Report verify_domination(const maps::Map& map, const Bundle& E, const Bundle& F, int ell, const Sampling& s);

enum class Uniformity { contract, expand, vol_contract, vol_expand };
std::string to_string(Uniformity u);

// contract: ½ − σ_max, expand: σ_min − 2, volume modes use the product of the
// singular values of D f^N restricted to the bundle.
Report verify_uniformity(const maps::Map& map, const Bundle& E, int N, Uniformity mode, const Sampling& s);

struct ExponentEstimate {
  int n = 0;                       // iterates actually used
  int warmup = 0;                  // frame-alignment steps before averaging
  bool truncated = false;          // orbit escaped before n
  std::vector<double> exponents;   // ascending
  double orthogonality_residual = 0.0;
  double mean_log_det = 0.0;
};

// The frame is first pushed `warmup` steps without averaging so that it lines
// up with the growth directions; the n averaged steps start at f^warmup(x).
ExponentEstimate finite_time_exponents(const maps::Map& map, const Vec& x, int n, int warmup = 32);

enum class PHLabel {
  hyperbolic,
  strong_partially_hyperbolic,
  volume_hyperbolic,
  partially_hyperbolic,
  volume_partially_hyperbolic,
  none
};
std::string to_string(PHLabel l);

// Uniformity claim about E_first ⊕ … ⊕ E_last (0-based, inclusive).
struct UniformityClaim {
  int first = 0;
  int last = 0;
  Uniformity mode = Uniformity::contract;
  Report report;
};

struct PHReports {
  int dim = 0;
  std::vector<int> bundle_dims;          // E_1 … E_k
  std::vector<Report> dominations;       // E_i ≺ E_{i+1}, k − 1 entries
  std::vector<UniformityClaim> uniformity;
};

// Missing claims count as not established.
PHLabel ph_classify(const PHReports& r);

}  // namespace phdyn::cones
