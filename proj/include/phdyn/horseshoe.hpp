#pragma once

#include "phdyn/maps/horseshoe_map.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace phdyn::horseshoe {

using maps::HorseshoeSpec;

// Letters 1..4 name the bands.
using Word = std::vector<int>;

void check_word(const Word& w);

struct FiberPoint {
  double t = 0.0;
  double multiplier = 0.0;  // (g_w)′(t)
  int stable_dimension = 0;
  double closure_error = 0.0;  // ‖f^{|w|}(pt) − pt‖
};

struct PeriodicOrbit {
  Eigen::Vector2d base;
  Eigen::Vector2d base_multipliers;  // (5^{−|w|}, 5^{|w|})
  std::vector<FiberPoint> fiber;     // ascending; empty when the branch escapes
  bool escaping = false;
};

PeriodicOrbit periodic_point(const HorseshoeSpec& spec, const Word& w);

struct Reach {
  double value = 0.0;
  bool escaped = false;  // left [−1, 8] at some letter
};

// g_{w_k}∘…∘g_{w_1}(start); start = 0 is the fiber of p₁.
Reach fiber_reach(const HorseshoeSpec& spec, const Word& w, double start = 0.0);

struct ConnectionEvent {
  Word word;
  double parameter = 0.0;
  Eigen::Vector3d point;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double residual = 0.0;
};

using Family = std::function<HorseshoeSpec(double)>;

// Default scan family: the given spec with η₂ replaced by the parameter.
Family eta2_family(HorseshoeSpec base);

struct ScanOptions {
  double lo = 0.004, hi = 0.016;
  int max_length = 12;
  double tol = 1e-10;
  int nodes = 64;
  bool validate = true;  // check the family at lo, midpoint and hi
};

// Roots of g_w(0) = 5 in the parameter, for every word up to max_length.
// Words are visited depth-first in lexicographic order; a subtree is skipped
// when the pointwise upper (lower) envelope of all its extensions stays below
// (above) 5 at every node.
std::vector<ConnectionEvent> heteroclinic_scan(const Family& family, const ScanOptions& opt);

// Base abscissa of the W^u(p₁) line with itinerary w, and the base height of q₄.
double unstable_line_x(const HorseshoeSpec& spec, const Word& w);
double q4_height(const HorseshoeSpec& spec);

struct IsolationRow {
  int resolution = 0;
  std::size_t near_x = 0;
  std::size_t near_control = 0;
  std::size_t recurrent = 0;
};

struct IsolationReport {
  std::vector<IsolationRow> rows;
  double radius = 0.0;
  Eigen::Vector3d x, control;
  double growth_x = 0.0, growth_control = 0.0;  // last / first counts
  bool signature = false;  // counts near x grow strictly slower
};

// Runs the Conley pipeline (axis enclosure, ε = 0) on C×[−1,6] at each
// resolution n³ and counts recurrent boxes with center within radius.
IsolationReport isolation_probe(const HorseshoeSpec& spec, const std::optional<ConnectionEvent>& event,
                                const Eigen::Vector3d& control, const std::vector<int>& resolutions, double radius,
                                int workers = 1);

}  // namespace phdyn::horseshoe
