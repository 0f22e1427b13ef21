#pragma once

#include "phdyn/maps/map.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace phdyn::conley {

using Node = std::uint32_t;
using Multi = std::array<int, kMaxDim>;

// Half-open boxes over the map's domain, row-major (last axis fastest).
class BoxGrid {
 public:
  BoxGrid(maps::Domain region, std::vector<int> resolution);
  static BoxGrid for_map(const maps::Map& m, int per_axis);

  int dim() const { return d_; }
  bool periodic() const { return region_.kind == maps::DomainKind::torus; }
  const maps::Domain& region() const { return region_; }
  const std::vector<int>& resolution() const { return res_; }
  std::size_t size() const { return size_; }
  const Vec& width() const { return h_; }
  double diameter() const { return h_.norm(); }

  Multi multi_index(std::size_t i) const;
  std::size_t flat(const Multi& m) const;
  Vec center(std::size_t i) const;
  Vec lower_corner(std::size_t i) const;
  // Torus points are reduced first; region points outside give nullopt.
  std::optional<std::size_t> box_of(const Vec& x) const;

 private:
  int d_;
  maps::Domain region_;
  std::vector<int> res_;
  std::size_t size_;
  Vec h_;
};

enum class Enclosure { ball, axis_box };

struct GraphOptions {
  double epsilon = 0.0;
  double lipschitz = 0.0;  // ≤ 0: use the map's hint
  Enclosure enclosure = Enclosure::ball;
  std::size_t edge_budget = 100'000'000;
  int workers = 1;
};

// CSR adjacency over boxes plus an optional exterior node (index grid.size()).
struct TransitionGraph {
  BoxGrid grid;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  bool lipschitz_heuristic = false;
  Enclosure enclosure = Enclosure::ball;
  bool has_exterior = false;
  std::vector<std::uint64_t> offsets;
  std::vector<Node> targets;

  std::size_t n_nodes() const { return offsets.size() - 1; }
  std::size_t n_edges() const { return targets.size(); }
  Node exterior() const { return static_cast<Node>(grid.size()); }
  std::span<const Node> successors(Node v) const {
    return {targets.data() + offsets[v], static_cast<std::size_t>(offsets[v + 1] - offsets[v])};
  }
  bool has_edge(Node a, Node b) const;
};

TransitionGraph build_graph(const maps::Map& map, const BoxGrid& grid, const GraphOptions& opt);

struct ChainDecomposition {
  std::vector<Node> class_of;  // per node
  std::vector<std::uint8_t> recurrent;  // per node
  std::size_t n_classes = 0;
  std::vector<std::uint8_t> class_recurrent;
  std::vector<Node> class_min_member;
  std::vector<std::uint32_t> class_size;
  // Condensation DAG (no self-edges), CSR by class with sorted targets.
  std::vector<std::uint64_t> dag_offsets;
  std::vector<Node> dag_targets;
  std::vector<double> lyapunov;  // per node
  std::optional<Node> exterior_class;

  bool is_terminal(Node c) const { return dag_offsets[c + 1] == dag_offsets[c]; }
  std::vector<Node> members(Node c) const;
};

ChainDecomposition chain_classes(const TransitionGraph& g);

// 1 − depth/(max depth + 1), depth = longest path from a source class; per node.
std::vector<double> lyapunov_levels(const ChainDecomposition& dec);

struct TrappingCertificate {
  std::vector<Node> boxes;  // sorted
  double margin = 0.0;      // +inf when the complement is empty
  bool pass = false;
  bool inconclusive = false;
  int rounds = 0;
  std::optional<Node> witness;  // box realizing the margin
};

// Pass iff every box of U has its padded image (center image ± L·h/2, no ε)
// strictly inside U; region boundary and escape count as the complement.
TrappingCertificate certify_trapping(const maps::Map& map, const BoxGrid& grid, std::vector<Node> U,
                                     const GraphOptions& opt);

// U plus every box sharing a face, edge or corner with it.
std::vector<Node> inflate(const BoxGrid& grid, const std::vector<Node>& U, int rings = 1);

struct QuasiAttractor {
  Node class_id = 0;
  std::vector<Node> boxes;
  TrappingCertificate certificate;
};

std::vector<QuasiAttractor> quasi_attractors(const ChainDecomposition& dec, const TransitionGraph& g,
                                             const maps::Map& map, int max_rounds = 20);

struct PseudoOrbit {
  std::vector<Node> boxes;
  std::vector<Vec> centers;
};

// Shortest box path a → b (a nonempty cycle when a == b).
std::optional<PseudoOrbit> pseudo_orbit_path(const TransitionGraph& g, Node a, Node b);

struct BasinEstimate {
  double fraction = 0.0;
  std::size_t hits = 0;
  std::size_t n_samples = 0;
  int horizon = 0;
  int settle = 0;
  std::uint64_t seed = 0;
};

// target: per-box membership mask over grid.size() boxes.
BasinEstimate basin_fraction(const maps::Map& map, const BoxGrid& grid, const std::vector<std::uint8_t>& target,
                             std::size_t n_samples, int horizon, int settle, std::uint64_t seed, int workers = 1);

}  // namespace phdyn::conley
