#include "phdyn/conley.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace phdyn::conley {

namespace {

constexpr Node kUnvisited = std::numeric_limits<Node>::max();

// Iterative Tarjan; returns raw component ids in completion order.
std::vector<Node> tarjan(const TransitionGraph& g, std::size_t& n_comp) {
  const std::size_t n = g.n_nodes();
  std::vector<Node> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<Node> stack;
  std::vector<std::uint8_t> on_stack(n, 0);
  struct Frame {
    Node v;
    std::uint64_t next;
  };
  std::vector<Frame> call;
  Node counter = 0;
  n_comp = 0;
  for (Node root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, g.offsets[root]});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const Node v = f.v;
      if (f.next < g.offsets[v + 1]) {
        const Node w = g.targets[f.next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.offsets[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        Node w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = static_cast<Node>(n_comp);
        } while (w != v);
        ++n_comp;
      }
      call.pop_back();
      if (!call.empty()) {
        const Node u = call.back().v;
        low[u] = std::min(low[u], low[v]);
      }
    }
  }
  return comp;
}

}  // namespace

std::vector<Node> ChainDecomposition::members(Node c) const {
  std::vector<Node> out;
  for (Node v = 0; v < class_of.size(); ++v)
    if (class_of[v] == c) out.push_back(v);
  return out;
}

ChainDecomposition chain_classes(const TransitionGraph& g) {
  const std::size_t n = g.n_nodes();
  std::size_t nc = 0;
  std::vector<Node> raw = tarjan(g, nc);

  // Renumber classes by their smallest member.
  std::vector<Node> first(nc, kUnvisited);
  for (Node v = 0; v < n; ++v)
    if (first[raw[v]] == kUnvisited) first[raw[v]] = v;
  std::vector<Node> order(nc);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Node a, Node b) { return first[a] < first[b]; });
  std::vector<Node> rename(nc);
  for (Node k = 0; k < nc; ++k) rename[order[k]] = k;

  ChainDecomposition dec;
  dec.n_classes = nc;
  dec.class_of.resize(n);
  dec.class_size.assign(nc, 0);
  dec.class_min_member.resize(nc);
  for (Node k = 0; k < nc; ++k) dec.class_min_member[k] = first[order[k]];
  for (Node v = 0; v < n; ++v) {
    dec.class_of[v] = rename[raw[v]];
    ++dec.class_size[dec.class_of[v]];
  }

  dec.recurrent.assign(n, 0);
  dec.class_recurrent.assign(nc, 0);
  for (Node c = 0; c < nc; ++c)
    if (dec.class_size[c] > 1) dec.class_recurrent[c] = 1;
  for (Node v = 0; v < n; ++v)
    if (g.has_edge(v, v)) dec.class_recurrent[dec.class_of[v]] = 1;
  for (Node v = 0; v < n; ++v) dec.recurrent[v] = dec.class_recurrent[dec.class_of[v]];

  std::vector<std::pair<Node, Node>> edges;
  for (Node v = 0; v < n; ++v)
    for (Node w : g.successors(v)) {
      const Node a = dec.class_of[v], b = dec.class_of[w];
      if (a != b) edges.emplace_back(a, b);
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  dec.dag_offsets.assign(nc + 1, 0);
  for (auto& e : edges) ++dec.dag_offsets[e.first + 1];
  for (std::size_t c = 0; c < nc; ++c) dec.dag_offsets[c + 1] += dec.dag_offsets[c];
  dec.dag_targets.reserve(edges.size());
  for (auto& e : edges) dec.dag_targets.push_back(e.second);

  if (g.has_exterior) dec.exterior_class = dec.class_of[g.exterior()];
  dec.lyapunov = lyapunov_levels(dec);
  return dec;
}

std::vector<double> lyapunov_levels(const ChainDecomposition& dec) {
  const std::size_t nc = dec.n_classes;
  std::vector<std::uint32_t> indeg(nc, 0), depth(nc, 0);
  for (Node t : dec.dag_targets) ++indeg[t];
  std::deque<Node> ready;
  for (Node c = 0; c < nc; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  std::size_t seen = 0;
  std::uint32_t maxd = 0;
  while (!ready.empty()) {
    const Node c = ready.front();
    ready.pop_front();
    ++seen;
    maxd = std::max(maxd, depth[c]);
    for (std::uint64_t e = dec.dag_offsets[c]; e < dec.dag_offsets[c + 1]; ++e) {
      const Node t = dec.dag_targets[e];
      depth[t] = std::max(depth[t], depth[c] + 1);
      if (--indeg[t] == 0) ready.push_back(t);
    }
  }
  if (seen != nc) throw NumericError("condensation graph is not acyclic");
  std::vector<double> val(dec.class_of.size());
  for (std::size_t v = 0; v < val.size(); ++v)
    val[v] = 1.0 - static_cast<double>(depth[dec.class_of[v]]) / (maxd + 1.0);
  return val;
}

}  // namespace phdyn::conley
