#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "save/core.hpp"

namespace save {

enum class NodeKind { servers, lists };

/// Largest server count for which build_list_graph materializes the (K!)^2
/// adjacency. The policies never need it; they aggregate per server instead.
inline constexpr int kMaxExplicitListGraphServers = 6;
/// Node cap for the exact independence-number solver.
inline constexpr int kMaxIndependenceNodes = 24;

/// Directed feedback graph: an edge (m, k) means choosing m reveals k.
/// Every node carries a self-loop.
class SideObsGraph {
 public:
  SideObsGraph(int num_nodes, NodeKind kind);

  int size() const { return n_; }
  NodeKind kind() const { return kind_; }

  void add_edge(int from, int to);
  bool has_edge(int from, int to) const { return adj_[static_cast<std::size_t>(from) * n_ + to] != 0; }
  int in_degree(int k) const;
  std::size_t edge_count() const;

 private:
  int n_;
  NodeKind kind_;
  std::vector<std::uint8_t> adj_;  // row-major, row = source
};

/// Self-loops, plus an edge from every server to each side-observed server.
SideObsGraph build_server_graph(AvailabilityMask mask, SideObsSet sideobs, int num_servers);

/// Graph over the K! server lists. With the virtual set K̃ = mask ∪ sideobs,
/// (m, k) is an edge iff Φ_m(mask) = Φ_k(K̃) or Φ_k(K̃) ∈ sideobs.
SideObsGraph build_list_graph(const ListTable& table, AvailabilityMask mask, SideObsSet sideobs);
SideObsGraph build_list_graph(AvailabilityMask mask, SideObsSet sideobs, int num_servers);

/// Σ_{(m,k)} p(m) for every node k.
std::vector<double> in_probability(std::span<const double> probs, const SideObsGraph& graph);

/// Q = Σ_k p(k) / (μ + Σ_{(m,k)} p(m)); zero-probability nodes contribute 0.
double q_value(std::span<const double> probs, const SideObsGraph& graph, double mu);

struct IndependentSet {
  int size = 0;
  std::vector<int> members;
};

/// Maximum independent set of the undirected graph, self-loops ignored.
/// Exact branch and bound; throws ResourceLimit above kMaxIndependenceNodes.
IndependentSet independence_number(const SideObsGraph& graph);

struct QBounds {
  double lower = 0.0;
  double upper = 0.0;
  double coarse = 0.0;  // min{K, K - |S| + 1}; only meaningful for SAVE-S
};

/// Lower/upper bounds on Q for the server graph. Requires mu <= 1.
QBounds q_bounds_save_s(std::span<const double> probs, SideObsSet sideobs, double mu, int alpha);

/// Lower/upper bounds on Q for the list graph.
QBounds q_bounds_save_a(AvailabilityMask mask, SideObsSet sideobs, double mu);

}  // namespace save
