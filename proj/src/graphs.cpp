#include "save/graphs.hpp"

#include <bit>
#include <string>

#include "save/error.hpp"

namespace save {

SideObsGraph::SideObsGraph(int num_nodes, NodeKind kind)
    : n_(num_nodes), kind_(kind), adj_(static_cast<std::size_t>(num_nodes) * num_nodes, 0) {
  if (num_nodes < 0) throw InputError("graph node count must be non-negative");
  for (int k = 0; k < n_; ++k) add_edge(k, k);
}

void SideObsGraph::add_edge(int from, int to) {
  if (from < 0 || from >= n_ || to < 0 || to >= n_) throw InputError("edge endpoint out of range");
  adj_[static_cast<std::size_t>(from) * n_ + to] = 1;
}

int SideObsGraph::in_degree(int k) const {
  int d = 0;
  for (int m = 0; m < n_; ++m) d += has_edge(m, k);
  return d;
}

std::size_t SideObsGraph::edge_count() const {
  std::size_t c = 0;
  for (auto e : adj_) c += e;
  return c;
}

SideObsGraph build_server_graph(AvailabilityMask /*mask*/, SideObsSet sideobs, int num_servers) {
  if (num_servers < 1) throw InputError("server graph needs K >= 1");
  SideObsGraph g(num_servers, NodeKind::servers);
  for (int k : sideobs.members()) {
    if (k >= num_servers) throw InputError("side observation index out of range");
    for (int m = 0; m < num_servers; ++m) g.add_edge(m, k);
  }
  return g;
}

SideObsGraph build_list_graph(const ListTable& table, AvailabilityMask mask, SideObsSet sideobs) {
  if (table.num_servers() > kMaxExplicitListGraphServers)
    throw ResourceLimit("explicit list graph needs K <= " + std::to_string(kMaxExplicitListGraphServers) +
                        ", got K=" + std::to_string(table.num_servers()));
  if (mask.empty()) throw ContractViolation("build_list_graph: availability mask is empty");
  const int n = table.size();
  const auto actual = table.heads(mask);
  const auto virt = table.heads(mask | sideobs);

  SideObsGraph g(n, NodeKind::lists);
  for (int k = 0; k < n; ++k) {
    if (sideobs.contains(virt[k])) {
      for (int m = 0; m < n; ++m) g.add_edge(m, k);
      continue;
    }
    for (int m = 0; m < n; ++m)
      if (actual[m] == virt[k]) g.add_edge(m, k);
  }
  return g;
}

SideObsGraph build_list_graph(AvailabilityMask mask, SideObsSet sideobs, int num_servers) {
  if (num_servers > kMaxExplicitListGraphServers)
    throw ResourceLimit("explicit list graph needs K <= " + std::to_string(kMaxExplicitListGraphServers) +
                        ", got K=" + std::to_string(num_servers));
  return build_list_graph(ListTable(num_servers), mask, sideobs);
}

std::vector<double> in_probability(std::span<const double> probs, const SideObsGraph& graph) {
  const int n = graph.size();
  if (static_cast<int>(probs.size()) != n) throw InputError("probability vector does not match graph size");
  std::vector<double> in(n, 0.0);
  for (int m = 0; m < n; ++m) {
    if (probs[m] == 0.0) continue;
    for (int k = 0; k < n; ++k)
      if (graph.has_edge(m, k)) in[k] += probs[m];
  }
  return in;
}

double q_value(std::span<const double> probs, const SideObsGraph& graph, double mu) {
  const auto in = in_probability(probs, graph);
  double q = 0.0;
  for (int k = 0; k < graph.size(); ++k) {
    if (probs[k] == 0.0) continue;
    const double denom = mu + in[k];
    if (denom <= 0.0) throw ContractViolation("q_value: positive probability with zero denominator");
    q += probs[k] / denom;
  }
  return q;
}

namespace {

struct MisSearch {
  std::vector<std::uint32_t> nbr;
  int best = 0;
  std::uint32_t best_set = 0;

  void run(std::uint32_t cand, int cur, std::uint32_t set) {
    if (cur + std::popcount(cand) <= best) return;
    int pick = -1;
    int pick_deg = -1;
    for (std::uint32_t b = cand; b != 0; b &= b - 1) {
      const int v = std::countr_zero(b);
      const int d = std::popcount(nbr[v] & cand);
      if (d > pick_deg) {
        pick = v;
        pick_deg = d;
      }
    }
    if (pick_deg <= 0) {
      // Remaining candidates are pairwise non-adjacent.
      best = cur + std::popcount(cand);
      best_set = set | cand;
      return;
    }
    const std::uint32_t bit = 1u << pick;
    run(cand & ~nbr[pick] & ~bit, cur + 1, set | bit);
    run(cand & ~bit, cur, set);
  }
};

}  // namespace

IndependentSet independence_number(const SideObsGraph& graph) {
  const int n = graph.size();
  if (n > kMaxIndependenceNodes)
    throw ResourceLimit("independence number solver handles at most " + std::to_string(kMaxIndependenceNodes) +
                        " nodes, got " + std::to_string(n));
  MisSearch s;
  s.nbr.assign(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && (graph.has_edge(a, b) || graph.has_edge(b, a))) s.nbr[a] |= 1u << b;
  const std::uint32_t all = n == 0 ? 0u : (n == 32 ? ~0u : (1u << n) - 1u);
  s.run(all, 0, 0);

  IndependentSet out;
  out.size = s.best;
  out.members = ServerSet(s.best_set).members();
  return out;
}

QBounds q_bounds_save_s(std::span<const double> probs, SideObsSet sideobs, double mu, int alpha) {
  if (mu > 1.0) throw ContractViolation("q_bounds_save_s requires mu <= 1");
  if (mu < 0.0) throw ContractViolation("q_bounds_save_s requires mu >= 0");
  const int K = static_cast<int>(probs.size());
  double p_s = 0.0;
  for (int k : sideobs.members()) p_s += probs[k];
  QBounds b;
  b.lower = 1.0 / (1.0 + mu);
  b.upper = alpha + p_s - mu * p_s / 2.0;
  b.coarse = std::min(K, K - sideobs.size() + 1);
  return b;
}

QBounds q_bounds_save_a(AvailabilityMask mask, SideObsSet sideobs, double mu) {
  if (mu < 0.0) throw ContractViolation("q_bounds_save_a requires mu >= 0");
  QBounds b;
  b.lower = 1.0 / (1.0 + mu);
  b.upper = (mask | sideobs).size() - sideobs.size() + (sideobs.empty() ? 0 : 1);
  b.coarse = b.upper;
  return b;
}

}  // namespace save
