#include "save/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "save/error.hpp"

namespace save {

ServerSet ServerSet::full(int num_servers) {
  if (num_servers < 0 || num_servers > kMaxServers)
    throw InputError("server count " + std::to_string(num_servers) + " outside [0, 32]");
  if (num_servers == kMaxServers) return ServerSet(~0u);
  return ServerSet((1u << num_servers) - 1u);
}

ServerSet ServerSet::of(std::initializer_list<int> servers) {
  ServerSet s;
  for (int k : servers) s.insert(k);
  return s;
}

void ServerSet::insert(int k) {
  if (k < 0 || k >= kMaxServers) throw InputError("server index " + std::to_string(k) + " out of range");
  bits_ |= 1u << k;
}

std::vector<int> ServerSet::members() const {
  std::vector<int> out;
  out.reserve(size());
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

RiskVector compute_risk(const TaskSpec& task, const RiskSample& sample) {
  if (sample.gamma1.size() != sample.gamma2.size())
    throw InputError("gamma1 has " + std::to_string(sample.gamma1.size()) + " entries but gamma2 has " +
                     std::to_string(sample.gamma2.size()));
  if (!(task.rho >= 0.0 && task.rho <= 1.0)) throw InputError("rho must lie in [0,1]");
  if (!(task.c >= 0.0) || !(task.s >= 0.0)) throw InputError("task c and s must be non-negative");

  RiskVector out;
  out.r.resize(sample.gamma1.size());
  for (std::size_t k = 0; k < out.r.size(); ++k) {
    double v = task.rho * task.c * sample.gamma1[k] + (1.0 - task.rho) * task.s * sample.gamma2[k];
    if (v > 1.0 || v < 0.0) {
      v = std::clamp(v, 0.0, 1.0);
      ++out.clipped;
    }
    out.r[k] = v;
  }
  return out;
}

ServerList::ServerList(std::vector<int> order) : order_(std::move(order)) {
  std::vector<char> seen(order_.size(), 0);
  for (int k : order_) {
    if (k < 0 || k >= static_cast<int>(order_.size()) || seen[k])
      throw InputError("server list is not a permutation");
    seen[k] = 1;
  }
}

int phi_map(const ServerList& list, AvailabilityMask mask) {
  if (mask.empty()) throw ContractViolation("phi_map: availability mask is empty");
  for (int k : list.order())
    if (mask.contains(k)) return k;
  throw ContractViolation("phi_map: mask contains no server of the list");
}

ListTable::ListTable(int num_servers) : k_(num_servers) {
  if (num_servers < 1) throw InputError("list table needs at least one server");
  if (num_servers > kMaxListServers)
    throw ResourceLimit("server-list space needs K <= " + std::to_string(kMaxListServers) + ", got K=" +
                        std::to_string(num_servers));
  count_ = 1;
  for (int i = 2; i <= k_; ++i) count_ *= i;

  std::vector<std::uint8_t> cur(k_);
  std::iota(cur.begin(), cur.end(), std::uint8_t{0});
  perms_.reserve(static_cast<std::size_t>(count_) * k_);
  do {
    perms_.insert(perms_.end(), cur.begin(), cur.end());
  } while (std::next_permutation(cur.begin(), cur.end()));
}

ServerList ListTable::server_list(int i) const {
  auto l = list(i);
  return ServerList(std::vector<int>(l.begin(), l.end()));
}

int ListTable::rank(const ServerList& list) const {
  if (list.size() != k_) throw InputError("list length does not match table");
  // Lehmer code: digits are counts of smaller elements to the right.
  int rank = 0;
  for (int i = 0; i < k_; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < k_; ++j)
      if (list[j] < list[i]) ++smaller;
    rank = rank * (k_ - i) + smaller;
  }
  return rank;
}

std::vector<int> ListTable::heads(AvailabilityMask mask) const {
  std::vector<int> out(count_);
  for (int i = 0; i < count_; ++i) out[i] = first_available(list(i), mask);
  return out;
}

std::vector<double> GammaMatrix::apply(std::span<const double> r) const {
  std::vector<double> out(rows, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k)
      if (at(i, k)) out[i] += r[k];
  return out;
}

std::vector<double> GammaMatrix::left_apply(std::span<const double> q) const {
  std::vector<double> out(cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k)
      if (at(i, k)) out[k] += q[i];
  return out;
}

GammaMatrix gamma_matrix(const ListTable& table, AvailabilityMask mask) {
  if (mask.empty()) throw ContractViolation("gamma_matrix: availability mask is empty");
  GammaMatrix g;
  g.rows = table.size();
  g.cols = table.num_servers();
  g.entries.assign(static_cast<std::size_t>(g.rows) * g.cols, 0);
  auto heads = table.heads(mask);
  for (int i = 0; i < g.rows; ++i) {
    if (heads[i] < 0) throw ContractViolation("gamma_matrix: mask has no server below K");
    g.entries[static_cast<std::size_t>(i) * g.cols + heads[i]] = 1;
  }
  return g;
}

GammaMatrix gamma_matrix(AvailabilityMask mask, int num_servers) {
  return gamma_matrix(ListTable(num_servers), mask);
}

ServerList best_server_list(std::span<const double> cumulative_risks) {
  for (double v : cumulative_risks)
    if (!std::isfinite(v)) throw InputError("best_server_list: non-finite cumulative risk");
  std::vector<int> order(cumulative_risks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cumulative_risks[a] < cumulative_risks[b]; });
  return ServerList(std::move(order));
}

double log_factorial(int n) {
  double acc = 0.0;
  for (int i = 2; i <= n; ++i) acc += std::log(static_cast<double>(i));
  return acc;
}

}  // namespace save
