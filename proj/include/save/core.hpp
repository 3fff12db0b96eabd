#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace save {

/// Largest server count a ServerSet can hold.
inline constexpr int kMaxServers = 32;
/// Largest server count for which the K! server-list space is materialized.
inline constexpr int kMaxListServers = 8;

/// Set of 0-based server indices stored as a bitmask.
class ServerSet {
 public:
  constexpr ServerSet() = default;
  constexpr explicit ServerSet(std::uint32_t bits) : bits_(bits) {}

  static ServerSet full(int num_servers);
  static ServerSet of(std::initializer_list<int> servers);

  constexpr bool contains(int k) const { return (bits_ >> k) & 1u; }
  void insert(int k);
  constexpr void erase(int k) { bits_ &= ~(1u << k); }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint32_t bits() const { return bits_; }

  /// Members in ascending order.
  std::vector<int> members() const;

  constexpr ServerSet operator|(ServerSet o) const { return ServerSet(bits_ | o.bits_); }
  constexpr ServerSet operator&(ServerSet o) const { return ServerSet(bits_ & o.bits_); }
  constexpr ServerSet without(ServerSet o) const { return ServerSet(bits_ & ~o.bits_); }
  constexpr bool operator==(const ServerSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Servers a device can reach this slot (K_t).
using AvailabilityMask = ServerSet;
/// Servers whose risk reaches a device through cooperation (S_t).
using SideObsSet = ServerSet;

struct TaskSpec {
  double c = 0.0;    // compute requirement
  double s = 0.0;    // task size
  double rho = 0.0;  // weight on computing risk vs privacy risk, in [0,1]
};

/// Per-slot unit risks shared by all devices.
struct RiskSample {
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  int slot = 1;
};

/// Per-server security risk of one device at one slot, clipped to [0,1].
struct RiskVector {
  std::vector<double> r;
  int clipped = 0;  // entries that needed clipping
};

/// Security risk of offloading `task` to each server, clipped into [0,1].
/// Throws InputError on mismatched gamma lengths or an invalid task.
RiskVector compute_risk(const TaskSpec& task, const RiskSample& sample);

/// A ranking of all servers; order[0] is the most preferred.
class ServerList {
 public:
  /// Throws InputError unless `order` is a permutation of 0..n-1.
  explicit ServerList(std::vector<int> order);

  int size() const { return static_cast<int>(order_.size()); }
  int operator[](int rank) const { return order_[rank]; }
  const std::vector<int>& order() const { return order_; }
  bool operator==(const ServerList&) const = default;

 private:
  std::vector<int> order_;
};

/// Highest-ranked server of `order` that is in `mask`; -1 if none.
inline int first_available(std::span<const std::uint8_t> order, AvailabilityMask mask) {
  for (auto k : order)
    if (mask.contains(k)) return k;
  return -1;
}

/// Highest-ranked available server. Throws ContractViolation on an empty
/// mask or one with no server from the list.
int phi_map(const ServerList& list, AvailabilityMask mask);

/// All K! server lists in lexicographic order, stored flat.
class ListTable {
 public:
  /// Throws ResourceLimit when num_servers exceeds kMaxListServers.
  explicit ListTable(int num_servers);

  int num_servers() const { return k_; }
  int size() const { return count_; }
  std::span<const std::uint8_t> list(int i) const {
    return {perms_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)};
  }
  ServerList server_list(int i) const;
  /// Lexicographic rank of a permutation (inverse of list()).
  int rank(const ServerList& list) const;

  /// Φ_i(mask) for every list i.
  std::vector<int> heads(AvailabilityMask mask) const;

 private:
  int k_;
  int count_;
  std::vector<std::uint8_t> perms_;
};

/// Dense K! x K 0/1 matrix with entry (i,k) = 1 iff Φ_i(mask) = k.
struct GammaMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> entries;

  std::uint8_t at(int i, int k) const { return entries[static_cast<std::size_t>(i) * cols + k]; }
  /// Γ r
  std::vector<double> apply(std::span<const double> r) const;
  /// qᵀ Γ
  std::vector<double> left_apply(std::span<const double> q) const;
};

GammaMatrix gamma_matrix(const ListTable& table, AvailabilityMask mask);
/// Convenience overload; enforces the permutation cap.
GammaMatrix gamma_matrix(AvailabilityMask mask, int num_servers);

/// Servers sorted by ascending cumulative risk, ties by ascending index.
/// Throws InputError on non-finite entries.
ServerList best_server_list(std::span<const double> cumulative_risks);

/// ln(n!) as a sum of logs.
double log_factorial(int n);

}  // namespace save
