#pragma once

#include <memory>
#include <span>
#include <vector>

#include "save/core.hpp"
#include "save/save_s.hpp"
#include "save/schedule.hpp"

namespace save {

struct SaveAState {
  std::vector<double> cum_estimate;  // R̂ over K! lists, lexicographic order
  double q_sum = 0.0;
  int slot = 0;
  Schedule schedule;
};

/// Stepsizes with ln K! in place of ln K.
StepSizes stepsizes_a(const SaveAState& state, int num_servers);

/// q(k) = w(k) / Σ w, with w = exp(-η (R̂ - min R̂)). Full support.
std::vector<double> list_probs(std::span<const double> cum_estimate, double eta);

/// π(s) = Σ_{i: Φ_i(mask) = s} q(i): chance of playing s.
std::vector<double> play_probabilities(const ListTable& table, std::span<const double> q, AvailabilityMask mask);

/// Estimates for every list. With K̃ = mask ∪ S and s_k = Φ_k(K̃):
/// s_k ∈ S gives r(s_k)/(μ+1); otherwise r(s_k) 1(a = s_k)/(μ + π(s_k)).
std::vector<double> estimate_a(const ListTable& table, const Observations& observed, int action,
                               AvailabilityMask mask, SideObsSet sideobs, std::span<const double> q, double mu);

/// Q over the list graph, aggregated per server in O(K!) instead of walking
/// the (K!)^2 edge set.
double q_value_lists(const ListTable& table, std::span<const double> q, AvailabilityMask mask, SideObsSet sideobs,
                     double mu);

/// A list distribution realizing a server distribution: p(s) spread evenly
/// over the lists that map `mask` to s, so that qᵀΓ(mask) = pᵀ.
std::vector<double> lift_server_distribution(const ListTable& table, std::span<const double> p,
                                             AvailabilityMask mask);

struct SaveASelection {
  std::vector<double> q;
  std::vector<double> play_probs;  // per server, qᵀΓ(mask)
  int list = -1;
  int action = -1;
  StepSizes steps;
};

struct SaveAUpdate {
  double q = 0.0;
  std::vector<double> estimate;
};

/// One SAVE-A learner over all K! server lists (K <= 8).
class SaveAPolicy {
 public:
  SaveAPolicy(int num_servers, Schedule schedule);
  SaveAPolicy(std::shared_ptr<const ListTable> table, Schedule schedule);

  const SaveAState& state() const { return state_; }
  const ListTable& table() const { return *table_; }
  int num_servers() const { return table_->num_servers(); }

  SaveASelection select(AvailabilityMask mask, double u) const;
  SaveAUpdate update(const SaveASelection& selection, AvailabilityMask mask, SideObsSet sideobs,
                     const Observations& observed);

 private:
  std::shared_ptr<const ListTable> table_;
  SaveAState state_;
};

}  // namespace save
