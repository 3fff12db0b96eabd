#include "save/save_a.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "save/error.hpp"

namespace save {

StepSizes stepsizes_a(const SaveAState& state, int num_servers) {
  return compute_stepsizes(state.schedule, state.slot + 1, num_servers, log_factorial(num_servers), state.q_sum);
}

std::vector<double> list_probs(std::span<const double> cum_estimate, double eta) {
  auto q = weights(cum_estimate, eta);
  double total = 0.0;
  for (double w : q) total += w;
  for (double& w : q) w /= total;  // the minimum entry has weight 1, so total >= 1
  return q;
}

std::vector<double> play_probabilities(const ListTable& table, std::span<const double> q, AvailabilityMask mask) {
  if (static_cast<int>(q.size()) != table.size()) throw InputError("list distribution has the wrong length");
  std::vector<double> pi(table.num_servers(), 0.0);
  for (int i = 0; i < table.size(); ++i) {
    const int s = first_available(table.list(i), mask);
    if (s < 0) throw ContractViolation("availability mask is empty");
    pi[s] += q[i];
  }
  return pi;
}

std::vector<double> estimate_a(const ListTable& table, const Observations& observed, int action,
                               AvailabilityMask mask, SideObsSet sideobs, std::span<const double> q, double mu) {
  const int n = table.size();
  if (static_cast<int>(observed.size()) != table.num_servers()) throw InputError("observations have the wrong length");
  const auto pi = play_probabilities(table, q, mask);
  const AvailabilityMask virt = mask | sideobs;

  // Per-server estimate; every list inherits the one of its virtual head.
  std::vector<double> per_server(table.num_servers(), 0.0);
  auto need = [&](int s) {
    if (!observed[s]) throw ContractViolation("estimate_a: missing observation for server " + std::to_string(s + 1));
    return *observed[s];
  };
  for (int s : sideobs.members()) per_server[s] = need(s) / (mu + 1.0);
  if (!sideobs.contains(action)) {
    const double denom = mu + pi[action];
    if (denom <= 0.0) throw ContractViolation("estimate_a: played server had zero probability");
    per_server[action] = need(action) / denom;
  }

  std::vector<double> est(n);
  for (int i = 0; i < n; ++i) est[i] = per_server[first_available(table.list(i), virt)];
  return est;
}

double q_value_lists(const ListTable& table, std::span<const double> q, AvailabilityMask mask, SideObsSet sideobs,
                     double mu) {
  const auto pi = play_probabilities(table, q, mask);
  const AvailabilityMask virt = mask | sideobs;
  double total = 0.0;
  for (int i = 0; i < table.size(); ++i) {
    if (q[i] == 0.0) continue;
    const int s = first_available(table.list(i), virt);
    // s ∉ S forces s ∈ mask, where the actual and virtual heads coincide.
    const double in = sideobs.contains(s) ? 1.0 : pi[s];
    total += q[i] / (mu + in);
  }
  return total;
}

std::vector<double> lift_server_distribution(const ListTable& table, std::span<const double> p,
                                             AvailabilityMask mask) {
  if (static_cast<int>(p.size()) != table.num_servers()) throw InputError("server distribution has the wrong length");
  const auto heads = table.heads(mask);
  std::vector<int> block(table.num_servers(), 0);
  for (int h : heads) {
    if (h < 0) throw ContractViolation("availability mask is empty");
    ++block[h];
  }
  for (int s = 0; s < table.num_servers(); ++s)
    if (p[s] > 0.0 && !mask.contains(s)) throw ContractViolation("server distribution puts mass outside the mask");
  std::vector<double> q(table.size());
  for (int i = 0; i < table.size(); ++i) q[i] = p[heads[i]] / block[heads[i]];
  return q;
}

SaveAPolicy::SaveAPolicy(int num_servers, Schedule schedule)
    : SaveAPolicy(std::make_shared<const ListTable>(num_servers), schedule) {}

SaveAPolicy::SaveAPolicy(std::shared_ptr<const ListTable> table, Schedule schedule) : table_(std::move(table)) {
  state_.cum_estimate.assign(table_->size(), 0.0);
  state_.schedule = schedule;
}

SaveASelection SaveAPolicy::select(AvailabilityMask mask, double u) const {
  if (mask.empty()) throw ContractViolation("SAVE-A: availability mask is empty");
  SaveASelection sel;
  sel.steps = stepsizes_a(state_, num_servers());
  sel.q = list_probs(state_.cum_estimate, sel.steps.eta);
  sel.play_probs = play_probabilities(*table_, sel.q, mask);
  sel.list = sample_index(sel.q, u);
  sel.action = first_available(table_->list(sel.list), mask);
  return sel;
}

SaveAUpdate SaveAPolicy::update(const SaveASelection& selection, AvailabilityMask mask, SideObsSet sideobs,
                                const Observations& observed) {
  SaveAUpdate up;
  up.estimate = estimate_a(*table_, observed, selection.action, mask, sideobs, selection.q, selection.steps.mu);
  up.q = q_value_lists(*table_, selection.q, mask, sideobs, selection.steps.mu);
  for (int i = 0; i < table_->size(); ++i) state_.cum_estimate[i] += up.estimate[i];
  state_.q_sum += up.q;
  ++state_.slot;
  return up;
}

}  // namespace save
