#include "save/save_s.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "save/error.hpp"

namespace save {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::fixed: return "fixed";
    case ScheduleKind::diminishing: return "diminishing";
    case ScheduleKind::adaptive: return "adaptive";
  }
  return "fixed";
}

ScheduleKind schedule_from_string(std::string_view name) {
  if (name == "fixed") return ScheduleKind::fixed;
  if (name == "diminishing") return ScheduleKind::diminishing;
  if (name == "adaptive") return ScheduleKind::adaptive;
  throw ConfigError("unknown schedule '" + std::string(name) + "'");
}

StepSizes compute_stepsizes(const Schedule& schedule, int t, int num_servers, double log_arms,
                            double past_q_sum) {
  if (t < 1) throw ContractViolation("stepsizes: slot index must be >= 1");
  const double K = num_servers;
  double eta = 0.0;
  switch (schedule.kind) {
    case ScheduleKind::fixed:
      if (schedule.horizon < 1) throw ConfigError("fixed schedule needs the horizon T");
      eta = std::sqrt(log_arms / (K * schedule.horizon));
      break;
    case ScheduleKind::diminishing:
      eta = std::sqrt(log_arms / (2.0 * K * t));
      break;
    case ScheduleKind::adaptive:
      eta = std::sqrt(log_arms / (K + past_q_sum));
      break;
  }
  return {eta, schedule.implicit_exploration ? eta / 2.0 : 0.0};
}

int sample_index(std::span<const double> probs, double u) {
  double cum = 0.0;
  int last = -1;
  for (int k = 0; k < static_cast<int>(probs.size()); ++k) {
    if (probs[k] <= 0.0) continue;
    cum += probs[k];
    last = k;
    if (u < cum) return k;
  }
  if (last < 0) throw ContractViolation("sample_index: distribution has no support");
  return last;  // rounding left cum slightly below 1
}

Observations observe(std::span<const double> risks, ServerSet revealed) {
  Observations obs(risks.size());
  for (int k : revealed.members()) obs.at(k) = risks[k];
  return obs;
}

SaveSState make_save_s_state(int num_servers, Schedule schedule) {
  if (num_servers < 1 || num_servers > kMaxServers) throw InputError("SAVE-S needs 1 <= K <= 32");
  SaveSState s;
  s.cum_estimate.assign(num_servers, 0.0);
  s.schedule = schedule;
  return s;
}

StepSizes stepsizes(const SaveSState& state) {
  const int K = static_cast<int>(state.cum_estimate.size());
  return compute_stepsizes(state.schedule, state.slot + 1, K, std::log(static_cast<double>(K)), state.q_sum);
}

std::vector<double> weights(std::span<const double> cum_estimate, double eta) {
  std::vector<double> w(cum_estimate.size());
  if (w.empty()) return w;
  const double lo = *std::min_element(cum_estimate.begin(), cum_estimate.end());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(-eta * (cum_estimate[k] - lo));
  return w;
}

Distribution selection_probs(std::span<const double> weights, AvailabilityMask mask) {
  if (mask.empty()) throw ContractViolation("selection_probs: availability mask is empty");
  const int K = static_cast<int>(weights.size());
  Distribution d;
  d.p.assign(K, 0.0);
  double total = 0.0;
  for (int k : mask.members()) {
    if (k >= K) throw InputError("availability mask names a server beyond K");
    total += weights[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    d.fallback = true;
    const double u = 1.0 / mask.size();
    for (int k : mask.members()) d.p[k] = u;
    return d;
  }
  for (int k : mask.members()) d.p[k] = weights[k] / total;
  return d;
}

std::vector<double> estimate(const Observations& observed, int action, SideObsSet sideobs,
                             std::span<const double> probs, const SideObsGraph& graph, double mu) {
  const int K = graph.size();
  if (static_cast<int>(observed.size()) != K || static_cast<int>(probs.size()) != K)
    throw InputError("estimate: vector sizes do not match the graph");
  ServerSet revealed = sideobs;
  revealed.insert(action);
  const auto in = in_probability(probs, graph);
  std::vector<double> est(K, 0.0);
  for (int k : revealed.members()) {
    if (!observed[k]) throw ContractViolation("estimate: missing observation for server " + std::to_string(k + 1));
    const double denom = mu + in[k];
    if (denom <= 0.0) throw ContractViolation("estimate: zero denominator for an observed server");
    est[k] = *observed[k] / denom;
  }
  return est;
}

SaveSPolicy::SaveSPolicy(int num_servers, Schedule schedule)
    : state_(make_save_s_state(num_servers, schedule)) {}

SaveSSelection SaveSPolicy::select(AvailabilityMask mask, double u) const {
  SaveSSelection sel;
  sel.steps = stepsizes(state_);
  auto dist = selection_probs(weights(state_.cum_estimate, sel.steps.eta), mask);
  sel.probs = std::move(dist.p);
  sel.fallback = dist.fallback;
  sel.action = sample_index(sel.probs, u);
  return sel;
}

SaveSUpdate SaveSPolicy::update(const SaveSSelection& selection, AvailabilityMask mask, SideObsSet sideobs,
                                const Observations& observed) {
  const int K = num_servers();
  const auto graph = build_server_graph(mask, sideobs, K);
  SaveSUpdate up;
  up.estimate = estimate(observed, selection.action, sideobs, selection.probs, graph, selection.steps.mu);
  up.q = q_value(selection.probs, graph, selection.steps.mu);
  for (int k = 0; k < K; ++k) state_.cum_estimate[k] += up.estimate[k];
  state_.q_sum += up.q;
  ++state_.slot;
  return up;
}

}  // namespace save
