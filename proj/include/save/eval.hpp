#pragma once

#include <span>
#include <vector>

#include "save/core.hpp"
#include "save/schedule.hpp"

namespace save {

enum class AlgorithmKind { save_s, save_a };

/// One slot of a device's history as the evaluator sees it.
struct SlotRecord {
  std::vector<double> play_probs;  // p_t, or qᵀΓ(K_t) for list policies
  std::vector<double> risks;       // true r_t over all servers
  AvailabilityMask mask;
  int action = -1;
};

struct RegretReport {
  std::vector<double> pseudo_risk;      // p_tᵀ r_t
  std::vector<double> realized_risk;    // r_t(a_t)
  std::vector<double> benchmark_risk;   // r_t(Φ*(K_t))
  std::vector<double> cum_pseudo_regret;
  std::vector<double> cum_realized_regret;
  std::vector<double> q;                // Q_t
  std::vector<double> bound;            // theoretical bound by slot
  double lambda = 0.0;                  // realized cooperation value
  double lambda_bound = 0.0;            // closed-form upper bound on it
  double clip_fraction = 0.0;
  ServerList best_list{std::vector<int>{}};

  int horizon() const { return static_cast<int>(pseudo_risk.size()); }
};

/// Σ_t r_t over a history, the input of best_server_list.
std::vector<double> cumulative_risks(std::span<const SlotRecord> history);

/// Pseudo and realized regret against the fixed list `best_list`.
RegretReport regret_series(std::span<const SlotRecord> history, const ServerList& best_list);

struct BoundSeries {
  std::vector<double> values;  // bound on cumulative regret at each slot
  double delta = 0.0;          // min_t (K - Q_t), adaptive only
  bool delta_warning = false;  // delta < 0 was observed
};

/// fixed: 2 sqrt(T K ln N); diminishing: 2 sqrt(2 t K ln N);
/// adaptive: 2 sqrt((δ_t + Σ_{τ<=t} Q_τ) ln N) with δ_t = min_{τ<=t}(K - Q_τ).
/// N = K for SAVE-S and K! for SAVE-A.
BoundSeries bound_series(ScheduleKind schedule, int num_servers, int horizon, std::span<const double> q,
                         AlgorithmKind algorithm);

/// Realized λ = sqrt((δ + Σ Q_t) / (T K)).
double cooperation_value(std::span<const double> q, int num_servers);

/// Closed-form bound on λ for SAVE-S: sqrt(1/T + Σ min{K, K+1-|S_t|} / (K T)).
double cooperation_bound_save_s(std::span<const int> sideobs_sizes, int num_servers);
/// Closed-form bound on λ for SAVE-A: sqrt(1/T + Σ(|K_t ∪ S_t| - |S_t| + 1(S_t≠∅)) / (K T)).
double cooperation_bound_save_a(std::span<const AvailabilityMask> masks, std::span<const SideObsSet> sideobs,
                                int num_servers);

struct Lemma3Result {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

/// Σ_t Q_t / (2 sqrt(δ + Σ_{τ<=t} Q_τ)) <= sqrt(δ + Σ_t Q_t) - sqrt(δ).
/// Throws ContractViolation unless every Q_t > 0 and δ > 0.
Lemma3Result lemma3_check(std::span<const double> q, double delta);

struct AggregateReport {
  std::vector<double> mean;     // mean cumulative pseudo-regret by slot
  std::vector<double> ci_low;   // 95% normal band
  std::vector<double> ci_high;
  std::vector<double> mean_bound;
  double mean_lambda = 0.0;
  double mean_lambda_bound = 0.0;
  double mean_clip_fraction = 0.0;
  double mean_average_risk = 0.0;  // mean of Σ_t p_tᵀr_t / T
  int runs = 0;
};

/// Across-run mean and band. Throws InputError on differing horizons or an
/// empty collection.
AggregateReport aggregate(std::span<const RegretReport> runs);

}  // namespace save
