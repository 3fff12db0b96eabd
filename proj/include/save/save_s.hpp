#pragma once

#include <optional>
#include <span>
#include <vector>

#include "save/core.hpp"
#include "save/graphs.hpp"
#include "save/schedule.hpp"

namespace save {

/// Risk observations for one slot; engaged only where the device saw a value.
using Observations = std::vector<std::optional<double>>;

/// Reveals `risks` on `revealed` and nothing else.
Observations observe(std::span<const double> risks, ServerSet revealed);

struct SaveSState {
  std::vector<double> cum_estimate;  // R̂
  double q_sum = 0.0;                // Σ Q over completed slots
  int slot = 0;                      // completed slots
  Schedule schedule;
};

SaveSState make_save_s_state(int num_servers, Schedule schedule);

/// Stepsizes for the upcoming slot (state.slot + 1), ln K action space.
StepSizes stepsizes(const SaveSState& state);

/// w(k) = exp(-η (R̂(k) - min R̂)).
std::vector<double> weights(std::span<const double> cum_estimate, double eta);

struct Distribution {
  std::vector<double> p;
  bool fallback = false;  // masked weights underflowed; uniform over mask used
};

/// Weights restricted to the mask and normalized.
Distribution selection_probs(std::span<const double> weights, AvailabilityMask mask);

/// r̂(k) = r(k) 1(k ∈ {a} ∪ S) / (μ + Σ_{(m,k)∈G} p(m)). Throws
/// ContractViolation when an observation needed by the estimate is absent.
std::vector<double> estimate(const Observations& observed, int action, SideObsSet sideobs,
                             std::span<const double> probs, const SideObsGraph& graph, double mu);

struct SaveSSelection {
  std::vector<double> probs;
  int action = -1;
  StepSizes steps;
  bool fallback = false;
};

struct SaveSUpdate {
  double q = 0.0;
  std::vector<double> estimate;
};

/// One SAVE-S learner. A slot is select() then update(): availability is
/// known before selection and side observations only after it, so several
/// devices can all select before any sharing happens.
class SaveSPolicy {
 public:
  SaveSPolicy(int num_servers, Schedule schedule);

  const SaveSState& state() const { return state_; }
  int num_servers() const { return static_cast<int>(state_.cum_estimate.size()); }

  /// `u` is a uniform [0,1) draw consumed by inverse-CDF sampling.
  SaveSSelection select(AvailabilityMask mask, double u) const;

  /// Observations must cover {action} ∪ sideobs.
  SaveSUpdate update(const SaveSSelection& selection, AvailabilityMask mask, SideObsSet sideobs,
                     const Observations& observed);

 private:
  SaveSState state_;
};

}  // namespace save
