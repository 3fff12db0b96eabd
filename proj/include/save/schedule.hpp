#pragma once

#include <span>
#include <string>
#include <string_view>

namespace save {

enum class ScheduleKind { fixed, diminishing, adaptive };

std::string_view to_string(ScheduleKind kind);
/// Throws ConfigError on an unknown name.
ScheduleKind schedule_from_string(std::string_view name);

struct Schedule {
  ScheduleKind kind = ScheduleKind::fixed;
  int horizon = 0;                   // required by the fixed schedule
  bool implicit_exploration = true;  // μ = η/2; false pins μ = 0
};

struct StepSizes {
  double eta = 0.0;
  double mu = 0.0;
};

/// Stepsizes at slot t >= 1 for a policy over `num_servers` servers whose
/// action space has log-size `log_arms` (ln K or ln K!):
///   fixed        η = sqrt(log_arms / (K T))
///   diminishing  η = sqrt(log_arms / (2 K t))
///   adaptive     η = sqrt(log_arms / (K + Σ_{τ<t} Q_τ))
/// and μ = η/2. Throws ConfigError for a fixed schedule without horizon.
StepSizes compute_stepsizes(const Schedule& schedule, int t, int num_servers, double log_arms,
                            double past_q_sum);

/// Inverse-CDF draw over ascending index; never returns a zero-probability
/// index.
int sample_index(std::span<const double> probs, double u);

}  // namespace save
