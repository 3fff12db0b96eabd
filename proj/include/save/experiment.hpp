#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "save/env.hpp"
#include "save/eval.hpp"
#include "save/schedule.hpp"

namespace save {

enum class PolicyKind { save_s, save_a, uniform_random, save_s_no_coop, save_a_no_coop, exp3 };

std::string_view to_string(PolicyKind kind);
/// Throws ConfigError on an unknown name.
PolicyKind policy_from_string(std::string_view name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::save_s;
  ScheduleKind schedule = ScheduleKind::fixed;
  bool coop = true;  // off: the learner ignores side observations

  /// Whether side observations reach the learner.
  bool uses_sideobs() const;
  AlgorithmKind algorithm() const;
};

struct RunResult {
  std::vector<RegretReport> devices;
  long resamples = 0;       // all-jammed masks redrawn
  long negated_tasks = 0;   // cos(2t) < 0 folds
  long clipped = 0;         // risk entries clipped into [0,1]
  long risk_entries = 0;
  long fallbacks = 0;       // uniform fallbacks after weight underflow
  bool delta_warning = false;
};

/// One Monte Carlo run. The environment and the policy draw from separate
/// streams derived from (master_seed, run_index), so every policy faces the
/// same scenario realization for a given run index.
RunResult simulate_run(const ScenarioConfig& config, const Trace* trace, const PolicySpec& policy,
                       std::uint64_t master_seed, int run_index);

/// Runs [0, runs) on `workers` OpenMP threads; result i is run i regardless
/// of completion order.
std::vector<RunResult> run_ensemble(const ScenarioConfig& config, const Trace* trace, const PolicySpec& policy,
                                    std::uint64_t master_seed, int runs, int workers);
/// Single-threaded reference for run_ensemble.
std::vector<RunResult> run_ensemble_serial(const ScenarioConfig& config, const Trace* trace,
                                           const PolicySpec& policy, std::uint64_t master_seed, int runs);

/// Device-averaged report of one run (network-level regret and λ).
RegretReport network_report(const RunResult& run);

struct ExperimentSummary {
  AggregateReport network;               // over runs, device-averaged
  std::vector<AggregateReport> devices;  // per device, over runs
  long resamples = 0;
  long negated_tasks = 0;
  long fallbacks = 0;
  double clip_fraction = 0.0;
  int delta_warnings = 0;
};

ExperimentSummary summarize(const std::vector<RunResult>& runs);

struct RunManifest {
  std::string scenario = "synthetic_stochastic";
  PolicyKind policy = PolicyKind::save_s;
  ScheduleKind schedule = ScheduleKind::fixed;
  bool coop = true;
  int runs = 1;
  std::optional<std::uint64_t> seed;  // defaults to the scenario's seed
  std::string out_dir;
  std::optional<std::string> trace;
  int workers = 1;
};

/// Reads a manifest JSON document; throws ConfigError.
RunManifest manifest_from_json(std::string_view text);

struct ExperimentResult {
  ScenarioConfig scenario;
  RunManifest manifest;
  ExperimentSummary summary;
  double wall_seconds = 0.0;
};

/// Loads the scenario (and trace), runs the ensemble, and when out_dir is
/// set writes regret.csv, lambda.csv and meta.json there.
ExperimentResult run_experiment(const RunManifest& manifest);

// ---- output files ---------------------------------------------------------

std::string regret_csv(const ExperimentSummary& summary);
std::string lambda_csv(const ExperimentSummary& summary);
std::string meta_json(const ExperimentResult& result);
/// Long format: slot,policy,schedule,coop,mean,ci_low,ci_high.
/// Throws InputError when horizons differ or the list is empty.
std::string compare_csv(const std::vector<ExperimentResult>& results);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace save
