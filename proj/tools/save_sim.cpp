// save_sim: Monte Carlo harness for the SAVE-S / SAVE-A server-selection
// policies.
//
//   save_sim --scenario synthetic_stochastic --policy save-s --schedule fixed \
//            --runs 200 --seed 7 --out results/
//   save_sim compare --manifest a.json --manifest b.json --out combined.csv
//   save_sim scenario synthetic_adversarial > adv.json
//
// Exit codes: 0 success, 2 usage error, 3 config error, 4 resource cap.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "save/error.hpp"
#include "save/experiment.hpp"
#include "save/scenario.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitResource = 4;

bool scenario_exists(const std::string& id_or_path) {
  for (const auto& id : save::preset_ids())
    if (id == id_or_path) return true;
  return std::filesystem::exists(id_or_path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw save::ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security-aware edge server selection under jamming: Monte Carlo harness"};
  app.require_subcommand(0, 1);

  std::vector<std::string> policy_names;
  for (auto k : {save::PolicyKind::save_s, save::PolicyKind::save_a, save::PolicyKind::uniform_random,
                 save::PolicyKind::save_s_no_coop, save::PolicyKind::save_a_no_coop, save::PolicyKind::exp3})
    policy_names.emplace_back(save::to_string(k));

  std::string scenario = "synthetic_stochastic";
  std::string policy = "save-s";
  std::string schedule = "fixed";
  std::string coop = "on";
  int runs = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string trace;
  int workers = 0;

  app.add_option("--scenario", scenario, "Preset id or scenario JSON path");
  app.add_option("--policy", policy, "Policy")->check(CLI::IsMember(policy_names));
  app.add_option("--schedule", schedule, "Stepsize schedule")
      ->check(CLI::IsMember({"fixed", "diminishing", "adaptive"}));
  app.add_option("--coop", coop, "Use side observations")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--runs", runs, "Monte Carlo runs")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (default: scenario seed)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--trace", trace, "Risk trace CSV replacing the synthetic generator");
  app.add_option("--workers", workers, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);

  auto* cmp = app.add_subcommand("compare", "Run several manifests and emit one long-format CSV");
  std::vector<std::string> manifests;
  std::string cmp_out;
  cmp->add_option("--manifest", manifests, "Manifest JSON file (repeatable)");
  cmp->add_option("--out", cmp_out, "Combined CSV path (default: stdout)");

  auto* show = app.add_subcommand("scenario", "Print a preset scenario as JSON");
  std::string show_id;
  show->add_option("id", show_id, "Preset id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  const int default_workers = workers > 0 ? workers : omp_get_max_threads();

  try {
    if (*show) {
      std::cout << save::scenario_to_json(save::preset_scenario(show_id));
      return 0;
    }

    if (*cmp) {
      if (manifests.empty()) {
        std::cerr << "compare: at least one --manifest is required\n";
        return kExitUsage;
      }
      std::vector<save::ExperimentResult> results;
      for (const auto& path : manifests) {
        auto m = save::manifest_from_json(read_file(path));
        if (!scenario_exists(m.scenario)) {
          std::cerr << path << ": unknown scenario '" << m.scenario << "'\n";
          return kExitUsage;
        }
        m.out_dir.clear();
        if (m.workers < 1) m.workers = default_workers;
        results.push_back(save::run_experiment(m));
      }
      const auto csv = save::compare_csv(results);
      if (cmp_out.empty()) std::cout << csv;
      else save::write_text_file(cmp_out, csv);
      return 0;
    }

    if (!scenario_exists(scenario)) {
      std::cerr << "unknown scenario '" << scenario << "'\n";
      return kExitUsage;
    }
    save::RunManifest m;
    m.scenario = scenario;
    m.policy = save::policy_from_string(policy);
    m.schedule = save::schedule_from_string(schedule);
    m.coop = coop == "on";
    m.runs = runs;
    if (seed_opt->count() > 0) m.seed = seed;
    m.out_dir = out_dir;
    if (!trace.empty()) m.trace = trace;
    m.workers = default_workers;

    const auto res = save::run_experiment(m);
    const auto& net = res.summary.network;
    std::cerr << "runs=" << net.runs << " T=" << net.mean.size()
              << " terminal_regret=" << (net.mean.empty() ? 0.0 : net.mean.back())
              << " lambda=" << net.mean_lambda << " clip_fraction=" << res.summary.clip_fraction << "\n";
    if (out_dir.empty()) std::cout << save::regret_csv(res.summary);
    return 0;
  } catch (const save::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const save::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
