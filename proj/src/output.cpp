#include <filesystem>
#include <fstream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "save/error.hpp"
#include "save/experiment.hpp"
#include "save/scenario.hpp"

namespace save {

namespace {

// Shortest round-trip representation; identical inputs give identical bytes.
std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

std::string regret_csv(const ExperimentSummary& summary) {
  const auto& a = summary.network;
  std::string out = "slot,mean_pseudo_regret,ci_low,ci_high,bound\n";
  for (std::size_t t = 0; t < a.mean.size(); ++t) {
    out += fmt::format("{},{},{},{},{}\n", t + 1, num(a.mean[t]), num(a.ci_low[t]), num(a.ci_high[t]),
                       a.mean_bound.empty() ? std::string{} : num(a.mean_bound[t]));
  }
  return out;
}

std::string lambda_csv(const ExperimentSummary& summary) {
  std::string out = "device,lambda,lambda_bound\n";
  for (std::size_t j = 0; j < summary.devices.size(); ++j)
    out += fmt::format("{},{},{}\n", j + 1, num(summary.devices[j].mean_lambda),
                       num(summary.devices[j].mean_lambda_bound));
  out += fmt::format("network,{},{}\n", num(summary.network.mean_lambda), num(summary.network.mean_lambda_bound));
  return out;
}

std::string meta_json(const ExperimentResult& r) {
  nlohmann::json j;
  j["scenario"] = nlohmann::json::parse(scenario_to_json(r.scenario));
  const auto& m = r.manifest;
  j["manifest"] = {{"scenario", m.scenario},
                   {"policy", std::string(to_string(m.policy))},
                   {"schedule", std::string(to_string(m.schedule))},
                   {"coop", m.coop ? "on" : "off"},
                   {"runs", m.runs},
                   {"seed", m.seed.value_or(r.scenario.seed)},
                   {"workers", m.workers}};
  if (m.trace) j["manifest"]["trace"] = *m.trace;
  const auto& s = r.summary;
  j["clip_fraction"] = s.clip_fraction;
  j["mask_resamples"] = s.resamples;
  j["negated_compute_draws"] = s.negated_tasks;
  j["weight_underflow_fallbacks"] = s.fallbacks;
  j["adaptive_delta_warnings"] = s.delta_warnings;
  j["terminal_mean_regret"] = s.network.mean.empty() ? 0.0 : s.network.mean.back();
  j["mean_lambda"] = s.network.mean_lambda;
  j["mean_average_risk"] = s.network.mean_average_risk;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

std::string compare_csv(const std::vector<ExperimentResult>& results) {
  if (results.empty()) throw InputError("compare: no experiments given");
  const auto T = results.front().summary.network.mean.size();
  for (const auto& r : results)
    if (r.summary.network.mean.size() != T)
      throw InputError("compare: experiments have different horizons");
  std::string out = "slot,policy,schedule,coop,mean,ci_low,ci_high\n";
  for (const auto& r : results) {
    const auto& a = r.summary.network;
    const auto policy = to_string(r.manifest.policy);
    const auto schedule = to_string(r.manifest.schedule);
    const char* coop = r.manifest.coop ? "on" : "off";
    for (std::size_t t = 0; t < T; ++t)
      out += fmt::format("{},{},{},{},{},{},{}\n", t + 1, policy, schedule, coop, num(a.mean[t]), num(a.ci_low[t]),
                         num(a.ci_high[t]));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace save
