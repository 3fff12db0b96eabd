#include "save/experiment.hpp"

#include <chrono>
#include <exception>
#include <memory>
#include <string>

#include <json.hpp>
#include <omp.h>

#include "save/error.hpp"
#include "save/save_a.hpp"
#include "save/save_s.hpp"
#include "save/scenario.hpp"

namespace save {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::save_s: return "save-s";
    case PolicyKind::save_a: return "save-a";
    case PolicyKind::uniform_random: return "uniform-random";
    case PolicyKind::save_s_no_coop: return "save-s-no-coop";
    case PolicyKind::save_a_no_coop: return "save-a-no-coop";
    case PolicyKind::exp3: return "exp3";
  }
  return "save-s";
}

PolicyKind policy_from_string(std::string_view name) {
  for (auto k : {PolicyKind::save_s, PolicyKind::save_a, PolicyKind::uniform_random, PolicyKind::save_s_no_coop,
                 PolicyKind::save_a_no_coop, PolicyKind::exp3})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

bool PolicySpec::uses_sideobs() const {
  return coop && (kind == PolicyKind::save_s || kind == PolicyKind::save_a);
}

AlgorithmKind PolicySpec::algorithm() const {
  return (kind == PolicyKind::save_a || kind == PolicyKind::save_a_no_coop) ? AlgorithmKind::save_a
                                                                             : AlgorithmKind::save_s;
}

namespace {

struct DeviceTrack {
  std::vector<SlotRecord> history;
  std::vector<double> q;
  std::vector<int> sideobs_sizes;
  std::vector<AvailabilityMask> masks;
  std::vector<SideObsSet> sideobs;
  long clipped = 0;
  long entries = 0;
};

// Uniform play over the available servers.
std::vector<double> uniform_over(AvailabilityMask mask, int K) {
  std::vector<double> p(K, 0.0);
  for (int k : mask.members()) p[k] = 1.0 / mask.size();
  return p;
}

}  // namespace

RunResult simulate_run(const ScenarioConfig& config, const Trace* trace, const PolicySpec& spec,
                       std::uint64_t master_seed, int run_index) {
  const std::uint64_t run_seed = derive_seed(master_seed, static_cast<std::uint64_t>(run_index));
  Environment env(config, derive_seed(run_seed, 0), trace);
  Rng policy_rng(derive_seed(run_seed, 1));

  const int K = env.num_servers();
  const int J = env.num_devices();
  const int T = env.horizon();
  Schedule schedule{spec.schedule, T, spec.kind != PolicyKind::exp3};

  std::vector<SaveSPolicy> s_learners;
  std::vector<SaveAPolicy> a_learners;
  const bool is_list = spec.algorithm() == AlgorithmKind::save_a;
  if (spec.kind != PolicyKind::uniform_random) {
    if (is_list) {
      auto table = std::make_shared<const ListTable>(K);
      for (int j = 0; j < J; ++j) a_learners.emplace_back(table, schedule);
    } else {
      for (int j = 0; j < J; ++j) s_learners.emplace_back(K, schedule);
    }
  }

  RunResult result;
  std::vector<DeviceTrack> tracks(J);
  for (auto& tr : tracks) tr.history.reserve(T);

  std::vector<SaveSSelection> s_sel(J);
  std::vector<SaveASelection> a_sel(J);
  std::vector<std::vector<double>> play(J);
  std::vector<int> actions(J);

  for (int t = 1; t <= T; ++t) {
    const SlotDraw draw = env.next();
    result.resamples += draw.resamples;
    result.negated_tasks += draw.negated_tasks;

    // Every device selects before anything is shared.
    for (int j = 0; j < J; ++j) {
      const double u = policy_rng.uniform();
      const auto mask = draw.masks[j];
      if (spec.kind == PolicyKind::uniform_random) {
        play[j] = uniform_over(mask, K);
        actions[j] = sample_index(play[j], u);
      } else if (is_list) {
        a_sel[j] = a_learners[j].select(mask, u);
        play[j] = a_sel[j].play_probs;
        actions[j] = a_sel[j].action;
      } else {
        s_sel[j] = s_learners[j].select(mask, u);
        result.fallbacks += s_sel[j].fallback;
        play[j] = s_sel[j].probs;
        actions[j] = s_sel[j].action;
      }
    }

    const auto shared = env.side_observations(draw, actions);
    for (int j = 0; j < J; ++j) {
      const auto mask = draw.masks[j];
      const SideObsSet sideobs = spec.uses_sideobs() ? shared[j] : SideObsSet{};
      const auto& risks = draw.risks[j].r;
      ServerSet revealed = sideobs;
      revealed.insert(actions[j]);
      const auto observed = observe(risks, revealed);

      double q = 0.0;
      if (spec.kind == PolicyKind::uniform_random) {
        q = q_value(play[j], build_server_graph(mask, sideobs, K), 0.0);
      } else if (is_list) {
        q = a_learners[j].update(a_sel[j], mask, sideobs, observed).q;
      } else {
        q = s_learners[j].update(s_sel[j], mask, sideobs, observed).q;
      }

      auto& tr = tracks[j];
      tr.history.push_back(SlotRecord{play[j], risks, mask, actions[j]});
      tr.q.push_back(q);
      tr.sideobs_sizes.push_back(sideobs.size());
      tr.masks.push_back(mask);
      tr.sideobs.push_back(sideobs);
      tr.clipped += draw.risks[j].clipped;
      tr.entries += K;
    }
  }

  for (int j = 0; j < J; ++j) {
    auto& tr = tracks[j];
    const auto best = best_server_list(cumulative_risks(tr.history));
    RegretReport rep = regret_series(tr.history, best);
    rep.q = tr.q;
    if (spec.kind != PolicyKind::uniform_random) {
      auto b = bound_series(spec.schedule, K, T, tr.q, spec.algorithm());
      rep.bound = std::move(b.values);
      if (spec.schedule == ScheduleKind::adaptive && b.delta_warning) result.delta_warning = true;
    }
    rep.lambda = cooperation_value(tr.q, K);
    rep.lambda_bound = spec.algorithm() == AlgorithmKind::save_s
                           ? cooperation_bound_save_s(tr.sideobs_sizes, K)
                           : cooperation_bound_save_a(tr.masks, tr.sideobs, K);
    rep.clip_fraction = tr.entries > 0 ? static_cast<double>(tr.clipped) / tr.entries : 0.0;
    result.clipped += tr.clipped;
    result.risk_entries += tr.entries;
    result.devices.push_back(std::move(rep));
  }
  return result;
}

std::vector<RunResult> run_ensemble_serial(const ScenarioConfig& config, const Trace* trace,
                                           const PolicySpec& policy, std::uint64_t master_seed, int runs) {
  std::vector<RunResult> out;
  out.reserve(runs);
  for (int r = 0; r < runs; ++r) out.push_back(simulate_run(config, trace, policy, master_seed, r));
  return out;
}

std::vector<RunResult> run_ensemble(const ScenarioConfig& config, const Trace* trace, const PolicySpec& policy,
                                    std::uint64_t master_seed, int runs, int workers) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  std::vector<RunResult> out(runs);
  std::vector<std::exception_ptr> errors(runs);

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (int r = 0; r < runs; ++r) {
    try {
      out[r] = simulate_run(config, trace, policy, master_seed, r);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

RegretReport network_report(const RunResult& run) {
  if (run.devices.empty()) throw InputError("run has no devices");
  const double J = static_cast<double>(run.devices.size());
  RegretReport net = run.devices.front();
  if (run.devices.size() == 1) return net;

  const int T = net.horizon();
  auto average = [&](std::vector<double> RegretReport::*field) {
    std::vector<double> acc(T, 0.0);
    for (const auto& d : run.devices)
      for (int t = 0; t < T && t < static_cast<int>((d.*field).size()); ++t) acc[t] += (d.*field)[t] / J;
    return acc;
  };
  net.pseudo_risk = average(&RegretReport::pseudo_risk);
  net.realized_risk = average(&RegretReport::realized_risk);
  net.benchmark_risk = average(&RegretReport::benchmark_risk);
  net.cum_pseudo_regret = average(&RegretReport::cum_pseudo_regret);
  net.cum_realized_regret = average(&RegretReport::cum_realized_regret);
  net.q = average(&RegretReport::q);
  if (!net.bound.empty()) net.bound = average(&RegretReport::bound);
  net.lambda = 0.0;
  net.lambda_bound = 0.0;
  net.clip_fraction = 0.0;
  for (const auto& d : run.devices) {
    net.lambda += d.lambda / J;
    net.lambda_bound += d.lambda_bound / J;
    net.clip_fraction += d.clip_fraction / J;
  }
  return net;
}

ExperimentSummary summarize(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw InputError("summarize: no runs");
  ExperimentSummary s;
  std::vector<RegretReport> nets;
  nets.reserve(runs.size());
  long clipped = 0, entries = 0;
  for (const auto& r : runs) {
    nets.push_back(network_report(r));
    s.resamples += r.resamples;
    s.negated_tasks += r.negated_tasks;
    s.fallbacks += r.fallbacks;
    s.delta_warnings += r.delta_warning;
    clipped += r.clipped;
    entries += r.risk_entries;
  }
  s.clip_fraction = entries > 0 ? static_cast<double>(clipped) / entries : 0.0;
  s.network = aggregate(nets);

  const std::size_t J = runs.front().devices.size();
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<RegretReport> per;
    per.reserve(runs.size());
    for (const auto& r : runs) per.push_back(r.devices.at(j));
    s.devices.push_back(aggregate(per));
  }
  return s;
}

RunManifest manifest_from_json(std::string_view text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.scenario = j.at("scenario").get<std::string>();
    m.policy = policy_from_string(j.at("policy").get<std::string>());
    m.schedule = schedule_from_string(j.value("schedule", std::string("fixed")));
    const auto coop = j.value("coop", std::string("on"));
    if (coop != "on" && coop != "off") throw ConfigError("coop must be 'on' or 'off'");
    m.coop = coop == "on";
    m.runs = j.value("runs", 1);
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trace")) m.trace = j.at("trace").get<std::string>();
    m.out_dir = j.value("out", std::string{});
    m.workers = j.value("workers", 1);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest JSON: ") + e.what());
  }
  if (m.runs < 1) throw ConfigError("runs must be >= 1");
  return m;
}

ExperimentResult run_experiment(const RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  if (manifest.runs < 1) throw ConfigError("runs must be >= 1");

  ExperimentResult res;
  res.manifest = manifest;
  res.scenario = load_scenario(manifest.scenario);

  std::optional<Trace> trace;
  if (manifest.trace) trace = ingest_trace(*manifest.trace);

  const int K = trace ? trace->num_servers : res.scenario.num_servers;
  const PolicySpec spec{manifest.policy, manifest.schedule, manifest.coop};
  if (spec.algorithm() == AlgorithmKind::save_a && K > kMaxListServers)
    throw ResourceLimit("server-list space needs K <= " + std::to_string(kMaxListServers) + ", got K=" +
                        std::to_string(K));

  const std::uint64_t seed = manifest.seed.value_or(res.scenario.seed);
  const auto runs = run_ensemble(res.scenario, trace ? &*trace : nullptr, spec, seed, manifest.runs,
                                 manifest.workers);
  res.summary = summarize(runs);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!manifest.out_dir.empty()) {
    write_text_file(manifest.out_dir + "/regret.csv", regret_csv(res.summary));
    write_text_file(manifest.out_dir + "/lambda.csv", lambda_csv(res.summary));
    write_text_file(manifest.out_dir + "/meta.json", meta_json(res));
  }
  return res;
}

}  // namespace save
