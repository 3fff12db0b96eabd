#include "save/env.hpp"

#include <cmath>
#include <string>

#include "save/error.hpp"

namespace save {

namespace {

void check_phases(const std::vector<ProbabilityPhase>& phases, int num_servers, int horizon,
                  const std::string& what) {
  if (phases.empty()) throw ConfigError(what + ": at least one phase is required");
  if (phases.front().start_slot != 1) throw ConfigError(what + ": first phase must start at slot 1");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& ph = phases[i];
    if (i > 0 && ph.start_slot <= phases[i - 1].start_slot)
      throw ConfigError(what + ": phase start slots must be strictly increasing");
    if (ph.start_slot > horizon && horizon > 0)
      throw ConfigError(what + ": phase starts after the horizon");
    if (static_cast<int>(ph.probs.size()) != num_servers)
      throw ConfigError(what + ": phase has " + std::to_string(ph.probs.size()) + " probabilities, expected " +
                        std::to_string(num_servers));
    for (double p : ph.probs)
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(what + ": probability outside [0,1]");
  }
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (c.num_servers < 1 || c.num_servers > kMaxServers)
    throw ConfigError("num_servers must lie in [1, " + std::to_string(kMaxServers) + "]");
  if (c.num_devices < 1) throw ConfigError("num_devices must be >= 1");
  if (c.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (static_cast<int>(c.rho.size()) != c.num_devices)
    throw ConfigError("rho needs one entry per device");
  for (double r : c.rho)
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("rho outside [0,1]");
  if (c.prng != kPrngAlgorithm) throw ConfigError("unsupported prng '" + c.prng + "'");

  switch (c.jammer.kind) {
    case JammerKind::none:
      break;
    case JammerKind::stochastic:
      check_phases(c.jammer.phases, c.num_servers, c.horizon, "jammer");
      if (c.jammer.phases.size() != 1) throw ConfigError("stochastic jammer takes exactly one table");
      break;
    case JammerKind::piecewise:
      check_phases(c.jammer.phases, c.num_servers, c.horizon, "jammer");
      break;
  }
  if (c.jammer.kind != JammerKind::none) {
    for (const auto& ph : c.jammer.phases) {
      bool any = false;
      for (double p : ph.probs) any = any || p > 0.0;
      if (!any) throw ConfigError("jammer table leaves no server reachable");
    }
  }

  switch (c.coop.kind) {
    case CoopKind::none:
      break;
    case CoopKind::per_server:
      check_phases(c.coop.phases, c.num_servers, c.horizon, "cooperation");
      break;
    case CoopKind::links:
      if (static_cast<int>(c.coop.links.size()) != c.num_devices)
        throw ConfigError("link table must be num_devices x num_devices");
      for (const auto& row : c.coop.links) {
        if (static_cast<int>(row.size()) != c.num_devices)
          throw ConfigError("link table must be num_devices x num_devices");
        for (double p : row)
          if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("link probability outside [0,1]");
      }
      break;
  }
}

GeneratedTask task_from_draws(int t, double v, double v2, double x, double rho, bool abs_compute) {
  GeneratedTask g;
  double c = (0.6 + 0.5 * v) * std::cos(2.0 * t);
  if (c < 0.0) {
    g.negated = true;
    c = abs_compute ? -c : 0.0;
  }
  g.task.c = c;
  g.task.s = (0.25 + 0.3 * v2) * x;
  g.task.rho = rho;
  return g;
}

GeneratedTask gen_task(int t, double rho, Rng& rng, bool abs_compute) {
  const double v = rng.uniform();
  const double v2 = rng.uniform();
  const double x = rng.uniform(0.8, 1.2);
  return task_from_draws(t, v, v2, x, rho, abs_compute);
}

RiskSample risks_from_draws(int t, int num_servers, double v1, double v2) {
  RiskSample s;
  s.slot = t;
  s.gamma1.resize(num_servers);
  s.gamma2.resize(num_servers);
  const double st = std::sin(static_cast<double>(t));
  for (int k = 0; k < num_servers; ++k) {
    const double idx = k + 1;
    s.gamma1[k] = (2.0 * idx / 3.0) * (std::abs(st) + 0.8 + std::abs(v1));
    s.gamma2[k] = (idx / 2.0) * (0.5 * st + 0.75 + std::abs(v2));
  }
  return s;
}

RiskSample gen_risks(int t, int num_servers, Rng& rng, bool shared_noise) {
  if (shared_noise) {
    const double v1 = rng.normal(0.0, 1.2);
    const double v2 = rng.normal(0.0, 0.8);
    return risks_from_draws(t, num_servers, v1, v2);
  }
  RiskSample s;
  s.slot = t;
  s.gamma1.resize(num_servers);
  s.gamma2.resize(num_servers);
  for (int k = 0; k < num_servers; ++k) {
    const double v1 = rng.normal(0.0, 1.2);
    const double v2 = rng.normal(0.0, 0.8);
    auto one = risks_from_draws(t, num_servers, v1, v2);
    s.gamma1[k] = one.gamma1[k];
    s.gamma2[k] = one.gamma2[k];
  }
  return s;
}

const ProbabilityPhase& active_phase(std::span<const ProbabilityPhase> phases, int t) {
  if (phases.empty()) throw ConfigError("no probability phases configured");
  const ProbabilityPhase* cur = &phases.front();
  for (const auto& ph : phases)
    if (ph.start_slot <= t) cur = &ph;
  return *cur;
}

MaskDraw gen_availability(int t, const JammerSpec& jammer, int num_devices, int num_servers, Rng& rng) {
  MaskDraw out;
  out.masks.reserve(num_devices);
  if (jammer.kind == JammerKind::none) {
    out.masks.assign(num_devices, ServerSet::full(num_servers));
    return out;
  }
  const auto& probs = active_phase(jammer.phases, t).probs;
  if (static_cast<int>(probs.size()) != num_servers) throw ConfigError("jammer table size does not match K");
  bool any = false;
  for (double p : probs) any = any || p > 0.0;
  if (!any) throw ConfigError("jammer table leaves no server reachable");

  for (int j = 0; j < num_devices; ++j) {
    for (;;) {
      ServerSet mask;
      for (int k = 0; k < num_servers; ++k)
        if (rng.bernoulli(probs[k])) mask.insert(k);
      if (!mask.empty()) {
        out.masks.push_back(mask);
        break;
      }
      ++out.resamples;
    }
  }
  return out;
}

std::vector<SideObsSet> gen_sideobs_table(int t, const CoopSpec& coop, int num_devices, int num_servers,
                                          Rng& rng) {
  std::vector<SideObsSet> out(num_devices);
  if (coop.kind != CoopKind::per_server) return out;
  const auto& probs = active_phase(coop.phases, t).probs;
  if (static_cast<int>(probs.size()) != num_servers)
    throw ConfigError("side-observation table size does not match K");
  for (int j = 0; j < num_devices; ++j)
    for (int k = 0; k < num_servers; ++k)
      if (rng.bernoulli(probs[k])) out[j].insert(k);
  return out;
}

LinkActivation draw_links(const CoopSpec& coop, int num_devices, Rng& rng) {
  LinkActivation la;
  la.num_devices = num_devices;
  la.active.assign(static_cast<std::size_t>(num_devices) * num_devices, 0);
  if (coop.kind != CoopKind::links) return la;
  for (int i = 0; i < num_devices; ++i)
    for (int j = 0; j < num_devices; ++j)
      if (i != j && rng.bernoulli(coop.links[i][j])) la.active[static_cast<std::size_t>(i) * num_devices + j] = 1;
  return la;
}

std::vector<SideObsSet> resolve_links(const LinkActivation& links, std::span<const int> actions) {
  const int J = links.num_devices;
  if (static_cast<int>(actions.size()) != J) throw InputError("one action per device is required");
  std::vector<SideObsSet> out(J);
  for (int j = 0; j < J; ++j) {
    for (int i = 0; i < J; ++i)
      if (i != j && links.at(i, j)) out[j].insert(actions[i]);
    out[j].erase(actions[j]);
  }
  return out;
}

Environment::Environment(const ScenarioConfig& config, std::uint64_t seed, const Trace* trace)
    : config_(config), trace_(trace), rng_(seed) {
  horizon_ = trace ? static_cast<int>(trace->slots.size()) : config.horizon;
  num_servers_ = trace ? trace->num_servers : config.num_servers;
  if (trace && trace->num_servers != config.num_servers && !trace->slots.empty()) {
    // The trace decides K; tables keyed by server must agree with it.
    config_.num_servers = trace->num_servers;
    const bool needs_jam_table = config.jammer.kind != JammerKind::none && !trace->slots.front().mask;
    if (needs_jam_table || config.coop.kind == CoopKind::per_server)
      throw ConfigError("trace has " + std::to_string(trace->num_servers) +
                        " servers but the scenario tables are sized for " + std::to_string(config.num_servers));
  }
}

SlotDraw Environment::next() {
  if (t_ >= horizon_) throw ContractViolation("environment exhausted");
  ++t_;
  SlotDraw d;
  d.slot = t_;
  const int J = config_.num_devices;

  d.tasks.reserve(J);
  for (int j = 0; j < J; ++j) {
    auto g = gen_task(t_, config_.rho[j], rng_, config_.abs_compute);
    d.negated_tasks += g.negated;
    d.tasks.push_back(g.task);
  }

  const TraceSlot* ts = trace_ ? &trace_->slots[t_ - 1] : nullptr;
  d.sample = ts ? ts->sample : gen_risks(t_, num_servers_, rng_, config_.shared_noise);
  d.sample.slot = t_;

  d.risks.reserve(J);
  for (int j = 0; j < J; ++j) d.risks.push_back(compute_risk(d.tasks[j], d.sample));

  if (ts && ts->mask) {
    d.masks.assign(J, *ts->mask);
  } else {
    auto md = gen_availability(t_, config_.jammer, J, num_servers_, rng_);
    d.masks = std::move(md.masks);
    d.resamples = md.resamples;
  }

  if (config_.coop.kind == CoopKind::per_server) {
    d.sideobs = gen_sideobs_table(t_, config_.coop, J, num_servers_, rng_);
  } else {
    d.sideobs.assign(J, SideObsSet{});
  }
  d.links = draw_links(config_.coop, J, rng_);
  return d;
}

std::vector<SideObsSet> Environment::side_observations(const SlotDraw& draw, std::span<const int> actions) const {
  if (config_.coop.kind == CoopKind::links) return resolve_links(draw.links, actions);
  return draw.sideobs;
}

}  // namespace save
