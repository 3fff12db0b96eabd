#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "save/error.hpp"
#include "save/scenario.hpp"

namespace save {

using nlohmann::json;

namespace {

const char* to_string(JammerKind k) {
  switch (k) {
    case JammerKind::none: return "none";
    case JammerKind::stochastic: return "stochastic";
    case JammerKind::piecewise: return "piecewise";
  }
  return "none";
}

const char* to_string(CoopKind k) {
  switch (k) {
    case CoopKind::none: return "none";
    case CoopKind::per_server: return "per_server";
    case CoopKind::links: return "links";
  }
  return "none";
}

json phases_to_json(const std::vector<ProbabilityPhase>& phases) {
  json arr = json::array();
  for (const auto& ph : phases) arr.push_back({{"start_slot", ph.start_slot}, {"probs", ph.probs}});
  return arr;
}

std::vector<ProbabilityPhase> phases_from_json(const json& j) {
  std::vector<ProbabilityPhase> out;
  for (const auto& e : j) {
    ProbabilityPhase ph;
    ph.start_slot = e.at("start_slot").get<int>();
    ph.probs = e.at("probs").get<std::vector<double>>();
    out.push_back(std::move(ph));
  }
  return out;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["id"] = c.id;
  j["num_servers"] = c.num_servers;
  j["num_devices"] = c.num_devices;
  j["horizon"] = c.horizon;
  j["rho"] = c.rho;
  j["jammer"] = {{"kind", to_string(c.jammer.kind)}, {"phases", phases_to_json(c.jammer.phases)}};
  json coop = {{"kind", to_string(c.coop.kind)}, {"phases", phases_to_json(c.coop.phases)}};
  coop["links"] = c.coop.links;
  j["cooperation"] = coop;
  j["seed"] = c.seed;
  j["prng"] = c.prng;
  j["abs_compute"] = c.abs_compute;
  j["shared_noise"] = c.shared_noise;
  return j.dump(2) + "\n";
}

ScenarioConfig scenario_from_json(std::string_view text) {
  ScenarioConfig c;
  try {
    const json j = json::parse(text);
    c.id = j.value("id", std::string{});
    c.num_servers = j.at("num_servers").get<int>();
    c.num_devices = j.value("num_devices", 1);
    c.horizon = j.at("horizon").get<int>();
    if (j.contains("rho")) {
      const auto& r = j.at("rho");
      if (r.is_number()) c.rho.assign(c.num_devices, r.get<double>());
      else c.rho = r.get<std::vector<double>>();
    } else {
      c.rho.assign(c.num_devices, 0.8);
    }

    c.jammer = {};
    if (j.contains("jammer")) {
      const auto& jm = j.at("jammer");
      const auto kind = jm.at("kind").get<std::string>();
      if (kind == "none") c.jammer.kind = JammerKind::none;
      else if (kind == "stochastic") c.jammer.kind = JammerKind::stochastic;
      else if (kind == "piecewise" || kind == "adversarial") c.jammer.kind = JammerKind::piecewise;
      else throw ConfigError("unknown jammer kind '" + kind + "'");
      if (jm.contains("phases")) c.jammer.phases = phases_from_json(jm.at("phases"));
    }

    c.coop = {};
    if (j.contains("cooperation")) {
      const auto& cp = j.at("cooperation");
      const auto kind = cp.at("kind").get<std::string>();
      if (kind == "none") c.coop.kind = CoopKind::none;
      else if (kind == "per_server") c.coop.kind = CoopKind::per_server;
      else if (kind == "links") c.coop.kind = CoopKind::links;
      else throw ConfigError("unknown cooperation kind '" + kind + "'");
      if (cp.contains("phases")) c.coop.phases = phases_from_json(cp.at("phases"));
      if (cp.contains("links")) c.coop.links = cp.at("links").get<std::vector<std::vector<double>>>();
    }

    c.seed = j.value("seed", std::uint64_t{1});
    c.prng = j.value("prng", std::string(kPrngAlgorithm));
    c.abs_compute = j.value("abs_compute", true);
    c.shared_noise = j.value("shared_noise", true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  validate(c);
  return c;
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"synthetic_nojam", "synthetic_stochastic", "synthetic_adversarial",
                                            "sideobs_table1", "links_table4"};
  return ids;
}

ScenarioConfig preset_scenario(std::string_view id) {
  const std::vector<double> on_left{0.7, 0.8, 0.9, 1.0, 0.6};
  const std::vector<double> on_right{0.3, 1.0, 0.6, 0.5, 0.8};

  ScenarioConfig c;
  c.id = std::string(id);
  c.num_servers = 5;
  c.num_devices = 1;
  c.horizon = 400;
  c.rho = {0.8};
  c.seed = 1;

  if (id == "synthetic_nojam") {
  } else if (id == "synthetic_stochastic") {
    c.jammer = {JammerKind::stochastic, {{1, on_left}}};
  } else if (id == "synthetic_adversarial") {
    c.jammer = {JammerKind::piecewise, {{1, on_left}, {201, on_right}}};
  } else if (id == "sideobs_table1") {
    c.coop.kind = CoopKind::per_server;
    c.coop.phases = {{1, {1.0, 1.0, 0.0, 0.0, 1.0}}, {201, {0.3, 1.0, 0.6, 0.5, 0.0}}};
  } else if (id == "links_table4") {
    c.num_servers = 3;
    c.num_devices = 3;
    c.rho = {0.8, 0.8, 0.8};
    c.jammer = {JammerKind::stochastic, {{1, {0.7, 0.8, 0.9}}}};
    c.coop.kind = CoopKind::links;
    // links[i][j]: device i shares with device j.
    c.coop.links = {{0.0, 0.1, 0.4}, {0.0, 0.0, 0.5}, {0.6, 0.3, 0.0}};
  } else {
    throw ConfigError("unknown scenario '" + std::string(id) + "'");
  }
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& id_or_path) {
  for (const auto& id : preset_ids())
    if (id == id_or_path) return preset_scenario(id);
  if (!std::filesystem::exists(id_or_path))
    throw ConfigError("unknown scenario '" + id_or_path + "' (not a preset and no such file)");
  std::ifstream in(id_or_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

}  // namespace save
