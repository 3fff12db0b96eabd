#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "save/core.hpp"
#include "save/rng.hpp"

namespace save {

/// Per-server probabilities in force from `start_slot` until the next phase.
struct ProbabilityPhase {
  int start_slot = 1;
  std::vector<double> probs;
  bool operator==(const ProbabilityPhase&) const = default;
};

enum class JammerKind { none, stochastic, piecewise };

/// Availability process. `stochastic` holds one phase; `piecewise` switches
/// tables at the listed slots (the adversarial schedule).
struct JammerSpec {
  JammerKind kind = JammerKind::none;
  std::vector<ProbabilityPhase> phases;  // "on" probabilities
  bool operator==(const JammerSpec&) const = default;
};

enum class CoopKind { none, per_server, links };

/// Side-observation process. `per_server`: server k enters S_t independently
/// with the active phase's probability. `links`: links[i][j] is the chance
/// device j receives device i's choice this slot.
struct CoopSpec {
  CoopKind kind = CoopKind::none;
  std::vector<ProbabilityPhase> phases;
  std::vector<std::vector<double>> links;
  bool operator==(const CoopSpec&) const = default;
};

struct ScenarioConfig {
  std::string id;
  int num_servers = 5;
  int num_devices = 1;
  int horizon = 400;
  std::vector<double> rho{0.8};
  JammerSpec jammer;
  CoopSpec coop;
  std::uint64_t seed = 1;
  std::string prng{kPrngAlgorithm};
  // Negative compute demand: true takes |c|, false clamps to 0.
  bool abs_compute = true;
  // One Gaussian pair per slot shared by all servers, or fresh per server.
  bool shared_noise = true;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError describing the first problem found.
void validate(const ScenarioConfig& config);

// ---- synthetic generators -------------------------------------------------

struct GeneratedTask {
  TaskSpec task;
  bool negated = false;  // cos(2t) < 0 was folded
};

/// c = (0.6 + 0.5 v) cos(2t), s = (0.25 + 0.3 v2) x.
GeneratedTask task_from_draws(int t, double v, double v2, double x, double rho, bool abs_compute = true);
/// Draws v, v2 ~ U[0,1] and x ~ U[0.8,1.2], in that order.
GeneratedTask gen_task(int t, double rho, Rng& rng, bool abs_compute = true);

/// γ1(k) = (2k/3)(|sin t| + 0.8 + |v1|), γ2(k) = (k/2)(0.5 sin t + 0.75 + |v2|)
/// with 1-based k and the same noise for every server.
RiskSample risks_from_draws(int t, int num_servers, double v1, double v2);
/// v1 ~ N(0, 1.44), v2 ~ N(0, 0.64) (variances).
RiskSample gen_risks(int t, int num_servers, Rng& rng, bool shared_noise = true);

/// The phase in force at slot t. Phases must be sorted by start_slot.
const ProbabilityPhase& active_phase(std::span<const ProbabilityPhase> phases, int t);

struct MaskDraw {
  std::vector<AvailabilityMask> masks;  // one per device, never empty
  int resamples = 0;                    // all-jammed draws thrown away
};

MaskDraw gen_availability(int t, const JammerSpec& jammer, int num_devices, int num_servers, Rng& rng);

/// Per-server reveal mode; devices draw independently.
std::vector<SideObsSet> gen_sideobs_table(int t, const CoopSpec& coop, int num_devices, int num_servers,
                                          Rng& rng);

/// Directed link activations for one slot, row = sender.
struct LinkActivation {
  int num_devices = 0;
  std::vector<std::uint8_t> active;
  bool at(int from, int to) const { return active[static_cast<std::size_t>(from) * num_devices + to] != 0; }
};

/// Draws every off-diagonal link in row-major order.
LinkActivation draw_links(const CoopSpec& coop, int num_devices, Rng& rng);

/// S^j = { a^i : link i→j active } minus a^j itself.
std::vector<SideObsSet> resolve_links(const LinkActivation& links, std::span<const int> actions);

// ---- external traces ------------------------------------------------------

struct TraceSlot {
  RiskSample sample;
  std::optional<AvailabilityMask> mask;  // present when the file has `available`
};

struct Trace {
  int num_servers = 0;
  std::vector<TraceSlot> slots;
};

/// CSV with header `slot,server,gamma1,gamma2[,available]`, one row per
/// (slot, server), 1-based indices, slots contiguous from 1. Errors name the
/// offending line.
Trace parse_trace(std::istream& in, const std::string& source = "<trace>");
Trace ingest_trace(const std::string& path);

// ---- per-run environment --------------------------------------------------

struct SlotDraw {
  int slot = 1;
  RiskSample sample;
  std::vector<TaskSpec> tasks;
  std::vector<RiskVector> risks;
  std::vector<AvailabilityMask> masks;
  std::vector<SideObsSet> sideobs;  // per-server mode; empty sets otherwise
  LinkActivation links;             // link mode
  int resamples = 0;
  int negated_tasks = 0;
};

/// Sequential generator for one run. Per slot the draw order is: tasks
/// (device-major: v, v2, x), risks (v1, v2), masks (device-major, per
/// server), then side observations or link activations.
class Environment {
 public:
  /// With a trace, unit risks (and masks, when present) come from the file
  /// and the horizon and server count follow it.
  Environment(const ScenarioConfig& config, std::uint64_t seed, const Trace* trace = nullptr);

  int horizon() const { return horizon_; }
  int num_servers() const { return num_servers_; }
  int num_devices() const { return config_.num_devices; }

  SlotDraw next();

  /// Side observations once all devices have acted.
  std::vector<SideObsSet> side_observations(const SlotDraw& draw, std::span<const int> actions) const;

 private:
  ScenarioConfig config_;
  const Trace* trace_;
  Rng rng_;
  int horizon_;
  int num_servers_;
  int t_ = 0;
};

}  // namespace save
