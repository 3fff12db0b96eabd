#include "save/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "save/error.hpp"

namespace save {

std::vector<double> cumulative_risks(std::span<const SlotRecord> history) {
  if (history.empty()) return {};
  std::vector<double> cum(history.front().risks.size(), 0.0);
  for (const auto& rec : history) {
    if (rec.risks.size() != cum.size()) throw InputError("risk vectors change length across slots");
    for (std::size_t k = 0; k < cum.size(); ++k) cum[k] += rec.risks[k];
  }
  return cum;
}

RegretReport regret_series(std::span<const SlotRecord> history, const ServerList& best_list) {
  RegretReport rep;
  const std::size_t T = history.size();
  rep.best_list = best_list;
  rep.pseudo_risk.reserve(T);
  rep.realized_risk.reserve(T);
  rep.benchmark_risk.reserve(T);
  rep.cum_pseudo_regret.reserve(T);
  rep.cum_realized_regret.reserve(T);

  double cum_pseudo = 0.0;
  double cum_real = 0.0;
  for (const auto& rec : history) {
    const auto K = rec.risks.size();
    if (rec.play_probs.size() != K || static_cast<std::size_t>(best_list.size()) != K)
      throw InputError("regret_series: length mismatch between distribution, risks and benchmark list");
    if (rec.action < 0 || static_cast<std::size_t>(rec.action) >= K)
      throw InputError("regret_series: action out of range");
    double pseudo = 0.0;
    for (std::size_t k = 0; k < K; ++k) pseudo += rec.play_probs[k] * rec.risks[k];
    const double bench = rec.risks[phi_map(best_list, rec.mask)];
    const double real = rec.risks[rec.action];
    cum_pseudo += pseudo - bench;
    cum_real += real - bench;
    rep.pseudo_risk.push_back(pseudo);
    rep.realized_risk.push_back(real);
    rep.benchmark_risk.push_back(bench);
    rep.cum_pseudo_regret.push_back(cum_pseudo);
    rep.cum_realized_regret.push_back(cum_real);
  }
  return rep;
}

BoundSeries bound_series(ScheduleKind schedule, int num_servers, int horizon, std::span<const double> q,
                         AlgorithmKind algorithm) {
  const double K = num_servers;
  const double log_n =
      algorithm == AlgorithmKind::save_s ? std::log(K) : log_factorial(num_servers);
  BoundSeries out;
  out.values.resize(horizon);
  switch (schedule) {
    case ScheduleKind::fixed: {
      const double b = 2.0 * std::sqrt(horizon * K * log_n);
      std::fill(out.values.begin(), out.values.end(), b);
      break;
    }
    case ScheduleKind::diminishing:
      for (int t = 1; t <= horizon; ++t) out.values[t - 1] = 2.0 * std::sqrt(2.0 * t * K * log_n);
      break;
    case ScheduleKind::adaptive: {
      if (static_cast<int>(q.size()) < horizon) throw InputError("adaptive bound needs a Q value per slot");
      double delta = std::numeric_limits<double>::infinity();
      double sum = 0.0;
      for (int t = 1; t <= horizon; ++t) {
        delta = std::min(delta, K - q[t - 1]);
        sum += q[t - 1];
        if (delta < 0.0) out.delta_warning = true;
        out.values[t - 1] = 2.0 * std::sqrt(std::max(0.0, delta + sum) * log_n);
      }
      out.delta = horizon > 0 ? delta : 0.0;
      break;
    }
  }
  return out;
}

double cooperation_value(std::span<const double> q, int num_servers) {
  if (q.empty()) return 0.0;
  const double K = num_servers;
  double delta = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : q) {
    delta = std::min(delta, K - v);
    sum += v;
  }
  return std::sqrt(std::max(0.0, delta + sum) / (static_cast<double>(q.size()) * K));
}

double cooperation_bound_save_s(std::span<const int> sideobs_sizes, int num_servers) {
  if (sideobs_sizes.empty()) return 0.0;
  const double K = num_servers;
  const double T = static_cast<double>(sideobs_sizes.size());
  double acc = 0.0;
  for (int s : sideobs_sizes) acc += std::min(num_servers, num_servers + 1 - s);
  return std::sqrt(1.0 / T + acc / (K * T));
}

double cooperation_bound_save_a(std::span<const AvailabilityMask> masks, std::span<const SideObsSet> sideobs,
                                int num_servers) {
  if (masks.size() != sideobs.size()) throw InputError("cooperation_bound_save_a: length mismatch");
  if (masks.empty()) return 0.0;
  const double K = num_servers;
  const double T = static_cast<double>(masks.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < masks.size(); ++t)
    acc += (masks[t] | sideobs[t]).size() - sideobs[t].size() + (sideobs[t].empty() ? 0 : 1);
  return std::sqrt(1.0 / T + acc / (K * T));
}

Lemma3Result lemma3_check(std::span<const double> q, double delta) {
  if (!(delta > 0.0)) throw ContractViolation("lemma3_check: delta must be positive");
  Lemma3Result r;
  double sum = 0.0;
  for (double v : q) {
    if (!(v > 0.0)) throw ContractViolation("lemma3_check: every Q must be positive");
    sum += v;
    r.lhs += v / (2.0 * std::sqrt(delta + sum));
  }
  r.rhs = std::sqrt(delta + sum) - std::sqrt(delta);
  r.slack = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs;
  return r;
}

AggregateReport aggregate(std::span<const RegretReport> runs) {
  if (runs.empty()) throw InputError("aggregate: no runs");
  const int T = runs.front().horizon();
  const bool has_bound = static_cast<int>(runs.front().bound.size()) == T;
  for (const auto& r : runs) {
    if (r.horizon() != T) throw InputError("aggregate: runs have different horizons");
    if (has_bound != (static_cast<int>(r.bound.size()) == T))
      throw InputError("aggregate: runs disagree on bound availability");
  }

  const double n = static_cast<double>(runs.size());
  AggregateReport a;
  a.runs = static_cast<int>(runs.size());
  a.mean.assign(T, 0.0);
  a.ci_low.assign(T, 0.0);
  a.ci_high.assign(T, 0.0);
  if (has_bound) a.mean_bound.assign(T, 0.0);

  for (int t = 0; t < T; ++t) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.cum_pseudo_regret[t];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : runs) {
      const double d = r.cum_pseudo_regret[t] - mean;
      ss += d * d;
    }
    const double half = runs.size() > 1 ? 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    a.mean[t] = mean;
    a.ci_low[t] = mean - half;
    a.ci_high[t] = mean + half;
    if (has_bound) {
      double b = 0.0;
      for (const auto& r : runs) b += r.bound[t];
      a.mean_bound[t] = b / n;
    }
  }
  for (const auto& r : runs) {
    a.mean_lambda += r.lambda / n;
    a.mean_lambda_bound += r.lambda_bound / n;
    a.mean_clip_fraction += r.clip_fraction / n;
    double tot = 0.0;
    for (double v : r.pseudo_risk) tot += v;
    a.mean_average_risk += (T > 0 ? tot / T : 0.0) / n;
  }
  return a;
}

}  // namespace save
