#include <doctest.h>

#include <cmath>
#include <random>

#include "save/error.hpp"
#include "save/eval.hpp"
#include "test_util.hpp"

using namespace save;
using save::testing::list_of;
using save::testing::one_based;

namespace {

RegretReport report_with(std::vector<double> cum) {
  RegretReport r;
  r.pseudo_risk.assign(cum.size(), 0.5);
  r.cum_pseudo_regret = std::move(cum);
  return r;
}

}  // namespace

TEST_CASE("regret_series on a two-slot trace") {
  std::vector<SlotRecord> h{
      {{0.0, 1.0}, {0.2, 0.9}, one_based({2}), 1},
      {{0.5, 0.5}, {0.4, 0.1}, one_based({1, 2}), 1},
  };
  auto cum = cumulative_risks(h);
  CHECK(cum[0] == doctest::Approx(0.6));
  CHECK(cum[1] == doctest::Approx(1.0));
  const auto best = best_server_list(cum);
  CHECK(best == list_of({1, 2}));
  auto rep = regret_series(h, best);
  CHECK(rep.benchmark_risk[0] + rep.benchmark_risk[1] == doctest::Approx(1.3));
  CHECK(rep.pseudo_risk[0] + rep.pseudo_risk[1] == doctest::Approx(1.15));
  CHECK(rep.cum_pseudo_regret.back() == doctest::Approx(-0.15));
  CHECK(rep.cum_realized_regret.back() == doctest::Approx(0.9 + 0.1 - 1.3));
}

TEST_CASE("regret_series bookkeeping") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int K = 4, T = 300;
  std::vector<SlotRecord> h;
  for (int t = 0; t < T; ++t) {
    SlotRecord rec;
    rec.risks.resize(K);
    for (auto& v : rec.risks) v = u(gen);
    rec.mask = ServerSet(static_cast<std::uint32_t>(gen()) & 15u);
    if (rec.mask.empty()) rec.mask.insert(0);
    rec.play_probs.assign(K, 0.0);
    for (int k : rec.mask.members()) rec.play_probs[k] = 1.0 / rec.mask.size();
    rec.action = rec.mask.members().front();
    h.push_back(rec);
  }
  const auto best = best_server_list(cumulative_risks(h));

  SUBCASE("cumulative series are prefix sums") {
    auto rep = regret_series(h, best);
    double pseudo = 0.0, real = 0.0;
    for (int t = 0; t < T; ++t) {
      pseudo += rep.pseudo_risk[t] - rep.benchmark_risk[t];
      real += rep.realized_risk[t] - rep.benchmark_risk[t];
      CHECK(rep.cum_pseudo_regret[t] == doctest::Approx(pseudo).epsilon(1e-12));
      CHECK(rep.cum_realized_regret[t] == doctest::Approx(real).epsilon(1e-12));
    }
  }
  SUBCASE("playing the benchmark list has zero regret") {
    for (auto& rec : h) {
      rec.action = phi_map(best, rec.mask);
      rec.play_probs.assign(K, 0.0);
      rec.play_probs[rec.action] = 1.0;
    }
    auto rep = regret_series(h, best);
    for (double v : rep.cum_pseudo_regret) CHECK(v == 0.0);
  }
  SUBCASE("length mismatch") {
    h[3].play_probs.pop_back();
    CHECK_THROWS_AS(regret_series(h, best), InputError);
  }
}

TEST_CASE("hindsight list ranks servers by mean risk") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  const std::vector<double> means{0.5, 0.2, 0.8, 0.35};
  std::vector<SlotRecord> h;
  for (int t = 0; t < 10000; ++t) {
    SlotRecord rec;
    for (double m : means) rec.risks.push_back(m + u(gen));
    h.push_back(rec);
  }
  CHECK(best_server_list(cumulative_risks(h)) == list_of({2, 4, 1, 3}));
}

TEST_CASE("bound_series") {
  const std::vector<double> q(400, 3.0);
  SUBCASE("fixed") {
    auto s = bound_series(ScheduleKind::fixed, 5, 400, q, AlgorithmKind::save_s);
    const double expected = 2.0 * std::sqrt(2000.0 * std::log(5.0));
    CHECK(expected == doctest::Approx(113.47).epsilon(1e-4));
    for (double v : s.values) CHECK(v == doctest::Approx(expected));
    auto a = bound_series(ScheduleKind::fixed, 5, 400, q, AlgorithmKind::save_a);
    CHECK(a.values.back() == doctest::Approx(2.0 * std::sqrt(2000.0 * std::log(120.0))));
    CHECK(a.values.back() == doctest::Approx(195.70).epsilon(1e-4));
  }
  SUBCASE("diminishing") {
    auto s = bound_series(ScheduleKind::diminishing, 5, 400, q, AlgorithmKind::save_s);
    for (int t : {1, 17, 400}) CHECK(s.values[t - 1] == doctest::Approx(2.0 * std::sqrt(2.0 * t * 5 * std::log(5.0))));
  }
  SUBCASE("adaptive with Q = K everywhere coincides with fixed") {
    const std::vector<double> full(400, 5.0);
    auto ad = bound_series(ScheduleKind::adaptive, 5, 400, full, AlgorithmKind::save_s);
    auto fx = bound_series(ScheduleKind::fixed, 5, 400, full, AlgorithmKind::save_s);
    CHECK(ad.delta == 0.0);
    CHECK(ad.values.back() == doctest::Approx(fx.values.back()));
  }
  SUBCASE("adaptive uses the running delta") {
    std::vector<double> qs{2.0, 4.0, 1.0};
    auto s = bound_series(ScheduleKind::adaptive, 5, 3, qs, AlgorithmKind::save_s);
    CHECK(s.values[0] == doctest::Approx(2.0 * std::sqrt((3.0 + 2.0) * std::log(5.0))));
    CHECK(s.values[1] == doctest::Approx(2.0 * std::sqrt((1.0 + 6.0) * std::log(5.0))));
    CHECK(s.values[2] == doctest::Approx(2.0 * std::sqrt((1.0 + 7.0) * std::log(5.0))));
    CHECK(s.delta == 1.0);
    CHECK_FALSE(s.delta_warning);
  }
  SUBCASE("negative delta is flagged") {
    std::vector<double> qs{6.0, 1.0};
    CHECK(bound_series(ScheduleKind::adaptive, 5, 2, qs, AlgorithmKind::save_s).delta_warning);
  }
}

TEST_CASE("adaptive bound never exceeds the fixed bound when Q_t <= K") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 2 + trial % 6, T = 1 + static_cast<int>(u(gen) * 500);
    std::vector<double> q(T);
    for (auto& v : q) v = 1e-3 + u(gen) * (K - 1e-3);
    for (auto algo : {AlgorithmKind::save_s, AlgorithmKind::save_a}) {
      auto ad = bound_series(ScheduleKind::adaptive, K, T, q, algo);
      auto fx = bound_series(ScheduleKind::fixed, K, T, q, algo);
      CHECK(ad.values.back() <= fx.values.back() + 1e-9);
    }
  }
}

TEST_CASE("cooperation value") {
  SUBCASE("no cooperation gives one") {
    const std::vector<double> q(400, 5.0);
    CHECK(cooperation_value(q, 5) == doctest::Approx(1.0));
  }
  SUBCASE("substitution example") {
    // Σ Q = 1000 with max Q = 4, so δ = 1.
    std::vector<double> q(400, 996.0 / 399);
    q[0] = 4.0;
    CHECK(cooperation_value(q, 5) == doctest::Approx(std::sqrt(1001.0 / 2000.0)));
    CHECK(cooperation_value(q, 5) == doctest::Approx(0.7075).epsilon(1e-4));
  }
  SUBCASE("half the servers shared every slot") {
    const int K = 4, T = 300;
    const std::vector<int> sizes(T, K / 2);
    CHECK(cooperation_bound_save_s(sizes, K) == doctest::Approx(std::sqrt(1.0 / T + 0.5 + 1.0 / K)));
  }
  SUBCASE("SAVE-A closed form") {
    std::vector<AvailabilityMask> masks{one_based({2, 3}), ServerSet::full(3)};
    std::vector<SideObsSet> s{one_based({1}), {}};
    // (3 - 1 + 1) + (3 - 0 + 0) = 6
    CHECK(cooperation_bound_save_a(masks, s, 3) == doctest::Approx(std::sqrt(1.0 / 2 + 6.0 / 6)));
  }
}

TEST_CASE("lemma3_check") {
  SUBCASE("two unit terms") {
    auto r = lemma3_check(std::vector<double>{1.0, 1.0}, 1.0);
    CHECK(r.lhs == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0)) + 1.0 / (2.0 * std::sqrt(3.0))));
    CHECK(r.lhs == doctest::Approx(0.642229).epsilon(1e-6));
    CHECK(r.rhs == doctest::Approx(std::sqrt(3.0) - 1.0));
    CHECK(r.holds);
    CHECK(r.slack > 0.0);
  }
  SUBCASE("single term over a grid") {
    for (double d = 0.01; d < 10.0; d *= 1.7)
      for (double q = 0.01; q < 10.0; q *= 1.7) {
        auto r = lemma3_check(std::vector<double>{q}, d);
        CHECK(r.lhs == doctest::Approx(q / (2.0 * std::sqrt(d + q))));
        CHECK(r.holds);
      }
  }
  SUBCASE("vanishing terms") {
    auto r = lemma3_check(std::vector<double>(10, 1e-12), 1.0);
    CHECK(r.lhs == doctest::Approx(0.0));
    CHECK(r.rhs == doctest::Approx(0.0));
  }
  SUBCASE("non-positive inputs") {
    CHECK_THROWS_AS(lemma3_check(std::vector<double>{1.0, 0.0}, 1.0), ContractViolation);
    CHECK_THROWS_AS(lemma3_check(std::vector<double>{1.0}, 0.0), ContractViolation);
  }
}

TEST_CASE("lemma3_check holds on random sequences") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> q(1 + trial % 50);
    for (auto& v : q) v = 1e-6 + 10.0 * u(gen);
    violations += !lemma3_check(q, 1e-6 + 5.0 * u(gen)).holds;
  }
  CHECK(violations == 0);
}

TEST_CASE("aggregate") {
  SUBCASE("single run") {
    std::vector<RegretReport> runs{report_with({1.0, 3.0})};
    auto a = aggregate(runs);
    CHECK(a.mean == std::vector<double>{1.0, 3.0});
    CHECK(a.ci_low == a.mean);
    CHECK(a.ci_high == a.mean);
  }
  SUBCASE("identical runs") {
    std::vector<RegretReport> runs{report_with({2.0, 5.0}), report_with({2.0, 5.0})};
    auto a = aggregate(runs);
    CHECK(a.mean == std::vector<double>{2.0, 5.0});
    CHECK(a.ci_high == a.mean);
  }
  SUBCASE("10 and 14") {
    std::vector<RegretReport> runs{report_with({10.0}), report_with({14.0})};
    auto a = aggregate(runs);
    CHECK(a.mean[0] == doctest::Approx(12.0));
    // sample sd = 2√2
    CHECK(a.ci_high[0] - a.mean[0] == doctest::Approx(1.96 * 2.0 * std::sqrt(2.0) / std::sqrt(2.0)));
  }
  SUBCASE("heterogeneous and empty") {
    std::vector<RegretReport> runs{report_with({1.0}), report_with({1.0, 2.0})};
    CHECK_THROWS_AS(aggregate(runs), InputError);
    CHECK_THROWS_AS(aggregate(std::vector<RegretReport>{}), InputError);
  }
}
