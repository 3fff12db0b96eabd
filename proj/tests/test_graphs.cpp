#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "save/error.hpp"
#include "save/graphs.hpp"
#include "save/save_a.hpp"
#include "test_util.hpp"

using namespace save;
using save::testing::one_based;

namespace {

std::vector<double> random_distribution(std::mt19937_64& gen, AvailabilityMask support, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n, 0.0);
  double total = 0.0;
  for (int k = 0; k < n; ++k)
    if (support.contains(k)) total += p[k] = e(gen) + 1e-9;
  for (auto& v : p) v /= total;
  return p;
}

std::vector<double> random_simplex(std::mt19937_64& gen, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += v = e(gen) + 1e-9;
  for (auto& v : p) v /= total;
  return p;
}

// Exhaustive 2^n subset enumeration, self-loops ignored, edges undirected.
int brute_force_alpha(const SideObsGraph& g) {
  const int n = g.size();
  std::vector<std::uint32_t> nbr(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && (g.has_edge(a, b) || g.has_edge(b, a))) nbr[a] |= 1u << b;
  int best = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      if ((s >> a & 1u) && (nbr[a] & s)) ok = false;
    if (ok) best = std::max(best, std::popcount(s));
  }
  return best;
}

bool is_independent(const SideObsGraph& g, const std::vector<int>& set) {
  for (int a : set)
    for (int b : set)
      if (a != b && g.has_edge(a, b)) return false;
  return true;
}

}  // namespace

TEST_CASE("build_server_graph") {
  SUBCASE("K=6, S={3,5}") {
    auto g = build_server_graph(ServerSet::full(6), one_based({3, 5}), 6);
    CHECK(g.kind() == NodeKind::servers);
    for (int k = 0; k < 6; ++k) {
      CHECK(g.has_edge(k, k));
      const bool shared = k == 2 || k == 4;
      CHECK(g.in_degree(k) == (shared ? 6 : 1));
      for (int m = 0; m < 6; ++m) CHECK(g.has_edge(m, 2));
    }
  }
  SUBCASE("no cooperation gives only self-loops") {
    auto g = build_server_graph(ServerSet::full(5), ServerSet{}, 5);
    CHECK(g.edge_count() == 5);
  }
  SUBCASE("K=4, S={1}") {
    auto g = build_server_graph(ServerSet::full(4), one_based({1}), 4);
    CHECK(g.in_degree(0) == 4);
    for (int k = 1; k < 4; ++k) CHECK(g.in_degree(k) == 1);
  }
}

TEST_CASE("build_list_graph reproduces both panels of the three-server example") {
  ListTable table(3);
  const auto mask = one_based({2, 3});
  const auto heads = table.heads(mask);

  SUBCASE("no side observation: two cliques") {
    auto g = build_list_graph(table, mask, ServerSet{});
    CHECK(g.kind() == NodeKind::lists);
    CHECK(g.size() == 6);
    for (int m = 0; m < 6; ++m)
      for (int k = 0; k < 6; ++k) CHECK(g.has_edge(m, k) == (heads[m] == heads[k]));
    int head2 = 0;
    for (int h : heads) head2 += h == 1;
    CHECK(head2 == 3);
  }
  SUBCASE("S={1} adds in-edges to the lists headed by server 1") {
    auto base = build_list_graph(table, mask, ServerSet{});
    auto g = build_list_graph(table, mask, one_based({1}));
    const int l123 = table.rank(save::testing::list_of({1, 2, 3}));
    const int l132 = table.rank(save::testing::list_of({1, 3, 2}));
    for (int m = 0; m < 6; ++m) {
      CHECK(g.has_edge(m, l123));
      CHECK(g.has_edge(m, l132));
    }
    // Every other list keeps the edges it had.
    for (int m = 0; m < 6; ++m)
      for (int k = 0; k < 6; ++k)
        if (k != l123 && k != l132) CHECK(g.has_edge(m, k) == base.has_edge(m, k));
  }
  SUBCASE("K=2 full availability: singleton cliques") {
    auto g = build_list_graph(ServerSet::full(2), ServerSet{}, 2);
    CHECK(g.edge_count() == 2);
  }
  SUBCASE("explicit cap") {
    CHECK_THROWS_AS(build_list_graph(ServerSet::full(kMaxExplicitListGraphServers + 1), ServerSet{},
                                     kMaxExplicitListGraphServers + 1),
                    ResourceLimit);
  }
}

TEST_CASE("q_value examples") {
  SUBCASE("self-loops only gives K") {
    auto g = build_server_graph(ServerSet::full(5), ServerSet{}, 5);
    std::vector<double> p{0.1, 0.2, 0.3, 0.15, 0.25};
    CHECK(q_value(p, g, 0.0) == doctest::Approx(5.0));
  }
  SUBCASE("K=4 uniform, S={1}") {
    auto g = build_server_graph(ServerSet::full(4), one_based({1}), 4);
    std::vector<double> p(4, 0.25);
    CHECK(q_value(p, g, 0.0) == doctest::Approx(3.25));
    auto b = q_bounds_save_s(p, one_based({1}), 0.0, 3);
    CHECK(b.upper == doctest::Approx(3.25));
  }
  SUBCASE("K=3 list graph, mask {2,3}, S={1}, uniform q") {
    ListTable table(3);
    auto g = build_list_graph(table, one_based({2, 3}), one_based({1}));
    std::vector<double> q(6, 1.0 / 6);
    CHECK(q_value(q, g, 0.0) == doctest::Approx(5.0 / 3));
    CHECK(q_value_lists(table, q, one_based({2, 3}), one_based({1}), 0.0) == doctest::Approx(5.0 / 3));
  }
  SUBCASE("zero-probability nodes contribute nothing") {
    auto g = build_server_graph(ServerSet::full(3), ServerSet{}, 3);
    std::vector<double> p{0.0, 1.0, 0.0};
    CHECK(q_value(p, g, 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("independence_number examples") {
  SUBCASE("S={3,5} on six servers") {
    auto g = build_server_graph(ServerSet::full(6), one_based({3, 5}), 6);
    auto a = independence_number(g);
    CHECK(a.size == 4);
    auto members = a.members;
    std::sort(members.begin(), members.end());
    CHECK(members == std::vector<int>{0, 1, 3, 5});
  }
  SUBCASE("self-loops only") {
    auto g = build_server_graph(ServerSet::full(7), ServerSet{}, 7);
    CHECK(independence_number(g).size == 7);
  }
  SUBCASE("S={3}") {
    auto g = build_server_graph(ServerSet::full(6), one_based({3}), 6);
    auto a = independence_number(g);
    CHECK(a.size == 5);
    auto members = a.members;
    std::sort(members.begin(), members.end());
    CHECK(members == std::vector<int>{0, 1, 3, 4, 5});
  }
  SUBCASE("node cap") {
    SideObsGraph g(kMaxIndependenceNodes + 1, NodeKind::servers);
    CHECK_THROWS_AS(independence_number(g), ResourceLimit);
  }
}

TEST_CASE("independence_number matches brute force on random graphs") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 16;
    const double density = u(gen);
    SideObsGraph g(n, NodeKind::servers);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && u(gen) < density * 0.5) g.add_edge(a, b);
    auto got = independence_number(g);
    CHECK(got.size == brute_force_alpha(g));
    CHECK(static_cast<int>(got.members.size()) == got.size);
    CHECK(is_independent(g, got.members));
  }
}

TEST_CASE("server-graph independence number is K - |S| for a proper non-empty S") {
  for (int K = 1; K <= 8; ++K)
    for (std::uint32_t bits = 1; bits < (1u << K) - 1; ++bits) {
      auto g = build_server_graph(ServerSet::full(K), ServerSet(bits), K);
      CHECK(independence_number(g).size == K - std::popcount(bits));
    }
}

TEST_CASE("q_bounds_save_s examples") {
  std::vector<double> p{0.2, 0.3, 0.5};
  SUBCASE("mu=0, no side observations") {
    auto b = q_bounds_save_s(p, ServerSet{}, 0.0, 3);
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(3.0));
  }
  SUBCASE("mu=1") { CHECK(q_bounds_save_s(p, one_based({2}), 1.0, 2).lower == doctest::Approx(0.5)); }
  SUBCASE("mu > 1 is rejected") { CHECK_THROWS_AS(q_bounds_save_s(p, ServerSet{}, 1.5, 3), ContractViolation); }
}

TEST_CASE("q_bounds_save_a examples") {
  CHECK(q_bounds_save_a(one_based({2, 3}), one_based({1}), 0.0).upper == doctest::Approx(3.0));
  CHECK(q_bounds_save_a(ServerSet::full(4), ServerSet{}, 0.0).upper == doctest::Approx(4.0));
  CHECK(q_bounds_save_a(one_based({1}), one_based({1}), 0.0).upper == doctest::Approx(1.0));
}

TEST_CASE("server-graph Q stays within its bounds under fuzzing") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int K = 1 + trial % 8;
    ServerSet mask(static_cast<std::uint32_t>(gen()) & ((1u << K) - 1));
    if (mask.empty()) mask.insert(0);
    const ServerSet S(static_cast<std::uint32_t>(gen()) & ((1u << K) - 1));
    const double mu = u(gen);
    auto p = random_distribution(gen, mask, K);
    auto g = build_server_graph(mask, S, K);
    const int alpha = independence_number(g).size;
    const double q = q_value(p, g, mu);
    auto b = q_bounds_save_s(p, S, mu, alpha);
    CHECK(q >= b.lower - 1e-12);
    CHECK(q <= b.upper + 1e-12);
  }
}

TEST_CASE("list-graph Q stays within its bounds under fuzzing") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ListTable> tables;
  for (int K = 1; K <= 5; ++K) tables.emplace_back(K);
  for (int trial = 0; trial < 10000; ++trial) {
    const int K = 1 + trial % 5;
    const auto& table = tables[K - 1];
    ServerSet mask(static_cast<std::uint32_t>(gen()) & ((1u << K) - 1));
    if (mask.empty()) mask.insert(K - 1);
    const ServerSet S(static_cast<std::uint32_t>(gen()) & ((1u << K) - 1));
    const double mu = u(gen);
    auto q = random_simplex(gen, table.size());
    const double value = q_value_lists(table, q, mask, S, mu);
    auto b = q_bounds_save_a(mask, S, mu);
    CHECK(value >= b.lower - 1e-12);
    CHECK(value <= b.upper + 1e-12);
    if (K <= 4) {
      auto g = build_list_graph(table, mask, S);
      CHECK(q_value(q, g, mu) == doctest::Approx(value).epsilon(1e-12));
    }
  }
}

TEST_CASE("adding edges never increases Q") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + trial % 7;
    SideObsGraph g(n, NodeKind::servers);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (u(gen) < 0.2) g.add_edge(a, b);
    auto p = random_distribution(gen, ServerSet::full(n), n);
    const double mu = u(gen);
    const double before = q_value(p, g, mu);
    const int a = static_cast<int>(u(gen) * n), b = static_cast<int>(u(gen) * n);
    g.add_edge(a, b);
    CHECK(q_value(p, g, mu) <= before + 1e-12);
  }
}
