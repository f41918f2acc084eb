#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "gossip/topology.hpp"
#include "test_support.hpp"

using namespace gossip;

TEST_CASE("fully connected build splits rates equally", "[topology]") {
  const auto net = build_topology(TopologyKind::fully_connected, 6, 1.0, 1.0, 1.0);
  for (int i = 0; i < 6; ++i) {
    REQUIRE(net.out_edges[i].size() == 5);
    for (const auto& [j, r] : net.out_edges[i]) REQUIRE_THAT(r, Catch::Matchers::WithinAbs(0.2, 1e-12));
    REQUIRE(net.source_rates[i] == Catch::Approx(1.0 / 6).margin(1e-12));
  }
}

TEST_CASE("per-node rate sums are exact on flat topologies", "[topology]") {
  const double lam = 0.7, src = 1.3, self = 0.9;
  for (auto kind : {TopologyKind::fully_connected, TopologyKind::ring_bidirectional,
                    TopologyKind::ring_unidirectional, TopologyKind::line, TopologyKind::grid,
                    TopologyKind::generalized_ring}) {
    const int n = kind == TopologyKind::grid ? 16 : 10;
    TopologyParams p;
    p.ring_reach = 3;
    const auto net = build_topology(kind, n, lam, src, self, p);
    for (int i = 0; i < n; ++i) {
      double sum = 0;
      for (const auto& [j, r] : net.out_edges[i]) sum += r;
      REQUIRE(sum == lam);  // bit-exact by construction
    }
    double total_src = 0;
    for (double r : net.source_rates) total_src += r;
    REQUIRE(total_src == src);
  }
}

TEST_CASE("generalized ring n=10 f=2 has four quarter-rate edges", "[topology]") {
  TopologyParams p;
  p.ring_reach = 2;
  const auto net = build_topology(TopologyKind::generalized_ring, 10, 1.0, 1.0, 1.0, p);
  for (int i = 0; i < 10; ++i) {
    REQUIRE(net.out_edges[i].size() == 4);
    for (const auto& [j, r] : net.out_edges[i]) REQUIRE_THAT(r, Catch::Matchers::WithinAbs(0.25, 1e-12));
  }
}

TEST_CASE("grid n=9 is a non-wrapping lattice", "[topology]") {
  const auto net = build_topology(TopologyKind::grid, 9, 1.0, 1.0, 1.0);
  auto degree = [&net](int i) { return static_cast<int>(net.out_edges[i].size()); };
  // Corners, edges, interior per the 3x3 lattice.
  REQUIRE(degree(0) == 2);
  REQUIRE(degree(2) == 2);
  REQUIRE(degree(6) == 2);
  REQUIRE(degree(8) == 2);
  REQUIRE(degree(1) == 3);
  REQUIRE(degree(3) == 3);
  REQUIRE(degree(4) == 4);
  // No wraparound: node 0 must not reach node 2 or node 6 directly.
  REQUIRE(net.gossip_rate(0, 2) == 0.0);
  REQUIRE(net.gossip_rate(0, 6) == 0.0);
}

TEST_CASE("grid boundary-deficient node count is 4(sqrt(n)-1)", "[topology]") {
  for (int side : {2, 3, 5, 8}) {
    const int n = side * side;
    const auto net = build_topology(TopologyKind::grid, n, 1.0, 1.0, 1.0);
    int deficient = 0;
    std::size_t degree_sum = 0;
    for (int i = 0; i < n; ++i) {
      deficient += net.out_edges[i].size() < 4 ? 1 : 0;
      degree_sum += net.out_edges[i].size();
    }
    REQUIRE(deficient == 4 * (side - 1));
    REQUIRE(degree_sum == static_cast<std::size_t>(2 * (2 * n - 2 * side)));
  }
}

TEST_CASE("build rejects bad parameters", "[topology]") {
  REQUIRE_THROWS_AS(build_topology(TopologyKind::grid, 10, 1, 1, 1), std::invalid_argument);
  TopologyParams p;
  p.ring_reach = 5;
  REQUIRE_THROWS_AS(build_topology(TopologyKind::generalized_ring, 10, 1, 1, 1, p),
                    std::invalid_argument);
  // A single fully connected node has nobody to gossip with.
  REQUIRE_THROWS_AS(build_topology(TopologyKind::fully_connected, 1, 1, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("ring and fully connected builds are vertex-transitive", "[topology]") {
  const auto ring = build_topology(TopologyKind::ring_bidirectional, 9, 1.0, 1.0, 1.0);
  for (int i = 0; i < 9; ++i) {
    REQUIRE(ring.gossip_rate(i, (i + 1) % 9) == ring.gossip_rate(0, 1));
    REQUIRE(ring.gossip_rate(i, (i + 8) % 9) == ring.gossip_rate(0, 8));
    // The last share absorbs the split residual, hence the 1-ulp tolerance.
    REQUIRE_THAT(ring.source_rates[i], Catch::Matchers::WithinRel(ring.source_rates[0], 1e-12));
  }
  const auto fc = build_topology(TopologyKind::fully_connected, 7, 1.0, 1.0, 1.0);
  for (int i = 0; i < 7; ++i) {
    std::vector<double> rates;
    for (const auto& [j, r] : fc.out_edges[i]) rates.push_back(r);
    std::sort(rates.begin(), rates.end());
    std::vector<double> base;
    for (const auto& [j, r] : fc.out_edges[0]) base.push_back(r);
    std::sort(base.begin(), base.end());
    REQUIRE(rates == base);
  }
}

TEST_CASE("clustered build wires heads and members", "[topology]") {
  TopologyParams p;
  p.clusters = 2;
  p.intra = TopologyKind::ring_bidirectional;
  p.cluster_rate = 1.5;
  const auto net = build_topology(TopologyKind::clustered, 8, 1.0, 2.0, 1.0, p);
  // Heads 0,1 take the whole source budget; members get none.
  REQUIRE(net.source_rates[0] == 1.0);
  REQUIRE(net.source_rates[1] == 1.0);
  for (int i = 2; i < 8; ++i) REQUIRE(net.source_rates[i] == 0.0);
  // Each head feeds its three members at a combined 1.5.
  REQUIRE(net.out_rate_sum(0) == 1.5);
  REQUIRE(net.gossip_rate(0, 2) == Catch::Approx(0.5));
  REQUIRE(net.gossip_rate(1, 5) == Catch::Approx(0.5));
  // Members ring-gossip within their cluster only.
  REQUIRE(net.gossip_rate(2, 3) > 0);
  REQUIRE(net.gossip_rate(2, 5) == 0.0);
  REQUIRE(validate(net).ok);
}

TEST_CASE("equidistant and adjacent jammers dismember the ring", "[topology]") {
  const auto ring = build_topology(TopologyKind::ring_bidirectional, 6, 1.0, 1.0, 1.0);
  JammerPlan equi{JammerPlacement::equidistant, 2, {}};
  JammerPlan adj{JammerPlacement::adjacent, 2, {}};
  const auto cut_equi = apply_jammers(ring, equi);
  const auto cut_adj = apply_jammers(ring, adj);
  REQUIRE(testsupport::component_sizes(cut_equi) == std::vector<int>{3, 3});
  REQUIRE(testsupport::component_sizes(cut_adj) == std::vector<int>{5, 1});
  REQUIRE(cut_equi.undirected_links().size() == ring.undirected_links().size() - 2);
  // Input must be untouched.
  REQUIRE(ring.undirected_links().size() == 6);
}

TEST_CASE("greedy jammers isolate the maximum number of nodes", "[topology]") {
  const auto fc = build_topology(TopologyKind::fully_connected, 8, 1.0, 1.0, 1.0);
  // 28 links total; 22 jammers leave 6 links: four isolated nodes + a 4-clique.
  const auto cut = apply_jammers(fc, {JammerPlacement::greedy_isolate, 22, {}});
  REQUIRE(cut.undirected_links().size() == 6);
  REQUIRE(testsupport::component_sizes(cut) == std::vector<int>{4, 1, 1, 1, 1});
}

TEST_CASE("explicit jammer list is idempotent", "[topology]") {
  const auto ring = build_topology(TopologyKind::ring_bidirectional, 6, 1.0, 1.0, 1.0);
  JammerPlan plan{JammerPlacement::explicit_list, 0, {{0, 1}, {3, 4}}};
  const auto once = apply_jammers(ring, plan);
  const auto twice = apply_jammers(once, plan);
  REQUIRE(once.undirected_links() == twice.undirected_links());
  REQUIRE_THROWS_AS(apply_jammers(ring, JammerPlan{JammerPlacement::equidistant, 7, {}}),
                    std::invalid_argument);
}

TEST_CASE("validate reports unreachable nodes", "[topology]") {
  REQUIRE(validate(build_topology(TopologyKind::fully_connected, 4, 1, 1, 1)).ok);

  // Source feeds node 1 only and the 1->2 link has zero rate.
  TopologyParams p;
  p.source_rates = {1.0, 0.0};
  const auto line = build_topology(TopologyKind::arbitrary, 2, 0, 0, 1.0, p);
  const auto rep = validate(line);
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.unreachable == std::vector<int>{1});

  // A fully jammed-off ring node keeps its source link, so it stays reachable;
  // dropping its source rate flags it.
  auto ring = build_topology(TopologyKind::ring_bidirectional, 4, 1.0, 1.0, 1.0);
  auto cut = apply_jammers(ring, {JammerPlacement::explicit_list, 0, {{0, 1}, {3, 0}}});
  REQUIRE(validate(cut).ok);
  cut.source_rates[0] = 0;
  const auto rep2 = validate(cut);
  REQUIRE_FALSE(rep2.ok);
  REQUIRE(rep2.unreachable == std::vector<int>{0});
  REQUIRE(rep2.isolated == std::vector<int>{0});
}

TEST_CASE("network serialization round-trips exactly", "[topology]") {
  const auto net = testsupport::random_network(7, 20250811);
  std::stringstream ss;
  save_network(ss, net);
  const auto back = load_network(ss);
  REQUIRE(back.n == net.n);
  REQUIRE(back.self_update_rate == net.self_update_rate);
  REQUIRE(back.source_rates == net.source_rates);
  for (int i = 0; i < net.n; ++i) REQUIRE(back.out_edges[i] == net.out_edges[i]);
}
