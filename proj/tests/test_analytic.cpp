#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>

#include "gossip/analytic.hpp"
#include "test_support.hpp"

using namespace gossip;
using namespace gossip::analytic;

namespace {

/// Source feeds nodes 1 and 3; node 2 only hears from its neighbors.
Network toy_three_node(double e = 1.0) {
  TopologyParams p;
  p.source_rates = {1.0, 0.0, 1.0};
  p.edges = {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}};
  return build_topology(TopologyKind::arbitrary, 3, 0, 0, e, p);
}

Network two_node_line(double src, double hop, double e) {
  TopologyParams p;
  p.source_rates = {src, 0.0};
  p.edges = {{0, 1, hop}};
  return build_topology(TopologyKind::arbitrary, 2, 0, 0, e, p);
}

}  // namespace

TEST_CASE("three-node toy network solves by hand", "[analytic]") {
  const auto table = exact_subset_ages(toy_three_node(), Metric::version);
  REQUIRE_THAT(table.age(0b111), Catch::Matchers::WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(table.age(0b011), Catch::Matchers::WithinAbs(0.75, 1e-12));
  REQUIRE_THAT(table.age(0b110), Catch::Matchers::WithinAbs(0.75, 1e-12));
  const auto v = node_ages(table);
  REQUIRE_THAT(v[0], Catch::Matchers::WithinAbs(0.875, 1e-12));
  REQUIRE_THAT(v[1], Catch::Matchers::WithinAbs(1.25, 1e-12));
  REQUIRE_THAT(v[2], Catch::Matchers::WithinAbs(0.875, 1e-12));
}

TEST_CASE("single node reduces to the rate ratio", "[analytic]") {
  const auto net = two_node_line(1.0, 1.0, 2.0);
  TopologyParams p;
  p.source_rates = {1.0};
  const auto single = build_topology(TopologyKind::arbitrary, 1, 0, 0, 2.0, p);
  REQUIRE_THAT(node_ages(exact_subset_ages(single, Metric::version))[0],
               Catch::Matchers::WithinAbs(2.0, 1e-12));
  // Two-node line with a faster hop.
  const auto line = exact_subset_ages(two_node_line(1.0, 2.0, 1.0), Metric::version);
  REQUIRE_THAT(node_ages(line)[1], Catch::Matchers::WithinAbs(1.5, 1e-12));
}

TEST_CASE("aoi variances on the two-node line match the closed form", "[analytic]") {
  const auto table = exact_subset_ages(two_node_line(1.0, 1.0, 1.0), Metric::aoi, 2);
  const auto v = node_ages(table);
  const auto m2 = node_ages(table, 2);
  REQUIRE_THAT(m2[0] - v[0] * v[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(m2[1] - v[1] * v[1], Catch::Matchers::WithinAbs(2.0, 1e-12));

  const auto scaled = exact_subset_ages(two_node_line(2.0, 4.0, 1.0), Metric::aoi, 2);
  const auto sv = node_ages(scaled);
  const auto sm2 = node_ages(scaled, 2);
  REQUIRE_THAT(sm2[0] - sv[0] * sv[0], Catch::Matchers::WithinAbs(1.0 / 4, 1e-12));
  REQUIRE_THAT(sm2[1] - sv[1] * sv[1], Catch::Matchers::WithinAbs(1.0 / 4 + 1.0 / 16, 1e-12));
}

TEST_CASE("version-age second moment matches the stationary distribution", "[analytic]") {
  // Single node, unit rates: X is geometric, P(X=k) = 2^-(k+1), so E[X^2] = 3.
  TopologyParams p;
  p.source_rates = {1.0};
  const auto net = build_topology(TopologyKind::arbitrary, 1, 0, 0, 1.0, p);
  const auto table = exact_subset_ages(net, Metric::version, 2);
  REQUIRE_THAT(node_ages(table)[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(node_ages(table, 2)[0], Catch::Matchers::WithinAbs(3.0, 1e-12));
}

TEST_CASE("moment tables are consistent on random networks", "[analytic]") {
  for (int trial = 0; trial < 6; ++trial) {
    const auto net = testsupport::random_network(5, 100 + trial);
    for (Metric metric : {Metric::version, Metric::aoi}) {
      const auto table = exact_subset_ages(net, metric, 3);
      for (std::uint32_t mask = 1; mask <= table.full_mask(); ++mask) {
        REQUIRE(table.age(mask) == table.moment(mask, 1));
        const double var = table.moment(mask, 2) - table.age(mask) * table.age(mask);
        REQUIRE(var >= -1e-9);
        // Larger sets are fresher: expanding any subset cannot raise its age.
        for (int i = 0; i < net.n; ++i)
          if (!(mask & (1u << i))) REQUIRE(table.age(mask | (1u << i)) <= table.age(mask) + 1e-9);
      }
    }
  }
}

TEST_CASE("aoi equals version age with a unit self-update rate", "[analytic]") {
  for (int trial = 0; trial < 4; ++trial) {
    auto net = testsupport::random_network(6, 300 + trial);
    const auto aoi = exact_subset_ages(net, Metric::aoi);
    net.self_update_rate = 1.0;
    const auto version = exact_subset_ages(net, Metric::version);
    for (std::uint32_t mask = 1; mask <= aoi.full_mask(); ++mask)
      REQUIRE_THAT(aoi.age(mask), Catch::Matchers::WithinAbs(version.age(mask), 1e-12));
  }
}

TEST_CASE("reachable-set iteration and layer parallelism change nothing", "[analytic]") {
  for (int trial = 0; trial < 4; ++trial) {
    const auto net = testsupport::random_network(6, 400 + trial);
    const auto full = exact_subset_ages(net, Metric::version, 2);
    const auto lazy =
        exact_subset_ages(net, Metric::version, 2, SubsetIteration::reachable);
    const auto threaded =
        exact_subset_ages(net, Metric::version, 2, SubsetIteration::full, 2);
    for (int i = 0; i < net.n; ++i) {
      REQUIRE(lazy.age(1u << i) == full.age(1u << i));
      REQUIRE(threaded.age(1u << i) == full.age(1u << i));
      REQUIRE(threaded.moment(1u << i, 2) == full.moment(1u << i, 2));
    }
  }
  // The toy example never visits {1,3}: it is not reachable by expansion.
  const auto lazy = exact_subset_ages(toy_three_node(), Metric::version, 1,
                                      SubsetIteration::reachable);
  REQUIRE(std::isnan(lazy.age(0b101)));
  REQUIRE_THAT(node_ages(lazy)[1], Catch::Matchers::WithinAbs(1.25, 1e-12));
}

TEST_CASE("solver guards and divergence errors", "[analytic]") {
  TopologyParams p;
  p.source_rates = {1.0, 0.0};
  const auto broken = build_topology(TopologyKind::arbitrary, 2, 0, 0, 1.0, p);
  REQUIRE_THROWS_AS(exact_subset_ages(broken, Metric::version), std::domain_error);
  REQUIRE_THROWS_AS(exact_subset_ages(testsupport::random_network(3, 1), Metric::version, 9),
                    std::invalid_argument);
}

TEST_CASE("fully connected closed form matches the recursion", "[analytic]") {
  const auto v2 = fc_closed_form(2, 1.0, 1.0);
  REQUIRE_THAT(v2[1], Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(v2[0], Catch::Matchers::WithinAbs(4.0 / 3, 1e-12));

  for (int n : {2, 4, 6, 8}) {
    const auto net = build_topology(TopologyKind::fully_connected, n, 1.0, 1.0, 1.3);
    const auto exact = node_ages(exact_subset_ages(net, Metric::version));
    const auto closed = fc_closed_form(n, 1.0, 1.3);
    for (int i = 0; i < n; ++i) REQUIRE_THAT(exact[i], Catch::Matchers::WithinRel(closed[0], 1e-9));
  }
  for (int n : {2, 10, 100, 1000}) {
    const auto [lo, hi] = fc_age_bounds(n, 0.8, 1.7);
    const double v1 = fc_closed_form(n, 0.8, 1.7)[0];
    REQUIRE(v1 >= lo - 1e-12);
    REQUIRE(v1 <= hi + 1e-12);
  }
}

TEST_CASE("ring closed form matches the recursion and its asymptote", "[analytic]") {
  const auto v3 = ring_closed_form(3, 1.0, 1.0);
  REQUIRE_THAT(v3[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(v3[1], Catch::Matchers::WithinAbs(1.2, 1e-12));
  REQUIRE_THAT(v3[0], Catch::Matchers::WithinAbs(1.65, 1e-12));

  for (int n : {3, 5, 8}) {
    const auto net = build_topology(TopologyKind::ring_bidirectional, n, 1.0, 1.0, 0.9);
    const auto exact = node_ages(exact_subset_ages(net, Metric::version));
    const auto closed = ring_closed_form(n, 1.0, 0.9);
    for (int i = 0; i < n; ++i) REQUIRE_THAT(exact[i], Catch::Matchers::WithinRel(closed[0], 1e-9));
  }
  const double ratio = ring_closed_form(1024, 1.0, 1.0)[0] / ring_asymptote(1024, 1.0, 1.0);
  REQUIRE(ratio > 0.9);
  REQUIRE(ratio < 1.1);
}

TEST_CASE("bound recursion with exact inputs reproduces the closed forms", "[analytic]") {
  const int n = 12;
  BoundProfile fc;
  fc.n = n;
  fc.self_rate = 1.4;
  fc.source_total = 1.0;
  for (int j = 1; j < n; ++j) {
    fc.incoming_edges.push_back(static_cast<double>(j) * (n - j));
    fc.min_edge_rate.push_back(1.0 / (n - 1));
    fc.source_into.push_back(static_cast<double>(j) / n);
  }
  const auto u = upper_bound_recursion(fc);
  const auto closed = fc_closed_form(n, 1.0, 1.4);
  for (int j = 1; j <= n; ++j) REQUIRE_THAT(u[j - 1], Catch::Matchers::WithinRel(closed[j - 1], 1e-12));

  const auto ring_profile = generalized_ring_bound_profile(n, 1, 1.0, 1.0, 1.4);
  const auto ur = upper_bound_recursion(ring_profile);
  const auto ring = ring_closed_form(n, 1.0, 1.4);
  for (int j = 1; j < n - 1; ++j) REQUIRE_THAT(ur[j - 1], Catch::Matchers::WithinRel(ring[j - 1], 1e-12));
}

TEST_CASE("grid incoming-edge bounds are safe and the infinite bound is exact", "[analytic]") {
  REQUIRE(grid_infinite_incoming_bound(5) == 10);  // 2 * ceil(2 sqrt 5)
  REQUIRE(grid_infinite_incoming_bound(1) == 4);

  for (int n : {9, 16}) {
    const auto net = build_topology(TopologyKind::grid, n, 1.0, 1.0, 1.0);
    std::vector<int> min_incoming(n, INT32_MAX);
    for (std::uint32_t mask = 1; mask < (1u << n) - 1; ++mask) {
      int incoming = 0;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) continue;
        for (const auto& [j, r] : net.out_edges[i])
          if (mask & (1u << j)) ++incoming;
      }
      const int size = std::popcount(mask);
      min_incoming[size - 1] = std::min(min_incoming[size - 1], incoming);
    }
    for (int j = 1; j < n; ++j) {
      REQUIRE(grid_incoming_lower_bound(n, j) <= min_incoming[j - 1]);
      REQUIRE(grid_incoming_lower_bound(n, j) >= 1);
    }
  }
}

TEST_CASE("grid upper bound dominates the exact solution", "[analytic]") {
  for (int n : {9, 16}) {
    const auto net = build_topology(TopologyKind::grid, n, 1.0, 1.0, 1.0);
    const double v1 = node_ages(exact_subset_ages(net, Metric::version))[0];
    const auto u = upper_bound_recursion(grid_bound_profile(n, 1.0, 1.0, 1.0));
    REQUIRE(u[0] >= v1);
    for (int j = 1; j < n; ++j) REQUIRE(u[j - 1] >= u[j] - 1e-12);  // monotone non-increasing
  }
}

TEST_CASE("generalized ring contiguous arcs minimize incoming edges", "[analytic]") {
  REQUIRE(generalized_ring_arc_incoming(10, 2, 3) == 6);

  const int n = 11, f = 2;
  const auto net = build_topology(TopologyKind::generalized_ring, n, 1.0, 1.0, 1.0,
                                  TopologyParams{.ring_reach = f});
  std::vector<int> min_incoming(n, INT32_MAX);
  for (std::uint32_t mask = 1; mask < (1u << n) - 1; ++mask) {
    int incoming = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      for (const auto& [j, r] : net.out_edges[i])
        if (mask & (1u << j)) ++incoming;
    }
    min_incoming[std::popcount(mask) - 1] =
        std::min(min_incoming[std::popcount(mask) - 1], incoming);
  }
  for (int j = 1; j < n; ++j)
    REQUIRE(generalized_ring_arc_incoming(n, f, j) == min_incoming[j - 1]);

  const double v1 = node_ages(exact_subset_ages(net, Metric::version))[0];
  REQUIRE(upper_bound_recursion(generalized_ring_bound_profile(n, f, 1.0, 1.0, 1.0))[0] >= v1);
}

TEST_CASE("age-aware scheme formulas hit their limits", "[analytic]") {
  REQUIRE_THAT(scheme_limit(Scheme::asuman, 1.0, 1.0), Catch::Matchers::WithinAbs(3.0, 1e-12));
  REQUIRE_THAT(scheme_limit(Scheme::optimal, 1.0, 1.0), Catch::Matchers::WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(scheme_limit(Scheme::minage_set, 1.0, 1.0), Catch::Matchers::WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(scheme_limit(Scheme::fully_distributed, 1.0, 1.0),
               Catch::Matchers::WithinAbs(1.0 + std::numbers::e, 1e-12));

  // Finite-n values approach the limits from below.
  double prev = 0;
  for (int n : {8, 64, 512, 4096}) {
    const double v = scheme_value(Scheme::asuman, n, 1.0, 1.0);
    REQUIRE(v > prev);
    REQUIRE(v < 3.0);
    prev = v;
  }
  REQUIRE_THAT(scheme_value(Scheme::optimal, 200, 1.0, 1.0),
               Catch::Matchers::WithinAbs(2.0, 0.02));
}

TEST_CASE("renewal line limits are additive", "[analytic]") {
  const RenewalDist hops[] = {RenewalDist::exponential(1), RenewalDist::exponential(2),
                              RenewalDist::exponential(4)};
  REQUIRE_THAT(renewal_line_limit(hops, Metric::aoi), Catch::Matchers::WithinAbs(1.75, 1e-12));
  const RenewalDist det[] = {RenewalDist::deterministic(3)};
  REQUIRE_THAT(renewal_line_limit(det, Metric::aoi), Catch::Matchers::WithinAbs(1.5, 1e-12));

  const auto source = RenewalDist::exponential(2.5);
  REQUIRE_THAT(renewal_line_limit(hops, Metric::version, &source),
               Catch::Matchers::WithinAbs(1.75 * 2.5, 1e-12));
  REQUIRE_THROWS_AS(renewal_line_limit(hops, Metric::version), std::invalid_argument);

  // Gamma and uniform hop contributions.
  REQUIRE_THAT(renewal_hop_limit(RenewalDist::gamma(2.0, 0.35)),
               Catch::Matchers::WithinAbs(3 * 0.35 / 2, 1e-12));
  REQUIRE_THAT(renewal_hop_limit(RenewalDist::uniform(0, 2)),
               Catch::Matchers::WithinAbs((4.0 / 3) / 2, 1e-12));
}
