#pragma once

#include <random>
#include <vector>

#include "gossip/rng.hpp"
#include "gossip/topology.hpp"

namespace testsupport {

/// Random dense-ish network with every node directly updated by the source;
/// rates uniform in [0.1, 2], so ages are finite and the exact solver applies.
inline gossip::Network random_network(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto rate = [&rng] { return 0.1 + 1.9 * gossip::uniform01(rng); };
  gossip::TopologyParams params;
  params.source_rates.resize(n);
  for (int i = 0; i < n; ++i) params.source_rates[i] = rate();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && gossip::uniform01(rng) < 0.5) params.edges.emplace_back(i, j, rate());
  auto net = gossip::build_topology(gossip::TopologyKind::arbitrary, n, 0, 0, rate(), params);
  return net;
}

/// Connected components over undirected positive-rate links, sizes descending.
inline std::vector<int> component_sizes(const gossip::Network& net) {
  std::vector<int> parent(net.n);
  for (int i = 0; i < net.n; ++i) parent[i] = i;
  auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [i, j] : net.undirected_links()) parent[find(i)] = find(j);
  std::vector<int> count(net.n, 0);
  for (int i = 0; i < net.n; ++i) ++count[find(i)];
  std::vector<int> sizes;
  for (int c : count)
    if (c > 0) sizes.push_back(c);
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

}  // namespace testsupport
