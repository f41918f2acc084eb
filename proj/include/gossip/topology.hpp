#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gossip {

enum class TopologyKind {
  fully_connected,
  ring_bidirectional,
  ring_unidirectional,
  line,
  grid,
  generalized_ring,
  clustered,
  arbitrary,
};

inline const char* to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::fully_connected: return "fully_connected";
    case TopologyKind::ring_bidirectional: return "ring_bidirectional";
    case TopologyKind::ring_unidirectional: return "ring_unidirectional";
    case TopologyKind::line: return "line";
    case TopologyKind::grid: return "grid";
    case TopologyKind::generalized_ring: return "generalized_ring";
    case TopologyKind::clustered: return "clustered";
    case TopologyKind::arbitrary: return "arbitrary";
  }
  return "?";
}

inline TopologyKind topology_kind_from_string(const std::string& s) {
  for (TopologyKind k :
       {TopologyKind::fully_connected, TopologyKind::ring_bidirectional,
        TopologyKind::ring_unidirectional, TopologyKind::line, TopologyKind::grid,
        TopologyKind::generalized_ring, TopologyKind::clustered, TopologyKind::arbitrary}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown topology kind: " + s);
}

struct TopologyLabel {
  TopologyKind kind = TopologyKind::arbitrary;
  std::map<std::string, double> params;  // f, clusters, jammers, ...

  std::string to_string() const {
    std::string s = gossip::to_string(kind);
    for (const auto& [k, v] : params) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %s=%g", k.c_str(), v);
      s += buf;
    }
    return s;
  }
};

/// A gossip network: a weighted directed rate graph over user nodes plus the
/// source's per-node update rates and its own version self-update rate.
/// Nodes are stored 0-based internally; all file formats are 1-based with the
/// source as index 0.
struct Network {
  int n = 0;
  double self_update_rate = 0.0;            // versions per unit time
  std::vector<double> source_rates;         // source -> node i
  std::vector<std::vector<std::pair<int, double>>> out_edges;  // sorted by target
  TopologyLabel label;

  double gossip_rate(int i, int j) const {
    for (const auto& [t, r] : out_edges[i])
      if (t == j) return r;
    return 0.0;
  }

  void set_gossip_rate(int i, int j, double rate) {
    if (i == j) throw std::invalid_argument("self-loops are not allowed");
    auto& edges = out_edges[i];
    auto it = std::lower_bound(edges.begin(), edges.end(), j,
                               [](const auto& e, int t) { return e.first < t; });
    if (it != edges.end() && it->first == j) {
      if (rate > 0)
        it->second = rate;
      else
        edges.erase(it);
    } else if (rate > 0) {
      edges.insert(it, {j, rate});
    }
  }

  void add_gossip_rate(int i, int j, double rate) {
    set_gossip_rate(i, j, gossip_rate(i, j) + rate);
  }

  double out_rate_sum(int i) const {
    double s = 0;
    for (const auto& [t, r] : out_edges[i]) s += r;
    return s;
  }

  double total_source_rate() const {
    double s = 0;
    for (double r : source_rates) s += r;
    return s;
  }

  double total_gossip_capacity() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += out_rate_sum(i);
    return s;
  }

  std::size_t directed_edge_count() const {
    std::size_t c = 0;
    for (const auto& edges : out_edges) c += edges.size();
    return c;
  }

  /// Undirected links: pairs {i<j} connected by a positive rate either way.
  std::vector<std::pair<int, int>> undirected_links() const {
    std::vector<std::pair<int, int>> links;
    for (int i = 0; i < n; ++i)
      for (const auto& [j, r] : out_edges[i])
        if (i < j || gossip_rate(j, i) == 0.0) links.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(links.begin(), links.end());
    links.erase(std::unique(links.begin(), links.end()), links.end());
    return links;
  }
};

namespace detail {

/// Splits `total` equally over `targets`, adjusting the last share so the
/// forward sum reproduces `total` bit-exactly.
inline void assign_equal_split(Network& net, int from, const std::vector<int>& targets,
                               double total) {
  if (total == 0) return;
  if (targets.empty()) throw std::invalid_argument("node with positive rate has zero neighbors");
  const double share = total / static_cast<double>(targets.size());
  double used = 0;
  for (std::size_t k = 0; k + 1 < targets.size(); ++k) {
    net.add_gossip_rate(from, targets[k], share);
    used += share;
  }
  net.add_gossip_rate(from, targets.back(), total - used);
}

inline void assign_source_split(Network& net, const std::vector<int>& targets, double total) {
  if (total == 0) return;
  if (targets.empty()) throw std::invalid_argument("source has no update targets");
  const double share = total / static_cast<double>(targets.size());
  double used = 0;
  for (std::size_t k = 0; k + 1 < targets.size(); ++k) {
    net.source_rates[targets[k]] += share;
    used += share;
  }
  net.source_rates[targets.back()] += total - used;
}

inline int exact_isqrt(int n) {
  int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

/// Kind-specific build parameters; only the fields relevant to the requested
/// kind are read.
struct TopologyParams {
  int ring_reach = 1;              // generalized ring: neighbors per side, f(n)
  int clusters = 0;                // clustered: number of cluster heads k
  TopologyKind intra = TopologyKind::arbitrary;  // clustered: member connectivity
                                                 // (arbitrary = disconnected)
  double cluster_rate = 0.0;       // clustered: combined head-to-members rate
  double head_ring_rate = 0.0;     // clustered: optional head-to-head ring rate
  // arbitrary: explicit rates
  std::vector<std::tuple<int, int, double>> edges;   // (i, j, rate), 0-based
  std::vector<double> source_rates;                  // per node, size n
};

/// Builds a rate graph of the given kind. Every node's total outgoing gossip
/// rate equals `gossip_rate`, split equally among its out-neighbors; the
/// source budget `source_rate` is split equally over the directly updated
/// nodes (all of them, except for clustered networks where only heads are).
inline Network build_topology(TopologyKind kind, int n, double gossip_rate, double source_rate,
                              double self_rate, const TopologyParams& params = {}) {
  if (n < 1) throw std::invalid_argument("build_topology: n must be >= 1");
  if (gossip_rate < 0 || source_rate < 0 || self_rate < 0)
    throw std::invalid_argument("build_topology: rates must be non-negative");

  Network net;
  net.n = n;
  net.self_update_rate = self_rate;
  net.source_rates.assign(n, 0.0);
  net.out_edges.resize(n);
  net.label.kind = kind;

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;

  auto ring_neighbors = [&](int i, int reach, bool both_sides) {
    std::vector<int> nb;
    for (int d = 1; d <= reach; ++d) {
      nb.push_back((i + d) % n);
      if (both_sides) nb.push_back(((i - d) % n + n) % n);
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    nb.erase(std::remove(nb.begin(), nb.end(), i), nb.end());
    return nb;
  };

  switch (kind) {
    case TopologyKind::fully_connected: {
      for (int i = 0; i < n; ++i) {
        std::vector<int> nb;
        for (int j = 0; j < n; ++j)
          if (j != i) nb.push_back(j);
        detail::assign_equal_split(net, i, nb, gossip_rate);
      }
      detail::assign_source_split(net, all, source_rate);
      break;
    }
    case TopologyKind::ring_bidirectional: {
      if (n < 2) throw std::invalid_argument("ring: n must be >= 2");
      for (int i = 0; i < n; ++i)
        detail::assign_equal_split(net, i, ring_neighbors(i, 1, true), gossip_rate);
      detail::assign_source_split(net, all, source_rate);
      break;
    }
    case TopologyKind::ring_unidirectional: {
      if (n < 2) throw std::invalid_argument("ring: n must be >= 2");
      for (int i = 0; i < n; ++i)
        detail::assign_equal_split(net, i, {(i + 1) % n}, gossip_rate);
      detail::assign_source_split(net, all, source_rate);
      break;
    }
    case TopologyKind::line: {
      for (int i = 0; i < n; ++i) {
        std::vector<int> nb;
        if (i > 0) nb.push_back(i - 1);
        if (i + 1 < n) nb.push_back(i + 1);
        detail::assign_equal_split(net, i, nb, gossip_rate);
      }
      detail::assign_source_split(net, all, source_rate);
      break;
    }
    case TopologyKind::grid: {
      const int side = detail::exact_isqrt(n);
      if (side * side != n) throw std::invalid_argument("grid: n must be a perfect square");
      // Non-wrapping lattice; boundary nodes split their full budget among
      // their 2-3 actual neighbors.
      auto id = [side](int r, int c) { return r * side + c; };
      for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
          std::vector<int> nb;
          if (r > 0) nb.push_back(id(r - 1, c));
          if (c > 0) nb.push_back(id(r, c - 1));
          if (c + 1 < side) nb.push_back(id(r, c + 1));
          if (r + 1 < side) nb.push_back(id(r + 1, c));
          detail::assign_equal_split(net, id(r, c), nb, gossip_rate);
        }
      }
      detail::assign_source_split(net, all, source_rate);
      break;
    }
    case TopologyKind::generalized_ring: {
      const int f = params.ring_reach;
      if (f < 1) throw std::invalid_argument("generalized_ring: f must be >= 1");
      if (2 * f >= n) throw std::invalid_argument("generalized_ring: f must satisfy f < n/2");
      for (int i = 0; i < n; ++i)
        detail::assign_equal_split(net, i, ring_neighbors(i, f, true), gossip_rate);
      detail::assign_source_split(net, all, source_rate);
      net.label.params["f"] = f;
      break;
    }
    case TopologyKind::clustered: {
      const int k = params.clusters;
      if (k < 1 || k >= n) throw std::invalid_argument("clustered: need 1 <= k < n");
      if ((n - k) % k != 0)
        throw std::invalid_argument("clustered: (n - k) must be divisible by k");
      const int m = (n - k) / k;  // members per cluster
      // Heads are nodes 0..k-1; cluster c owns members k + c*m .. k + (c+1)*m - 1.
      std::vector<int> heads(k);
      for (int c = 0; c < k; ++c) heads[c] = c;
      detail::assign_source_split(net, heads, source_rate);
      for (int c = 0; c < k; ++c) {
        std::vector<int> members(m);
        for (int j = 0; j < m; ++j) members[j] = k + c * m + j;
        detail::assign_equal_split(net, c, members, params.cluster_rate);
        // Member-to-member connectivity inside the cluster.
        if (params.intra == TopologyKind::fully_connected && m > 1) {
          for (int j = 0; j < m; ++j) {
            std::vector<int> nb;
            for (int l = 0; l < m; ++l)
              if (l != j) nb.push_back(members[l]);
            detail::assign_equal_split(net, members[j], nb, gossip_rate);
          }
        } else if (params.intra == TopologyKind::ring_bidirectional && m > 1) {
          for (int j = 0; j < m; ++j) {
            std::vector<int> nb = {members[(j + 1) % m], members[((j - 1) % m + m) % m]};
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            detail::assign_equal_split(net, members[j], nb, gossip_rate);
          }
        }
      }
      if (params.head_ring_rate > 0 && k > 1) {
        for (int c = 0; c < k; ++c) {
          std::vector<int> nb = {(c + 1) % k, ((c - 1) % k + k) % k};
          std::sort(nb.begin(), nb.end());
          nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
          detail::assign_equal_split(net, c, nb, params.head_ring_rate);
        }
      }
      net.label.params["clusters"] = k;
      break;
    }
    case TopologyKind::arbitrary: {
      if (!params.source_rates.empty()) {
        if (static_cast<int>(params.source_rates.size()) != n)
          throw std::invalid_argument("arbitrary: source_rates size mismatch");
        net.source_rates = params.source_rates;
      } else {
        detail::assign_source_split(net, all, source_rate);
      }
      for (auto [i, j, r] : params.edges) {
        if (i < 0 || i >= n || j < 0 || j >= n)
          throw std::invalid_argument("arbitrary: edge endpoint out of range");
        net.add_gossip_rate(i, j, r);
      }
      break;
    }
  }
  return net;
}

enum class JammerPlacement { equidistant, adjacent, explicit_list, greedy_isolate };

/// A set of jammed (removed) undirected gossip links.
struct JammerPlan {
  JammerPlacement placement = JammerPlacement::equidistant;
  int count = 0;                                // used by all but explicit_list
  std::vector<std::pair<int, int>> edges;       // explicit_list only, 0-based
};

/// Removes the planned undirected links (both directions). Returns a new
/// network; the input is unchanged. Equidistant/adjacent placements are
/// defined on ring links in ring order; greedy_isolate consolidates the
/// remaining links of a fully connected network per the most-harmful attack.
inline Network apply_jammers(const Network& input, const JammerPlan& plan) {
  Network net = input;
  auto cut = [&net](int i, int j) {
    net.set_gossip_rate(i, j, 0);
    net.set_gossip_rate(j, i, 0);
  };
  switch (plan.placement) {
    case JammerPlacement::explicit_list: {
      for (auto [i, j] : plan.edges) {
        if (i < 0 || i >= net.n || j < 0 || j >= net.n)
          throw std::invalid_argument("apply_jammers: edge endpoint out of range");
        cut(i, j);  // absent links are a no-op, making re-application idempotent
      }
      net.label.params["jammers"] = static_cast<double>(plan.edges.size());
      return net;
    }
    case JammerPlacement::equidistant:
    case JammerPlacement::adjacent: {
      if (input.label.kind != TopologyKind::ring_bidirectional &&
          input.label.kind != TopologyKind::ring_unidirectional)
        throw std::invalid_argument("apply_jammers: placement requires a ring network");
      const int n = net.n;
      if (plan.count > n) throw std::invalid_argument("apply_jammers: count exceeds link count");
      // Ring link l (0-based) joins nodes l and l+1 mod n.
      for (int k = 0; k < plan.count; ++k) {
        const int l = plan.placement == JammerPlacement::adjacent
                          ? k
                          : static_cast<int>((static_cast<std::int64_t>(k) * n) / plan.count);
        cut(l, (l + 1) % n);
      }
      net.label.params["jammers"] = plan.count;
      return net;
    }
    case JammerPlacement::greedy_isolate: {
      if (input.label.kind != TopologyKind::fully_connected)
        throw std::invalid_argument("apply_jammers: greedy placement requires a fully connected network");
      const int n = net.n;
      const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
      if (plan.count > total)
        throw std::invalid_argument("apply_jammers: count exceeds link count");
      // Isolate nodes 0, 1, ... while the budget covers their remaining links;
      // spend any leftover cutting the next node's links to highest targets.
      std::int64_t budget = plan.count;
      int isolated = 0;
      while (isolated < n && budget >= n - 1 - isolated) {
        budget -= n - 1 - isolated;
        for (int j = isolated + 1; j < n; ++j) cut(isolated, j);
        ++isolated;
      }
      if (isolated < n) {
        for (int j = n - 1; j > isolated && budget > 0; --j, --budget) cut(isolated, j);
      }
      net.label.params["jammers"] = plan.count;
      return net;
    }
  }
  return net;
}

struct ValidationReport {
  bool ok = false;
  std::vector<int> unreachable;         // nodes with no positive-rate path from the source
  std::vector<int> isolated;            // nodes with zero total incoming rate
  std::vector<double> out_rate_sum;     // per-node outgoing gossip rate

  std::string summary() const {
    std::ostringstream os;
    os << (ok ? "ok" : "invalid");
    if (!unreachable.empty()) {
      os << "; unreachable from source:";
      for (int i : unreachable) os << ' ' << (i + 1);
    }
    if (!isolated.empty()) {
      os << "; zero incoming rate:";
      for (int i : isolated) os << ' ' << (i + 1);
    }
    return os.str();
  }
};

/// Report-only check of the reachability invariant (ages diverge on nodes the
/// source cannot reach through positive-rate edges).
inline ValidationReport validate(const Network& net) {
  ValidationReport rep;
  rep.out_rate_sum.resize(net.n);
  std::vector<double> in_rate(net.n, 0.0);
  for (int i = 0; i < net.n; ++i) {
    rep.out_rate_sum[i] = net.out_rate_sum(i);
    for (const auto& [j, r] : net.out_edges[i]) in_rate[j] += r;
  }
  std::vector<char> reached(net.n, 0);
  std::queue<int> q;
  for (int i = 0; i < net.n; ++i)
    if (net.source_rates[i] > 0) {
      reached[i] = 1;
      q.push(i);
    }
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (const auto& [j, r] : net.out_edges[i])
      if (r > 0 && !reached[j]) {
        reached[j] = 1;
        q.push(j);
      }
  }
  for (int i = 0; i < net.n; ++i) {
    if (!reached[i]) rep.unreachable.push_back(i);
    if (in_rate[i] + net.source_rates[i] == 0) rep.isolated.push_back(i);
  }
  rep.ok = rep.unreachable.empty();
  return rep;
}

/// Plain-text edge-list format: `n lambda_e` header, `src i rate` lines, then
/// `edge i j rate` lines, nodes 1-based. Round-trips bit-exactly.
inline void save_network(std::ostream& os, const Network& net) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << net.n << ' ' << num(net.self_update_rate) << '\n';
  for (int i = 0; i < net.n; ++i)
    if (net.source_rates[i] > 0) os << "src " << (i + 1) << ' ' << num(net.source_rates[i]) << '\n';
  for (int i = 0; i < net.n; ++i)
    for (const auto& [j, r] : net.out_edges[i])
      os << "edge " << (i + 1) << ' ' << (j + 1) << ' ' << num(r) << '\n';
}

inline Network load_network(std::istream& is) {
  Network net;
  if (!(is >> net.n >> net.self_update_rate) || net.n < 1)
    throw std::runtime_error("load_network: bad header");
  net.source_rates.assign(net.n, 0.0);
  net.out_edges.resize(net.n);
  std::string tag;
  while (is >> tag) {
    if (tag == "src") {
      int i;
      double r;
      if (!(is >> i >> r) || i < 1 || i > net.n) throw std::runtime_error("load_network: bad src line");
      net.source_rates[i - 1] = r;
    } else if (tag == "edge") {
      int i, j;
      double r;
      if (!(is >> i >> j >> r) || i < 1 || i > net.n || j < 1 || j > net.n || i == j)
        throw std::runtime_error("load_network: bad edge line");
      net.set_gossip_rate(i - 1, j - 1, r);
    } else {
      throw std::runtime_error("load_network: unknown tag " + tag);
    }
  }
  return net;
}

}  // namespace gossip
