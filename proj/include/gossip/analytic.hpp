#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "gossip/distributions.hpp"
#include "gossip/protocols.hpp"
#include "gossip/stats.hpp"
#include "gossip/topology.hpp"

namespace gossip::analytic {

inline constexpr int kMaxExactNodes = 20;  // the subset table is exponential in n
inline constexpr int kMaxMomentOrder = 4;

enum class SubsetIteration {
  full,       // every subset, by descending cardinality
  reachable,  // only subsets reachable by neighbor expansion from singletons
};

/// Expected-age table over node subsets: entry S holds the limiting moments of
/// the age of the freshest node in S. Bit i of a mask is node i+1.
struct SubsetTable {
  int n = 0;
  Metric metric = Metric::version;
  int max_moment = 1;
  // values[m-1][mask] = m-th moment for the subset `mask`; NaN if not computed.
  std::vector<std::vector<double>> values;

  double age(std::uint32_t mask) const { return values[0][mask]; }
  double moment(std::uint32_t mask, int m) const { return values[m - 1][mask]; }
  std::uint32_t full_mask() const { return (n == 32 ? 0u : (1u << n)) - 1u; }
};

namespace detail {

inline double binomial(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Rate from node i into the subset `mask`.
inline double rate_into(const Network& net, int i, std::uint32_t mask) {
  double r = 0;
  for (const auto& [j, rate] : net.out_edges[i])
    if (mask & (1u << j)) r += rate;
  return r;
}

inline double source_rate_into(const Network& net, std::uint32_t mask) {
  double r = 0;
  for (int i = 0; i < net.n; ++i)
    if (mask & (1u << i)) r += net.source_rates[i];
  return r;
}

/// One-entry solve of the stationary recursion at moment order m (1-based),
/// given the same-order values of all one-larger subsets and the lower-order
/// values of the subset itself.
inline double solve_entry(const Network& net, std::uint32_t mask, int m, Metric metric,
                          const std::vector<std::vector<double>>& values) {
  double num;
  if (metric == Metric::version) {
    // Self-update jump: E[(X+1)^m - X^m] expands over the lower moments.
    double jump = 1.0;  // k = 0 term, v^(0) = 1
    for (int k = 1; k < m; ++k) jump += binomial(m, k) * values[k - 1][mask];
    num = net.self_update_rate * jump;
  } else {
    num = m * (m == 1 ? 1.0 : values[m - 2][mask]);
  }
  double den = source_rate_into(net, mask);
  for (int i = 0; i < net.n; ++i) {
    if (mask & (1u << i)) continue;
    const double r = rate_into(net, i, mask);
    if (r > 0) {
      num += r * values[m - 1][mask | (1u << i)];
      den += r;
    }
  }
  if (den == 0) return std::numeric_limits<double>::infinity();
  return num / den;
}

template <typename Fn>
inline void parallel_for_chunks(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 64) {
    fn(0, count);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::future<void>> futs;
  for (std::size_t lo = 0; lo < count; lo += chunk) {
    const std::size_t hi = std::min(count, lo + chunk);
    futs.push_back(std::async(std::launch::async, [&fn, lo, hi] { fn(lo, hi); }));
  }
  for (auto& f : futs) f.get();
}

}  // namespace detail

/// Solves the subset-age recursion exactly for every requested moment order,
/// descending from the full set (whose value needs no larger sets). The AoI
/// metric is the same recursion with the self-update rate replaced by a unit
/// numerator; entries of a cardinality layer only depend on the layer above,
/// so layers may be computed in parallel without changing any result.
inline SubsetTable exact_subset_ages(const Network& net, Metric metric, int max_moment = 1,
                                     SubsetIteration iteration = SubsetIteration::full,
                                     int threads = 1) {
  if (net.n < 1 || net.n > kMaxExactNodes)
    throw std::invalid_argument("exact_subset_ages: n must be in 1..20");
  if (max_moment < 1 || max_moment > kMaxMomentOrder)
    throw std::invalid_argument("exact_subset_ages: moment order must be in 1..4");
  const auto report = validate(net);
  if (!report.ok)
    throw std::domain_error("exact_subset_ages: ages diverge, " + report.summary());
  if (metric == Metric::version && net.self_update_rate <= 0)
    throw std::domain_error("exact_subset_ages: version metric needs a positive self-update rate");

  const std::uint32_t size = 1u << net.n;
  SubsetTable table;
  table.n = net.n;
  table.metric = metric;
  table.max_moment = max_moment;
  table.values.assign(max_moment,
                      std::vector<double>(size, std::numeric_limits<double>::quiet_NaN()));

  // Masks to compute, bucketed by cardinality.
  std::vector<std::vector<std::uint32_t>> by_size(net.n + 1);
  if (iteration == SubsetIteration::full) {
    for (std::uint32_t mask = 1; mask < size; ++mask)
      by_size[std::popcount(mask)].push_back(mask);
  } else {
    std::vector<std::uint8_t> needed(size, 0);
    std::vector<std::uint32_t> stack;
    for (int i = 0; i < net.n; ++i) {
      needed[1u << i] = 1;
      stack.push_back(1u << i);
    }
    while (!stack.empty()) {
      const std::uint32_t mask = stack.back();
      stack.pop_back();
      by_size[std::popcount(mask)].push_back(mask);
      for (int i = 0; i < net.n; ++i) {
        if (mask & (1u << i)) continue;
        const std::uint32_t next = mask | (1u << i);
        if (!needed[next] && detail::rate_into(net, i, mask) > 0) {
          needed[next] = 1;
          stack.push_back(next);
        }
      }
    }
    for (auto& bucket : by_size) std::sort(bucket.begin(), bucket.end());
  }

  for (int m = 1; m <= max_moment; ++m) {
    for (int card = net.n; card >= 1; --card) {
      const auto& masks = by_size[card];
      detail::parallel_for_chunks(masks.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k)
          table.values[m - 1][masks[k]] =
              detail::solve_entry(net, masks[k], m, metric, table.values);
      });
    }
  }
  return table;
}

/// Per-node values (singleton subsets) of the requested moment order.
inline std::vector<double> node_ages(const SubsetTable& table, int m = 1) {
  std::vector<double> v(table.n);
  for (int i = 0; i < table.n; ++i) v[i] = table.moment(1u << i, m);
  return v;
}

// ---------------------------------------------------------------------------
// Closed forms for the symmetric networks: the recursion collapses to one
// equation per subset size.

/// Fully connected network: v[j-1] is the age of any j-node subset. Backward
/// recursion from v_n, accumulated in extended precision.
inline std::vector<double> fc_closed_form(int n, double gossip_rate, double self_rate,
                                          double source_rate = -1.0) {
  if (n < 1 || gossip_rate <= 0 || self_rate <= 0)
    throw std::invalid_argument("fc_closed_form: need n >= 1 and positive rates");
  if (source_rate < 0) source_rate = gossip_rate;
  const long double le = self_rate, lam = gossip_rate, ls = source_rate;
  std::vector<double> v(n);
  long double next = le / ls;
  v[n - 1] = static_cast<double>(next);
  for (int j = n - 1; j >= 1; --j) {
    const long double gossip_in =
        static_cast<long double>(j) * (n - j) * lam / static_cast<long double>(n - 1);
    next = (le + gossip_in * next) / (static_cast<long double>(j) * ls / n + gossip_in);
    v[j - 1] = static_cast<double>(next);
  }
  return v;
}

/// Two-sided bracket on the single-node fully connected age (source budget
/// equal to the gossip budget): harmonic growth from below and above.
inline std::pair<double, double> fc_age_bounds(int n, double gossip_rate, double self_rate) {
  const double ratio = self_rate / gossip_rate;
  const double lower =
      ratio * ((static_cast<double>(n - 1) / n) * harmonic(n - 1) + 1.0 / n);
  const double upper = ratio * harmonic(n);
  return {lower, upper};
}

/// Bidirectional ring: v[j-1] is the age of a contiguous j-node arc.
inline std::vector<double> ring_closed_form(int n, double gossip_rate, double self_rate,
                                            double source_rate = -1.0) {
  if (n < 1 || gossip_rate <= 0 || self_rate <= 0)
    throw std::invalid_argument("ring_closed_form: need n >= 1 and positive rates");
  if (source_rate < 0) source_rate = gossip_rate;
  const long double le = self_rate, lam = gossip_rate, ls = source_rate;
  std::vector<double> v(n);
  long double next = le / ls;
  v[n - 1] = static_cast<double>(next);
  for (int j = n - 1; j >= 1; --j) {
    next = (le + lam * next) / (static_cast<long double>(j) * ls / n + lam);
    v[j - 1] = static_cast<double>(next);
  }
  return v;
}

/// Large-n single-node age of the bidirectional ring (source budget equal to
/// the gossip budget): (lambda_e/lambda) sqrt(pi n / 2).
inline double ring_asymptote(int n, double gossip_rate, double self_rate) {
  return self_rate / gossip_rate * std::sqrt(std::numbers::pi * n / 2.0);
}

// ---------------------------------------------------------------------------
// Upper-bound recursion for complex topologies: replace the per-subset
// neighbor sums with per-size lower bounds on incoming-edge count and rate.

struct BoundProfile {
  int n = 0;
  double self_rate = 0;
  double source_total = 0;             // lambda_0(N)
  std::vector<double> incoming_edges;  // [j-1], j = 1..n-1: min incoming edges of any j-set
  std::vector<double> min_edge_rate;   // [j-1]: min per-edge rate into any j-set
  std::vector<double> source_into;     // [j-1]: min lambda_0(S) over j-sets
};

/// Solves the bound recursion backward; u[j-1] upper-bounds the age of every
/// j-node subset, so u[0] bounds every single node.
inline std::vector<double> upper_bound_recursion(const BoundProfile& p) {
  const int n = p.n;
  if (n < 1 || static_cast<int>(p.incoming_edges.size()) < n - 1 ||
      static_cast<int>(p.min_edge_rate.size()) < n - 1 ||
      static_cast<int>(p.source_into.size()) < n - 1)
    throw std::invalid_argument("upper_bound_recursion: incomplete profile");
  if (p.source_total <= 0) throw std::invalid_argument("upper_bound_recursion: zero denominator");
  std::vector<double> u(n);
  long double next = static_cast<long double>(p.self_rate) / p.source_total;
  u[n - 1] = static_cast<double>(next);
  for (int j = n - 1; j >= 1; --j) {
    const long double in = static_cast<long double>(p.incoming_edges[j - 1]) * p.min_edge_rate[j - 1];
    const long double den = p.source_into[j - 1] + in;
    if (den <= 0) throw std::invalid_argument("upper_bound_recursion: zero denominator");
    next = (p.self_rate + in * next) / den;
    u[j - 1] = static_cast<double>(next);
  }
  return u;
}

namespace detail {
/// Smallest integer m with m*m >= x.
inline int ceil_sqrt(std::int64_t x) {
  int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(x))));
  while (static_cast<std::int64_t>(m) * m < x) ++m;
  while (m > 0 && static_cast<std::int64_t>(m - 1) * (m - 1) >= x) --m;
  return m;
}
}  // namespace detail

/// Infinite-lattice lower bound on the incoming edges of a j-node set: 2*ceil(2*sqrt(j)).
inline int grid_infinite_incoming_bound(int j) { return 2 * detail::ceil_sqrt(4LL * j); }

/// Per-size incoming-edge lower bound for the finite sqrt(n) x sqrt(n) grid.
/// The infinite-lattice bound is capped by the boundary cases: sets packed
/// into a corner (ceil(2*sqrt(j)) edges, likewise for the complement) and
/// full-width bands (sqrt(n) edges).
inline double grid_incoming_lower_bound(int n, int j) {
  const int side = gossip::detail::exact_isqrt(n);
  const int jmin = std::min(j, n - j);
  const int infinite = grid_infinite_incoming_bound(j);
  const int corner = detail::ceil_sqrt(4LL * jmin);
  return std::max(1, std::min({infinite, corner, side}));
}

inline BoundProfile grid_bound_profile(int n, double gossip_rate, double source_rate,
                                       double self_rate) {
  const int side = gossip::detail::exact_isqrt(n);
  if (side * side != n) throw std::invalid_argument("grid_bound_profile: n must be a perfect square");
  BoundProfile p;
  p.n = n;
  p.self_rate = self_rate;
  p.source_total = source_rate;
  p.incoming_edges.resize(n - 1);
  p.min_edge_rate.assign(n - 1, gossip_rate / 4.0);  // interior nodes split four ways
  p.source_into.resize(n - 1);
  for (int j = 1; j < n; ++j) {
    p.incoming_edges[j - 1] = grid_incoming_lower_bound(n, j);
    p.source_into[j - 1] = static_cast<double>(j) * source_rate / n;
  }
  return p;
}

/// Exact incoming-edge count of a contiguous j-node arc in a generalized ring
/// with reach f; contiguous arcs minimize the count over all j-sets.
inline int generalized_ring_arc_incoming(int n, int f, int j) {
  if (j >= n) return 0;
  if (2 * f + 1 >= n) return (n - j) * j;  // every outside node sees the whole arc
  auto overlap = [](int a, int b, int c, int d) {  // |[a,b] ∩ [c,d]|
    return std::max(0, std::min(b, d) - std::max(a, c) + 1);
  };
  int count = 0;
  for (int i = j; i < n; ++i) {
    // Window [i-f, i+f] intersected with the arc [0, j-1], cyclically.
    const int lo = i - f, hi = i + f;
    count += overlap(std::max(lo, 0), std::min(hi, n - 1), 0, j - 1);
    if (hi >= n) count += overlap(0, hi - n, 0, j - 1);
    if (lo < 0) count += overlap(lo + n, n - 1, 0, j - 1);
  }
  return count;
}

inline BoundProfile generalized_ring_bound_profile(int n, int f, double gossip_rate,
                                                   double source_rate, double self_rate) {
  if (f < 1 || 2 * f >= n)
    throw std::invalid_argument("generalized_ring_bound_profile: need 1 <= f < n/2");
  BoundProfile p;
  p.n = n;
  p.self_rate = self_rate;
  p.source_total = source_rate;
  p.incoming_edges.resize(n - 1);
  p.min_edge_rate.assign(n - 1, gossip_rate / (2.0 * f));
  p.source_into.resize(n - 1);
  for (int j = 1; j < n; ++j) {
    p.incoming_edges[j - 1] = generalized_ring_arc_incoming(n, f, j);
    p.source_into[j - 1] = static_cast<double>(j) * source_rate / n;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Age-aware scheme formulas (fully connected network, source budget lambda).

enum class Scheme { asuman, minage_set, optimal, fully_distributed };

/// Finite-n per-node limiting age of the named scheme.
inline double scheme_value(Scheme scheme, int n, double gossip_rate, double self_rate) {
  if (n < 2) throw std::invalid_argument("scheme_value: n must be >= 2");
  const double le = self_rate, lam = gossip_rate;
  const double nn = static_cast<double>(n);
  switch (scheme) {
    case Scheme::asuman:
      return (le / lam) * (1.0 + (nn * lam / (nn - 1.0)) * (1.0 / lam + 1.0 / le)) /
             (1.0 / nn + nn / (nn - 1.0));
    case Scheme::optimal:
      return (le / lam) * (1.0 + nn / (nn - 1.0)) / (1.0 / nn + nn / (nn - 1.0));
    case Scheme::minage_set:
      return (le + lam) / lam;
    case Scheme::fully_distributed:
      return (1.0 + std::numbers::e) * le / lam;
  }
  throw std::invalid_argument("scheme_value: unknown scheme");
}

/// Large-n limit of the named scheme.
inline double scheme_limit(Scheme scheme, double gossip_rate, double self_rate) {
  const double le = self_rate, lam = gossip_rate;
  switch (scheme) {
    case Scheme::asuman: return 2.0 * le / lam + 1.0;
    case Scheme::optimal: return 2.0 * le / lam;
    case Scheme::minage_set: return (le + lam) / lam;
    case Scheme::fully_distributed: return (1.0 + std::numbers::e) * le / lam;
  }
  throw std::invalid_argument("scheme_limit: unknown scheme");
}

// ---------------------------------------------------------------------------
// Renewal line limits: the end-to-end age decomposes additively over hops.

/// Limiting mean of one hop's backward recurrence time, E[Y^2] / (2 E[Y]).
inline double renewal_hop_limit(const RenewalDist& d) {
  return d.second_moment() / (2.0 * d.mean());
}

/// Additive multi-hop limit; the version metric scales the AoI sum by the
/// source's renewal rate.
inline double renewal_line_limit(std::span<const RenewalDist> hops, Metric metric,
                                 const RenewalDist* source = nullptr) {
  if (hops.empty()) throw std::invalid_argument("renewal_line_limit: no hops");
  double sum = 0;
  for (const RenewalDist& d : hops) sum += renewal_hop_limit(d);
  if (metric == Metric::version) {
    if (source == nullptr)
      throw std::invalid_argument("renewal_line_limit: version metric needs a source process");
    return sum / source->mean();
  }
  return sum;
}

}  // namespace gossip::analytic
