#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "gossip/distributions.hpp"
#include "gossip/protocols.hpp"
#include "gossip/rng.hpp"
#include "gossip/stats.hpp"
#include "gossip/topology.hpp"

namespace gossip::sim {

inline constexpr int kMaxMoment = 4;

struct RunConfig {
  double horizon = 1e4;
  double warmup = -1.0;  // negative: default to 10% of the horizon
  std::uint64_t seed = 1;
  int max_moment = 2;
  std::ostream* trace = nullptr;  // optional event dump, disabled by default

  double effective_warmup() const { return warmup < 0 ? 0.1 * horizon : warmup; }
};

/// Time-averaged results of one simulation run.
struct RunMetrics {
  Metric metric = Metric::version;
  std::vector<double> age;  // per-node time average of the active metric
  // moments[m-1][node] = time average of age^m, m = 1..max_moment
  std::array<std::vector<double>, kMaxMoment> moments;
  int max_moment = 0;
  double flag_fraction = std::numeric_limits<double>::quiet_NaN();  // unreliable or truth share
  double active_min_age = std::numeric_limits<double>::quiet_NaN();  // age-aware schemes
  std::uint64_t events = 0, self_events = 0, source_events = 0, gossip_events = 0;
  bool diverging = false;

  double network_age() const { return mean(age); }
};

/// Replication aggregate: means and standard errors in seed order.
struct ReplicationSummary {
  Metric metric = Metric::version;
  int replications = 0;
  std::vector<double> age_mean, age_se;
  double network_mean = 0, network_se = 0;
  std::array<std::vector<double>, kMaxMoment> moment_mean;
  int max_moment = 0;
  double flag_mean = std::numeric_limits<double>::quiet_NaN();
  double flag_se = std::numeric_limits<double>::quiet_NaN();
  double active_min_mean = std::numeric_limits<double>::quiet_NaN();
  double active_min_se = std::numeric_limits<double>::quiet_NaN();
  bool diverging = false;
};

namespace detail {

enum EventKind : std::uint64_t { kSelf = 0, kSource = 1, kUnreliable = 2, kGossip = 3, kDeactivate = 4 };

struct Event {
  double t = 0;
  std::uint64_t key = 0;  // kind | i | j, the deterministic tie order
  std::uint32_t slot = 0;
  std::uint32_t epoch = 0;

  bool operator>(const Event& o) const {
    if (t != o.t) return t > o.t;
    return key > o.key;
  }
};

inline std::uint64_t event_key(EventKind kind, std::uint32_t i, std::uint32_t j) {
  return (static_cast<std::uint64_t>(kind) << 56) | (static_cast<std::uint64_t>(i) << 28) | j;
}

/// Exact piecewise integration of per-node age moments over (warmup, horizon].
/// Version age integrates a constant between changes; AoI integrates the
/// linear ramp (t - generation time) in closed form.
struct MomentAccumulator {
  Metric metric = Metric::version;
  int max_moment = 1;
  double warmup = 0;
  std::vector<double> segment_start;
  std::array<std::vector<double>, kMaxMoment> acc;

  void init(Metric m, int mm, int n, double warm) {
    metric = m;
    max_moment = mm;
    warmup = warm;
    segment_start.assign(n, 0.0);
    for (int k = 0; k < mm; ++k) acc[k].assign(n, 0.0);
  }

  /// Closes node j's segment at time t given its state over the segment.
  void account(int j, double t, std::int64_t version_age, double gen_time) {
    const double lo = std::max(segment_start[j], warmup);
    if (t > lo) {
      if (metric == Metric::version) {
        const double dt = t - lo;
        double p = static_cast<double>(version_age);
        for (int m = 1; m <= max_moment; ++m) {
          acc[m - 1][j] += dt * p;
          p *= static_cast<double>(version_age);
        }
      } else {
        double a = lo - gen_time, b = t - gen_time;
        double ap = a, bp = b;
        for (int m = 1; m <= max_moment; ++m) {
          ap *= a;
          bp *= b;
          acc[m - 1][j] += (bp - ap) / static_cast<double>(m + 1);
        }
      }
    }
    segment_start[j] = t;
  }
};

/// Piecewise-constant scalar integral over (warmup, horizon].
struct ScalarAccumulator {
  double warmup = 0;
  double segment_start = 0;
  double acc = 0;

  void account(double t, double value) {
    const double lo = std::max(segment_start, warmup);
    if (t > lo) acc += (t - lo) * value;
    segment_start = t;
  }
};

class Simulator {
 public:
  Simulator(const Network& net, const ProtocolSpec& proto, const RunConfig& cfg)
      : net_(net), proto_(proto), cfg_(cfg), rng_(cfg.seed) {}

  RunMetrics run() {
    setup();
    const double horizon = cfg_.horizon;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      if (ev.t > horizon) break;
      queue_.pop();
      dispatch(ev);
    }
    return finish(horizon);
  }

 private:
  // --- setup -------------------------------------------------------------

  void setup() {
    const int n = net_.n;
    metric_ = protocol_metric(proto_);
    states_.assign(n, NodeState{});
    ages_.init(metric_, cfg_.max_moment, n, cfg_.effective_warmup());
    flag_.warmup = cfg_.effective_warmup();
    active_min_.warmup = cfg_.effective_warmup();
    diverging_ = !validate(net_).ok;

    // Flat edge array in CSR order (owner-major, targets ascending).
    node_edges_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
      for (const auto& [j, r] : net_.out_edges[i]) edges_.push_back({i, j, r});
      node_edges_[i + 1] = static_cast<int>(edges_.size());
    }

    node_epoch_.assign(n, 0);
    node_active_.assign(n, 0);
    node_edge_rate_.assign(n, 0.0);
    capacity_ = net_.total_gossip_capacity();

    if (metric_ == Metric::version && net_.self_update_rate > 0)
      push_self(0.0);
    for (int i = 0; i < n; ++i)
      if (net_.source_rates[i] > 0) push_source(i, 0.0);

    if (const auto* g = std::get_if<GGapProtocol>(&proto_)) {
      unreliable_per_node_ = g->unreliable_rate / n;
      if (unreliable_per_node_ > 0)
        for (int i = 0; i < n; ++i) push_unreliable(i, 0.0);
    }

    if (const auto* fd = std::get_if<FullyDistributedProtocol>(&proto_)) {
      dynamic_ = true;
      tau_ = fd->tau > 0 ? fd->tau : n / capacity_;
      window_token_.assign(n, 0);
    } else if (std::holds_alternative<AsumanProtocol>(proto_)) {
      dynamic_ = true;
      asuman_ = true;
      rebuild_active_set(0.0);
    } else if (std::holds_alternative<MinAgeLeaderProtocol>(proto_)) {
      dynamic_ = true;  // silent until the first source delivery
    } else {
      // Static protocols: every edge has its own permanent clock.
      for (std::uint32_t e = 0; e < edges_.size(); ++e) schedule_edge(e, 0.0);
    }

    truth_count_ = n;
    unreliable_count_ = 0;
  }

  // --- event plumbing ----------------------------------------------------

  struct Edge {
    int from, to;
    double rate;
  };

  double edge_rate(const Edge& e) const {
    return dynamic_ ? node_edge_rate_[e.from] : e.rate;
  }

  void schedule_edge(std::uint32_t id, double now) {
    const Edge& e = edges_[id];
    const double r = edge_rate(e);
    if (r <= 0) return;
    queue_.push({now + sample_exponential(rng_, r), event_key(kGossip, e.from, e.to), id,
                 node_epoch_[e.from]});
  }

  void push_self(double now) {
    queue_.push({now + sample_exponential(rng_, net_.self_update_rate), event_key(kSelf, 0, 0), 0, 0});
  }

  void push_source(int i, double now) {
    queue_.push({now + sample_exponential(rng_, net_.source_rates[i]), event_key(kSource, 0, i),
                 static_cast<std::uint32_t>(i), 0});
  }

  void push_unreliable(int i, double now) {
    queue_.push({now + sample_exponential(rng_, unreliable_per_node_),
                 event_key(kUnreliable, 0, i), static_cast<std::uint32_t>(i), 0});
  }

  void activate_node(int i, double now, double per_edge_rate) {
    node_active_[i] = 1;
    node_edge_rate_[i] = per_edge_rate;
    ++node_epoch_[i];
    for (int e = node_edges_[i]; e < node_edges_[i + 1]; ++e)
      schedule_edge(static_cast<std::uint32_t>(e), now);
  }

  void deactivate_node(int i) {
    node_active_[i] = 0;
    ++node_epoch_[i];
  }

  int out_degree(int i) const { return node_edges_[i + 1] - node_edges_[i]; }

  void rebuild_active_set(double now) {
    for (int i = 0; i < net_.n; ++i)
      if (node_active_[i]) deactivate_node(i);
    const ActiveSet set = asuman_active_set(states_, capacity_);
    for (int i : set.nodes)
      if (out_degree(i) > 0) activate_node(i, now, set.per_node_rate / out_degree(i));
    account_active_min(now);
    active_min_value_ = states_[set.nodes.front()].version_age;
  }

  void account_active_min(double t) {
    if (asuman_) active_min_.account(t, static_cast<double>(active_min_value_));
  }

  void note_age_drop(int j, double t) {
    if (asuman_ && node_active_[j] && states_[j].version_age < active_min_value_) {
      account_active_min(t);
      active_min_value_ = states_[j].version_age;
    }
  }

  // --- transitions ---------------------------------------------------------

  void dispatch(const Event& ev) {
    const auto kind = static_cast<EventKind>(ev.key >> 56);
    switch (kind) {
      case kSelf: fire_self(ev.t); break;
      case kSource: fire_source(static_cast<int>(ev.slot), ev.t); break;
      case kUnreliable: fire_unreliable(static_cast<int>(ev.slot), ev.t); break;
      case kGossip: {
        const Edge& e = edges_[ev.slot];
        if (ev.epoch != node_epoch_[e.from]) return;  // stale clock from an old scheme epoch
        fire_gossip(e.from, e.to, ev.t);
        schedule_edge(ev.slot, ev.t);
        break;
      }
      case kDeactivate: {
        const int i = static_cast<int>(ev.slot);
        if (ev.epoch == window_token_[i] && node_active_[i]) deactivate_node(i);
        return;
      }
    }
  }

  void fire_self(double t) {
    ++events_;
    ++self_events_;
    for (int j = 0; j < net_.n; ++j) ages_.account(j, t, states_[j].version_age, 0);
    apply_source_update_all(states_);
    if (asuman_)
      rebuild_active_set(t);  // the age-sensing phase runs at each source update
    trace_row(t, "self", -1, -1, 0, 0);
    push_self(t);
  }

  void fire_source(int i, double t) {
    ++events_;
    ++source_events_;
    NodeState fresh;
    fresh.version_age = 0;
    fresh.true_gen_time = t;
    fresh.claimed_time = t;
    fresh.reliability = Reliability::reliable;
    fresh.truth = true;
    apply_packet(i, fresh, t, /*from=*/-1, /*clean=*/true);

    if (std::holds_alternative<MinAgeLeaderProtocol>(proto_)) {
      const int new_leader = minage_leader(i);
      if (new_leader != leader_) {
        if (leader_ >= 0) deactivate_node(leader_);
        leader_ = new_leader;
        if (out_degree(leader_) > 0)
          activate_node(leader_, t, capacity_ / out_degree(leader_));
      }
    } else if (std::holds_alternative<FullyDistributedProtocol>(proto_)) {
      ++window_token_[i];
      queue_.push({t + tau_, event_key(kDeactivate, 0, i), static_cast<std::uint32_t>(i),
                   window_token_[i]});
      if (!node_active_[i] && out_degree(i) > 0)
        activate_node(i, t, capacity_ / out_degree(i));
    }
    push_source(i, t);
  }

  void fire_unreliable(int i, double t) {
    ++events_;
    ++source_events_;
    NodeState fresh;
    fresh.version_age = 0;
    fresh.true_gen_time = t;
    fresh.claimed_time = t;
    fresh.reliability = Reliability::unreliable;
    fresh.truth = true;
    apply_packet(i, fresh, t, -1, true);
    push_unreliable(i, t);
  }

  void fire_gossip(int i, int j, double t) {
    ++events_;
    ++gossip_events_;
    apply_packet(j, states_[i], t, i, uniform01(rng_) >= mutation_prob());
  }

  double mutation_prob() const {
    const auto* m = std::get_if<MutationProtocol>(&proto_);
    return m ? m->mutation_prob : 0.0;
  }

  /// Runs the protocol's merge rule for a packet arriving at node j.
  /// `from` is the sending node, or -1 for a source delivery.
  void apply_packet(int j, const NodeState& packet, double t, int from, bool clean) {
    const NodeState before = states_[j];
    NodeState after = before;
    if (const auto* g = std::get_if<GGapProtocol>(&proto_)) {
      after = merge_g_gap(before, packet, g->g);
    } else if (std::holds_alternative<MutationProtocol>(proto_)) {
      after = merge_mutation(before, packet, clean);
    } else if (std::holds_alternative<TimestompProtocol>(proto_)) {
      const auto& ts = std::get<TimestompProtocol>(proto_);
      double claimed = packet.claimed_time;
      if (from >= 0 && is_adversary(ts, from))
        claimed = timestomp_transform(claimed, t, Direction::outgoing, ts.policy, uniform01(rng_));
      if (from >= 0 && is_adversary(ts, j))
        claimed = timestomp_transform(claimed, t, Direction::incoming, ts.policy, uniform01(rng_));
      after = merge_timestomped(before, claimed, packet.true_gen_time);
    } else {
      after = merge_baseline(before, packet, metric_);
    }

    const bool age_changed = metric_ == Metric::version
                                 ? after.version_age != before.version_age
                                 : after.true_gen_time != before.true_gen_time;
    if (age_changed) ages_.account(j, t, before.version_age, before.true_gen_time);
    if (after.reliability != before.reliability) {
      flag_.account(t, static_cast<double>(unreliable_count_) / net_.n);
      unreliable_count_ += after.reliability == Reliability::unreliable ? 1 : -1;
    }
    if (after.truth != before.truth) {
      flag_.account(t, static_cast<double>(truth_count_) / net_.n);
      truth_count_ += after.truth ? 1 : -1;
    }
    states_[j] = after;
    if (age_changed) {
      note_age_drop(j, t);
      trace_row(t, from < 0 ? "src" : "gossip", from, j,
                metric_ == Metric::version ? static_cast<double>(before.version_age)
                                           : before.true_gen_time,
                metric_ == Metric::version ? static_cast<double>(after.version_age)
                                           : after.true_gen_time);
    }
  }

  static bool is_adversary(const TimestompProtocol& ts, int node) {
    return std::find(ts.adversaries.begin(), ts.adversaries.end(), node) != ts.adversaries.end();
  }

  void trace_row(double t, const char* kind, int i, int j, double before, double after) {
    if (!cfg_.trace) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.10f,%s,%d,%d,%.10g,%.10g\n", t, kind, i + 1, j + 1,
                  before, after);
    *cfg_.trace << buf;
  }

  // --- results -------------------------------------------------------------

  RunMetrics finish(double horizon) {
    for (int j = 0; j < net_.n; ++j)
      ages_.account(j, horizon, states_[j].version_age, states_[j].true_gen_time);
    const bool ggap = std::holds_alternative<GGapProtocol>(proto_);
    const bool mutation = std::holds_alternative<MutationProtocol>(proto_);
    if (ggap) flag_.account(horizon, static_cast<double>(unreliable_count_) / net_.n);
    if (mutation) flag_.account(horizon, static_cast<double>(truth_count_) / net_.n);
    account_active_min(horizon);

    const double span = horizon - cfg_.effective_warmup();
    RunMetrics out;
    out.metric = metric_;
    out.max_moment = cfg_.max_moment;
    out.age.resize(net_.n);
    for (int m = 1; m <= cfg_.max_moment; ++m) {
      out.moments[m - 1].resize(net_.n);
      for (int j = 0; j < net_.n; ++j) out.moments[m - 1][j] = ages_.acc[m - 1][j] / span;
    }
    for (int j = 0; j < net_.n; ++j) out.age[j] = out.moments[0][j];
    if (ggap || mutation) out.flag_fraction = flag_.acc / span;
    if (asuman_) out.active_min_age = active_min_.acc / span;
    out.events = events_;
    out.self_events = self_events_;
    out.source_events = source_events_;
    out.gossip_events = gossip_events_;
    out.diverging = diverging_;
    return out;
  }

  const Network& net_;
  const ProtocolSpec& proto_;
  RunConfig cfg_;
  std::mt19937_64 rng_;
  Metric metric_ = Metric::version;

  std::vector<NodeState> states_;
  std::vector<Edge> edges_;
  std::vector<int> node_edges_;  // CSR offsets per owner
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;

  MomentAccumulator ages_;
  ScalarAccumulator flag_;
  ScalarAccumulator active_min_;
  std::int64_t active_min_value_ = 0;
  int truth_count_ = 0;
  int unreliable_count_ = 0;

  bool dynamic_ = false;
  bool asuman_ = false;
  std::vector<std::uint32_t> node_epoch_;
  std::vector<std::uint8_t> node_active_;
  std::vector<double> node_edge_rate_;
  std::vector<std::uint32_t> window_token_;
  double capacity_ = 0;
  double tau_ = 0;
  int leader_ = -1;
  double unreliable_per_node_ = 0;

  std::uint64_t events_ = 0, self_events_ = 0, source_events_ = 0, gossip_events_ = 0;
  bool diverging_ = false;
};

}  // namespace detail

/// Simulates the network under the given protocol; deterministic for a fixed
/// seed. Unreachable nodes are flagged and their growing ages reported as
/// measured.
inline RunMetrics run(const Network& net, const ProtocolSpec& proto, const RunConfig& cfg) {
  if (cfg.horizon <= cfg.effective_warmup())
    throw std::invalid_argument("run: horizon must exceed the warmup");
  if (cfg.max_moment < 1 || cfg.max_moment > kMaxMoment)
    throw std::invalid_argument("run: max_moment must be in 1..4");
  detail::Simulator sim(net, proto, cfg);
  return sim.run();
}

namespace detail {

inline ReplicationSummary aggregate(std::span<const RunMetrics> runs) {
  const int R = static_cast<int>(runs.size());
  const int n = static_cast<int>(runs[0].age.size());
  ReplicationSummary s;
  s.metric = runs[0].metric;
  s.replications = R;
  s.max_moment = runs[0].max_moment;
  s.age_mean.resize(n);
  s.age_se.resize(n);
  std::vector<double> buf(R);
  for (int j = 0; j < n; ++j) {
    for (int r = 0; r < R; ++r) buf[r] = runs[r].age[j];
    s.age_mean[j] = mean(buf);
    s.age_se[j] = R >= 2 ? standard_error(buf) : 0.0;
  }
  for (int r = 0; r < R; ++r) buf[r] = runs[r].network_age();
  s.network_mean = mean(buf);
  s.network_se = R >= 2 ? standard_error(buf) : 0.0;
  for (int m = 1; m <= s.max_moment; ++m) {
    s.moment_mean[m - 1].resize(n);
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < R; ++r) buf[r] = runs[r].moments[m - 1][j];
      s.moment_mean[m - 1][j] = mean(buf);
    }
  }
  if (!std::isnan(runs[0].flag_fraction)) {
    for (int r = 0; r < R; ++r) buf[r] = runs[r].flag_fraction;
    s.flag_mean = mean(buf);
    s.flag_se = R >= 2 ? standard_error(buf) : 0.0;
  }
  if (!std::isnan(runs[0].active_min_age)) {
    for (int r = 0; r < R; ++r) buf[r] = runs[r].active_min_age;
    s.active_min_mean = mean(buf);
    s.active_min_se = R >= 2 ? standard_error(buf) : 0.0;
  }
  for (const auto& r : runs) s.diverging |= r.diverging;
  return s;
}

}  // namespace detail

/// Runs R independent replications with explicitly supplied seeds and folds
/// them in seed order; concurrent execution cannot change any result.
inline ReplicationSummary run_replications(const Network& net, const ProtocolSpec& proto,
                                           const RunConfig& cfg,
                                           std::span<const std::uint64_t> seeds,
                                           int threads = 1) {
  if (seeds.size() < 2) throw std::invalid_argument("run_replications: need R >= 2");
  for (std::size_t a = 0; a < seeds.size(); ++a)
    for (std::size_t b = a + 1; b < seeds.size(); ++b)
      if (seeds[a] == seeds[b])
        throw std::invalid_argument("run_replications: replication seeds must be distinct");

  std::vector<RunMetrics> runs(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < seeds.size(); r = next.fetch_add(1)) {
      RunConfig c = cfg;
      c.seed = seeds[r];
      c.trace = nullptr;
      runs[r] = run(net, proto, c);
    }
  };
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(seeds.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
  }
  return detail::aggregate(runs);
}

/// Replication seeds are derived from cfg.seed by the documented counter split.
inline ReplicationSummary run_replications(const Network& net, const ProtocolSpec& proto,
                                           const RunConfig& cfg, int replications,
                                           int threads = 1) {
  std::vector<std::uint64_t> seeds(replications);
  for (int r = 0; r < replications; ++r) seeds[r] = derive_seed(cfg.seed, r);
  return run_replications(net, proto, cfg, seeds, threads);
}

/// Line of renewal links source -> 1 -> ... -> n: each hop copies the upstream
/// packet at its own renewal epochs. The version metric additionally needs the
/// source's own renewal update process.
inline RunMetrics run_renewal_line(std::span<const RenewalDist> hops,
                                   const RenewalDist* source_process, Metric metric,
                                   const RunConfig& cfg) {
  const int n = static_cast<int>(hops.size());
  if (n < 1) throw std::invalid_argument("run_renewal_line: need at least one hop");
  if (metric == Metric::version && source_process == nullptr)
    throw std::invalid_argument("run_renewal_line: version metric needs a source process");
  if (cfg.horizon <= cfg.effective_warmup())
    throw std::invalid_argument("run_renewal_line: horizon must exceed the warmup");

  std::mt19937_64 rng(cfg.seed);
  detail::MomentAccumulator ages;
  ages.init(metric, cfg.max_moment, n, cfg.effective_warmup());

  // next[0] is the source's renewal clock (version only); next[k], k >= 1 the
  // clock of hop k (link k-1 -> k).
  const bool with_source = metric == Metric::version && source_process != nullptr;
  const RenewalDist source = with_source ? *source_process : RenewalDist::deterministic(1);
  std::vector<double> next(n + 1, std::numeric_limits<double>::infinity());
  if (with_source) next[0] = source.sample(rng);
  for (int k = 1; k <= n; ++k) next[k] = hops[k - 1].sample(rng);

  std::vector<std::int64_t> version(n + 1, 0);
  std::vector<double> gen_time(n + 1, 0.0);
  RunMetrics out;
  out.metric = metric;
  out.max_moment = cfg.max_moment;

  while (true) {
    int k = with_source ? 0 : 1;
    for (int c = k + 1; c <= n; ++c)
      if (next[c] < next[k]) k = c;
    const double t = next[k];
    if (t > cfg.horizon) break;
    ++out.events;
    if (k == 0) {
      ++out.self_events;
      for (int j = 1; j <= n; ++j) {
        ages.account(j - 1, t, version[j], gen_time[j]);
        ++version[j];
      }
      next[0] = t + source.sample(rng);
    } else {
      // Node k copies node k-1's packet, which is always at least as fresh.
      ages.account(k - 1, t, version[k], gen_time[k]);
      version[k] = version[k - 1];
      gen_time[k] = k == 1 && metric == Metric::aoi ? t : gen_time[k - 1];
      next[k] = t + hops[k - 1].sample(rng);
      if (k == 1) ++out.source_events;
      else ++out.gossip_events;
    }
  }

  for (int j = 0; j < n; ++j) ages.account(j, cfg.horizon, version[j + 1], gen_time[j + 1]);
  const double span = cfg.horizon - cfg.effective_warmup();
  out.age.resize(n);
  for (int m = 1; m <= cfg.max_moment; ++m) {
    out.moments[m - 1].resize(n);
    for (int j = 0; j < n; ++j) out.moments[m - 1][j] = ages.acc[m - 1][j] / span;
  }
  for (int j = 0; j < n; ++j) out.age[j] = out.moments[0][j];
  return out;
}

}  // namespace gossip::sim
