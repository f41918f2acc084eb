#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace gossip {

enum class Metric { version, aoi };

enum class Reliability : std::uint8_t { reliable = 0, unreliable = 1 };

/// Per-node packet state. `version_age` counts versions behind the source;
/// AoI is derived from the true generation time as now - true_gen_time. The
/// claimed timestamp can differ from the true one only under timestomping.
struct NodeState {
  std::int64_t version_age = 0;
  double true_gen_time = 0.0;   // generation time of the held packet
  double claimed_time = 0.0;    // timestamp written on the packet
  Reliability reliability = Reliability::reliable;
  bool truth = true;
};

/// Receiver keeps the fresher of the two packets; ties keep the receiver's.
inline NodeState merge_baseline(const NodeState& receiver, const NodeState& sender,
                                Metric metric) {
  if (metric == Metric::version)
    return sender.version_age < receiver.version_age ? sender : receiver;
  return sender.true_gen_time > receiver.true_gen_time ? sender : receiver;
}

/// Source self-update: every node falls one version further behind.
inline void apply_source_update_all(std::span<NodeState> states) {
  for (NodeState& s : states) ++s.version_age;
}

inline constexpr std::int64_t kGapUnbounded = std::numeric_limits<std::int64_t>::max();

/// Reliability-aware acceptance: equal reliability compares version ages;
/// across classes a reliable packet is preferred unless it is more than G
/// versions staler than the unreliable one.
inline NodeState merge_g_gap(const NodeState& receiver, const NodeState& sender,
                             std::int64_t g) {
  auto within_gap = [g](std::int64_t held, std::int64_t other) {
    return g == kGapUnbounded || held <= other + g;
  };
  if (receiver.reliability == sender.reliability)
    return sender.version_age < receiver.version_age ? sender : receiver;
  if (sender.reliability == Reliability::reliable)
    return within_gap(sender.version_age, receiver.version_age) ? sender : receiver;
  // Receiver holds the reliable packet.
  return within_gap(receiver.version_age, sender.version_age) ? receiver : sender;
}

/// Merge for mutating gossip. `clean` is the per-transmission channel outcome
/// (false = the in-flight copy mutated into misinformation); the sender's own
/// stored packet is never corrupted. A strictly fresher packet wins regardless
/// of truth; on equal versions truth prevails, and with no truth present the
/// receiver keeps its own.
inline NodeState merge_mutation(const NodeState& receiver, const NodeState& sender,
                                bool clean) {
  NodeState delivered = sender;
  delivered.truth = sender.truth && clean;
  if (delivered.version_age < receiver.version_age) return delivered;
  if (receiver.version_age < delivered.version_age) return receiver;
  if (delivered.truth && !receiver.truth) return delivered;
  return receiver;
}

enum class Direction { incoming, outgoing };

struct TimestompPolicy {
  double raise_prob = 0.0;  // outgoing claimed timestamp -> now
  double lower_prob = 0.0;  // incoming claimed timestamp -> 0

  /// The infected-node policy: every outgoing packet claims to be brand new,
  /// every incoming packet is made unacceptable.
  static TimestompPolicy aggressive() { return {1.0, 1.0}; }
};

/// Adversarial rewrite of a claimed timestamp on a gossip transfer touching an
/// adversary node. `u01` is the caller-supplied uniform draw, keeping the
/// function pure.
inline double timestomp_transform(double claimed, double now, Direction dir,
                                  const TimestompPolicy& policy, double u01) {
  if (dir == Direction::outgoing) return u01 < policy.raise_prob ? now : claimed;
  return u01 < policy.lower_prob ? 0.0 : claimed;
}

/// Timestamp-comparison acceptance: the receiver adopts the delivered packet
/// iff its claimed timestamp is strictly newer. The true generation time
/// travels with the packet, so the true age may worsen on adoption.
inline NodeState merge_timestomped(const NodeState& receiver, double delivered_claimed,
                                   double delivered_true) {
  if (delivered_claimed > receiver.claimed_time) {
    NodeState adopted = receiver;
    adopted.claimed_time = delivered_claimed;
    adopted.true_gen_time = delivered_true;
    return adopted;
  }
  return receiver;
}

struct ActiveSet {
  std::vector<int> nodes;      // minimum-age nodes, ascending
  double per_node_rate = 0.0;  // B / |M|
};

/// Age-sensing selection at a source-update epoch: the minimum-age nodes share
/// the whole gossip capacity; everyone else stays silent until the next epoch.
inline ActiveSet asuman_active_set(std::span<const NodeState> states, double total_capacity) {
  if (states.empty()) throw std::invalid_argument("asuman_active_set: empty network");
  std::int64_t min_age = states[0].version_age;
  for (const NodeState& s : states) min_age = std::min(min_age, s.version_age);
  ActiveSet set;
  for (int i = 0; i < static_cast<int>(states.size()); ++i)
    if (states[i].version_age == min_age) set.nodes.push_back(i);
  set.per_node_rate = total_capacity / static_cast<double>(set.nodes.size());
  return set;
}

/// Semi-distributed rule: a fresh source delivery makes the delivered node the
/// gossiping leader until the next delivery displaces it.
inline int minage_leader(int delivered_node) { return delivered_node; }

/// Gossip window of the fully distributed scheme: a node gossips at full
/// capacity for `tau` after each of its source deliveries.
struct GossipWindow {
  double until = -1.0;
  bool active(double now) const { return now < until; }
  void renew(double now, double tau) { until = now + tau; }
};

// ---------------------------------------------------------------------------
// Protocol selection consumed by the simulation engine.

struct BaselineProtocol {
  Metric metric = Metric::version;
};

/// Reliable/unreliable two-source protocol. The network's own source plays the
/// reliable source; the unreliable one delivers current versions uniformly at
/// the given total rate.
struct GGapProtocol {
  std::int64_t g = 0;
  double unreliable_rate = 0.0;
};

struct MutationProtocol {
  double mutation_prob = 0.0;  // per inter-node transmission
};

/// Timestomping adversaries on gossip links (source deliveries are the update
/// process itself and cannot be manipulated).
struct TimestompProtocol {
  std::vector<int> adversaries;
  TimestompPolicy policy = TimestompPolicy::aggressive();
};

struct AsumanProtocol {};

struct MinAgeLeaderProtocol {};

/// tau <= 0 means the natural window 1/lambda, with lambda the per-node budget.
struct FullyDistributedProtocol {
  double tau = 0.0;
};

using ProtocolSpec = std::variant<BaselineProtocol, GGapProtocol, MutationProtocol,
                                  TimestompProtocol, AsumanProtocol, MinAgeLeaderProtocol,
                                  FullyDistributedProtocol>;

inline Metric protocol_metric(const ProtocolSpec& spec) {
  if (const auto* b = std::get_if<BaselineProtocol>(&spec)) return b->metric;
  if (std::holds_alternative<TimestompProtocol>(spec)) return Metric::aoi;
  return Metric::version;
}

inline const char* protocol_name(const ProtocolSpec& spec) {
  struct Visitor {
    const char* operator()(const BaselineProtocol& b) const {
      return b.metric == Metric::version ? "baseline_version" : "baseline_aoi";
    }
    const char* operator()(const GGapProtocol&) const { return "g_gap"; }
    const char* operator()(const MutationProtocol&) const { return "mutation"; }
    const char* operator()(const TimestompProtocol&) const { return "timestomp"; }
    const char* operator()(const AsumanProtocol&) const { return "asuman"; }
    const char* operator()(const MinAgeLeaderProtocol&) const { return "minage_leader"; }
    const char* operator()(const FullyDistributedProtocol&) const { return "fully_distributed"; }
  };
  return std::visit(Visitor{}, spec);
}

}  // namespace gossip
