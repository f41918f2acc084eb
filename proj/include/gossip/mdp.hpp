#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gossip::mdp {

/// Discrete-time energy-harvesting model: a battery-backed sensor behind a
/// caching aggregator serving a gossip ring. Per slot the source updates with
/// probability `update_prob`, the battery harvests one unit with probability
/// `harvest_prob`, and at most one node requests an update (node i with
/// probability request_prob[i]).
struct Params {
  int n = 1;
  int battery_cap = 1;
  double harvest_prob = 1.0;
  double update_prob = 0.5;
  std::vector<double> request_prob = {1.0};
  int age_cap = 6;
};

class EhMdp {
 public:
  explicit EhMdp(Params params) : p_(std::move(params)) {
    if (p_.n < 1 || static_cast<int>(p_.request_prob.size()) != p_.n)
      throw std::invalid_argument("EhMdp: request_prob must have one entry per node");
    if (p_.battery_cap < 0 || p_.age_cap < 1)
      throw std::invalid_argument("EhMdp: need battery_cap >= 0 and age_cap >= 1");
    double qsum = 0;
    for (double q : p_.request_prob) {
      if (q < 0 || q > 1) throw std::invalid_argument("EhMdp: request probabilities in [0,1]");
      qsum += q;
    }
    if (qsum > 1 + 1e-12) throw std::invalid_argument("EhMdp: request probabilities sum above 1");
    if (p_.harvest_prob < 0 || p_.harvest_prob > 1 || p_.update_prob < 0 || p_.update_prob > 1)
      throw std::invalid_argument("EhMdp: probabilities in [0,1]");

    ages_ = p_.age_cap + 1;
    states_ = static_cast<std::size_t>(p_.battery_cap + 1);
    for (int k = 0; k < p_.n + 1; ++k) states_ *= ages_;
    build_transitions();
  }

  const Params& params() const { return p_; }
  std::size_t state_count() const { return states_; }

  // State encoding: index = ((b * A + xc) * A + x_1) * A + ... , A = age_cap+1.
  struct State {
    int battery = 0;
    int cache_age = 0;
    std::vector<int> node_age;
  };

  State decode(std::size_t s) const {
    State st;
    st.node_age.resize(p_.n);
    for (int i = p_.n - 1; i >= 0; --i) {
      st.node_age[i] = static_cast<int>(s % ages_);
      s /= ages_;
    }
    st.cache_age = static_cast<int>(s % ages_);
    s /= ages_;
    st.battery = static_cast<int>(s);
    return st;
  }

  std::size_t encode(const State& st) const {
    std::size_t s = static_cast<std::size_t>(st.battery) * ages_ + st.cache_age;
    for (int i = 0; i < p_.n; ++i) s = s * ages_ + st.node_age[i];
    return s;
  }

  /// Average network version age in this state, the per-slot cost.
  double cost(std::size_t s) const { return cost_[s]; }

  using Row = std::vector<std::pair<std::size_t, double>>;
  const Row& transitions(std::size_t s, int action) const { return rows_[2 * s + action]; }

 private:
  void build_transitions() {
    rows_.resize(2 * states_);
    cost_.resize(states_);
    double qnone = 1.0;
    for (double q : p_.request_prob) qnone -= q;
    qnone = std::max(0.0, qnone);

    for (std::size_t s = 0; s < states_; ++s) {
      const State st = decode(s);
      double csum = 0;
      for (int a : st.node_age) csum += a;
      cost_[s] = csum / p_.n;

      for (int action = 0; action < 2; ++action) {
        std::map<std::size_t, double> acc;
        for (int src = 0; src < 2; ++src) {
          const double p_src = src ? p_.update_prob : 1 - p_.update_prob;
          if (p_src == 0) continue;
          for (int harvest = 0; harvest < 2; ++harvest) {
            const double p_h = harvest ? p_.harvest_prob : 1 - p_.harvest_prob;
            if (p_h == 0) continue;
            for (int req = 0; req <= p_.n; ++req) {  // 0 = no request
              const double p_req = req == 0 ? qnone : p_.request_prob[req - 1];
              if (p_req == 0) continue;
              State nx = st;
              if (src) {
                nx.cache_age = std::min(nx.cache_age + 1, p_.age_cap);
                for (int& a : nx.node_age) a = std::min(a + 1, p_.age_cap);
              }
              nx.battery = std::min(nx.battery + harvest, p_.battery_cap);
              if (req > 0) {
                if (action == 1 && nx.battery > 0) {
                  // Fresh sample: the sensor spends a unit and both the cache
                  // and the requester become current.
                  --nx.battery;
                  nx.cache_age = 0;
                  nx.node_age[req - 1] = 0;
                } else {
                  nx.node_age[req - 1] = nx.cache_age;  // served from the cache
                }
              }
              acc[encode(nx)] += p_src * p_h * p_req;
            }
          }
        }
        Row& row = rows_[2 * s + action];
        row.assign(acc.begin(), acc.end());
      }
    }
  }

  Params p_;
  std::size_t ages_ = 0;
  std::size_t states_ = 0;
  std::vector<Row> rows_;
  std::vector<double> cost_;
};

inline EhMdp build(const Params& params) { return EhMdp(params); }

struct SolveResult {
  std::vector<std::uint8_t> action;  // greedy policy per state
  double gain = 0;                   // long-run average cost
  std::vector<double> bias;
  int iterations = 0;
};

namespace detail {

inline double sweep(const EhMdp& mdp, std::span<const std::uint8_t> fixed_policy,
                    std::vector<double>& h, std::vector<double>& hnew,
                    std::vector<std::uint8_t>* greedy) {
  const std::size_t S = mdp.state_count();
  for (std::size_t s = 0; s < S; ++s) {
    double best = 0;
    int best_a = 0;
    if (fixed_policy.empty()) {
      double q[2];
      for (int a = 0; a < 2; ++a) {
        double v = mdp.cost(s);
        for (const auto& [t, p] : mdp.transitions(s, a)) v += p * h[t];
        q[a] = v;
      }
      best = q[0];
      best_a = 0;
      if (q[1] < q[0] - 1e-13) {  // ties resolve to the cached action
        best = q[1];
        best_a = 1;
      }
    } else {
      best_a = fixed_policy[s];
      best = mdp.cost(s);
      for (const auto& [t, p] : mdp.transitions(s, best_a)) best += p * h[t];
    }
    hnew[s] = best;
    if (greedy) (*greedy)[s] = static_cast<std::uint8_t>(best_a);
  }
  double lo = hnew[0] - h[0], hi = lo;
  for (std::size_t s = 1; s < S; ++s) {
    const double d = hnew[s] - h[s];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double offset = hnew[0];
  for (double& v : hnew) v -= offset;
  h.swap(hnew);
  return hi - lo;  // span; gain is bracketed by [lo, hi]
}

inline double rvi_gain(const EhMdp& mdp, std::span<const std::uint8_t> fixed_policy,
                       std::vector<double>& h, double tol, int max_iters, int& iters,
                       std::vector<std::uint8_t>* greedy) {
  const std::size_t S = mdp.state_count();
  h.assign(S, 0.0);
  std::vector<double> hnew(S);
  for (iters = 1; iters <= max_iters; ++iters) {
    const double span = sweep(mdp, fixed_policy, h, hnew, greedy);
    if (span < tol) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t s = 0; s < S; ++s) {
        double v = mdp.cost(s);
        const int a = fixed_policy.empty() && greedy ? (*greedy)[s]
                      : fixed_policy.empty()         ? 0
                                                     : fixed_policy[s];
        for (const auto& [t, p] : mdp.transitions(s, a)) v += p * h[t];
        const double d = v - h[s];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      return 0.5 * (lo + hi);
    }
  }
  throw std::runtime_error("mdp: relative value iteration did not converge");
}

}  // namespace detail

/// Relative value iteration to span-seminorm tolerance; ties prefer serving
/// from the cache. Requires a unichain model (harvest and update probabilities
/// positive, or verified reachability).
inline SolveResult solve(const EhMdp& mdp, double tol = 1e-9, int max_iters = 200000) {
  SolveResult res;
  res.action.assign(mdp.state_count(), 0);
  std::vector<double> h;
  res.gain = detail::rvi_gain(mdp, {}, h, tol, max_iters, res.iterations, &res.action);
  res.bias = std::move(h);
  return res;
}

/// Average cost of a fixed stationary policy (iterative policy evaluation).
inline double evaluate_policy(const EhMdp& mdp, std::span<const std::uint8_t> policy,
                              double tol = 1e-11, int max_iters = 500000) {
  if (policy.size() != mdp.state_count())
    throw std::invalid_argument("evaluate_policy: policy size mismatch");
  std::vector<double> h;
  int iters = 0;
  return detail::rvi_gain(mdp, policy, h, tol, max_iters, iters, nullptr);
}

struct ThresholdReport {
  bool independent_of_node_ages = true;
  bool threshold_in_cache_age = true;
  std::vector<std::size_t> violations_node_dependence;
  std::vector<std::size_t> violations_threshold;
  // threshold[b]: smallest cache age that triggers a fresh fetch, or age_cap+1
  // if the policy never fetches at that battery level.
  std::vector<int> threshold;

  bool pass() const { return independent_of_node_ages && threshold_in_cache_age; }
};

/// Checks the threshold structure of a policy: the action may depend only on
/// (battery, cache age), and per battery level it must be a step in cache age.
inline ThresholdReport verify_threshold(const EhMdp& mdp, std::span<const std::uint8_t> policy) {
  if (policy.size() != mdp.state_count())
    throw std::invalid_argument("verify_threshold: policy size mismatch");
  const auto& p = mdp.params();
  ThresholdReport rep;
  const int ages = p.age_cap + 1;
  rep.threshold.assign(p.battery_cap + 1, ages);

  for (int b = 0; b <= p.battery_cap; ++b) {
    for (int xc = 0; xc < ages; ++xc) {
      // Representative: all node ages zero.
      EhMdp::State st;
      st.battery = b;
      st.cache_age = xc;
      st.node_age.assign(p.n, 0);
      const int rep_action = policy[mdp.encode(st)];
      if (rep_action == 1 && xc < rep.threshold[b]) rep.threshold[b] = xc;
    }
  }
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    const auto st = mdp.decode(s);
    EhMdp::State base = st;
    base.node_age.assign(p.n, 0);
    if (policy[s] != policy[mdp.encode(base)]) {
      rep.independent_of_node_ages = false;
      rep.violations_node_dependence.push_back(s);
    }
    const int expected = st.cache_age >= rep.threshold[st.battery] ? 1 : 0;
    if (policy[mdp.encode(base)] != expected) {
      rep.threshold_in_cache_age = false;
      rep.violations_threshold.push_back(s);
    }
  }
  return rep;
}

/// CSV export `b,XC,X1..Xn,action`, states in encoding order.
inline void export_policy_csv(std::ostream& os, const EhMdp& mdp,
                              std::span<const std::uint8_t> policy) {
  os << "b,XC";
  for (int i = 1; i <= mdp.params().n; ++i) os << ",X" << i;
  os << ",action\n";
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    const auto st = mdp.decode(s);
    os << st.battery << ',' << st.cache_age;
    for (int a : st.node_age) os << ',' << a;
    os << ',' << static_cast<int>(policy[s]) << '\n';
  }
}

}  // namespace gossip::mdp
