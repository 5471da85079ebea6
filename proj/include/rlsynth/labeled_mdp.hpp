#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rlsynth/graph.hpp"
#include "rlsynth/rng.hpp"

namespace rlsynth {

/// Label sets are bitmasks over the model's ordered atomic propositions, so
/// the 0/1 evaluation vector of a label is the label itself.
using LabelSet = std::uint32_t;

inline constexpr double kProbTolerance = 1e-9;
inline constexpr int kMaxAtomicProps = 20;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LabeledOutcome {
  int state = 0;
  double prob = 0.0;
};

struct LabelOutcome {
  LabelSet label = 0;
  double prob = 0.0;
};

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// A state subset together with a nonempty action subset per state.
/// Closure (all kept successors stay inside `states`) is what makes it a
/// sub-model rather than an arbitrary restriction.
struct SubMdp {
  std::vector<int> states;                // sorted, unique
  std::vector<std::vector<int>> actions;  // parallel to states, sorted

  int position_of(int s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || *it != s) return -1;
    return static_cast<int>(it - states.begin());
  }
  bool contains(int s) const { return position_of(s) >= 0; }
};

/// Explicit probabilistic labeled MDP. States and actions are dense integer
/// ids; human-readable names live in the side tables. Instances are immutable
/// after construction and safe to share across threads.
struct LabeledMdp {
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  std::vector<std::string> atomic_props;  // fixed order defines label bits

  std::vector<std::vector<int>> actions_of;  // per state, sorted action ids
  // transitions[s][i] is the outcome row of actions_of[s][i]
  std::vector<std::vector<std::vector<LabeledOutcome>>> transitions;
  std::vector<std::vector<LabelOutcome>> label_dist;  // per state

  int initial_state = 0;
  LabelSet initial_label = 0;

  int num_states() const { return static_cast<int>(actions_of.size()); }
  int num_props() const { return static_cast<int>(atomic_props.size()); }

  int ap_index(const std::string& name) const {
    for (int i = 0; i < num_props(); ++i)
      if (atomic_props[i] == name) return i;
    return -1;
  }

  int action_id(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(action_names.size()); ++i)
      if (action_names[i] == name) return i;
    return -1;
  }

  int action_row_index(int s, int a) const {
    const auto& acts = actions_of[s];
    auto it = std::lower_bound(acts.begin(), acts.end(), a);
    if (it == acts.end() || *it != a) return -1;
    return static_cast<int>(it - acts.begin());
  }

  const std::vector<LabeledOutcome>& outcome_row(int s, int a) const {
    if (s < 0 || s >= num_states()) throw DomainError("unknown state id " + std::to_string(s));
    int i = action_row_index(s, a);
    if (i < 0)
      throw DomainError("action " + std::to_string(a) + " not enabled at state " +
                        std::to_string(s));
    return transitions[s][i];
  }

  /// Support of the transition distribution: states reachable in one step.
  std::vector<int> post(int s, int a) const {
    std::vector<int> out;
    for (const auto& o : outcome_row(s, a))
      if (o.prob > 0.0) out.push_back(o.state);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  LabelSet sample_label(int s, Rng& rng) const {
    const auto& dist = label_dist[s];
    std::size_t i = sample_discrete(std::span<const LabelOutcome>(dist), rng);
    return dist[i].label;
  }

  /// Draws the next state from p_S(s,a,.), then a label from the landed
  /// state's label distribution.
  std::pair<int, LabelSet> sample_step(int s, int a, Rng& rng) const {
    const auto& row = outcome_row(s, a);
    std::size_t i = sample_discrete(std::span<const LabeledOutcome>(row), rng);
    int next = row[i].state;
    return {next, sample_label(next, rng)};
  }

  double label_prob(int s, LabelSet l) const {
    for (const auto& o : label_dist[s])
      if (o.label == l) return o.prob;
    return 0.0;
  }

  ValidationReport validate() const;
  std::vector<SubMdp> maximal_end_components() const;
  std::vector<SubMdp> maximal_end_components(const SubMdp& within) const;
};

inline ValidationReport LabeledMdp::validate() const {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) { rep.problems.push_back(std::move(msg)); };

  if (num_states() == 0) fail("model has no states");
  if (num_props() > kMaxAtomicProps)
    fail("more than " + std::to_string(kMaxAtomicProps) + " atomic propositions");
  if (transitions.size() != actions_of.size() || label_dist.size() != actions_of.size())
    fail("state table sizes disagree");

  for (int s = 0; s < num_states(); ++s) {
    if (actions_of[s].empty()) fail("state " + state_names[s] + " has no actions");
    if (transitions[s].size() != actions_of[s].size()) {
      fail("state " + state_names[s] + ": transition rows do not match action set");
      continue;
    }
    for (std::size_t i = 0; i < actions_of[s].size(); ++i) {
      double sum = 0.0;
      for (const auto& o : transitions[s][i]) {
        if (o.state < 0 || o.state >= num_states())
          fail("state " + state_names[s] + ": outcome refers to unknown state");
        if (o.prob < 0.0)
          fail("state " + state_names[s] + ": negative transition probability");
        sum += o.prob;
      }
      if (std::abs(sum - 1.0) > kProbTolerance) {
        std::ostringstream os;
        os << "transition row (" << state_names[s] << ", "
           << action_names[actions_of[s][i]] << ") sums to " << sum;
        fail(os.str());
      }
    }
    double lsum = 0.0;
    for (const auto& o : label_dist[s]) {
      if (o.prob < 0.0) fail("state " + state_names[s] + ": negative label probability");
      if (num_props() < 32 && (o.label >> num_props()) != 0)
        fail("state " + state_names[s] + ": label uses undeclared propositions");
      lsum += o.prob;
    }
    if (std::abs(lsum - 1.0) > kProbTolerance) {
      std::ostringstream os;
      os << "label distribution of " << state_names[s] << " sums to " << lsum;
      fail(os.str());
    }
  }

  if (initial_state < 0 || initial_state >= num_states()) {
    fail("initial state out of range");
  } else if (label_prob(initial_state, initial_label) <= 0.0) {
    fail("initial label has zero probability at the initial state");
  }
  return rep;
}

// --- end component machinery ------------------------------------------------

/// Maximal end component decomposition over an abstract model. `actions_of`
/// maps a state id to its action ids, `post` yields the successor support of
/// a (state, action) pair. Implements the usual iterative SCC-prune fixpoint:
/// drop actions that leave the candidate, drop states without actions, split
/// along SCCs, repeat until every surviving candidate is strongly connected.
template <class ActionsFn, class PostFn>
std::vector<SubMdp> decompose_end_components(int num_states,
                                             const std::vector<int>& seed_states,
                                             const std::vector<std::vector<int>>& seed_actions,
                                             ActionsFn&& /*unused*/, PostFn&& post) {
  struct Candidate {
    std::vector<int> states;
    std::vector<std::vector<int>> actions;
  };
  std::vector<Candidate> work;
  work.push_back({seed_states, seed_actions});
  std::vector<SubMdp> result;
  std::vector<char> member(num_states, 0);

  while (!work.empty()) {
    Candidate c = std::move(work.back());
    work.pop_back();

    // Prune to a closure fixpoint: keep an action only if its successors stay
    // inside the candidate; drop states left without actions.
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s : c.states) member[s] = 1;
      std::vector<int> kept_states;
      std::vector<std::vector<int>> kept_actions;
      for (std::size_t i = 0; i < c.states.size(); ++i) {
        std::vector<int> acts;
        for (int a : c.actions[i]) {
          bool inside = true;
          for (int t : post(c.states[i], a))
            if (!member[t]) {
              inside = false;
              break;
            }
          if (inside) acts.push_back(a);
        }
        if (acts.size() != c.actions[i].size()) changed = true;
        if (!acts.empty()) {
          kept_states.push_back(c.states[i]);
          kept_actions.push_back(std::move(acts));
        } else {
          changed = true;
        }
      }
      for (int s : c.states) member[s] = 0;
      c.states = std::move(kept_states);
      c.actions = std::move(kept_actions);
    }
    if (c.states.empty()) continue;

    // Local graph over the surviving states.
    const int n = static_cast<int>(c.states.size());
    std::vector<int> local(num_states, -1);
    for (int i = 0; i < n; ++i) local[c.states[i]] = i;
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int a : c.actions[i])
        for (int t : post(c.states[i], a)) adj[i].push_back(local[t]);

    SccResult scc = strongly_connected_components(adj);
    if (scc.count == 1) {
      result.push_back({c.states, c.actions});
      continue;
    }
    std::vector<Candidate> parts(scc.count);
    for (int i = 0; i < n; ++i) {
      parts[scc.component[i]].states.push_back(c.states[i]);
      parts[scc.component[i]].actions.push_back(c.actions[i]);
    }
    for (auto& p : parts) work.push_back(std::move(p));
  }

  for (auto& ec : result) {
    // decompose_end_components keeps states in discovery order; normalize.
    std::vector<std::size_t> order(ec.states.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ec.states[a] < ec.states[b]; });
    SubMdp sorted;
    for (std::size_t i : order) {
      sorted.states.push_back(ec.states[i]);
      sorted.actions.push_back(ec.actions[i]);
    }
    ec = std::move(sorted);
  }
  std::sort(result.begin(), result.end(),
            [](const SubMdp& a, const SubMdp& b) { return a.states[0] < b.states[0]; });
  return result;
}

inline std::vector<SubMdp> LabeledMdp::maximal_end_components() const {
  std::vector<int> seed(num_states());
  for (int s = 0; s < num_states(); ++s) seed[s] = s;
  return decompose_end_components(
      num_states(), seed, actions_of, 0,
      [this](int s, int a) { return post(s, a); });
}

inline std::vector<SubMdp> LabeledMdp::maximal_end_components(const SubMdp& within) const {
  return decompose_end_components(
      num_states(), within.states, within.actions, 0,
      [this](int s, int a) { return post(s, a); });
}

/// True iff `sub` is an end component of the model: closed under its kept
/// actions, every action set nonempty, and the induced graph strongly
/// connected. Used directly by tests and verification reports.
inline bool is_end_component(const LabeledMdp& mdp, const SubMdp& sub) {
  if (sub.states.empty() || sub.states.size() != sub.actions.size()) return false;
  const int n = static_cast<int>(sub.states.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    if (sub.actions[i].empty()) return false;
    for (int a : sub.actions[i]) {
      if (mdp.action_row_index(sub.states[i], a) < 0) return false;
      for (int t : mdp.post(sub.states[i], a)) {
        int j = sub.position_of(t);
        if (j < 0) return false;  // not closed
        adj[i].push_back(j);
      }
    }
  }
  return strongly_connected_components(adj).count == 1;
}

/// Normalizes rows whose sums are already within tolerance of one; leaves
/// anything farther off untouched so validate() can flag it.
inline void normalize_if_close(LabeledMdp& mdp) {
  auto fix = [](auto& row) {
    double sum = 0.0;
    for (const auto& o : row) sum += o.prob;
    if (sum > 0.0 && std::abs(sum - 1.0) <= kProbTolerance)
      for (auto& o : row) o.prob /= sum;
  };
  for (auto& state_rows : mdp.transitions)
    for (auto& row : state_rows) fix(row);
  for (auto& row : mdp.label_dist) fix(row);
}

}  // namespace rlsynth
