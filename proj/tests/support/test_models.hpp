#pragma once

// Shared helpers for the test suites: compact model builders, random instance
// generators, and independent brute-force oracles. Everything here is
// test-only and deliberately naive; the oracles must not share code paths
// with the algorithms they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rlsynth/labeled_mdp.hpp"
#include "rlsynth/rng.hpp"

namespace rlsynth::testing {

/// Incremental builder so tests can write models as a few readable lines.
struct MdpBuilder {
  LabeledMdp mdp;
  std::map<std::string, int> state_ids;
  std::map<std::string, int> action_ids;
  std::map<std::pair<int, int>, std::vector<LabeledOutcome>> rows;

  MdpBuilder& props(std::vector<std::string> names) {
    mdp.atomic_props = std::move(names);
    return *this;
  }

  int state(const std::string& name) {
    auto it = state_ids.find(name);
    if (it != state_ids.end()) return it->second;
    int id = static_cast<int>(mdp.state_names.size());
    mdp.state_names.push_back(name);
    state_ids[name] = id;
    return id;
  }

  int action(const std::string& name) {
    auto it = action_ids.find(name);
    if (it != action_ids.end()) return it->second;
    int id = static_cast<int>(mdp.action_names.size());
    mdp.action_names.push_back(name);
    action_ids[name] = id;
    return id;
  }

  MdpBuilder& trans(const std::string& from, const std::string& act,
                    std::vector<std::pair<std::string, double>> outcomes) {
    int s = state(from);
    int a = action(act);
    auto& row = rows[{s, a}];
    for (auto& [to, p] : outcomes) row.push_back({state(to), p});
    return *this;
  }

  MdpBuilder& labels(const std::string& st, std::vector<std::pair<LabelSet, double>> dist) {
    int s = state(st);
    if (static_cast<int>(mdp.label_dist.size()) <= s) mdp.label_dist.resize(s + 1);
    for (auto& [l, p] : dist) mdp.label_dist[s].push_back({l, p});
    return *this;
  }

  MdpBuilder& initial(const std::string& st, LabelSet l) {
    mdp.initial_state = state(st);
    mdp.initial_label = l;
    return *this;
  }

  LabeledMdp build() {
    int n = static_cast<int>(mdp.state_names.size());
    mdp.actions_of.assign(n, {});
    mdp.transitions.assign(n, {});
    mdp.label_dist.resize(n);
    for (auto& [key, row] : rows) mdp.actions_of[key.first].push_back(key.second);
    for (auto& acts : mdp.actions_of) std::sort(acts.begin(), acts.end());
    for (int s = 0; s < n; ++s) {
      mdp.transitions[s].resize(mdp.actions_of[s].size());
      for (std::size_t i = 0; i < mdp.actions_of[s].size(); ++i)
        mdp.transitions[s][i] = rows[{s, mdp.actions_of[s][i]}];
      if (mdp.label_dist[s].empty()) mdp.label_dist[s].push_back({0, 1.0});
    }
    return mdp;
  }
};

/// Random labeled MDP with exact row sums (weights divided by their total).
inline LabeledMdp random_labeled_mdp(Rng& rng, int max_states = 8, int num_props = 2,
                                     int max_actions = 3) {
  int n = 2 + static_cast<int>(rng.next_index(max_states - 1));
  MdpBuilder b;
  std::vector<std::string> props;
  for (int i = 0; i < num_props; ++i) props.push_back(std::string(1, char('a' + i)));
  b.props(props);
  for (int s = 0; s < n; ++s) b.state("s" + std::to_string(s));
  for (int a = 0; a < max_actions; ++a) b.action("act" + std::to_string(a));
  for (int s = 0; s < n; ++s) {
    int acts = 1 + static_cast<int>(rng.next_index(max_actions));
    for (int a = 0; a < acts; ++a) {
      int support = 1 + static_cast<int>(rng.next_index(3));
      std::vector<int> targets;
      std::vector<double> weights;
      double total = 0.0;
      for (int k = 0; k < support; ++k) {
        targets.push_back(static_cast<int>(rng.next_index(n)));
        weights.push_back(1.0 + static_cast<double>(rng.next_index(9)));
        total += weights.back();
      }
      std::vector<std::pair<std::string, double>> outs;
      for (int k = 0; k < support; ++k)
        outs.push_back({"s" + std::to_string(targets[k]), weights[k] / total});
      b.trans("s" + std::to_string(s), "act" + std::to_string(a), outs);
    }
    // one or two label outcomes per state
    LabelSet l1 = static_cast<LabelSet>(rng.next_index(1u << num_props));
    if (rng.next_bool(0.5)) {
      b.labels("s" + std::to_string(s), {{l1, 1.0}});
    } else {
      LabelSet l2 = static_cast<LabelSet>(rng.next_index(1u << num_props));
      if (l2 == l1) l2 ^= 1u;
      double p = 0.1 + 0.8 * rng.next_unit();
      b.labels("s" + std::to_string(s), {{l1, p}, {l2, 1.0 - p}});
    }
  }
  b.initial("s0", 0);
  LabeledMdp m = b.build();
  m.initial_label = m.label_dist[0][0].label;
  return m;
}

/// Brute-force maximal end components: enumerate every nonempty state subset,
/// take the maximal action set that stays inside it, keep the strongly
/// connected closed ones, then filter to inclusion-maximal subsets.
inline std::vector<SubMdp> brute_force_mecs(const LabeledMdp& mdp) {
  const int n = mdp.num_states();
  std::vector<SubMdp> ecs;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    SubMdp sub;
    bool viable = true;
    for (int s = 0; s < n && viable; ++s) {
      if (!(mask & (1u << s))) continue;
      std::vector<int> acts;
      for (int a : mdp.actions_of[s]) {
        bool inside = true;
        for (int t : mdp.post(s, a))
          if (!(mask & (1u << t))) {
            inside = false;
            break;
          }
        if (inside) acts.push_back(a);
      }
      if (acts.empty()) {
        viable = false;
        break;
      }
      sub.states.push_back(s);
      sub.actions.push_back(acts);
    }
    if (viable && is_end_component(mdp, sub)) ecs.push_back(sub);
  }
  std::vector<SubMdp> maximal;
  for (std::size_t i = 0; i < ecs.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < ecs.size() && !dominated; ++j) {
      if (i == j || ecs[j].states.size() <= ecs[i].states.size()) continue;
      dominated = std::includes(ecs[j].states.begin(), ecs[j].states.end(),
                                ecs[i].states.begin(), ecs[i].states.end());
    }
    if (!dominated) maximal.push_back(ecs[i]);
  }
  std::sort(maximal.begin(), maximal.end(),
            [](const SubMdp& a, const SubMdp& b) { return a.states[0] < b.states[0]; });
  return maximal;
}

}  // namespace rlsynth::testing
