#pragma once

// Random automaton generation for property tests, plus an independent lasso
// oracle. Generated automata are limit-deterministic by construction and keep
// the ground-truth partition around so inference can be checked against it.

#include <cstdint>
#include <numeric>
#include <vector>

#include "rlsynth/omega_automata.hpp"
#include "rlsynth/rng.hpp"

namespace rlsynth::testing {

struct GeneratedLdgba {
  Gba gba;
  std::vector<int> known_deterministic;  // ground-truth Q_D
};

/// Builds a random LDGBA around a strongly connected deterministic core: a
/// non-accepting hub with one accepting spoke per acceptance set. Every
/// spoke returns to the hub, so every accepting set can be revisited without
/// crossing another accepting state. Optional extras: a deterministic
/// transient state and a nondeterministic initial state with epsilon jumps.
inline GeneratedLdgba random_test_ldgba(Rng& rng, int num_props = 2, int max_sets = 3) {
  const int num_letters = 1 << num_props;
  const int k = 1 + static_cast<int>(rng.next_index(max_sets));
  const bool with_transient = rng.next_bool(0.4);
  const bool with_guess_state = rng.next_bool(0.5);

  Gba gba;
  for (int i = 0; i < num_props; ++i) gba.ap_names.push_back(std::string(1, char('a' + i)));
  gba.num_sets = k;

  // layout: [0]=hub, [1..k]=spokes, then optional transient, optional guess
  const int hub = 0;
  int next_id = 1 + k;
  const int transient = with_transient ? next_id++ : -1;
  const int guess = with_guess_state ? next_id++ : -1;
  const int n = next_id;

  gba.edges.assign(n, {});
  gba.eps_edges.assign(n, {});
  gba.state_marks.assign(n, 0);
  gba.origin.resize(n);
  std::iota(gba.origin.begin(), gba.origin.end(), 0);
  for (int q = 0; q < n; ++q) gba.state_names.push_back("q" + std::to_string(q));
  gba.raw_state_count = n;

  // hub: partition the alphabet so each spoke gets at least one letter
  std::vector<int> letters(num_letters);
  std::iota(letters.begin(), letters.end(), 0);
  for (int i = num_letters - 1; i > 0; --i)
    std::swap(letters[i], letters[rng.next_index(i + 1)]);
  std::vector<std::vector<LabelSet>> letter_of(n);
  for (int i = 0; i < num_letters; ++i) {
    int target = (i < k) ? 1 + i : (rng.next_bool(0.7) ? hub : 1 + static_cast<int>(rng.next_index(k)));
    letter_of[target].push_back(static_cast<LabelSet>(letters[i]));
  }
  auto letters_to_guard = [](const std::vector<LabelSet>& ls, int props) {
    Guard g = Guard::make_false();
    bool first = true;
    for (LabelSet l : ls) {
      Guard term = Guard::make_true();
      bool t_first = true;
      for (int p = 0; p < props; ++p) {
        Guard lit = ((l >> p) & 1u) ? Guard::make_atom(p)
                                    : Guard::make_not(Guard::make_atom(p));
        term = t_first ? lit : Guard::make_and(std::move(term), std::move(lit));
        t_first = false;
      }
      g = first ? term : Guard::make_or(std::move(g), std::move(term));
      first = false;
    }
    return g;
  };
  for (int t = 0; t < n; ++t)
    if (!letter_of[t].empty())
      gba.edges[hub].push_back({letters_to_guard(letter_of[t], num_props), t});

  // spokes: marked, all letters back to the hub
  for (int i = 0; i < k; ++i) {
    gba.state_marks[1 + i] = 1u << i;
    gba.edges[1 + i].push_back({Guard::make_true(), hub});
  }

  std::vector<int> known_d;
  known_d.push_back(hub);
  for (int i = 0; i < k; ++i) known_d.push_back(1 + i);

  if (with_transient) {
    // deterministic, escapes into the core on half the alphabet
    Guard low = Guard::make_not(Guard::make_atom(0));
    Guard high = Guard::make_atom(0);
    gba.edges[transient].push_back({low, transient});
    gba.edges[transient].push_back({high, hub});
    known_d.push_back(transient);
  }

  gba.initial = hub;
  if (with_guess_state) {
    gba.initial = guess;
    gba.edges[guess].push_back({Guard::make_true(), guess});
    gba.eps_edges[guess].push_back(hub);
    if (with_transient && rng.next_bool(0.5)) gba.eps_edges[guess].push_back(transient);
    if (rng.next_bool(0.5))  // extra nondeterminism on letters
      gba.edges[guess].push_back({Guard::make_atom(0), hub});
  }

  return {std::move(gba), std::move(known_d)};
}

/// Independent lasso-acceptance oracle: for every reachable anchor node of
/// the run graph, search (node, visited-set mask, consumed-a-letter flag)
/// triples for a loop back to the anchor that covers all accepting sets.
inline bool oracle_lasso_accepted(const Gba& gba, const std::vector<LabelSet>& prefix,
                                  const std::vector<LabelSet>& cycle) {
  const int period = static_cast<int>(prefix.size() + cycle.size());
  const int plen = static_cast<int>(prefix.size());
  const int n = gba.num_states();
  auto letter_at = [&](int phase) { return phase < plen ? prefix[phase] : cycle[phase - plen]; };
  auto next_phase = [&](int phase) { return phase + 1 < period ? phase + 1 : plen; };

  struct Move {
    int node;
    bool letter;
  };
  std::vector<std::vector<Move>> adj(n * period);
  for (int q = 0; q < n; ++q)
    for (int phase = 0; phase < period; ++phase) {
      int v = q * period + phase;
      for (const auto& e : gba.edges[q])
        if (eval_guard(e.guard, letter_at(phase)))
          adj[v].push_back({e.target * period + next_phase(phase), true});
      for (int t : gba.eps_edges[q]) adj[v].push_back({t * period + phase, false});
    }

  std::vector<std::vector<int>> plain(n * period);
  for (int v = 0; v < n * period; ++v)
    for (const auto& m : adj[v]) plain[v].push_back(m.node);
  auto reach = reachable_from(plain, gba.initial * period + 0);

  const std::uint32_t all = gba.all_sets_mask();
  const int num_masks = 1 << gba.num_sets;
  for (int anchor = 0; anchor < n * period; ++anchor) {
    if (!reach[anchor]) continue;
    // BFS over (node, mask, consumed)
    std::vector<char> seen(static_cast<std::size_t>(n) * period * num_masks * 2, 0);
    auto idx = [&](int node, std::uint32_t mask, int consumed) {
      return (static_cast<std::size_t>(node) * num_masks + mask) * 2 + consumed;
    };
    std::vector<std::tuple<int, std::uint32_t, int>> todo;
    std::uint32_t start_mask = gba.state_marks[anchor / period] & all;
    todo.push_back({anchor, start_mask, 0});
    seen[idx(anchor, start_mask, 0)] = 1;
    bool found = false;
    while (!todo.empty() && !found) {
      auto [v, mask, consumed] = todo.back();
      todo.pop_back();
      for (const auto& m : adj[v]) {
        std::uint32_t nm = mask | (gba.state_marks[m.node / period] & all);
        int nc = consumed || m.letter;
        if (m.node == anchor && nm == all && nc) {
          found = true;
          break;
        }
        if (!seen[idx(m.node, nm, nc)]) {
          seen[idx(m.node, nm, nc)] = 1;
          todo.push_back({m.node, nm, nc});
        }
      }
    }
    if (found) return true;
  }
  return false;
}

}  // namespace rlsynth::testing
