#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rlsynth/graph.hpp"
#include "rlsynth/labeled_mdp.hpp"  // LabelSet, kMaxAtomicProps

namespace rlsynth {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line_, int column_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ", column " +
                           std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
};

// --- Boolean guards over atomic-proposition indices --------------------------

/// Immutable Boolean formula over proposition indices. Shared subtrees make
/// copies cheap; guards are never mutated after construction.
struct Guard {
  enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or };
  Kind kind = Kind::True;
  int atom = -1;
  std::shared_ptr<const Guard> lhs;
  std::shared_ptr<const Guard> rhs;

  static Guard make_true() { return Guard{Kind::True, -1, nullptr, nullptr}; }
  static Guard make_false() { return Guard{Kind::False, -1, nullptr, nullptr}; }
  static Guard make_atom(int i) { return Guard{Kind::Atom, i, nullptr, nullptr}; }
  static Guard make_not(Guard g) {
    return Guard{Kind::Not, -1, std::make_shared<Guard>(std::move(g)), nullptr};
  }
  static Guard make_and(Guard a, Guard b) {
    return Guard{Kind::And, -1, std::make_shared<Guard>(std::move(a)),
                 std::make_shared<Guard>(std::move(b))};
  }
  static Guard make_or(Guard a, Guard b) {
    return Guard{Kind::Or, -1, std::make_shared<Guard>(std::move(a)),
                 std::make_shared<Guard>(std::move(b))};
  }
};

inline bool eval_guard(const Guard& g, LabelSet l) {
  switch (g.kind) {
    case Guard::Kind::True: return true;
    case Guard::Kind::False: return false;
    case Guard::Kind::Atom: return (l >> g.atom) & 1u;
    case Guard::Kind::Not: return !eval_guard(*g.lhs, l);
    case Guard::Kind::And: return eval_guard(*g.lhs, l) && eval_guard(*g.rhs, l);
    case Guard::Kind::Or: return eval_guard(*g.lhs, l) || eval_guard(*g.rhs, l);
  }
  return false;
}

/// All letters of 2^Pi satisfying the guard. Brute-force enumeration, bounded
/// to keep the blowup honest.
inline std::vector<LabelSet> guard_letters(const Guard& g, int num_props) {
  if (num_props > kMaxAtomicProps)
    throw DomainError("guard_letters: alphabet too large (" + std::to_string(num_props) +
                      " propositions)");
  std::vector<LabelSet> out;
  const LabelSet end = static_cast<LabelSet>(1u) << num_props;
  for (LabelSet l = 0; l < end; ++l)
    if (eval_guard(g, l)) out.push_back(l);
  return out;
}

inline int max_atom_index(const Guard& g) {
  switch (g.kind) {
    case Guard::Kind::Atom: return g.atom;
    case Guard::Kind::Not: return max_atom_index(*g.lhs);
    case Guard::Kind::And:
    case Guard::Kind::Or:
      return std::max(max_atom_index(*g.lhs), max_atom_index(*g.rhs));
    default: return -1;
  }
}

inline bool guards_equal(const Guard& a, const Guard& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Guard::Kind::True:
    case Guard::Kind::False: return true;
    case Guard::Kind::Atom: return a.atom == b.atom;
    case Guard::Kind::Not: return guards_equal(*a.lhs, *b.lhs);
    case Guard::Kind::And:
    case Guard::Kind::Or:
      return guards_equal(*a.lhs, *b.lhs) && guards_equal(*a.rhs, *b.rhs);
  }
  return false;
}

/// Renders a guard in HOA label syntax, fully parenthesized so that parsing
/// the output reproduces the same tree.
inline std::string guard_text(const Guard& g) {
  switch (g.kind) {
    case Guard::Kind::True: return "t";
    case Guard::Kind::False: return "f";
    case Guard::Kind::Atom: return std::to_string(g.atom);
    case Guard::Kind::Not: return "!" + guard_text(*g.lhs);
    case Guard::Kind::And: return "(" + guard_text(*g.lhs) + " & " + guard_text(*g.rhs) + ")";
    case Guard::Kind::Or: return "(" + guard_text(*g.lhs) + " | " + guard_text(*g.rhs) + ")";
  }
  return "f";
}

namespace detail {

/// Recursive-descent guard parser over HOA label expressions:
/// atoms are proposition indices; precedence ! > & > |.
class GuardParser {
 public:
  GuardParser(const std::string& text, int line, int col_offset)
      : text_(text), line_(line), col_offset_(col_offset) {}

  Guard parse() {
    Guard g = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters in guard");
    return g;
  }

 private:
  Guard parse_or() {
    Guard g = parse_and();
    while (true) {
      skip_ws();
      if (!eat('|')) return g;
      g = Guard::make_or(std::move(g), parse_and());
    }
  }
  Guard parse_and() {
    Guard g = parse_unary();
    while (true) {
      skip_ws();
      if (!eat('&')) return g;
      g = Guard::make_and(std::move(g), parse_unary());
    }
  }
  Guard parse_unary() {
    skip_ws();
    if (eat('!')) return Guard::make_not(parse_unary());
    if (eat('(')) {
      Guard g = parse_or();
      skip_ws();
      if (!eat(')')) fail("expected ')'");
      return g;
    }
    if (eat('t')) return Guard::make_true();
    if (eat('f')) return Guard::make_false();
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      int v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        v = v * 10 + (text_[pos_++] - '0');
      return Guard::make_atom(v);
    }
    fail("expected guard term");
    return Guard::make_false();
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(line_, col_offset_ + static_cast<int>(pos_) + 1, msg);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_;
  int col_offset_;
};

}  // namespace detail

inline Guard parse_guard_text(const std::string& text, int line = 0, int col_offset = 0) {
  return detail::GuardParser(text, line, col_offset).parse();
}

// --- Generalized Büchi automata ----------------------------------------------

struct GbaEdge {
  Guard guard;
  int target = 0;
};

/// State-based generalized Büchi automaton. Edge acceptance marks in the
/// source file are lifted onto states at load time (see parse_hoa), so
/// `state_marks[q]` is the only acceptance information. `origin[q]` remembers
/// which state of the source file q came from; size statistics for products
/// are reported over origins.
struct Gba {
  std::vector<std::string> ap_names;
  int num_sets = 0;
  int initial = 0;
  std::vector<std::vector<GbaEdge>> edges;      // per state
  std::vector<std::uint32_t> state_marks;       // per state, accepting-set mask
  std::vector<std::vector<int>> eps_edges;      // per state, from the manifest
  std::vector<int> origin;                      // per state, source-file state
  int raw_state_count = 0;
  std::vector<std::string> state_names;

  int num_states() const { return static_cast<int>(edges.size()); }
  int num_props() const { return static_cast<int>(ap_names.size()); }
  std::uint32_t all_sets_mask() const { return (num_sets >= 32) ? ~0u : ((1u << num_sets) - 1u); }
  bool accepting(int q) const { return state_marks[q] != 0; }
};

/// Epsilon edges and (optionally) a declared deterministic part, shipped next
/// to a HOA file because HOA itself has no epsilon encoding.
struct AutomatonManifest {
  std::vector<std::pair<int, int>> eps_edges;  // raw source-file state ids
  std::optional<std::vector<int>> declared_deterministic;
};

struct Ldgba {
  Gba gba;
  std::vector<bool> deterministic_part;  // per state

  bool in_deterministic(int q) const { return deterministic_part[q]; }
};

struct NotLimitDeterministic : std::runtime_error {
  int witness_state;
  NotLimitDeterministic(int q, const std::string& clause)
      : std::runtime_error("automaton is not limit-deterministic: state " +
                           std::to_string(q) + ": " + clause),
        witness_state(q) {}
};

// --- HOA parsing --------------------------------------------------------------

namespace detail {

struct RawEdge {
  Guard guard;
  int target = 0;
  std::uint32_t marks = 0;
};

struct RawAutomaton {
  std::vector<std::string> ap_names;
  int num_states = 0;
  int num_sets = 0;
  int initial = -1;
  std::vector<std::vector<RawEdge>> edges;
  std::vector<std::uint32_t> state_marks;
  std::vector<std::vector<int>> eps_edges;
  bool any_edge_marks = false;
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Accepts only conjunctions of Inf(i) covering each index exactly once.
inline void check_acceptance_formula(const std::string& formula, int num_sets, int line) {
  std::vector<bool> seen(num_sets, false);
  std::string work = formula;
  std::size_t pos = 0;
  int expected = 0;
  while (pos < work.size()) {
    while (pos < work.size() &&
           (std::isspace(static_cast<unsigned char>(work[pos])) || work[pos] == '(' ||
            work[pos] == ')'))
      ++pos;
    if (pos >= work.size()) break;
    if (expected == 1) {
      if (work[pos] != '&')
        throw ParseError(line, static_cast<int>(pos) + 1,
                         "unsupported acceptance condition (generalized Büchi required)");
      ++pos;
      expected = 0;
      continue;
    }
    if (work.compare(pos, 4, "Inf(") != 0)
      throw ParseError(line, static_cast<int>(pos) + 1,
                       "unsupported acceptance condition (generalized Büchi required)");
    pos += 4;
    std::size_t close = work.find(')', pos);
    if (close == std::string::npos)
      throw ParseError(line, static_cast<int>(pos) + 1, "missing ')' in acceptance term");
    int idx = std::stoi(work.substr(pos, close - pos));
    if (idx < 0 || idx >= num_sets)
      throw ParseError(line, static_cast<int>(pos) + 1, "acceptance set index out of range");
    if (seen[idx])
      throw ParseError(line, static_cast<int>(pos) + 1, "duplicate acceptance set in condition");
    seen[idx] = true;
    pos = close + 1;
    expected = 1;
  }
  for (int i = 0; i < num_sets; ++i)
    if (!seen[i])
      throw ParseError(line, 1, "acceptance condition does not mention Inf(" +
                                    std::to_string(i) + ")");
}

inline std::uint32_t parse_mark_set(const std::string& body, int num_sets, int line) {
  std::uint32_t marks = 0;
  std::istringstream is(body);
  int idx;
  while (is >> idx) {
    if (idx < 0 || idx >= num_sets)
      throw ParseError(line, 1, "acceptance mark out of range: " + std::to_string(idx));
    marks |= 1u << idx;
  }
  return marks;
}

inline RawAutomaton parse_raw_hoa(std::istream& in) {
  RawAutomaton raw;
  std::string line;
  int lineno = 0;
  bool saw_hoa = false, saw_states = false, saw_acceptance = false, in_body = false,
       saw_end = false;
  int current_state = -1;

  auto header_value = [&](const std::string& l, std::size_t colon) {
    return trim(l.substr(colon + 1));
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t.rfind("/*", 0) == 0) continue;

    if (!in_body) {
      if (t == "--BODY--") {
        if (!saw_hoa) throw ParseError(lineno, 1, "missing HOA: header");
        if (!saw_states) throw ParseError(lineno, 1, "missing States: header");
        if (!saw_acceptance) throw ParseError(lineno, 1, "missing Acceptance: header");
        if (raw.initial < 0) throw ParseError(lineno, 1, "missing Start: header");
        raw.edges.assign(raw.num_states, {});
        raw.state_marks.assign(raw.num_states, 0);
        raw.eps_edges.assign(raw.num_states, {});
        in_body = true;
        continue;
      }
      std::size_t colon = t.find(':');
      if (colon == std::string::npos)
        throw ParseError(lineno, 1, "expected a header item or --BODY--");
      std::string key = t.substr(0, colon);
      std::string value = header_value(t, colon);
      if (key == "HOA") {
        if (value != "v1") throw ParseError(lineno, 1, "unsupported HOA version: " + value);
        saw_hoa = true;
      } else if (key == "States") {
        raw.num_states = std::stoi(value);
        saw_states = true;
      } else if (key == "Start") {
        if (raw.initial >= 0 || value.find('&') != std::string::npos)
          throw ParseError(lineno, 1, "only a single initial state is supported");
        raw.initial = std::stoi(value);
      } else if (key == "AP") {
        std::istringstream is(value);
        int count = 0;
        is >> count;
        if (count > kMaxAtomicProps)
          throw ParseError(lineno, 1, "alphabet too large: " + std::to_string(count) +
                                          " atomic propositions");
        for (int i = 0; i < count; ++i) {
          std::string name;
          is >> std::ws;
          if (is.get() != '"') throw ParseError(lineno, 1, "expected quoted AP name");
          char c;
          while (is.get(c) && c != '"') name.push_back(c);
          raw.ap_names.push_back(name);
        }
        if (static_cast<int>(raw.ap_names.size()) != count)
          throw ParseError(lineno, 1, "AP count mismatch");
      } else if (key == "Acceptance") {
        std::istringstream is(value);
        is >> raw.num_sets;
        if (raw.num_sets < 1)
          throw ParseError(lineno, 1,
                           "generalized Büchi needs at least one acceptance set");
        std::string formula;
        std::getline(is, formula);
        check_acceptance_formula(trim(formula), raw.num_sets, lineno);
        saw_acceptance = true;
      } else if (key == "acc-name") {
        std::istringstream is(value);
        std::string name;
        is >> name;
        if (name != "generalized-Buchi" && name != "Buchi")
          throw ParseError(lineno, 1, "unsupported acceptance family: " + name);
      } else {
        // name:, tool:, properties:, ... are informational
        continue;
      }
    } else {
      if (t == "--END--") {
        saw_end = true;
        break;
      }
      if (t.rfind("State:", 0) == 0) {
        std::string rest = trim(t.substr(6));
        if (!rest.empty() && rest[0] == '[')
          throw ParseError(lineno, 1, "state-labelled automata are not supported");
        std::istringstream is(rest);
        is >> current_state;
        if (is.fail() || current_state < 0 || current_state >= raw.num_states)
          throw ParseError(lineno, 1, "bad state index in State: line");
        // optional "name" then optional {marks}
        std::size_t brace = rest.find('{');
        if (brace != std::string::npos) {
          std::size_t close = rest.find('}', brace);
          if (close == std::string::npos) throw ParseError(lineno, 1, "missing '}'");
          raw.state_marks[current_state] =
              parse_mark_set(rest.substr(brace + 1, close - brace - 1), raw.num_sets, lineno);
        }
        continue;
      }
      if (current_state < 0) throw ParseError(lineno, 1, "edge before any State: line");
      if (t[0] != '[')
        throw ParseError(lineno, 1, "expected a labelled edge '[guard] target'");
      std::size_t close = t.find(']');
      if (close == std::string::npos) throw ParseError(lineno, 1, "missing ']' in edge label");
      Guard g = parse_guard_text(t.substr(1, close - 1), lineno, 1);
      std::string rest = trim(t.substr(close + 1));
      std::uint32_t marks = 0;
      std::size_t brace = rest.find('{');
      if (brace != std::string::npos) {
        std::size_t bclose = rest.find('}', brace);
        if (bclose == std::string::npos) throw ParseError(lineno, 1, "missing '}'");
        marks = parse_mark_set(rest.substr(brace + 1, bclose - brace - 1), raw.num_sets, lineno);
        rest = trim(rest.substr(0, brace));
      }
      if (rest.find_first_not_of("0123456789") != std::string::npos || rest.empty())
        throw ParseError(lineno, 1, "expected a single target state index");
      int target = std::stoi(rest);
      if (target < 0 || target >= raw.num_states)
        throw ParseError(lineno, 1, "edge target out of range");
      if (max_atom_index(g) >= static_cast<int>(raw.ap_names.size()))
        throw ParseError(lineno, 1, "guard uses an AP index beyond the declared count");
      if (marks != 0) raw.any_edge_marks = true;
      raw.edges[current_state].push_back({std::move(g), target, marks});
    }
  }
  if (!in_body) throw ParseError(lineno, 1, "missing --BODY--");
  if (!saw_end) throw ParseError(lineno, 1, "missing --END--");
  return raw;
}

/// Lifts edge acceptance marks onto states: a target is split per incoming
/// mark set, every split copy inherits the original outgoing edges. Automata
/// without edge marks pass through unchanged.
inline Gba lift_to_state_marks(const RawAutomaton& raw) {
  Gba gba;
  gba.ap_names = raw.ap_names;
  gba.num_sets = raw.num_sets;
  gba.raw_state_count = raw.num_states;

  if (!raw.any_edge_marks) {
    gba.initial = raw.initial;
    gba.edges.assign(raw.num_states, {});
    for (int q = 0; q < raw.num_states; ++q)
      for (const auto& e : raw.edges[q]) gba.edges[q].push_back({e.guard, e.target});
    gba.state_marks = raw.state_marks;
    gba.eps_edges = raw.eps_edges;
    gba.origin.resize(raw.num_states);
    for (int q = 0; q < raw.num_states; ++q) {
      gba.origin[q] = q;
      gba.state_names.push_back("q" + std::to_string(q));
    }
    return gba;
  }

  using Key = std::pair<int, std::uint32_t>;  // (raw state, lifted marks)
  std::map<Key, int> ids;
  std::vector<Key> todo;
  auto intern = [&](int q, std::uint32_t m) {
    Key k{q, m};
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(ids.size());
    ids[k] = id;
    todo.push_back(k);
    gba.origin.push_back(q);
    gba.state_marks.push_back(m);
    gba.state_names.push_back(m == 0 ? "q" + std::to_string(q)
                                     : "q" + std::to_string(q) + "#" + std::to_string(m));
    return id;
  };

  gba.initial = intern(raw.initial, raw.state_marks[raw.initial]);
  for (std::size_t i = 0; i < todo.size(); ++i) {
    auto [q, m] = todo[i];
    gba.edges.emplace_back();
    gba.eps_edges.emplace_back();
    const int self = static_cast<int>(i);
    for (const auto& e : raw.edges[q]) {
      int child = intern(e.target, e.marks | raw.state_marks[e.target]);
      gba.edges[self].push_back({e.guard, child});
    }
    for (int t : raw.eps_edges[q]) {
      int child = intern(t, raw.state_marks[t]);
      gba.eps_edges[self].push_back(child);
    }
  }
  return gba;
}

}  // namespace detail

inline AutomatonManifest parse_manifest(std::istream& in) {
  AutomatonManifest man;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream is(t);
    std::string key;
    is >> key;
    if (key == "eldgba-manifest") continue;  // version tag
    if (key == "epsilon") {
      int from, to;
      if (!(is >> from >> to)) throw ParseError(lineno, 1, "epsilon needs two state ids");
      man.eps_edges.push_back({from, to});
    } else if (key == "deterministic") {
      std::vector<int> qd;
      int q;
      while (is >> q) qd.push_back(q);
      man.declared_deterministic = std::move(qd);
    } else {
      throw ParseError(lineno, 1, "unknown manifest directive: " + key);
    }
  }
  return man;
}

/// Parses a HOA v1 automaton restricted to the generalized Büchi fragment.
/// Edge acceptance marks are lifted to state marks by splitting. Each
/// accepting set must be nonempty after the lift.
inline Gba parse_hoa(std::istream& in, const AutomatonManifest* manifest = nullptr) {
  detail::RawAutomaton raw = detail::parse_raw_hoa(in);
  if (manifest) {
    for (auto [from, to] : manifest->eps_edges) {
      if (from < 0 || from >= raw.num_states || to < 0 || to >= raw.num_states)
        throw ParseError(0, 0, "manifest epsilon edge out of range");
      raw.eps_edges[from].push_back(to);
    }
  }
  Gba gba = detail::lift_to_state_marks(raw);
  for (int i = 0; i < gba.num_sets; ++i) {
    bool nonempty = false;
    for (int q = 0; q < gba.num_states(); ++q)
      if (gba.state_marks[q] & (1u << i)) nonempty = true;
    if (!nonempty)
      throw ParseError(0, 0, "accepting set " + std::to_string(i) +
                                 " is empty; acceptance would be vacuous");
  }
  return gba;
}

inline Gba parse_hoa_text(const std::string& text, const AutomatonManifest* manifest = nullptr) {
  std::istringstream is(text);
  return parse_hoa(is, manifest);
}

/// Emits the automaton back as state-based HOA. Epsilon edges are not part of
/// HOA; callers keep the manifest alongside.
inline std::string emit_hoa(const Gba& gba) {
  std::ostringstream os;
  os << "HOA: v1\n";
  os << "States: " << gba.num_states() << "\n";
  os << "Start: " << gba.initial << "\n";
  os << "AP: " << gba.num_props();
  for (const auto& ap : gba.ap_names) os << " \"" << ap << "\"";
  os << "\n";
  os << "Acceptance: " << gba.num_sets;
  for (int i = 0; i < gba.num_sets; ++i) os << (i == 0 ? " " : " & ") << "Inf(" << i << ")";
  os << "\n";
  os << "acc-name: generalized-Buchi " << gba.num_sets << "\n";
  os << "--BODY--\n";
  for (int q = 0; q < gba.num_states(); ++q) {
    os << "State: " << q;
    if (gba.state_marks[q]) {
      os << " {";
      bool first = true;
      for (int i = 0; i < gba.num_sets; ++i)
        if (gba.state_marks[q] & (1u << i)) {
          os << (first ? "" : " ") << i;
          first = false;
        }
      os << "}";
    }
    os << "\n";
    for (const auto& e : gba.edges[q]) os << "[" << guard_text(e.guard) << "] " << e.target << "\n";
  }
  os << "--END--\n";
  return os.str();
}

// --- limit-deterministic partition --------------------------------------------

namespace detail {

inline bool edge_satisfiable(const Guard& g, int num_props) {
  const LabelSet end = static_cast<LabelSet>(1u) << num_props;
  for (LabelSet l = 0; l < end; ++l)
    if (eval_guard(g, l)) return true;
  return false;
}

/// True iff exactly one outgoing edge of q fires for every letter.
inline bool total_deterministic(const Gba& gba, int q) {
  const LabelSet end = static_cast<LabelSet>(1u) << gba.num_props();
  for (LabelSet l = 0; l < end; ++l) {
    int hits = 0;
    for (const auto& e : gba.edges[q])
      if (eval_guard(e.guard, l)) ++hits;
    if (hits != 1) return false;
  }
  return true;
}

}  // namespace detail

/// Computes the greatest state set that is epsilon-free, total and
/// deterministic over the alphabet, and closed under successors; checks that
/// all accepting states sit inside it and that epsilon edges only cross from
/// outside into it.
inline Ldgba infer_limit_deterministic(const Gba& gba) {
  const int n = gba.num_states();
  std::vector<bool> in_d(n, false);
  for (int q = 0; q < n; ++q)
    in_d[q] = gba.eps_edges[q].empty() && detail::total_deterministic(gba, q);

  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < n; ++q) {
      if (!in_d[q]) continue;
      for (const auto& e : gba.edges[q]) {
        if (in_d[e.target]) continue;
        if (!detail::edge_satisfiable(e.guard, gba.num_props())) continue;
        in_d[q] = false;
        changed = true;
        break;
      }
    }
  }

  for (int q = 0; q < n; ++q) {
    if (gba.state_marks[q] && !in_d[q])
      throw NotLimitDeterministic(q, "accepting state outside the deterministic part");
    for (int t : gba.eps_edges[q]) {
      if (in_d[q])  // unreachable: in_d requires eps-free, kept as a guard
        throw NotLimitDeterministic(q, "epsilon transition inside the deterministic part");
      if (!in_d[t])
        throw NotLimitDeterministic(q, "epsilon transition does not enter the deterministic part");
    }
  }
  return Ldgba{gba, std::move(in_d)};
}

/// Validates a declared partition instead of inferring one.
inline Ldgba infer_limit_deterministic(const Gba& gba, const std::vector<int>& declared) {
  const int n = gba.num_states();
  std::vector<bool> in_d(n, false);
  for (int q : declared) {
    if (q < 0 || q >= n) throw NotLimitDeterministic(q, "declared state id out of range");
    in_d[q] = true;
  }
  for (int q = 0; q < n; ++q) {
    if (in_d[q]) {
      if (!gba.eps_edges[q].empty())
        throw NotLimitDeterministic(q, "epsilon transition inside the deterministic part");
      if (!detail::total_deterministic(gba, q))
        throw NotLimitDeterministic(q, "state transitions are not total and deterministic");
      for (const auto& e : gba.edges[q])
        if (!in_d[e.target] && detail::edge_satisfiable(e.guard, gba.num_props()))
          throw NotLimitDeterministic(q, "deterministic part is not closed under successors");
    } else {
      if (gba.state_marks[q])
        throw NotLimitDeterministic(q, "accepting state outside the deterministic part");
      for (int t : gba.eps_edges[q])
        if (!in_d[t])
          throw NotLimitDeterministic(q,
                                      "epsilon transition does not enter the deterministic part");
    }
  }
  return Ldgba{gba, std::move(in_d)};
}

/// Unique letter successor of a state in the deterministic part.
inline int unique_successor(const Ldgba& aut, int q, LabelSet letter) {
  for (const auto& e : aut.gba.edges[q])
    if (eval_guard(e.guard, letter)) return e.target;
  throw DomainError("no successor on letter; state not total");
}

// --- lasso acceptance ---------------------------------------------------------

/// Decides whether some resolution of nondeterminism (including epsilon
/// moves, which consume no letter) accepts prefix . cycle^omega. Nodes are
/// (state, word phase); acceptance holds iff a reachable SCC contains a
/// letter-consuming edge and touches every accepting set.
inline bool lasso_accepted(const Ldgba& aut, const std::vector<LabelSet>& prefix,
                           const std::vector<LabelSet>& cycle) {
  if (cycle.empty()) throw DomainError("lasso_accepted: empty cycle");
  const Gba& gba = aut.gba;
  const int period = static_cast<int>(prefix.size() + cycle.size());
  const int plen = static_cast<int>(prefix.size());
  const int n = gba.num_states();
  auto node = [&](int q, int phase) { return q * period + phase; };
  auto letter_at = [&](int phase) {
    return phase < plen ? prefix[phase] : cycle[phase - plen];
  };
  auto next_phase = [&](int phase) { return phase + 1 < period ? phase + 1 : plen; };

  std::vector<std::vector<int>> adj(n * period);
  std::vector<std::vector<char>> is_letter(n * period);
  for (int q = 0; q < n; ++q)
    for (int phase = 0; phase < period; ++phase) {
      int v = node(q, phase);
      LabelSet l = letter_at(phase);
      for (const auto& e : gba.edges[q])
        if (eval_guard(e.guard, l)) {
          adj[v].push_back(node(e.target, next_phase(phase)));
          is_letter[v].push_back(1);
        }
      for (int t : gba.eps_edges[q]) {
        adj[v].push_back(node(t, phase));
        is_letter[v].push_back(0);
      }
    }

  auto reach = reachable_from(adj, node(gba.initial, 0));
  SccResult scc = strongly_connected_components(adj);
  std::vector<std::uint32_t> comp_marks(scc.count, 0);
  std::vector<char> comp_letter(scc.count, 0);
  std::vector<char> comp_reach(scc.count, 0);
  for (int v = 0; v < n * period; ++v) {
    int c = scc.component[v];
    comp_marks[c] |= gba.state_marks[v / period];
    if (reach[v]) comp_reach[c] = 1;
    for (std::size_t i = 0; i < adj[v].size(); ++i)
      if (is_letter[v][i] && scc.component[adj[v][i]] == c) comp_letter[c] = 1;
  }
  const std::uint32_t all = gba.all_sets_mask();
  for (int c = 0; c < scc.count; ++c)
    if (comp_reach[c] && comp_letter[c] && (comp_marks[c] & all) == all) return true;
  return false;
}

}  // namespace rlsynth
