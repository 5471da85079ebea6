#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace rlsynth {

struct SccResult {
  std::vector<int> component;  // node -> component id
  int count = 0;
};

/// Tarjan strongly connected components, iterative so deep graphs cannot
/// overflow the stack. Component ids are in reverse topological order
/// (a component only has edges into components with smaller or equal id).
inline SccResult strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  SccResult res;
  res.component.assign(n, -1);

  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int next_index = 0;

  struct Frame {
    int node;
    std::size_t edge;
  };
  std::vector<Frame> call;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      int v = f.node;
      if (f.edge == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (f.edge < adj[v].size()) {
        int w = adj[v][f.edge++];
        if (index[w] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          res.component[w] = res.count;
          if (w == v) break;
        }
        ++res.count;
      }
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().node;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return res;
}

/// Components with no edge leaving them (bottom SCCs).
inline std::vector<bool> bottom_components(
    const std::vector<std::vector<int>>& adj, const SccResult& scc) {
  std::vector<bool> bottom(scc.count, true);
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    for (int w : adj[v])
      if (scc.component[v] != scc.component[w]) bottom[scc.component[v]] = false;
  return bottom;
}

inline std::vector<bool> reachable_from(const std::vector<std::vector<int>>& adj,
                                        int start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> todo{start};
  seen[start] = true;
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
  }
  return seen;
}

}  // namespace rlsynth
