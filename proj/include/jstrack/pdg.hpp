#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "jstrack/canon.hpp"

namespace jstrack {

// Program dependency graph over canonical statements. An edge a -> b means a
// depends on b: either a reads a value whose most recent prior write is b
// (data), or b is the nearest enclosing guard of a (control).
struct DependencyGraph {
  std::size_t node_count = 0;
  std::vector<std::vector<int>> deps;  // deps[a] = sorted dependency targets

  const std::vector<int>& targets(int node) const {
    return deps[static_cast<std::size_t>(node)];
  }
};

struct BackwardPathSet {
  int anchor = 0;
  std::vector<std::vector<int>> paths;
};

inline DependencyGraph build_pdg(const CanonicalProgram& canon) {
  const auto& stmts = canon.statements;
  DependencyGraph g;
  g.node_count = stmts.size();
  g.deps.assign(stmts.size(), {});

  auto add_edge = [&](int from, int to) {
    auto& v = g.deps[static_cast<std::size_t>(from)];
    if (std::find(v.begin(), v.end(), to) == v.end()) v.push_back(to);
  };

  // Reaching definitions in straight-line order. Definitions do not cross
  // begin/end boundaries: each function unit is its own scope.
  std::unordered_map<std::string, int> last_write;
  for (int i = 0; i < static_cast<int>(stmts.size()); ++i) {
    const CanonicalStmt& s = stmts[static_cast<std::size_t>(i)];
    if (s.kind == StmtKind::Begin) last_write.clear();
    for (const auto& name : s.reads) {
      auto it = last_write.find(name);
      if (it != last_write.end()) add_edge(i, it->second);
    }
    if (s.guard >= 0) add_edge(i, s.guard);
    for (const auto& name : s.writes) last_write[name] = i;
  }

  // A while guard also depends on the in-loop recompute of what it reads:
  // the only permitted back-references.
  for (int i = 0; i < static_cast<int>(stmts.size()); ++i) {
    const CanonicalStmt& s = stmts[static_cast<std::size_t>(i)];
    if (s.kind != StmtKind::GuardWhile) continue;
    for (int j = i + 1; j < static_cast<int>(stmts.size()); ++j) {
      const CanonicalStmt& t = stmts[static_cast<std::size_t>(j)];
      if (t.kind == StmtKind::Begin || t.kind == StmtKind::End) break;
      // inside the loop iff the guard chain passes through i
      bool inside = false;
      for (int gi = t.guard; gi >= 0;
           gi = stmts[static_cast<std::size_t>(gi)].guard) {
        if (gi == i) {
          inside = true;
          break;
        }
      }
      if (!inside) continue;
      for (const auto& w : t.writes) {
        if (std::find(s.reads.begin(), s.reads.end(), w) != s.reads.end())
          add_edge(i, j);
      }
    }
  }

  for (auto& v : g.deps) std::sort(v.begin(), v.end());
  return g;
}

// All simple backward paths of up to n nodes starting at `anchor`. Shorter
// paths are kept only when they cannot be extended, so every anchor yields
// at least [anchor]. Deterministic DFS order; the path count is capped to
// keep adversarial graphs from exploding.
inline BackwardPathSet backward_paths(const DependencyGraph& g, int anchor, int n,
                                      std::size_t max_paths = 100000) {
  BackwardPathSet out;
  out.anchor = anchor;
  std::vector<int> path{anchor};
  std::vector<char> on_path(g.node_count, 0);
  on_path[static_cast<std::size_t>(anchor)] = 1;

  auto dfs = [&](auto&& self) -> void {
    if (out.paths.size() >= max_paths) return;
    if (static_cast<int>(path.size()) == n) {
      out.paths.push_back(path);
      return;
    }
    bool extended = false;
    for (int next : g.targets(path.back())) {
      if (on_path[static_cast<std::size_t>(next)]) continue;
      extended = true;
      path.push_back(next);
      on_path[static_cast<std::size_t>(next)] = 1;
      self(self);
      on_path[static_cast<std::size_t>(next)] = 0;
      path.pop_back();
    }
    if (!extended) out.paths.push_back(path);  // maximal shorter path
  };
  dfs(dfs);
  return out;
}

// Statement texts along the path joined with a left arrow; used as the term
// identity of one backward path.
inline std::string serialize_path(const CanonicalProgram& canon,
                                  const std::vector<int>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += "⇐";
    out += canon.statements[static_cast<std::size_t>(path[i])].text;
  }
  return out;
}

// Graphviz rendering for inspection.
inline std::string to_dot(const CanonicalProgram& canon, const DependencyGraph& g) {
  std::string out = "digraph pdg {\n";
  for (std::size_t i = 0; i < g.node_count; ++i) {
    std::string label;
    for (char c : canon.statements[i].text) {
      if (c == '"' || c == '\\') label += '\\';
      label += c;
    }
    out += "  n" + std::to_string(i) + " [label=\"" + label + "\"];\n";
  }
  for (std::size_t i = 0; i < g.node_count; ++i)
    for (int t : g.deps[i])
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(t) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace jstrack
