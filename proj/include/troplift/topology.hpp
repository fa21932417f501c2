#pragma once

// Enumerations of cycles, blocks and small connected pieces of a subgraph.

#include "troplift/graph.hpp"

#include <functional>
#include <set>
#include <vector>

namespace troplift {

// Subgraph spanned by a set of edges (vertices are their endpoints).
inline Subgraph edge_spanned(const AbstractGraph& g, const std::vector<std::size_t>& edges) {
  Subgraph s;
  s.edges = edges;
  for (auto e : edges) {
    s.vertices.push_back(g.edges[e].tail);
    s.vertices.push_back(g.edges[e].head);
  }
  s.normalize();
  return s;
}

// All simple cycles of the bounded part of s (loops and digons included), each
// reported once, ordered by their sorted edge lists. Stops after `cap` cycles.
inline std::vector<Subgraph> simple_cycles(const AbstractGraph& g, const Subgraph& s, std::size_t cap = 100000) {
  std::set<std::vector<std::size_t>> found;
  std::vector<std::vector<std::size_t>> incident(g.vertices.size());
  for (auto e : s.edges) {
    incident[g.edges[e].tail].push_back(e);
    if (!g.edges[e].is_loop()) incident[g.edges[e].head].push_back(e);
  }
  for (auto e : s.edges)
    if (g.edges[e].is_loop()) found.insert({e});
  std::vector<bool> on_path(g.vertices.size(), false);
  std::vector<std::size_t> path_edges;
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t start, std::size_t x) {
    if (found.size() >= cap) return;
    for (auto e : incident[x]) {
      if (g.edges[e].is_loop()) continue;
      if (std::find(path_edges.begin(), path_edges.end(), e) != path_edges.end()) continue;
      std::size_t y = g.edges[e].other(x);
      if (y == start && !path_edges.empty()) {
        auto cyc = path_edges;
        cyc.push_back(e);
        std::sort(cyc.begin(), cyc.end());
        found.insert(cyc);
        continue;
      }
      if (y <= start || on_path[y]) continue;
      on_path[y] = true;
      path_edges.push_back(e);
      dfs(start, y);
      path_edges.pop_back();
      on_path[y] = false;
    }
  };
  for (auto v : s.vertices) {
    on_path[v] = true;
    dfs(v, v);
    on_path[v] = false;
  }
  std::vector<Subgraph> out;
  for (const auto& c : found) out.push_back(edge_spanned(g, c));
  return out;
}

// Fundamental cycles with respect to a BFS spanning forest of the whole graph.
inline std::vector<Subgraph> cycle_basis(const AbstractGraph& g) {
  std::size_t n = g.vertices.size();
  std::vector<std::size_t> parent_edge(n, npos), depth(n, 0);
  std::vector<bool> seen(n, false), tree_edge(g.edges.size(), false);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::vector<std::size_t> queue = {root};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::size_t x = queue[qi];
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const Edge& ed = g.edges[e];
        if (ed.tail != x && ed.head != x) continue;
        std::size_t y = ed.other(x);
        if (seen[y]) continue;
        seen[y] = true;
        parent_edge[y] = e;
        depth[y] = depth[x] + 1;
        tree_edge[e] = true;
        queue.push_back(y);
      }
    }
  }
  std::vector<Subgraph> out;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (tree_edge[e]) continue;
    std::vector<std::size_t> edges = {e};
    std::size_t a = g.edges[e].tail, b = g.edges[e].head;
    while (a != b) {
      if (depth[a] >= depth[b]) {
        edges.push_back(parent_edge[a]);
        a = g.edges[parent_edge[a]].other(a);
      } else {
        edges.push_back(parent_edge[b]);
        b = g.edges[parent_edge[b]].other(b);
      }
    }
    std::sort(edges.begin(), edges.end());
    out.push_back(edge_spanned(g, edges));
  }
  return out;
}

// Blocks of s containing at least one cycle (bridges and isolated vertices dropped).
inline std::vector<Subgraph> cyclic_blocks(const AbstractGraph& g, const Subgraph& s) {
  std::size_t n = g.vertices.size();
  std::vector<std::size_t> disc(n, 0), low(n, 0);
  std::size_t timer = 0;
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::vector<std::size_t>> incident(n);
  for (auto e : s.edges) {
    if (g.edges[e].is_loop()) {
      blocks.push_back({e});
      continue;
    }
    incident[g.edges[e].tail].push_back(e);
    incident[g.edges[e].head].push_back(e);
  }
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t x, std::size_t via) {
    disc[x] = low[x] = ++timer;
    for (auto e : incident[x]) {
      if (e == via) continue;
      std::size_t y = g.edges[e].other(x);
      if (disc[y] == 0) {
        stack.push_back(e);
        visit(y, e);
        low[x] = std::min(low[x], low[y]);
        if (low[y] >= disc[x]) {
          std::vector<std::size_t> block;
          for (;;) {
            std::size_t top = stack.back();
            stack.pop_back();
            block.push_back(top);
            if (top == e) break;
          }
          blocks.push_back(block);
        }
      } else if (disc[y] < disc[x]) {
        stack.push_back(e);
        low[x] = std::min(low[x], disc[y]);
      }
    }
  };
  for (auto v : s.vertices)
    if (disc[v] == 0) visit(v, npos);
  std::vector<Subgraph> out;
  for (auto& b : blocks) {
    std::sort(b.begin(), b.end());
    Subgraph sub = edge_spanned(g, b);
    if (first_betti(g, sub) > 0) out.push_back(sub);
  }
  std::sort(out.begin(), out.end(), [](const Subgraph& a, const Subgraph& b) { return a.edges < b.edges; });
  return out;
}

// Connected subgraphs of s with at most `budget` edges, single vertices included.
inline std::vector<Subgraph> small_connected_subgraphs(const AbstractGraph& g, const Subgraph& s, std::size_t budget) {
  std::vector<Subgraph> out;
  for (auto v : s.vertices) out.push_back(Subgraph{{v}, {}, {}});
  std::set<std::vector<std::size_t>> level;
  for (auto e : s.edges) level.insert({e});
  for (std::size_t size = 1; size <= budget && !level.empty(); ++size) {
    std::set<std::vector<std::size_t>> next;
    for (const auto& set : level) {
      out.push_back(edge_spanned(g, set));
      if (size == budget) continue;
      Subgraph cur = edge_spanned(g, set);
      for (auto e : s.edges) {
        if (std::binary_search(set.begin(), set.end(), e)) continue;
        if (!cur.has_vertex(g.edges[e].tail) && !cur.has_vertex(g.edges[e].head)) continue;
        auto bigger = set;
        bigger.push_back(e);
        std::sort(bigger.begin(), bigger.end());
        next.insert(bigger);
      }
    }
    level = std::move(next);
  }
  return out;
}

}  // namespace troplift
