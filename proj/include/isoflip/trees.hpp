#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "isoflip/graph.hpp"

namespace isoflip {

/// Every rooted tree on n vertices as a level sequence (root at level 1),
/// generated in Beyer-Hedetniemi successor order.
inline std::vector<std::vector<int>> rooted_level_sequences(int n) {
  std::vector<std::vector<int>> out;
  if (n < 1) return out;
  std::vector<int> level(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) level[i] = i + 1;
  while (true) {
    out.push_back(level);
    int p = -1;
    for (int i = n - 1; i >= 0; --i)
      if (level[i] > 2) {
        p = i;
        break;
      }
    if (p < 0) break;
    int q = p - 1;
    while (level[q] != level[p] - 1) --q;
    const int shift = p - q;
    for (int i = p; i < n; ++i) level[i] = level[i - shift];
  }
  return out;
}

/// Parent array from a level sequence; the root gets -1.
inline std::vector<int> parents_from_levels(const std::vector<int>& level) {
  std::vector<int> parent(level.size(), -1);
  for (std::size_t i = 1; i < level.size(); ++i) {
    std::size_t j = i;
    while (level[--j] != level[i] - 1) {
    }
    parent[i] = static_cast<int>(j);
  }
  return parent;
}

namespace detail {

inline std::string rooted_code(const DiscreteGraph& t, Vertex v, Vertex from) {
  std::vector<std::string> kids;
  for (Vertex w : t.neighbors(v))
    if (w != from) kids.push_back(rooted_code(t, w, v));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  for (const auto& k : kids) s += k;
  return s + ")";
}

inline std::vector<Vertex> tree_centers(const DiscreteGraph& t) {
  const int n = t.vertex_count();
  std::vector<int> deg(static_cast<std::size_t>(n));
  std::vector<Vertex> layer;
  for (Vertex v = 0; v < n; ++v) {
    deg[v] = t.degree(v);
    if (deg[v] <= 1) layer.push_back(v);
  }
  int remaining = n;
  while (remaining > 2) {
    remaining -= static_cast<int>(layer.size());
    std::vector<Vertex> next;
    for (Vertex v : layer)
      for (Vertex w : t.neighbors(v))
        if (--deg[w] == 1) next.push_back(w);
    layer = std::move(next);
  }
  std::sort(layer.begin(), layer.end());
  return layer;
}

inline void build_from_code(const std::string& code, std::size_t& pos, int parent, std::vector<int>& parents) {
  const int me = static_cast<int>(parents.size());
  parents.push_back(parent);
  ++pos;  // '('
  while (code[pos] == '(') build_from_code(code, pos, me, parents);
  ++pos;  // ')'
}

}  // namespace detail

/// Isomorphism-invariant code of a free tree (AHU encoding rooted at a centre).
inline std::string tree_canonical_code(const DiscreteGraph& t) {
  if (!is_tree(t)) throw GraphError("tree_canonical_code: graph is not a tree");
  std::string best;
  for (Vertex c : detail::tree_centers(t)) {
    auto code = detail::rooted_code(t, c, -1);
    if (best.empty() || code < best) best = std::move(code);
  }
  return best;
}

/// Tree with vertices numbered in preorder of its canonical code; vertex 0 is a centre.
inline DiscreteGraph tree_from_code(const std::string& code) {
  std::vector<int> parents;
  std::size_t pos = 0;
  detail::build_from_code(code, pos, -1, parents);
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < parents.size(); ++v) edges.push_back(make_edge(parents[v], static_cast<int>(v)));
  return DiscreteGraph(static_cast<int>(parents.size()), edges);
}

/// All non-isomorphic free trees on n vertices, in canonical-code order.
inline std::vector<DiscreteGraph> nonisomorphic_trees(int n) {
  std::set<std::string> codes;
  for (const auto& level : rooted_level_sequences(n)) {
    const auto parent = parents_from_levels(level);
    std::vector<Edge> edges;
    for (int v = 1; v < n; ++v) edges.push_back(make_edge(parent[v], v));
    codes.insert(tree_canonical_code(DiscreteGraph(n, edges)));
  }
  std::vector<DiscreteGraph> out;
  out.reserve(codes.size());
  for (const auto& c : codes) out.push_back(tree_from_code(c));
  return out;
}

}  // namespace isoflip
