#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isoflip/dense.hpp"
#include "isoflip/union_find.hpp"

namespace isoflip {

using Vertex = int;

/// Undirected edge stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(Vertex a, Vertex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline std::string to_string(const Edge& e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Simple undirected graph on vertices 0..V-1. Immutable once built; the edge
/// list is kept sorted in (min,max) order.
class DiscreteGraph {
 public:
  DiscreteGraph(int vertex_count, std::span<const Edge> edges) : n_(vertex_count) {
    if (vertex_count < 1) throw GraphError("graph needs at least one vertex");
    adj_.resize(static_cast<std::size_t>(n_));
    edges_.reserve(edges.size());
    for (const Edge& raw : edges) {
      if (raw.u == raw.v) throw GraphError("self-loop at edge " + to_string(raw));
      if (raw.u < 0 || raw.v < 0 || raw.u >= n_ || raw.v >= n_)
        throw GraphError("endpoint out of range in edge " + to_string(raw));
      edges_.push_back(make_edge(raw.u, raw.v));
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i] == edges_[i - 1]) throw GraphError("duplicate edge " + to_string(edges_[i]));
    for (const Edge& e : edges_) {
      adj_[e.u].push_back(e.v);
      adj_[e.v].push_back(e.u);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
  int degree(Vertex v) const { return static_cast<int>(adj_[v].size()); }

  bool has_edge(Vertex a, Vertex b) const {
    if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) return false;
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
  }

  friend bool operator==(const DiscreteGraph& x, const DiscreteGraph& y) {
    return x.n_ == y.n_ && x.edges_ == y.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adj_;
};

inline DiscreteGraph build_graph(int vertex_count, std::span<const std::pair<int, int>> edges) {
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (auto [a, b] : edges) list.push_back(Edge{a, b});
  return DiscreteGraph(vertex_count, list);
}

inline DiscreteGraph build_graph(int vertex_count, std::initializer_list<std::pair<int, int>> edges) {
  return build_graph(vertex_count, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
}

/// L = D - A.
inline Matrix laplacian(const DiscreteGraph& g) {
  Matrix l(g.vertex_count());
  for (const Edge& e : g.edges()) {
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
  }
  return l;
}

/// Vertex partition; representative of each block is its smallest vertex.
struct Components {
  std::vector<Vertex> representative;
  int count = 0;
};

/// Components of G after deleting `removed` (edges absent from G are ignored).
inline Components connected_components(const DiscreteGraph& g, std::span<const Edge> removed = {}) {
  std::set<Edge> skip;
  for (const Edge& e : removed) skip.insert(make_edge(e.u, e.v));
  UnionFind uf(g.vertex_count());
  for (const Edge& e : g.edges())
    if (!skip.contains(e)) uf.unite(e.u, e.v);
  Components out;
  out.representative.resize(static_cast<std::size_t>(g.vertex_count()));
  for (Vertex v = 0; v < g.vertex_count(); ++v) out.representative[v] = uf.find(v);
  out.count = uf.set_count();
  return out;
}

inline bool is_connected(const DiscreteGraph& g) { return connected_components(g).count == 1; }

inline bool is_tree(const DiscreteGraph& g) {
  return g.edge_count() == g.vertex_count() - 1 && is_connected(g);
}

/// First Betti number E - V + 1 of a connected graph.
inline int betti(const DiscreteGraph& g) {
  if (!is_connected(g)) throw GraphError("betti: graph is disconnected");
  return g.edge_count() - g.vertex_count() + 1;
}

// ---------------------------------------------------------------------------
// Leaf pairs
//
// A k-leaf-pair is two pendant paths of k vertices sharing a root. Arms are
// stored root-outward: arm_plus[i-1] is the vertex at distance i from the
// root, so the signed labels i and -i of the usual picture map to
// arm_plus[i-1] and arm_minus[i-1], and the root is label 0.
// ---------------------------------------------------------------------------

struct LeafPair {
  Vertex root = 0;
  std::vector<Vertex> arm_plus;
  std::vector<Vertex> arm_minus;

  int k() const { return static_cast<int>(arm_plus.size()); }

  Vertex plus(int j) const { return arm_plus.at(static_cast<std::size_t>(j - 1)); }
  Vertex minus(int j) const { return arm_minus.at(static_cast<std::size_t>(j - 1)); }

  friend bool operator==(const LeafPair&, const LeafPair&) = default;
};

/// Empty string when `pair` is a valid k-leaf-pair of g, otherwise the reason.
inline std::string leaf_pair_problem(const DiscreteGraph& g, const LeafPair& pair) {
  const int n = g.vertex_count();
  const int k = pair.k();
  if (k < 1) return "arms must be non-empty";
  if (static_cast<int>(pair.arm_minus.size()) != k) return "arms have different lengths";
  if (pair.root < 0 || pair.root >= n) return "root out of range";
  std::set<Vertex> seen{pair.root};
  for (const auto* arm : {&pair.arm_plus, &pair.arm_minus}) {
    Vertex prev = pair.root;
    for (int i = 0; i < k; ++i) {
      const Vertex v = (*arm)[i];
      if (v < 0 || v >= n) return "arm vertex out of range";
      if (!seen.insert(v).second) return "arms are not disjoint";
      if (!g.has_edge(prev, v)) return "arm is not a path from the root";
      const int want = (i == k - 1) ? 1 : 2;
      if (g.degree(v) != want)
        return "arm vertex " + std::to_string(v) + " has degree " + std::to_string(g.degree(v)) + ", expected " +
               std::to_string(want);
      prev = v;
    }
  }
  return {};
}

inline void validate_leaf_pair(const DiscreteGraph& g, const LeafPair& pair) {
  if (auto why = leaf_pair_problem(g, pair); !why.empty()) throw GraphError("invalid leaf pair: " + why);
}

/// Permutation exchanging the two arms and fixing every other vertex.
inline std::vector<Vertex> exchange_permutation(int vertex_count, const LeafPair& pair) {
  std::vector<Vertex> perm(static_cast<std::size_t>(vertex_count));
  for (Vertex v = 0; v < vertex_count; ++v) perm[v] = v;
  for (int i = 0; i < pair.k(); ++i) {
    perm[pair.arm_plus[i]] = pair.arm_minus[i];
    perm[pair.arm_minus[i]] = pair.arm_plus[i];
  }
  return perm;
}

inline bool is_automorphism(const DiscreteGraph& g, std::span<const Vertex> perm) {
  for (const Edge& e : g.edges())
    if (!g.has_edge(perm[e.u], perm[e.v])) return false;
  return true;
}

struct LeafPairAttachment {
  DiscreteGraph graph;
  LeafPair pair;
};

/// Appends 2k vertices forming two k-leaves at `root`. The plus arm takes ids
/// V..V+k-1 and the minus arm V+k..V+2k-1.
inline LeafPairAttachment attach_k_leaf_pair(const DiscreteGraph& g, Vertex root, int k) {
  if (k < 1) throw GraphError("attach_k_leaf_pair: k must be at least 1");
  if (root < 0 || root >= g.vertex_count()) throw GraphError("attach_k_leaf_pair: root out of range");
  const int n = g.vertex_count();
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  LeafPair pair{root, {}, {}};
  for (int side = 0; side < 2; ++side) {
    auto& arm = side == 0 ? pair.arm_plus : pair.arm_minus;
    Vertex prev = root;
    for (int i = 0; i < k; ++i) {
      const Vertex v = n + side * k + i;
      edges.push_back(make_edge(prev, v));
      arm.push_back(v);
      prev = v;
    }
  }
  return {DiscreteGraph(n + 2 * k, edges), std::move(pair)};
}

/// Inserts the edge joining the j-th vertex of each arm (1 <= j <= k).
inline DiscreteGraph insert_pair_edge(const DiscreteGraph& g, const LeafPair& pair, int j) {
  validate_leaf_pair(g, pair);
  if (j < 1 || j > pair.k())
    throw GraphError("insert_pair_edge: j=" + std::to_string(j) + " outside [1," + std::to_string(pair.k()) + "]");
  const Vertex a = pair.plus(j), b = pair.minus(j);
  if (g.has_edge(a, b)) throw GraphError("insert_pair_edge: edge already present");
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  edges.push_back(make_edge(a, b));
  return DiscreteGraph(g.vertex_count(), edges);
}

/// All k-leaf-pairs of g: every unordered choice of two k-leaves sharing a root.
inline std::vector<LeafPair> find_leaf_pairs(const DiscreteGraph& g, int k) {
  std::vector<LeafPair> out;
  if (k < 1) return out;
  for (Vertex root = 0; root < g.vertex_count(); ++root) {
    std::vector<std::vector<Vertex>> arms;
    for (Vertex start : g.neighbors(root)) {
      std::vector<Vertex> arm{start};
      Vertex prev = root, cur = start;
      bool ok = true;
      for (int i = 1; i < k && ok; ++i) {
        if (g.degree(cur) != 2) {
          ok = false;
          break;
        }
        const Vertex next = g.neighbors(cur)[0] == prev ? g.neighbors(cur)[1] : g.neighbors(cur)[0];
        prev = cur;
        cur = next;
        arm.push_back(cur);
      }
      if (ok && g.degree(cur) == 1 && cur != root) arms.push_back(std::move(arm));
    }
    for (std::size_t a = 0; a < arms.size(); ++a)
      for (std::size_t b = a + 1; b < arms.size(); ++b) {
        LeafPair p{root, arms[a], arms[b]};
        if (leaf_pair_problem(g, p).empty()) out.push_back(std::move(p));
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism
// ---------------------------------------------------------------------------

inline constexpr int kIsomorphismVertexCap = 12;

namespace detail {

/// Colour refinement (1-WL); returns stable colours, equal across graphs for
/// equal neighbourhood multisets because colours are canonical signatures.
inline std::vector<int> refine_colours(const DiscreteGraph& g, std::vector<std::vector<int>>& palette) {
  const int n = g.vertex_count();
  std::vector<int> colour(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) colour[v] = g.degree(v);
  for (int round = 0; round < n; ++round) {
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      sig[v].push_back(colour[v]);
      std::vector<int> nb;
      for (Vertex w : g.neighbors(v)) nb.push_back(colour[w]);
      std::sort(nb.begin(), nb.end());
      sig[v].insert(sig[v].end(), nb.begin(), nb.end());
    }
    std::vector<int> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      auto it = std::find(palette.begin(), palette.end(), sig[v]);
      if (it == palette.end()) {
        palette.push_back(sig[v]);
        it = palette.end() - 1;
      }
      next[v] = static_cast<int>(it - palette.begin());
    }
    if (next == colour) break;
    colour = std::move(next);
  }
  return colour;
}

}  // namespace detail

/// Exact isomorphism test by backtracking over colour-compatible bijections.
inline bool is_isomorphic(const DiscreteGraph& g1, const DiscreteGraph& g2, int vertex_cap = kIsomorphismVertexCap) {
  const int n = g1.vertex_count();
  if (std::max(n, g2.vertex_count()) > vertex_cap)
    throw GraphError("is_isomorphic: vertex count exceeds cap of " + std::to_string(vertex_cap));
  if (n != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return false;

  // Refine both graphs jointly on the disjoint union so colours are comparable.
  std::vector<Edge> joint(g1.edges().begin(), g1.edges().end());
  for (const Edge& e : g2.edges()) joint.push_back(Edge{e.u + n, e.v + n});
  std::vector<std::vector<int>> palette;
  const auto colour = detail::refine_colours(DiscreteGraph(2 * n, joint), palette);
  std::vector<int> c1(colour.begin(), colour.begin() + n), c2(colour.begin() + n, colour.end());
  {
    auto s1 = c1, s2 = c2;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    if (s1 != s2) return false;
  }

  std::vector<Vertex> order(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) order[v] = v;
  // Rare colours first: fewer branches near the root of the search.
  std::vector<int> freq(palette.size() + 1, 0);
  for (int c : c1) ++freq[c];
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return freq[c1[a]] < freq[c1[b]]; });

  std::vector<Vertex> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);

  auto extend = [&](auto&& self, int depth) -> bool {
    if (depth == n) return true;
    const Vertex v = order[depth];
    for (Vertex w = 0; w < n; ++w) {
      if (used[w] || c2[w] != c1[v]) continue;
      bool ok = true;
      for (int d = 0; d < depth && ok; ++d) {
        const Vertex u = order[d];
        ok = g1.has_edge(u, v) == g2.has_edge(map[u], w);
      }
      if (!ok) continue;
      map[v] = w;
      used[w] = true;
      if (self(self, depth + 1)) return true;
      used[w] = false;
      map[v] = -1;
    }
    return false;
  };
  return extend(extend, 0);
}

}  // namespace isoflip
