#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isoflip/graph.hpp"
#include "isoflip/union_find.hpp"

namespace isoflip {

/// Edge of a metric graph, parametrised by x in [0, length] from u to v.
struct MetricEdge {
  Vertex u = 0;
  Vertex v = 0;
  double length = 1.0;
};

/// Two pendant edges of equal length sharing the root vertex.
struct MetricLeafPair {
  Vertex root = 0;
  int edge_plus = 0;
  int edge_minus = 0;
};

/// Where a leaf pair was glued: two parallel root-w edges of length l1 and
/// two pendants w-v of length l2, with the plus/minus roles kept.
struct GluedSite {
  Vertex root = 0;
  Vertex w = 0;
  int inner_plus = 0, inner_minus = 0;  ///< root -> w
  int outer_plus = 0, outer_minus = 0;  ///< w -> leaf
  double l1 = 0.0, l2 = 0.0;
};

/// Connected metric multigraph (parallel edges allowed, no loops).
class MetricGraph {
 public:
  MetricGraph(int vertex_count, std::vector<MetricEdge> edges, std::vector<MetricLeafPair> pairs = {},
              std::vector<GluedSite> glued = {})
      : n_(vertex_count), edges_(std::move(edges)), pairs_(std::move(pairs)), glued_(std::move(glued)) {
    if (n_ < 1) throw GraphError("metric graph needs at least one vertex");
    incident_.resize(static_cast<std::size_t>(n_));
    for (int e = 0; e < edge_count(); ++e) {
      const auto& me = edges_[e];
      const std::string tag = "edge " + std::to_string(e) + " (" + std::to_string(me.u) + "," + std::to_string(me.v) + ")";
      if (me.u < 0 || me.v < 0 || me.u >= n_ || me.v >= n_) throw GraphError("endpoint out of range in " + tag);
      if (me.u == me.v) throw GraphError("self-loop at " + tag);
      if (!std::isfinite(me.length) || me.length <= 0.0)
        throw GraphError("non-positive or non-finite length on " + tag);
      incident_[me.u].push_back(e);
      incident_[me.v].push_back(e);
    }
    UnionFind uf(n_);
    for (const auto& me : edges_) uf.unite(me.u, me.v);
    if (uf.set_count() != 1) throw GraphError("metric graph is not connected");
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const std::string why = pair_problem(pairs_[i]);
      if (!why.empty()) throw GraphError("leaf pair " + std::to_string(i) + ": " + why);
    }
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<MetricEdge>& edges() const { return edges_; }
  const MetricEdge& edge(int e) const { return edges_[e]; }
  const std::vector<MetricLeafPair>& leaf_pairs() const { return pairs_; }
  const std::vector<GluedSite>& glued_sites() const { return glued_; }
  std::span<const int> incident(Vertex v) const { return incident_[v]; }
  int degree(Vertex v) const { return static_cast<int>(incident_[v].size()); }

  double total_length() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.length;
    return s;
  }

  /// First Betti number E - V + 1 of the underlying multigraph.
  int betti() const { return edge_count() - n_ + 1; }

  /// The end of a pendant edge that is not the given root.
  Vertex other_end(int e, Vertex v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }

  std::string pair_problem(const MetricLeafPair& p) const {
    const int m = edge_count();
    if (p.root < 0 || p.root >= n_) return "root out of range";
    if (p.edge_plus < 0 || p.edge_plus >= m || p.edge_minus < 0 || p.edge_minus >= m) return "edge out of range";
    if (p.edge_plus == p.edge_minus) return "both arms are the same edge";
    for (int e : {p.edge_plus, p.edge_minus}) {
      if (edges_[e].u != p.root && edges_[e].v != p.root) return "edge " + std::to_string(e) + " misses the root";
      if (degree(other_end(e, p.root)) != 1) return "edge " + std::to_string(e) + " is not pendant";
    }
    const double a = edges_[p.edge_plus].length, b = edges_[p.edge_minus].length;
    if (std::abs(a - b) > 1e-12 * std::max(a, b)) return "arm lengths differ";
    return {};
  }

  friend bool operator==(const MetricGraph& x, const MetricGraph& y) {
    if (x.n_ != y.n_ || x.edges_.size() != y.edges_.size()) return false;
    for (std::size_t i = 0; i < x.edges_.size(); ++i)
      if (x.edges_[i].u != y.edges_[i].u || x.edges_[i].v != y.edges_[i].v || x.edges_[i].length != y.edges_[i].length)
        return false;
    return true;
  }

 private:
  int n_;
  std::vector<MetricEdge> edges_;
  std::vector<MetricLeafPair> pairs_;
  std::vector<GluedSite> glued_;
  std::vector<std::vector<int>> incident_;
};

inline MetricGraph build_metric(const DiscreteGraph& g, std::span<const double> lengths,
                                std::vector<MetricLeafPair> pairs = {}) {
  if (static_cast<int>(lengths.size()) != g.edge_count())
    throw GraphError("expected " + std::to_string(g.edge_count()) + " lengths, got " + std::to_string(lengths.size()));
  std::vector<MetricEdge> edges;
  for (int e = 0; e < g.edge_count(); ++e) edges.push_back({g.edges()[e].u, g.edges()[e].v, lengths[e]});
  return MetricGraph(g.vertex_count(), std::move(edges), std::move(pairs));
}

/// Leaf pair from the root and the two leaf vertices.
inline MetricLeafPair metric_leaf_pair(const MetricGraph& m, Vertex root, Vertex leaf_plus, Vertex leaf_minus) {
  auto find = [&](Vertex leaf) {
    for (int e : m.incident(root))
      if (m.other_end(e, root) == leaf) return e;
    throw GraphError("no edge between root " + std::to_string(root) + " and " + std::to_string(leaf));
  };
  MetricLeafPair p{root, find(leaf_plus), find(leaf_minus)};
  const std::string why = m.pair_problem(p);
  if (!why.empty()) throw GraphError("invalid leaf pair: " + why);
  return p;
}

/// Splits edge e at distance x from its u end with a new degree-2 vertex.
/// Leaf pairs that used edge e no longer qualify and are dropped.
inline MetricGraph add_dummy_vertex(const MetricGraph& m, int e, double x) {
  if (e < 0 || e >= m.edge_count()) throw GraphError("add_dummy_vertex: edge out of range");
  const MetricEdge old = m.edge(e);
  if (!(x > 0.0 && x < old.length)) throw GraphError("add_dummy_vertex: split point must lie strictly inside the edge");
  const Vertex w = m.vertex_count();
  auto edges = m.edges();
  edges[e] = {old.u, w, x};
  edges.push_back({w, old.v, old.length - x});
  std::vector<MetricLeafPair> pairs;
  for (const auto& p : m.leaf_pairs())
    if (p.edge_plus != e && p.edge_minus != e) pairs.push_back(p);
  std::vector<GluedSite> sites;
  for (const auto& s : m.glued_sites())
    if (s.inner_plus != e && s.inner_minus != e && s.outer_plus != e && s.outer_minus != e) sites.push_back(s);
  return MetricGraph(w + 1, std::move(edges), std::move(pairs), std::move(sites));
}

/// Glues the two arms of leaf pair `index` at distance l1 from the root. The
/// arm edges become the parallel root-w edges and two pendants are appended.
inline MetricGraph glue_leaf_pair(const MetricGraph& m, int index, double l1) {
  if (index < 0 || index >= static_cast<int>(m.leaf_pairs().size()))
    throw GraphError("glue_leaf_pair: no leaf pair " + std::to_string(index));
  const MetricLeafPair p = m.leaf_pairs()[index];
  const double l = m.edge(p.edge_plus).length;
  if (!(l1 > 0.0 && l1 < l)) throw GraphError("glue_leaf_pair: l1 must lie strictly between 0 and the leaf length");
  const Vertex w = m.vertex_count();
  const Vertex vp = m.other_end(p.edge_plus, p.root), vm = m.other_end(p.edge_minus, p.root);
  auto edges = m.edges();
  edges[p.edge_plus] = {p.root, w, l1};
  edges[p.edge_minus] = {p.root, w, l1};
  const int outer_plus = static_cast<int>(edges.size());
  edges.push_back({w, vp, l - l1});
  edges.push_back({w, vm, l - l1});
  std::vector<MetricLeafPair> pairs;
  for (int i = 0; i < static_cast<int>(m.leaf_pairs().size()); ++i)
    if (i != index) pairs.push_back(m.leaf_pairs()[i]);
  auto sites = m.glued_sites();
  sites.push_back({p.root, w, p.edge_plus, p.edge_minus, outer_plus, outer_plus + 1, l1, l - l1});
  return MetricGraph(w + 1, std::move(edges), std::move(pairs), std::move(sites));
}

/// Bond permutation of the arm exchange. Bond 2e runs u->v along edge e, bond
/// 2e+1 runs v->u.
inline std::vector<int> exchange_bond_permutation(const MetricGraph& m, int plus_a, int minus_a,
                                                  std::optional<std::pair<int, int>> second = std::nullopt) {
  std::vector<int> perm(static_cast<std::size_t>(2 * m.edge_count()));
  for (std::size_t b = 0; b < perm.size(); ++b) perm[b] = static_cast<int>(b);
  auto swap_edges = [&](int a, int b) {
    // Both edges share orientation conventions set by the constructors above.
    const bool same = m.edge(a).u == m.edge(b).u || m.edge(a).v == m.edge(b).v;
    perm[2 * a] = same ? 2 * b : 2 * b + 1;
    perm[2 * a + 1] = same ? 2 * b + 1 : 2 * b;
    perm[2 * b] = same ? 2 * a : 2 * a + 1;
    perm[2 * b + 1] = same ? 2 * a + 1 : 2 * a;
  };
  swap_edges(plus_a, minus_a);
  if (second) swap_edges(second->first, second->second);
  return perm;
}

inline std::vector<int> exchange_bond_permutation(const MetricGraph& m, const MetricLeafPair& p) {
  return exchange_bond_permutation(m, p.edge_plus, p.edge_minus);
}

inline std::vector<int> exchange_bond_permutation(const MetricGraph& m, const GluedSite& s) {
  return exchange_bond_permutation(m, s.inner_plus, s.inner_minus, std::pair{s.outer_plus, s.outer_minus});
}

/// Vertex permutation matching the bond permutation (identity off the arms).
inline std::vector<Vertex> exchange_vertex_permutation(const MetricGraph& m, std::span<const int> bond_perm) {
  std::vector<Vertex> perm(static_cast<std::size_t>(m.vertex_count()));
  for (int v = 0; v < m.vertex_count(); ++v) perm[v] = v;
  for (int e = 0; e < m.edge_count(); ++e) {
    const int b = bond_perm[2 * e];
    const int f = b / 2;
    const bool flipped = b % 2 == 1;
    perm[m.edge(e).u] = flipped ? m.edge(f).v : m.edge(f).u;
    perm[m.edge(e).v] = flipped ? m.edge(f).u : m.edge(f).v;
  }
  return perm;
}

}  // namespace isoflip
