#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "isoflip/graph.hpp"

// Small graph factories shared by the test suites.
namespace testgraphs {

using isoflip::DiscreteGraph;
using isoflip::Edge;

inline DiscreteGraph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return DiscreteGraph(n, e);
}

/// K_{1,leaves}, centre 0.
inline DiscreteGraph star(int leaves) {
  std::vector<Edge> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return DiscreteGraph(leaves + 1, e);
}

/// Triangle 0-1-2 with pendant 3 on vertex 0 (the star with leaves 1,2 joined).
inline DiscreteGraph paw() { return DiscreteGraph(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 2}}); }

inline DiscreteGraph random_graph(std::mt19937& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) e.push_back({i, j});
  return DiscreteGraph(n, e);
}

/// Random labelled spanning tree plus independent extra edges with probability p.
inline DiscreteGraph random_connected(std::mt19937& rng, int n, double p) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> e;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    e.push_back(isoflip::make_edge(order[i], order[pick(rng)]));
  }
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) && std::find(e.begin(), e.end(), Edge{i, j}) == e.end()) e.push_back({i, j});
  return DiscreteGraph(n, e);
}

inline DiscreteGraph random_tree(std::mt19937& rng, int n) { return random_connected(rng, n, 0.0); }

}  // namespace testgraphs
