#include <gtest/gtest.h>

#include "isoflip/metric.hpp"

using namespace isoflip;

namespace {

MetricGraph star3(double a, double b, double c) {
  return MetricGraph(4, {{0, 1, a}, {0, 2, b}, {0, 3, c}}, {{0, 0, 1}});
}

}  // namespace

TEST(MetricGraph, SingleEdgeIsAnInterval) {
  MetricGraph m(2, {{0, 1, 1.0}});
  EXPECT_EQ(m.edge_count(), 1);
  EXPECT_EQ(m.betti(), 0);
  EXPECT_DOUBLE_EQ(m.total_length(), 1.0);
}

TEST(MetricGraph, RejectsBadEdges) {
  EXPECT_THROW(MetricGraph(2, {{0, 1, 0.0}}), GraphError);
  EXPECT_THROW(MetricGraph(2, {{0, 1, -1.0}}), GraphError);
  EXPECT_THROW(MetricGraph(2, {{0, 1, std::nan("")}}), GraphError);
  EXPECT_THROW(MetricGraph(2, {{0, 0, 1.0}}), GraphError);
  EXPECT_THROW(MetricGraph(2, {{0, 2, 1.0}}), GraphError);
  EXPECT_THROW(MetricGraph(3, {{0, 1, 1.0}}), GraphError);
}

TEST(MetricGraph, ParallelEdgesRaiseBetti) {
  MetricGraph m(2, {{0, 1, 1.0}, {0, 1, 2.0}});
  EXPECT_EQ(m.betti(), 1);
  EXPECT_EQ(m.degree(0), 2);
}

TEST(MetricGraph, LeafPairValidation) {
  EXPECT_NO_THROW(star3(1, 1, 1));
  EXPECT_THROW(star3(1, 0.9, 1), GraphError);
  // Edge 1 of P4 ends at a degree-2 vertex, so it is not pendant at vertex 1.
  MetricGraph path(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  EXPECT_FALSE(path.pair_problem({1, 0, 1}).empty());
  EXPECT_FALSE(path.pair_problem({1, 0, 0}).empty());
  const auto m = star3(1, 1, 0.5);
  const auto p = metric_leaf_pair(m, 0, 2, 1);
  EXPECT_EQ(p.edge_plus, 1);
  EXPECT_EQ(p.edge_minus, 0);
  EXPECT_THROW(metric_leaf_pair(m, 1, 0, 2), GraphError);
}

TEST(MetricGraph, BuildFromDiscrete) {
  DiscreteGraph g(3, std::vector<Edge>{{0, 1}, {1, 2}});
  const std::vector<double> l{0.5, 2.0};
  const auto m = build_metric(g, l);
  EXPECT_DOUBLE_EQ(m.total_length(), 2.5);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(build_metric(g, bad), GraphError);
}

TEST(DummyVertex, SplitsAnInterval) {
  MetricGraph m(2, {{0, 1, 1.0}});
  const auto s = add_dummy_vertex(m, 0, 0.5);
  EXPECT_EQ(s.vertex_count(), 3);
  ASSERT_EQ(s.edge_count(), 2);
  EXPECT_DOUBLE_EQ(s.edge(0).length, 0.5);
  EXPECT_DOUBLE_EQ(s.edge(1).length, 0.5);
  EXPECT_EQ(s.degree(2), 2);
  EXPECT_THROW(add_dummy_vertex(m, 0, 0.0), GraphError);
  EXPECT_THROW(add_dummy_vertex(m, 0, 1.0), GraphError);
  EXPECT_THROW(add_dummy_vertex(m, 1, 0.5), GraphError);
}

TEST(DummyVertex, ConservesLengthAndDropsAffectedPairs) {
  const auto m = star3(1, 1, 0.7);
  for (double x : {0.1, 0.35, 0.69}) {
    const auto s = add_dummy_vertex(m, 2, x);
    EXPECT_NEAR(s.total_length(), m.total_length(), 1e-15);
    EXPECT_EQ(s.leaf_pairs().size(), 1u);
  }
  EXPECT_TRUE(add_dummy_vertex(m, 0, 0.5).leaf_pairs().empty());
}

TEST(Glue, BuildsParallelEdgesAndPendants) {
  const auto m = star3(1, 1, 1);
  const auto g = glue_leaf_pair(m, 0, 0.4142);
  EXPECT_EQ(g.vertex_count(), 5);
  ASSERT_EQ(g.edge_count(), 5);
  EXPECT_EQ(g.betti(), 1);
  EXPECT_NEAR(g.total_length(), m.total_length(), 1e-15);
  EXPECT_TRUE(g.leaf_pairs().empty());
  ASSERT_EQ(g.glued_sites().size(), 1u);
  const auto& s = g.glued_sites()[0];
  EXPECT_EQ(s.root, 0);
  EXPECT_EQ(s.w, 4);
  for (int e : {s.inner_plus, s.inner_minus}) {
    EXPECT_EQ(g.edge(e).u, 0);
    EXPECT_EQ(g.edge(e).v, 4);
    EXPECT_DOUBLE_EQ(g.edge(e).length, 0.4142);
  }
  for (int e : {s.outer_plus, s.outer_minus}) {
    EXPECT_EQ(g.edge(e).u, 4);
    EXPECT_NEAR(g.edge(e).length, 0.5858, 1e-15);
    EXPECT_EQ(g.degree(g.edge(e).v), 1);
  }
  EXPECT_EQ(g.degree(4), 4);
}

TEST(Glue, RejectsBadDistances) {
  const auto m = star3(1, 1, 1);
  EXPECT_THROW(glue_leaf_pair(m, 0, 1.0), GraphError);
  EXPECT_THROW(glue_leaf_pair(m, 0, 0.0), GraphError);
  EXPECT_THROW(glue_leaf_pair(m, 1, 0.5), GraphError);
}

TEST(Glue, RemainingPairsKeepTheirEdges) {
  MetricGraph m(8,
                {{0, 1, 1.3}, {0, 2, 0.8}, {0, 3, 0.55}, {1, 4, 1}, {1, 5, 1}, {2, 6, 1}, {2, 7, 1}},
                {{1, 3, 4}, {2, 5, 6}});
  const auto g = glue_leaf_pair(m, 0, 0.3);
  ASSERT_EQ(g.leaf_pairs().size(), 1u);
  EXPECT_EQ(g.leaf_pairs()[0].root, 2);
  EXPECT_TRUE(g.pair_problem(g.leaf_pairs()[0]).empty());
  const auto both = glue_leaf_pair(g, 0, 0.3);
  EXPECT_EQ(both.glued_sites().size(), 2u);
  EXPECT_EQ(both.betti(), 2);
}

TEST(Exchange, PairPermutationIsAnInvolutionSwappingArms) {
  const auto m = star3(1, 1, 0.7);
  const auto perm = exchange_bond_permutation(m, m.leaf_pairs()[0]);
  for (int b = 0; b < 2 * m.edge_count(); ++b) EXPECT_EQ(perm[perm[b]], b);
  EXPECT_EQ(perm[0], 2);
  EXPECT_EQ(perm[4], 4);
  const auto vp = exchange_vertex_permutation(m, perm);
  EXPECT_EQ(vp, (std::vector<Vertex>{0, 2, 1, 3}));
}

TEST(Exchange, GluedSiteSwapsBothLayers) {
  const auto g = glue_leaf_pair(star3(1, 1, 0.7), 0, 0.4);
  const auto perm = exchange_bond_permutation(g, g.glued_sites()[0]);
  const auto vp = exchange_vertex_permutation(g, perm);
  EXPECT_EQ(vp, (std::vector<Vertex>{0, 2, 1, 3, 4}));
  for (int e = 0; e < g.edge_count(); ++e) {
    const int f = perm[2 * e] / 2;
    EXPECT_DOUBLE_EQ(g.edge(e).length, g.edge(f).length);
  }
}
