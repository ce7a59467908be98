#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "isoflip/qnodal.hpp"
#include "test_graphs.hpp"

using namespace isoflip;
using std::numbers::pi;

namespace {

MetricGraph interval(double l = 1.0) { return MetricGraph(2, {{0, 1, l}}); }

MetricGraph star3(double a, double b, double c) {
  return MetricGraph(4, {{0, 1, a}, {0, 2, b}, {0, 3, c}}, {{0, 0, 1}});
}

/// Two unit leaf pairs on roots 1 and 2 of a three-edge star.
MetricGraph two_pair_graph(double spine = 1.3) {
  return MetricGraph(8, {{0, 1, spine}, {0, 2, 0.8}, {0, 3, 0.55}, {1, 4, 1}, {1, 5, 1}, {2, 6, 1}, {2, 7, 1}},
                     {{1, 3, 4}, {2, 5, 6}});
}

SecularOptions upto(double kmax) {
  SecularOptions o;
  o.kmax = kmax;
  return o;
}

struct Sampled {
  int sign_changes = 0;
  int domains = 0;
};

/// Sign changes and sign-connected components from `per_edge` samples per edge.
Sampled sample_counts(const MetricGraph& m, double k, const QEigenfunction& f, int per_edge = 1000) {
  const int nv = m.vertex_count();
  std::vector<double> vals(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) vals[v] = f.vertex_values[v];
  std::vector<std::pair<int, int>> links;
  Sampled out;
  for (int e = 0; e < m.edge_count(); ++e) {
    const double l = m.edge(e).length;
    int prev = m.edge(e).u;
    for (int i = 1; i < per_edge; ++i) {
      const int node = static_cast<int>(vals.size());
      vals.push_back(f.waves[e].value(k, l * i / per_edge));
      links.emplace_back(prev, node);
      prev = node;
    }
    links.emplace_back(prev, m.edge(e).v);
  }
  UnionFind uf(static_cast<int>(vals.size()));
  for (auto [a, b] : links) {
    if ((vals[a] > 0) == (vals[b] > 0))
      uf.unite(a, b);
    else
      ++out.sign_changes;
  }
  out.domains = uf.set_count();
  return out;
}

}  // namespace

TEST(EdgeZeros, ClosedFormExamples) {
  // cos(pi x) on [0,1]: R = 1, phi = pi/2.
  EXPECT_EQ(edge_zero_count({0, 1.0, pi / 2}, pi, 1.0), 1);
  EXPECT_EQ(edge_zero_count({0, 1.0, pi / 2}, 0.0, 1.0), 0);
  // cos(k x) with k l = 3 pi / 4: one zero at pi / (2k).
  EXPECT_EQ(edge_zero_count({0, 1.0, pi / 2}, 3 * pi / 4, 1.0), 1);
  EXPECT_EQ(edge_zero_count({0, 1.0, pi / 2}, 0.4 * pi, 1.0), 0);
  // sin(kx + 0.3) over many periods.
  EXPECT_EQ(edge_zero_count({0, 2.0, 0.3}, 10.0, 3.0), 9);
  EXPECT_THROW(edge_zero_count({0, 1.0, 0.0}, 1.0, 1.0), NonGenericError);
}

TEST(EdgeZeros, MatchSamplingOnRandomWaves) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> phase(0.0, 2 * pi), kk(0.1, 40.0), ll(0.2, 2.0);
  for (int t = 0; t < 500; ++t) {
    const EdgeWave w{0, 1.0, phase(rng)};
    const double k = kk(rng), l = ll(rng);
    if (std::abs(w.value(k, 0)) < 1e-3 || std::abs(w.value(k, l)) < 1e-3) continue;
    int changes = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) changes += (w.value(k, l * i / n) > 0) != (w.value(k, l * (i + 1) / n) > 0);
    EXPECT_EQ(edge_zero_count(w, k, l), changes) << "k=" << k << " l=" << l << " phi=" << w.phase;
  }
}

TEST(QNodal, IntervalModes) {
  const auto s = secular_spectrum(interval(), upto(14.5 * pi));
  for (std::size_t i = 0; i < s.eigenpairs.size(); ++i) {
    const auto& p = s.eigenpairs[i];
    ASSERT_TRUE(p.generic);
    EXPECT_EQ(q_flip_count(interval(), p), static_cast<int>(i));
    EXPECT_EQ(q_nodal_count(interval(), p), static_cast<int>(i) + 1);
  }
}

TEST(QNodal, ConstantMode) {
  const auto m = star3(1, 1, 0.7);
  const auto p = secular_spectrum(m, upto(0.5)).eigenpairs.front();
  EXPECT_EQ(q_flip_count(m, p), 0);
  EXPECT_EQ(q_nodal_count(m, p), 1);
}

TEST(QNodal, NonGenericThrows) {
  const auto m = star3(1, 1, 1);
  const auto s = secular_spectrum(m, upto(2));
  ASSERT_GE(s.eigenpairs.size(), 2u);
  EXPECT_THROW(q_flip_count(m, s.eigenpairs[1]), NonGenericError);
  EXPECT_THROW(q_nodal_count(m, s.eigenpairs[1]), NonGenericError);
}

TEST(QNodal, InvariantUnderSignAndScale) {
  const auto m = star3(1, 1, 0.7);
  for (const auto& p : secular_spectrum(m, upto(15)).eigenpairs) {
    if (!p.generic) continue;
    for (double c : {-1.0, 3.5, -0.01}) {
      QEigenfunction g = p.basis.front();
      for (double& v : g.vertex_values) v *= c;
      for (auto& w : g.waves) {
        w.amplitude *= std::abs(c);
        if (c < 0) w.phase = std::fmod(w.phase + pi, 2 * pi);
      }
      EXPECT_EQ(q_flip_count(m, p.k, g), q_flip_count(m, p));
      EXPECT_EQ(q_nodal_count(m, p.k, g), q_nodal_count(m, p));
    }
  }
}

TEST(QNodal, SturmOnRandomMetricTrees) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> len(0.5, 1.5);
  int checked = 0;
  for (int t = 0; t < 12; ++t) {
    const auto tree = testgraphs::random_connected(rng, 4 + t % 5, 0.0);
    std::vector<double> l(tree.edge_count());
    for (double& x : l) x = len(rng);
    const auto m = build_metric(tree, l);
    const auto s = secular_spectrum_count(m, 15, {});
    for (const auto& row : q_nodal_profiles(m, s, 15)) {
      if (!row.generic) continue;
      EXPECT_EQ(*row.nu, row.n) << "tree " << t;
      EXPECT_EQ(*row.mu, row.n - 1) << "tree " << t;
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(QNodal, SegmentMethodMatchesDenseSampling) {
  const auto base = two_pair_graph();
  for (const auto& m : {star3(1, 1, 0.7), base, glue_leaf_pair(base, 0, 0.4142), glue_leaf_pair(base, 1, 0.4142)}) {
    const auto s = secular_spectrum_count(m, 20, {});
    int generic = 0;
    for (const auto& p : s.eigenpairs) {
      if (!p.generic) continue;
      ++generic;
      const auto smp = sample_counts(m, p.k, p.basis.front());
      EXPECT_EQ(q_flip_count(m, p), smp.sign_changes) << "k=" << p.k;
      EXPECT_EQ(q_nodal_count(m, p), smp.domains) << "k=" << p.k;
    }
    EXPECT_GT(generic, 5);
  }
}

TEST(QNodal, BoundsOnGluedGraph) {
  const auto m = glue_leaf_pair(two_pair_graph(), 0, 0.4142);
  const auto rows = q_nodal_profiles(m, secular_spectrum_count(m, 25, {}), 25);
  EXPECT_EQ(rows.size(), 25u);
  EXPECT_TRUE(check_bounds(m.betti(), rows).all_pass());
}

TEST(QNodal, ProfilesExpandMultiplicity) {
  const auto m = star3(1, 1, 1);
  const auto rows = q_nodal_profiles(m, secular_spectrum(m, upto(3.2 * pi)), 6);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_TRUE(rows[0].generic);
  EXPECT_FALSE(rows[1].generic);
  EXPECT_FALSE(rows[2].generic);
  EXPECT_EQ(rows[1].lambda, rows[2].lambda);
  EXPECT_FALSE(rows[1].mu.has_value());
}

TEST(Theorem3, TwoPairInstancePasses) {
  Theorem3Options opt;
  opt.n_max = 12;
  const auto rep = verify_theorem3(two_pair_graph(), two_pair_graph(), 0, 1, opt);
  EXPECT_EQ(rep.verdict(), Verdict::pass);
  for (const auto& a : rep.assertions) EXPECT_TRUE(a.pass) << a.name;
  bool truncation_noted = false;
  for (const auto& n : rep.notes) truncation_noted |= n.find("truncated") != std::string::npos;
  EXPECT_TRUE(truncation_noted);
}

TEST(Theorem3, SamePairIsTrivial) {
  Theorem3Options opt;
  opt.n_max = 10;
  EXPECT_EQ(verify_theorem3(two_pair_graph(), two_pair_graph(), 1, 1, opt).verdict(), Verdict::pass);
}

TEST(Theorem3, NonIsospectralSeedsAreInconclusive) {
  Theorem3Options opt;
  opt.n_max = 10;
  const auto rep = verify_theorem3(two_pair_graph(), two_pair_graph(1.35), 0, 1, opt);
  EXPECT_EQ(rep.verdict(), Verdict::inconclusive);
}

TEST(Theorem3, RejectsBadIndices) {
  EXPECT_THROW(verify_theorem3(two_pair_graph(), two_pair_graph(), 0, 2), GraphError);
}

TEST(Interlacing, StrictAtSilverFraction) {
  const auto rep = interlacing_check(1.0, 0.4142, 30.0);
  EXPECT_EQ(rep.verdict(), Verdict::pass);
  // 3 Dirichlet-Dirichlet plus 6 Dirichlet-Neumann glued values below 30.
  EXPECT_EQ(rep.input_value("indices_checked"), "9");
}

TEST(Interlacing, HalfIsStillStrict) {
  // Glued {pi, 2pi, ...} against {pi/2, 3pi/2, ...}.
  EXPECT_EQ(interlacing_check(1.0, 0.5, 30.0).verdict(), Verdict::pass);
}

TEST(Interlacing, CoincidencesAreReported) {
  // l1 = 2/3: the two glued families share 3pi/2 (2m'+1), giving ties with the unglued values.
  const auto rep = interlacing_check(1.0, 2.0 / 3.0, 15.0);
  EXPECT_EQ(rep.verdict(), Verdict::fail);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(Interlacing, EmptyRangeIsVacuous) {
  const auto rep = interlacing_check(1.0, 0.4142, 1.0);
  EXPECT_EQ(rep.verdict(), Verdict::pass);
  EXPECT_EQ(rep.input_value("indices_checked"), "0");
}
