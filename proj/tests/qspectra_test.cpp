#include <gtest/gtest.h>

#include <numbers>

#include "isoflip/qspectra.hpp"

using namespace isoflip;
using std::numbers::pi;

namespace {

MetricGraph interval(double l = 1.0) { return MetricGraph(2, {{0, 1, l}}); }

MetricGraph star3(double a, double b, double c) {
  return MetricGraph(4, {{0, 1, a}, {0, 2, b}, {0, 3, c}}, {{0, 0, 1}});
}

SecularOptions upto(double kmax) {
  SecularOptions o;
  o.kmax = kmax;
  return o;
}

/// Composite Simpson of f*g over all edges, independent of the closed-form Gram matrix.
double overlap(const MetricGraph& m, double k, const QEigenfunction& f, const QEigenfunction& g) {
  double s = 0.0;
  for (int e = 0; e < m.edge_count(); ++e) {
    const int n = 2000;
    const double l = m.edge(e).length, h = l / n;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * f.waves[e].value(k, i * h) * g.waves[e].value(k, i * h) * h / 3.0;
    }
  }
  return s;
}

}  // namespace

TEST(Scattering, IsOrthogonalAndMatchesNeumannCoefficients) {
  const auto m = star3(1, 1, 0.7);
  const auto s = scattering_matrix(m);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s.rows(), s.cols());
  EXPECT_LT((s.transpose() * s - id).norm(), 1e-14);
  // Bond 1 arrives at the centre (degree 3): reflection 2/3-1, transmission 2/3.
  EXPECT_NEAR(s(0, 1), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s(2, 1), 2.0 / 3.0, 1e-15);
  // Leaf vertices reflect fully.
  EXPECT_NEAR(s(1, 0), 1.0, 1e-15);
}

TEST(Secular, NeumannIntervalSpectrum) {
  const auto s = secular_spectrum(interval(), upto(14.5 * pi));
  const auto k = s.k_values();
  ASSERT_GE(k.size(), 15u);
  for (int n = 1; n <= 15; ++n) EXPECT_NEAR(k[n - 1], (n - 1) * pi, 1e-8) << "n=" << n;
  for (const auto& p : s.eigenpairs) EXPECT_EQ(p.multiplicity, 1);
}

TEST(Secular, IntervalOfOtherLength) {
  const auto k = secular_spectrum(interval(2.5), upto(10)).k_values();
  for (std::size_t n = 0; n < k.size(); ++n) EXPECT_NEAR(k[n], n * pi / 2.5, 1e-8);
  EXPECT_EQ(k.size(), static_cast<std::size_t>(std::floor(10 * 2.5 / pi)) + 1);
}

TEST(Secular, DummyVertexLeavesSpectrumUnchanged) {
  const auto a = secular_spectrum(interval(), upto(14.5 * pi)).k_values();
  const auto b = secular_spectrum(add_dummy_vertex(interval(), 0, 0.3), upto(14.5 * pi)).k_values();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
}

TEST(Secular, EquilateralStarMultiplicities) {
  // Odd modes cos(k) = 0 are double; even modes sin(k) = 0 are simple.
  const auto s = secular_spectrum(star3(1, 1, 1), upto(3.2 * pi));
  ASSERT_EQ(s.eigenpairs.size(), 7u);
  for (std::size_t i = 0; i < s.eigenpairs.size(); ++i) {
    const auto& p = s.eigenpairs[i];
    EXPECT_NEAR(p.k, i * pi / 2, 1e-9);
    EXPECT_EQ(p.multiplicity, i % 2 ? 2 : 1) << "k=" << p.k;
    EXPECT_EQ(static_cast<int>(p.basis.size()), p.multiplicity);
    EXPECT_FALSE(p.generic && p.multiplicity > 1);
  }
}

TEST(Secular, EigenfunctionsSatisfyVertexConditionsAndAreOrthonormal) {
  for (const auto& m : {star3(1, 1, 1), star3(1, 1, 0.7), glue_leaf_pair(star3(1, 1, 0.7), 0, 0.4142)}) {
    const auto s = secular_spectrum(m, upto(15));
    for (const auto& p : s.eigenpairs) {
      EXPECT_NEAR(p.lambda, p.k * p.k, 1e-12);
      for (std::size_t i = 0; i < p.basis.size(); ++i) {
        const auto r = vertex_condition_residual(m, p.k, p.basis[i]);
        EXPECT_LT(r.continuity, 1e-8) << "k=" << p.k;
        EXPECT_LT(r.current, 1e-8) << "k=" << p.k;
        for (std::size_t j = 0; j <= i; ++j)
          EXPECT_NEAR(overlap(m, p.k, p.basis[i], p.basis[j]), i == j ? 1.0 : 0.0, 1e-9) << "k=" << p.k;
      }
    }
  }
}

TEST(Secular, LeafEdgesAreCosinesFromTheLeafEnd) {
  const auto m = star3(1, 1, 0.7);
  for (const auto& p : secular_spectrum(m, upto(15)).eigenpairs) {
    if (!p.generic) continue;
    const auto& f = p.basis.front();
    // Edge 2 runs centre -> leaf 3, so the leaf end sits at x = l.
    const auto& w = f.waves[2];
    const double l = m.edge(2).length, b = w.value(p.k, l);
    for (double s : {0.1, 0.3, 0.55})
      EXPECT_NEAR(w.value(p.k, l - s), b * std::cos(p.k * s), 1e-10 * sup_norm(f));
  }
}

TEST(Secular, ConstantModeAtZero) {
  const auto s = secular_spectrum(star3(1, 1, 0.7), upto(1));
  ASSERT_FALSE(s.eigenpairs.empty());
  const auto& f = s.eigenpairs.front().basis.front();
  EXPECT_EQ(s.eigenpairs.front().k, 0.0);
  for (double v : f.vertex_values) EXPECT_NEAR(v, f.vertex_values[0], 1e-15);
  EXPECT_NEAR(f.vertex_values[0], 1.0 / std::sqrt(2.7), 1e-12);
}

TEST(Secular, GenericityFlags) {
  // Unequal star: even modes are simple and nowhere zero except at special k.
  const auto s = secular_spectrum(star3(1, 1, 0.7), upto(6));
  int generic = 0;
  for (const auto& p : s.eigenpairs) {
    EXPECT_EQ(p.generic, quantum_generic(p, 1e-6));
    generic += p.generic;
  }
  EXPECT_GT(generic, 2);
  // The odd arm modes vanish at the centre.
  for (const auto& p : s.eigenpairs) {
    if (std::abs(std::cos(p.k)) < 1e-9) {
      EXPECT_FALSE(p.generic);
    }
  }
}

TEST(Secular, CountVariantReachesRequestedSize) {
  const auto s = secular_spectrum_count(star3(1, 1, 0.7), 20, {});
  EXPECT_GT(s.size(), 20);
}

TEST(Secular, TraceIsKeptOnRequest) {
  auto opt = upto(5);
  opt.keep_trace = true;
  const auto s = secular_spectrum(interval(), opt);
  ASSERT_GT(s.trace.size(), 10u);
  for (const auto& [k, sig] : s.trace) {
    EXPECT_GE(sig, 0.0);
    EXPECT_LE(k, 5.0 + 4 * pi / 20);
  }
  EXPECT_TRUE(secular_spectrum(interval(), upto(5)).trace.empty());
}

TEST(FdOracle, IntervalSecondEigenvalue) {
  const auto fd = fd_oracle(interval(), 2000, 3);
  EXPECT_NEAR(fd[0], 0.0, 1e-9);
  EXPECT_NEAR(fd[1] / (pi * pi), 1.0, 1e-5);
  EXPECT_NEAR(fd[2] / (4 * pi * pi), 1.0, 1e-5);
}

TEST(FdOracle, SecondOrderConvergence) {
  const double exact = pi * pi;
  const double e1 = std::abs(fd_oracle(interval(), 200, 2)[1] - exact);
  const double e2 = std::abs(fd_oracle(interval(), 400, 2)[1] - exact);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(FdOracle, AgreesWithSecularOnUnequalStar) {
  const auto m = star3(1, 1, 0.7);
  const auto fd = fd_oracle(m, 1000, 8);
  const auto k = secular_spectrum_count(m, 8, {}).k_values();
  for (int n = 1; n < 8; ++n) EXPECT_NEAR(fd[n] / (k[n] * k[n]), 1.0, 1e-4) << "n=" << n + 1;
}

TEST(FdOracle, RejectsCoarseOrHugeGrids) {
  EXPECT_THROW(fd_oracle(interval(), 50), std::invalid_argument);
  EXPECT_THROW(fd_oracle(interval(1e4), 1000), std::invalid_argument);
}

TEST(OddLeaf, Unglued) {
  const auto a = odd_leaf_spectrum(1.0, std::nullopt, false, 8.0);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a[0], pi / 2);
  EXPECT_DOUBLE_EQ(a[1], 3 * pi / 2);
  EXPECT_DOUBLE_EQ(a[2], 5 * pi / 2);
}

TEST(OddLeaf, GluedAtHalf) {
  // Dirichlet-Dirichlet on [0, 1/2]: 2 pi m. Dirichlet-Neumann on [1/2, 1]: (2m+1) pi.
  const auto b = odd_leaf_spectrum(1.0, 0.5, true, 4.5 * pi);
  const std::vector<double> want{pi, 2 * pi, 3 * pi, 4 * pi};
  ASSERT_EQ(b.size(), want.size());
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], want[i], 1e-14);
  EXPECT_THROW(odd_leaf_spectrum(1.0, 1.0, true, 10), std::invalid_argument);
  EXPECT_THROW(odd_leaf_spectrum(1.0, std::nullopt, true, 10), std::invalid_argument);
}

TEST(OddLeaf, MatchesSecularOddModesOfGluedStar) {
  // Glued modes are eigenvalues of the glued graph.
  const auto g = glue_leaf_pair(star3(1, 1, 0.7), 0, 0.4142);
  const auto s = secular_spectrum(g, upto(20));
  for (double k : odd_leaf_spectrum(1.0, 0.4142, true, 19.5)) {
    double best = INFINITY;
    for (double x : s.k_values()) best = std::min(best, std::abs(x - k));
    EXPECT_LT(best, 1e-9) << "k=" << k;
  }
}
