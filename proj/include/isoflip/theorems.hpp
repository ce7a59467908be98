#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "isoflip/graph.hpp"
#include "isoflip/nodal.hpp"
#include "isoflip/report.hpp"
#include "isoflip/spectra.hpp"
#include "isoflip/trees.hpp"

namespace isoflip {

namespace detail {

inline std::vector<double> eigenvalues_with(const SymmetryClassification& c, Parity p) {
  std::vector<double> out;
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    if (c.labels[i] == p) out.push_back(c.adapted.eigenvalues[i]);
  return out;
}

/// Max pairwise gap of two sorted multisets; infinity if their sizes differ.
inline double multiset_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline int count_mixed(const SymmetryClassification& c) {
  return static_cast<int>(std::count(c.labels.begin(), c.labels.end(), Parity::mixed));
}

inline std::string describe(const DiscreteGraph& g) {
  std::string s = "V=" + std::to_string(g.vertex_count()) + " E=";
  s += std::to_string(g.edge_count()) + " [";
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    if (i) s += ",";
    s += to_string(g.edges()[i]);
  }
  return s + "]";
}

inline std::string describe(const LeafPair& p) {
  std::string s = "root=" + std::to_string(p.root) + " plus=[";
  for (std::size_t i = 0; i < p.arm_plus.size(); ++i) s += (i ? "," : "") + std::to_string(p.arm_plus[i]);
  s += "] minus=[";
  for (std::size_t i = 0; i < p.arm_minus.size(); ++i) s += (i ? "," : "") + std::to_string(p.arm_minus[i]);
  return s + "]";
}

inline void require_matching_pairs(const DiscreteGraph& g1, const LeafPair& p1, const DiscreteGraph& g2,
                                   const LeafPair& p2, int j) {
  validate_leaf_pair(g1, p1);
  validate_leaf_pair(g2, p2);
  if (p1.k() != p2.k()) throw GraphError("leaf pairs have different k");
  if (j < 1 || j > p1.k()) throw GraphError("j outside [1,k]");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Edge insertion between leaf arms preserves isospectrality
// ---------------------------------------------------------------------------

/// Both directions of "sigma(G1)=sigma(G2) iff sigma(G1bar)=sigma(G2bar)" on one
/// instance, plus the even/odd bookkeeping behind it.
inline VerificationReport verify_lemma1(const DiscreteGraph& g1, const DiscreteGraph& g2, const LeafPair& p1,
                                        const LeafPair& p2, int j, double tol = 1e-9) {
  detail::require_matching_pairs(g1, p1, g2, p2, j);
  VerificationReport rep;
  rep.claim = "lemma1";
  rep.input("G1", detail::describe(g1));
  rep.input("G2", detail::describe(g2));
  rep.input("pair1", detail::describe(p1));
  rep.input("pair2", detail::describe(p2));
  rep.input("j", std::to_string(j));

  const DiscreteGraph b1 = insert_pair_edge(g1, p1, j), b2 = insert_pair_edge(g2, p2, j);
  const Spectrum s1 = laplacian_spectrum(g1), s2 = laplacian_spectrum(g2);
  const Spectrum sb1 = laplacian_spectrum(b1), sb2 = laplacian_spectrum(b2);

  const bool pre = s1.size() == s2.size() && is_isospectral(s1, s2, tol);
  const bool post = sb1.size() == sb2.size() && is_isospectral(sb1, sb2, tol);
  rep.input("isospectral_before", pre ? "true" : "false");
  rep.input("isospectral_after", post ? "true" : "false");
  rep.check("iso_equivalence", pre == post, pre == post ? 0.0 : 1.0, 0.0);
  rep.check("rank_one_G1", rank_one_check(g1, b1, p1, j));
  rep.check("rank_one_G2", rank_one_check(g2, b2, p2, j));

  std::array<std::vector<double>, 2> odd_before, odd_after;
  const std::array<const DiscreteGraph*, 2> gs{&g1, &g2}, bs{&b1, &b2};
  const std::array<const LeafPair*, 2> ps{&p1, &p2};
  const std::array<const Spectrum*, 2> ss{&s1, &s2}, sbs{&sb1, &sb2};
  for (int i = 0; i < 2; ++i) {
    const std::string tag = i == 0 ? "_G1" : "_G2";
    const auto c = leaf_symmetry_classify(*gs[i], *ps[i], *ss[i]);
    const auto cb = leaf_symmetry_classify(*bs[i], *ps[i], *sbs[i]);
    rep.check("classification_complete" + tag, detail::count_mixed(c) + detail::count_mixed(cb) == 0,
              detail::count_mixed(c) + detail::count_mixed(cb), 0);

    const Matrix lbar = laplacian(*bs[i]);
    double resid = 0.0;
    for (std::size_t n = 0; n < c.labels.size(); ++n)
      if (c.labels[n] == Parity::even)
        resid = std::max(resid, eigen_residual(lbar, c.adapted.eigenvectors[n], c.adapted.eigenvalues[n]));
    rep.check_le("even_eigenvectors_persist" + tag, resid, 1e-9 * ss[i]->scale());

    const double even_gap =
        detail::multiset_gap(detail::eigenvalues_with(c, Parity::even), detail::eigenvalues_with(cb, Parity::even));
    rep.check_le("even_spectrum_preserved" + tag, even_gap, tol * (1.0 + sbs[i]->eigenvalues.back()));

    // Odd vectors vanish away from the arms.
    std::vector<bool> on_arm(static_cast<std::size_t>(gs[i]->vertex_count()), false);
    for (Vertex v : ps[i]->arm_plus) on_arm[v] = true;
    for (Vertex v : ps[i]->arm_minus) on_arm[v] = true;
    double leak = 0.0;
    for (const auto* cl : {&c, &cb})
      for (std::size_t n = 0; n < cl->labels.size(); ++n)
        if (cl->labels[n] == Parity::odd)
          for (std::size_t v = 0; v < on_arm.size(); ++v)
            if (!on_arm[v]) leak = std::max(leak, std::abs(cl->adapted.eigenvectors[n][v]));
    rep.check_le("odd_support_on_arms" + tag, leak, 1e-9);

    odd_before[i] = detail::eigenvalues_with(c, Parity::odd);
    odd_after[i] = detail::eigenvalues_with(cb, Parity::odd);
  }
  const double scale = 1.0 + std::max(s1.eigenvalues.back(), sb1.eigenvalues.back());
  rep.check_le("odd_spectra_agree_before", detail::multiset_gap(odd_before[0], odd_before[1]), tol * scale);
  rep.check_le("odd_spectra_agree_after", detail::multiset_gap(odd_after[0], odd_after[1]), tol * scale);
  const double odd_shift = detail::multiset_gap(odd_before[0], odd_after[0]);
  if (p1.k() == 1) {
    rep.check("odd_spectrum_changes", odd_shift > tol * scale, odd_shift, tol * scale);
  } else if (odd_shift <= tol * scale) {
    rep.note("odd spectrum unchanged by insertion on this instance");
  }
  return rep;
}

/// Isospectral seeds with matching generic flip/nodal counts stay that way
/// after the same insertion on both sides. Preconditions are checked.
inline VerificationReport verify_theorem1(const DiscreteGraph& g1, const DiscreteGraph& g2, const LeafPair& p1,
                                          const LeafPair& p2, int j, double tol = 1e-9) {
  detail::require_matching_pairs(g1, p1, g2, p2, j);
  VerificationReport rep;
  rep.claim = "theorem1";
  rep.input("G1", detail::describe(g1));
  rep.input("G2", detail::describe(g2));
  rep.input("pair1", detail::describe(p1));
  rep.input("pair2", detail::describe(p2));
  rep.input("j", std::to_string(j));

  const Spectrum s1 = laplacian_spectrum(g1), s2 = laplacian_spectrum(g2);
  const bool same_size = s1.size() == s2.size();
  rep.require("pre_isospectral", same_size && is_isospectral(s1, s2, tol),
              same_size ? max_eigenvalue_gap(s1, s2) : INFINITY, same_size ? isospectral_bound(s1, s2, tol) : 0.0);
  if (!same_size) return rep;
  const auto pr1 = nodal_profiles(g1, s1), pr2 = nodal_profiles(g2, s2);
  rep.require("pre_profiles_match", sequences_match(pr1, pr2));

  const DiscreteGraph b1 = insert_pair_edge(g1, p1, j), b2 = insert_pair_edge(g2, p2, j);
  const Spectrum sb1 = laplacian_spectrum(b1), sb2 = laplacian_spectrum(b2);
  const auto pb1 = nodal_profiles(b1, sb1), pb2 = nodal_profiles(b2, sb2);

  rep.check("isospectral", is_isospectral(sb1, sb2, tol), max_eigenvalue_gap(sb1, sb2),
            isospectral_bound(sb1, sb2, tol));
  rep.check("flip_counts_match", sequences_match(pb1, pb2, NodalQuantity::flips));
  rep.check("nodal_counts_match", sequences_match(pb1, pb2, NodalQuantity::domains));

  // Generic eigenvectors are even, so they agree on both ends of the new edge,
  // keep their eigenvalue and flip count, and change nodal count by chi in {0,-1}.
  const auto f1 = genericity_flags(s1), f2 = genericity_flags(s2);
  const Matrix lb1 = laplacian(b1), lb2 = laplacian(b2);
  double asym = 0.0, resid = 0.0;
  int flip_changes = 0, chi_bad = 0, chi_mismatch = 0;
  for (int m = 0; m < s1.size(); ++m) {
    std::array<int, 2> chi{0, 0};
    std::array<bool, 2> have{false, false};
    for (int side = 0; side < 2; ++side) {
      const auto& flags = side == 0 ? f1 : f2;
      if (!flags.generic(m)) continue;
      const auto& f = (side == 0 ? s1 : s2).eigenvectors[m];
      const double lam = (side == 0 ? s1 : s2).eigenvalues[m];
      const LeafPair& p = side == 0 ? p1 : p2;
      const DiscreteGraph& g = side == 0 ? g1 : g2;
      const DiscreteGraph& b = side == 0 ? b1 : b2;
      asym = std::max(asym, std::abs(f[p.plus(j)] - f[p.minus(j)]) / norm_inf(f));
      resid = std::max(resid, eigen_residual(side == 0 ? lb1 : lb2, f, lam));
      if (flip_count(g, f) != flip_count(b, f)) ++flip_changes;
      chi[side] = nodal_count(b, f) - nodal_count(g, f);
      have[side] = true;
      if (chi[side] != 0 && chi[side] != -1) ++chi_bad;
    }
    if (have[0] && have[1] && chi[0] != chi[1]) ++chi_mismatch;
  }
  rep.check_le("generic_symmetric_at_insertion", asym, 1e-9);
  rep.check_le("generic_eigenvectors_persist", resid, 1e-9 * s1.scale());
  rep.check("flip_count_unchanged_by_insertion", flip_changes == 0, flip_changes, 0);
  rep.check("chi_in_zero_minus_one", chi_bad == 0, chi_bad, 0);
  rep.check("chi_consistent", chi_mismatch == 0, chi_mismatch, 0);

  if (std::max(b1.vertex_count(), b2.vertex_count()) <= kIsomorphismVertexCap && is_isomorphic(b1, b2))
    rep.note("degenerate instance: the two constructed graphs are isomorphic");
  return rep;
}

// ---------------------------------------------------------------------------
// Joining the ends of a 1-leaf-pair
// ---------------------------------------------------------------------------

/// Checks the 1 -> 3 eigenvalue shift of gamma and the case formulas for flip
/// and nodal counts. For a generic position n of Gbar with eigenvalue l, the
/// matching eigenvector of G sits at n+1 when 1 < l < 3 and at n otherwise.
inline VerificationReport verify_theorem2(const DiscreteGraph& g, const LeafPair& pair, double tol = 1e-9) {
  validate_leaf_pair(g, pair);
  if (pair.k() != 1) throw GraphError("verify_theorem2: leaf pair must have k = 1");
  VerificationReport rep;
  rep.claim = "theorem2";
  rep.input("G", detail::describe(g));
  rep.input("pair", detail::describe(pair));

  const DiscreteGraph gb = insert_pair_edge(g, pair, 1);
  const Spectrum s = laplacian_spectrum(g), sb = laplacian_spectrum(gb);
  const auto gamma = pair_gamma(g.vertex_count(), pair, 1);
  rep.check_le("gamma_eigenvalue_1_in_G", eigen_residual(laplacian(g), gamma, 1.0), 1e-12);
  rep.check_le("gamma_eigenvalue_3_in_Gbar", eigen_residual(laplacian(gb), gamma, 3.0), 1e-12);

  std::vector<double> predicted = s.eigenvalues;
  auto nearest = std::min_element(predicted.begin(), predicted.end(),
                                  [](double a, double b) { return std::abs(a - 1.0) < std::abs(b - 1.0); });
  *nearest = 3.0;
  std::sort(predicted.begin(), predicted.end());
  rep.check_le("spectrum_shift_1_to_3", detail::multiset_gap(predicted, sb.eigenvalues),
               tol * (1.0 + sb.eigenvalues.back()));

  const auto fl = genericity_flags(s), flb = genericity_flags(sb);
  const auto pr = nodal_profiles(g, s), prb = nodal_profiles(gb, sb);
  const double snap = 1e-9 * sb.scale();
  double value_gap = 0.0, overlap_defect = 0.0, sign_defect = 0.0;
  int flip_bad = 0, nodal_bad = 0, checked = 0, skipped = 0;
  for (int n = 0; n < sb.size(); ++n) {
    if (!flb.generic(n)) continue;
    const double lam = sb.eigenvalues[n];
    if (std::abs(lam - 1.0) <= snap || std::abs(lam - 3.0) <= snap) {
      ++skipped;
      continue;
    }
    const int m = (lam > 1.0 && lam < 3.0) ? n + 1 : n;
    if (m >= s.size() || !fl.generic(m)) {
      ++skipped;
      continue;
    }
    ++checked;
    const auto& f = s.eigenvectors[m];
    value_gap = std::max(value_gap, std::abs(s.eigenvalues[m] - lam));
    overlap_defect = std::max(overlap_defect, 1.0 - std::abs(dot(f, sb.eigenvectors[n])));
    const double scale = norm_inf(f);
    for (Vertex leaf : {pair.plus(1), pair.minus(1)})
      sign_defect = std::max(sign_defect, std::abs(f[pair.root] - (1.0 - lam) * f[leaf]) / scale);
    if (prb[n].mu != pr[m].mu) ++flip_bad;
    const int expected_nu = lam < 1.0 ? *pr[m].nu : *pr[m].nu - 1;
    if (prb[n].nu != expected_nu) ++nodal_bad;
  }
  rep.input("generic_indices_checked", std::to_string(checked));
  rep.input("generic_indices_skipped", std::to_string(skipped));
  rep.check_le("eigenvalue_relation", value_gap, tol * (1.0 + sb.eigenvalues.back()));
  rep.check_le("eigenvector_relation", overlap_defect, 1e-9);
  rep.check_le("sign_relation", sign_defect, 1e-9);
  rep.check("flip_formula", flip_bad == 0, flip_bad, 0);
  rep.check("nodal_formula", nodal_bad == 0, nodal_bad, 0);
  if (skipped > 0) rep.note("generic positions at eigenvalue 1 or 3, or with non-generic G partner, were skipped");
  return rep;
}

struct RangeCounts {
  int below_one = 0;   ///< [0,1)
  int one_to_three = 0;  ///< [1,3)
  int from_three = 0;  ///< [3,inf)

  friend bool operator==(const RangeCounts&, const RangeCounts&) = default;
};

/// Eigenvalue counts in [0,1), [1,3), [3,inf). Values within tol of 1 or 3
/// snap onto the boundary first.
inline RangeCounts corollary1_range_counts(const Spectrum& s, double tol = 1e-9) {
  RangeCounts rc;
  for (double lam : s.eigenvalues) {
    if (std::abs(lam - 1.0) <= tol) lam = 1.0;
    if (std::abs(lam - 3.0) <= tol) lam = 3.0;
    if (lam < 1.0)
      ++rc.below_one;
    else if (lam < 3.0)
      ++rc.one_to_three;
    else
      ++rc.from_three;
  }
  return rc;
}

inline std::string to_string(const RangeCounts& rc) {
  return "(" + std::to_string(rc.below_one) + "," + std::to_string(rc.one_to_three) + "," +
         std::to_string(rc.from_three) + ")";
}

/// Seeds with 1-leaf-pairs, equal generic flip/nodal counts and equal range
/// counts give constructed graphs with equal generic flip and nodal counts.
inline VerificationReport verify_corollary1(const DiscreteGraph& g1, const DiscreteGraph& g2, const LeafPair& p1,
                                            const LeafPair& p2, double tol = 1e-9) {
  detail::require_matching_pairs(g1, p1, g2, p2, 1);
  if (p1.k() != 1) throw GraphError("verify_corollary1: leaf pairs must have k = 1");
  VerificationReport rep;
  rep.claim = "corollary1";
  rep.input("G1", detail::describe(g1));
  rep.input("G2", detail::describe(g2));
  rep.input("pair1", detail::describe(p1));
  rep.input("pair2", detail::describe(p2));

  const bool same_size = g1.vertex_count() == g2.vertex_count();
  rep.require("pre_same_order", same_size);
  if (!same_size) return rep;
  const Spectrum s1 = laplacian_spectrum(g1), s2 = laplacian_spectrum(g2);
  rep.require("pre_profiles_match", sequences_match(nodal_profiles(g1, s1), nodal_profiles(g2, s2)));
  const auto rc1 = corollary1_range_counts(s1, tol), rc2 = corollary1_range_counts(s2, tol);
  rep.input("range_counts_G1", to_string(rc1));
  rep.input("range_counts_G2", to_string(rc2));
  rep.require("pre_range_counts_equal", rc1 == rc2);

  const DiscreteGraph b1 = insert_pair_edge(g1, p1, 1), b2 = insert_pair_edge(g2, p2, 1);
  const Spectrum sb1 = laplacian_spectrum(b1), sb2 = laplacian_spectrum(b2);
  const auto pb1 = nodal_profiles(b1, sb1), pb2 = nodal_profiles(b2, sb2);
  rep.check("flip_counts_match", sequences_match(pb1, pb2, NodalQuantity::flips));
  rep.check("nodal_counts_match", sequences_match(pb1, pb2, NodalQuantity::domains));
  rep.input("isospectral_after", is_isospectral(sb1, sb2, tol) ? "true" : "false");
  return rep;
}

// ---------------------------------------------------------------------------
// Search for non-isospectral pairs with equal flip and nodal counts
// ---------------------------------------------------------------------------

struct SearchLimits {
  int min_vertices = 3;
  int max_vertices = 11;
  long max_candidates = LONG_MAX;  ///< (tree, pair) candidates to build; 0 scans nothing
  int max_results = 25;
  std::uint64_t seed = 0;  ///< permutes evaluation order only; results are canonically ordered
  double tol = 1e-9;
};

struct SearchStats {
  long trees_scanned = 0;
  long candidates = 0;
  long pairs_examined = 0;
  long pairs_admissible = 0;
};

struct FoundPair {
  DiscreteGraph seed1, seed2;
  LeafPair pair1, pair2;
  DiscreteGraph graph1, graph2;  ///< seeds with their leaf ends joined
  VerificationReport report;
};

struct SearchResult {
  std::vector<FoundPair> pairs;
  SearchStats stats;
};

/// A tree seed with one 1-leaf-pair and everything precomputed for pairing.
struct SearchCandidate {
  int tree_index = 0;
  DiscreteGraph tree;
  LeafPair pair;
  DiscreteGraph glued;
  Spectrum glued_spectrum;
  std::vector<NodalProfile> glued_profiles;
  std::vector<bool> seed_generic;
  RangeCounts ranges;
};

inline SearchCandidate make_search_candidate(int tree_index, const DiscreteGraph& tree, const LeafPair& pair,
                                             double tol = 1e-9) {
  const Spectrum s = laplacian_spectrum(tree);
  const auto flags = genericity_flags(s);
  SearchCandidate c{tree_index, tree, pair, insert_pair_edge(tree, pair, 1), {}, {}, {}, corollary1_range_counts(s, tol)};
  c.glued_spectrum = laplacian_spectrum(c.glued);
  c.glued_profiles = nodal_profiles(c.glued, c.glued_spectrum);
  for (int i = 0; i < s.size(); ++i) c.seed_generic.push_back(flags.generic(i));
  return c;
}

/// Corollary-1 hypotheses on the seeds (for trees: same generic positions and
/// range counts) and the search goal on the outputs (non-isospectral, equal
/// generic flip and nodal counts).
inline bool admissible_pair(const SearchCandidate& a, const SearchCandidate& b, double tol = 1e-9) {
  if (a.tree.vertex_count() != b.tree.vertex_count()) return false;
  if (a.seed_generic != b.seed_generic || !(a.ranges == b.ranges)) return false;
  if (is_isospectral(a.glued_spectrum, b.glued_spectrum, tol)) return false;
  return sequences_match(a.glued_profiles, b.glued_profiles);
}

/// Rebuilds everything from the seed edge lists and re-checks the pair.
inline VerificationReport reverify_found_pair(const DiscreteGraph& seed1, const LeafPair& p1, const DiscreteGraph& seed2,
                                              const LeafPair& p2, double tol = 1e-9) {
  const DiscreteGraph t1(seed1.vertex_count(), seed1.edges()), t2(seed2.vertex_count(), seed2.edges());
  auto rep = verify_corollary1(t1, t2, p1, p2, tol);
  rep.claim = "corollary1_search";
  rep.require("pre_seeds_are_trees", is_tree(t1) && is_tree(t2));
  const bool seeds_iso = t1.vertex_count() <= kIsomorphismVertexCap && is_isomorphic(t1, t2);
  rep.require("pre_seeds_non_isomorphic", !seeds_iso);
  const Spectrum sb1 = laplacian_spectrum(insert_pair_edge(t1, p1, 1));
  const Spectrum sb2 = laplacian_spectrum(insert_pair_edge(t2, p2, 1));
  const double gap = max_eigenvalue_gap(sb1, sb2), bound = isospectral_bound(sb1, sb2, tol);
  rep.check("outputs_non_isospectral", gap > bound, gap, bound);
  return rep;
}

/// Exhaustive over non-isomorphic trees with min..max vertices.
inline SearchResult search_noniso_pairs(const SearchLimits& limits) {
  SearchResult result;
  struct Hit {
    int order;
    std::size_t a, b;
  };
  std::vector<SearchCandidate> all;
  std::vector<Hit> hits;

  for (int n = std::max(3, limits.min_vertices); n <= limits.max_vertices; ++n) {
    if (result.stats.candidates >= limits.max_candidates) break;
    const auto trees = nonisomorphic_trees(n);
    const std::size_t first = all.size();
    for (std::size_t t = 0; t < trees.size() && result.stats.candidates < limits.max_candidates; ++t) {
      ++result.stats.trees_scanned;
      std::vector<DiscreteGraph> seen;
      std::vector<Vertex> roots_done;
      for (const auto& pair : find_leaf_pairs(trees[t], 1)) {
        if (result.stats.candidates >= limits.max_candidates) break;
        if (std::find(roots_done.begin(), roots_done.end(), pair.root) != roots_done.end()) continue;
        roots_done.push_back(pair.root);
        auto cand = make_search_candidate(static_cast<int>(t), trees[t], pair, limits.tol);
        const bool duplicate = std::any_of(seen.begin(), seen.end(), [&](const DiscreteGraph& g) {
          return n <= kIsomorphismVertexCap && is_isomorphic(g, cand.glued);
        });
        if (duplicate) continue;
        seen.push_back(cand.glued);
        all.push_back(std::move(cand));
        ++result.stats.candidates;
      }
    }

    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t a = first; a < all.size(); ++a)
      for (std::size_t b = a + 1; b < all.size(); ++b)
        if (all[a].tree_index != all[b].tree_index) work.emplace_back(a, b);
    if (limits.seed != 0) std::shuffle(work.begin(), work.end(), std::mt19937_64(limits.seed));
    for (auto [a, b] : work) {
      ++result.stats.pairs_examined;
      if (admissible_pair(all[a], all[b], limits.tol)) hits.push_back({n, a, b});
    }
  }

  std::sort(hits.begin(), hits.end(),
            [](const Hit& x, const Hit& y) { return std::tie(x.order, x.a, x.b) < std::tie(y.order, y.a, y.b); });
  result.stats.pairs_admissible = static_cast<long>(hits.size());
  for (const Hit& h : hits) {
    if (static_cast<int>(result.pairs.size()) >= limits.max_results) break;
    const auto& ca = all[h.a];
    const auto& cb = all[h.b];
    auto rep = reverify_found_pair(ca.tree, ca.pair, cb.tree, cb.pair, limits.tol);
    if (!rep.passed()) continue;
    result.pairs.push_back(FoundPair{ca.tree, cb.tree, ca.pair, cb.pair, ca.glued, cb.glued, std::move(rep)});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Arm values are fixed by the eigenvalue and the root value
// ---------------------------------------------------------------------------

/// F_i(lambda) = f(arm[i]) / f(root), i = 0..k (F_0 = 1), from the end-of-arm
/// recursion. Empty if the root value would vanish.
inline std::vector<double> arm_ratio_profile(int k, double lambda) {
  std::vector<double> r(static_cast<std::size_t>(k + 1));
  r[k] = 1.0;
  r[k - 1] = 1.0 - lambda;
  for (int i = k - 1; i >= 1; --i) r[i - 1] = (2.0 - lambda) * r[i] - r[i + 1];
  if (std::abs(r[0]) < 1e-12 * norm_inf(r)) return {};
  const double root = r[0];
  for (double& x : r) x /= root;
  return r;
}

inline VerificationReport leaf_recursion_check(const DiscreteGraph& g, const LeafPair& pair, const Spectrum& s,
                                               double tol = 1e-9) {
  validate_leaf_pair(g, pair);
  VerificationReport rep;
  rep.claim = "leaf_recursion";
  rep.input("G", detail::describe(g));
  rep.input("pair", detail::describe(pair));
  const int k = pair.k();
  const auto flags = genericity_flags(s);
  double end_dev = 0.0, interior_dev = 0.0, ratio_dev = 0.0, arm_dev = 0.0;
  int checked = 0;
  for (int n = 0; n < s.size(); ++n) {
    if (!flags.generic(n)) continue;
    const double lam = s.eigenvalues[n];
    const auto& f = s.eigenvectors[n];
    if (std::abs(1.0 - lam) <= tol) {
      rep.note("singular end recursion at position " + std::to_string(n + 1) + " (eigenvalue 1); skipped");
      continue;
    }
    const auto ratio = arm_ratio_profile(k, lam);
    if (ratio.empty()) {
      rep.note("vanishing root ratio at position " + std::to_string(n + 1) + "; skipped");
      continue;
    }
    ++checked;
    const double scale = norm_inf(f);
    for (const auto* arm : {&pair.arm_plus, &pair.arm_minus}) {
      auto at = [&](int i) { return i == 0 ? f[pair.root] : f[(*arm)[i - 1]]; };
      end_dev = std::max(end_dev, std::abs(at(k) - at(k - 1) / (1.0 - lam)) / scale);
      for (int i = 1; i < k; ++i)
        interior_dev = std::max(interior_dev, std::abs(lam * at(i) - (2.0 * at(i) - at(i - 1) - at(i + 1))) / scale);
      for (int i = 1; i <= k; ++i) ratio_dev = std::max(ratio_dev, std::abs(at(i) - ratio[i] * at(0)) / scale);
    }
    for (int i = 1; i <= k; ++i) arm_dev = std::max(arm_dev, std::abs(f[pair.plus(i)] - f[pair.minus(i)]) / scale);
  }
  rep.input("generic_indices_checked", std::to_string(checked));
  rep.check_le("end_recursion", end_dev, tol);
  rep.check_le("interior_recursion", interior_dev, tol);
  rep.check_le("ratio_depends_only_on_lambda", ratio_dev, tol);
  rep.check_le("arms_agree", arm_dev, tol);
  return rep;
}

}  // namespace isoflip
