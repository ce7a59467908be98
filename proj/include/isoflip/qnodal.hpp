#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "isoflip/metric.hpp"
#include "isoflip/nodal.hpp"
#include "isoflip/qspectra.hpp"
#include "isoflip/report.hpp"
#include "isoflip/union_find.hpp"

namespace isoflip {

/// Interior zeros of R sin(kx + phi) on (0, l): integers m with
/// phi/pi < m < (kl + phi)/pi. Endpoint values at or below zero_tol * scale
/// (default: the amplitude) are rejected as zeros.
inline int edge_zero_count(const EdgeWave& w, double k, double l, double zero_tol = 1e-6, double scale = 0.0) {
  if (scale <= 0.0) scale = std::max(w.amplitude, 1e-300);
  if (std::abs(w.value(k, 0.0)) <= zero_tol * scale || std::abs(w.value(k, l)) <= zero_tol * scale)
    throw NonGenericError("eigenfunction vanishes at an end of edge " + std::to_string(w.edge));
  if (k == 0.0) return 0;
  const double pi = std::numbers::pi;
  return static_cast<int>(std::ceil((k * l + w.phase) / pi) - std::floor(w.phase / pi)) - 1;
}

namespace detail {

inline std::vector<int> zero_counts(const MetricGraph& m, double k, const QEigenfunction& f, double zero_tol) {
  const double big = sup_norm(f);
  for (int v = 0; v < m.vertex_count(); ++v)
    if (std::abs(f.vertex_values[v]) <= zero_tol * big)
      throw NonGenericError("eigenfunction vanishes at vertex " + std::to_string(v));
  std::vector<int> z;
  for (int e = 0; e < m.edge_count(); ++e) z.push_back(edge_zero_count(f.waves[e], k, m.edge(e).length, zero_tol, big));
  return z;
}

}  // namespace detail

inline int q_flip_count(const MetricGraph& m, double k, const QEigenfunction& f, double zero_tol = 1e-6) {
  int s = 0;
  for (int z : detail::zero_counts(m, k, f, zero_tol)) s += z;
  return s;
}

/// Vertices joined through zero-free edges form one domain each; an edge with
/// z > 0 zeros adds z - 1 interior domains of its own.
inline int q_nodal_count(const MetricGraph& m, double k, const QEigenfunction& f, double zero_tol = 1e-6) {
  const auto z = detail::zero_counts(m, k, f, zero_tol);
  UnionFind uf(m.vertex_count());
  int interior = 0;
  for (int e = 0; e < m.edge_count(); ++e) {
    if (z[e] == 0)
      uf.unite(m.edge(e).u, m.edge(e).v);
    else
      interior += z[e] - 1;
  }
  return uf.set_count() + interior;
}

inline int q_flip_count(const MetricGraph& m, const QEigenpair& p, double zero_tol = 1e-6) {
  if (!p.generic) throw NonGenericError("flip count needs a generic eigenpair");
  return q_flip_count(m, p.k, p.basis.front(), zero_tol);
}

inline int q_nodal_count(const MetricGraph& m, const QEigenpair& p, double zero_tol = 1e-6) {
  if (!p.generic) throw NonGenericError("nodal count needs a generic eigenpair");
  return q_nodal_count(m, p.k, p.basis.front(), zero_tol);
}

/// Profiles at positions 1..n_max (multiplicity-expanded). Every copy of a
/// multiple eigenvalue is a non-generic gap.
inline std::vector<NodalProfile> q_nodal_profiles(const MetricGraph& m, const QSpectrum& s, int n_max,
                                                  double zero_tol = 1e-6) {
  std::vector<NodalProfile> out;
  for (const auto& p : s.eigenpairs)
    for (int c = 0; c < p.multiplicity && static_cast<int>(out.size()) < n_max; ++c) {
      NodalProfile row;
      row.n = static_cast<int>(out.size()) + 1;
      row.lambda = p.lambda;
      row.generic = p.generic;
      if (p.generic) {
        row.mu = q_flip_count(m, p, zero_tol);
        row.nu = q_nodal_count(m, p, zero_tol);
      }
      out.push_back(std::move(row));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Gluing leaf pairs of quantum graphs
// ---------------------------------------------------------------------------

namespace detail {

/// Value at distance s from the leaf end of a pendant edge ending at `leaf`.
inline double from_leaf_end(const MetricGraph& m, double k, const QEigenfunction& f, int e, Vertex leaf, double s) {
  const double l = m.edge(e).length;
  return f.waves[e].value(k, m.edge(e).v == leaf ? l - s : s);
}

/// Largest relative deviation from one common ratio psi/phi over sample
/// points on matching pendant edges (measured from the leaf ends).
inline double leaf_ratio_spread(const MetricGraph& g, const QEigenfunction& phi, const MetricGraph& gb,
                                const QEigenfunction& psi, double k, const std::array<int, 2>& leaves_g,
                                const std::array<int, 2>& leaves_gb, const std::array<Vertex, 2>& ends, double reach) {
  std::vector<double> ratios;
  double phi_big = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i <= 16; ++i)
      phi_big = std::max(phi_big, std::abs(from_leaf_end(g, k, phi, leaves_g[a], ends[a], reach * i / 16.0)));
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i <= 16; ++i) {
      const double s = reach * i / 16.0;
      const double p = from_leaf_end(g, k, phi, leaves_g[a], ends[a], s);
      if (std::abs(p) < 1e-3 * phi_big) continue;
      ratios.push_back(from_leaf_end(gb, k, psi, leaves_gb[a], ends[a], s) / p);
    }
  if (ratios.empty()) return 0.0;
  double spread = 0.0;
  for (double r : ratios) spread = std::max(spread, std::abs(r - ratios.front()));
  return spread / std::max(std::abs(ratios.front()), 1e-300);
}

inline std::string describe(const MetricGraph& m) {
  std::string s = "V=" + std::to_string(m.vertex_count()) + " E=" + std::to_string(m.edge_count()) + " [";
  char buf[64];
  for (int e = 0; e < m.edge_count(); ++e) {
    std::snprintf(buf, sizeof buf, "%s(%d,%d;%.12g)", e ? "," : "", m.edge(e).u, m.edge(e).v, m.edge(e).length);
    s += buf;
  }
  return s + "]";
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Lowest glue distance, from l1 upward in steps of 0.001 l, at which no
/// generic eigenfunction of the seed vanishes.
inline double nudge_glue_point(const MetricGraph& m, const QSpectrum& s, const MetricLeafPair& p, double l1,
                               double zero_tol, int& nudges) {
  const double l = m.edge(p.edge_plus).length;
  nudges = 0;
  for (; nudges < 50; ++nudges, l1 += 0.001 * l) {
    bool hits_zero = false;
    for (const auto& q : s.eigenpairs) {
      if (!q.generic) continue;
      const auto& f = q.basis.front();
      const double big = sup_norm(f);
      for (int e : {p.edge_plus, p.edge_minus}) {
        const double x = m.edge(e).u == p.root ? l1 : l - l1;
        if (std::abs(f.waves[e].value(q.k, x)) <= zero_tol * big) hits_zero = true;
      }
    }
    if (!hits_zero) return l1;
  }
  throw SecularError("no admissible glue point found near the requested l1");
}

}  // namespace detail

struct Theorem3Options {
  int n_max = 20;
  double l1_fraction = 0.4142;
  double eigenvalue_tol = 1e-6;  ///< absolute, on lambda
  SecularOptions secular{};
};

/// Glues pair1 of G1 and pair2 of G2 at the same distance l1 and compares the
/// first n_max eigenvalues and generic flip/nodal counts of the results.
inline VerificationReport verify_theorem3(const MetricGraph& g1, const MetricGraph& g2, int pair1, int pair2,
                                          const Theorem3Options& opt = {}) {
  const auto& pairs1 = g1.leaf_pairs();
  const auto& pairs2 = g2.leaf_pairs();
  if (pair1 < 0 || pair1 >= static_cast<int>(pairs1.size()) || pair2 < 0 || pair2 >= static_cast<int>(pairs2.size()))
    throw GraphError("verify_theorem3: leaf pair index out of range");
  const MetricLeafPair p1 = pairs1[pair1], p2 = pairs2[pair2];
  const double l = g1.edge(p1.edge_plus).length;
  if (std::abs(g2.edge(p2.edge_plus).length - l) > 1e-12 * l) throw GraphError("verify_theorem3: leaf lengths differ");
  const double ztol = opt.secular.zero_tol;

  VerificationReport rep;
  rep.claim = "theorem3";
  rep.input("G1", detail::describe(g1));
  rep.input("G2", detail::describe(g2));
  rep.input("pair1", std::to_string(pair1));
  rep.input("pair2", std::to_string(pair2));
  rep.input("n_max", std::to_string(opt.n_max));
  rep.note("comparison truncated to the first " + std::to_string(opt.n_max) + " eigenvalues");

  const auto s1 = secular_spectrum_count(g1, opt.n_max, opt.secular);
  const auto s2 = secular_spectrum_count(g2, opt.n_max, opt.secular);
  const auto k1 = s1.k_values(), k2 = s2.k_values();
  double pre_gap = 0.0;
  for (int n = 0; n < opt.n_max; ++n) pre_gap = std::max(pre_gap, std::abs(k1[n] * k1[n] - k2[n] * k2[n]));
  rep.require("pre_isospectral", pre_gap <= opt.eigenvalue_tol, pre_gap, opt.eigenvalue_tol);
  const auto pr1 = q_nodal_profiles(g1, s1, opt.n_max, ztol), pr2 = q_nodal_profiles(g2, s2, opt.n_max, ztol);
  rep.require("pre_profiles_match", sequences_match(pr1, pr2));
  if (!rep.find("pre_isospectral")->pass) return rep;

  int nudges1 = 0, nudges2 = 0;
  double l1 = opt.l1_fraction * l;
  l1 = detail::nudge_glue_point(g1, s1, p1, l1, ztol, nudges1);
  l1 = detail::nudge_glue_point(g2, s2, p2, l1, ztol, nudges2);
  if (nudges2 > 0) l1 = detail::nudge_glue_point(g1, s1, p1, l1, ztol, nudges1);
  rep.input("l1", detail::fmt(l1));
  if (std::abs(l1 - opt.l1_fraction * l) > 1e-15) rep.note("glue point nudged to l1=" + detail::fmt(l1));

  const MetricGraph b1 = glue_leaf_pair(g1, pair1, l1), b2 = glue_leaf_pair(g2, pair2, l1);
  const auto sb1 = secular_spectrum_count(b1, opt.n_max, opt.secular);
  const auto sb2 = secular_spectrum_count(b2, opt.n_max, opt.secular);
  const auto kb1 = sb1.k_values(), kb2 = sb2.k_values();
  double gap = 0.0;
  for (int n = 0; n < opt.n_max; ++n) gap = std::max(gap, std::abs(kb1[n] * kb1[n] - kb2[n] * kb2[n]));
  rep.check_le("isospectral", gap, opt.eigenvalue_tol);
  const auto pb1 = q_nodal_profiles(b1, sb1, opt.n_max, ztol), pb2 = q_nodal_profiles(b2, sb2, opt.n_max, ztol);
  rep.check("flip_counts_match", sequences_match(pb1, pb2, NodalQuantity::flips));
  rep.check("nodal_counts_match", sequences_match(pb1, pb2, NodalQuantity::domains));

  // Each generic eigenpair of a glued graph is an even eigenpair of its seed:
  // same k, proportional on the leaves, same flip count, nodal count down by 0 or 1.
  double ratio_spread = 0.0;
  int unmatched = 0, flip_changes = 0, chi_bad = 0, compared = 0;
  const std::array<const MetricGraph*, 2> seeds{&g1, &g2}, glued{&b1, &b2};
  const std::array<const QSpectrum*, 2> glued_spec{&sb1, &sb2};
  // Seed spectra reaching past the top compared glued eigenvalue.
  std::array<QSpectrum, 2> seed_spec;
  for (int side = 0; side < 2; ++side) {
    SecularOptions wide = opt.secular;
    wide.kmax = 1.05 * (side == 0 ? kb1 : kb2)[opt.n_max - 1] + 0.1;
    seed_spec[side] = secular_spectrum(*seeds[side], wide);
  }
  const std::array<MetricLeafPair, 2> ps{p1, p2};
  for (int side = 0; side < 2; ++side) {
    const auto& site = glued[side]->glued_sites().back();
    const MetricLeafPair& p = ps[side];
    const std::array<Vertex, 2> ends{seeds[side]->other_end(p.edge_plus, p.root),
                                     seeds[side]->other_end(p.edge_minus, p.root)};
    int position = 0;
    for (const auto& q : glued_spec[side]->eigenpairs) {
      if (position >= opt.n_max) break;
      position += q.multiplicity;
      if (!q.generic || q.k == 0.0) continue;
      const QEigenpair* match = nullptr;
      for (const auto& c : seed_spec[side].eigenpairs)
        if (std::abs(c.lambda - q.lambda) <= opt.eigenvalue_tol) match = &c;
      if (!match) {
        ++unmatched;
        continue;
      }
      if (!match->generic) continue;
      ++compared;
      ratio_spread = std::max(ratio_spread, detail::leaf_ratio_spread(*seeds[side], match->basis.front(), *glued[side],
                                                                      q.basis.front(), q.k, {p.edge_plus, p.edge_minus},
                                                                      {site.outer_plus, site.outer_minus}, ends,
                                                                      site.l2));
      if (q_flip_count(*glued[side], q, ztol) != q_flip_count(*seeds[side], *match, ztol)) ++flip_changes;
      const int chi = q_nodal_count(*glued[side], q, ztol) - q_nodal_count(*seeds[side], *match, ztol);
      if (chi != 0 && chi != -1) ++chi_bad;
    }
  }
  rep.input("generic_pairs_compared", std::to_string(compared));
  rep.check("generic_glued_eigenvalues_in_seed_spectrum", unmatched == 0, unmatched, 0);
  rep.check_le("leaf_ratio_constant", ratio_spread, 1e-6);
  rep.check("flip_count_unchanged_by_gluing", flip_changes == 0, flip_changes, 0);
  rep.check("chi_in_zero_minus_one", chi_bad == 0, chi_bad, 0);
  if (&g1 == &g2 && pair1 == pair2) rep.note("degenerate instance: both sides glue the same pair");
  return rep;
}

/// Strict interlacing, in lambda, of the odd leaf spectra before and after
/// gluing: a_n < b_n < a_{n+1} for every glued value b_n <= kmax.
inline VerificationReport interlacing_check(double l, double l1, double kmax, double tol = 1e-9) {
  VerificationReport rep;
  rep.claim = "interlacing";
  rep.input("l", detail::fmt(l));
  rep.input("l1", detail::fmt(l1));
  rep.input("kmax", detail::fmt(kmax));
  const auto b = odd_leaf_spectrum(l, l1, true, kmax);
  const double a_reach = b.empty() ? kmax : std::max(kmax, b.back()) + std::numbers::pi / l;
  const auto a = odd_leaf_spectrum(l, std::nullopt, false, a_reach);
  int violations = 0;
  double worst = INFINITY;
  for (std::size_t n = 0; n < b.size(); ++n) {
    if (n + 1 >= a.size()) {
      ++violations;
      continue;
    }
    const double an = a[n] * a[n], bn = b[n] * b[n], an1 = a[n + 1] * a[n + 1];
    const double margin = std::min(bn - an, an1 - bn);
    worst = std::min(worst, margin / an1);
    if (margin <= tol * an1) {
      ++violations;
      rep.note("non-strict at index " + std::to_string(n + 1) + ": lambda_odd=" + detail::fmt(an) +
               ", glued=" + detail::fmt(bn) + ", next=" + detail::fmt(an1));
    }
  }
  rep.input("indices_checked", std::to_string(b.size()));
  rep.check("strict_interlacing", violations == 0, violations, 0);
  if (!b.empty()) rep.input("min_relative_margin", detail::fmt(worst));
  return rep;
}

}  // namespace isoflip
