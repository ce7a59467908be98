#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "isoflip/dense.hpp"
#include "isoflip/graph.hpp"

namespace isoflip {

/// Relative tolerances deciding genericity.
struct Tolerances {
  double degeneracy = 1e-8;  ///< relative to the spectral diameter
  double zero = 1e-8;        ///< relative to ||f||_inf
};

struct Spectrum {
  std::vector<double> eigenvalues;                ///< ascending
  std::vector<std::vector<double>> eigenvectors;  ///< orthonormal, one per eigenvalue
  Tolerances tol;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  /// Gap scale used for degeneracy decisions.
  double scale() const {
    if (eigenvalues.empty()) return 1.0;
    const double diam = eigenvalues.back() - eigenvalues.front();
    return diam > 0 ? diam : std::max(1.0, std::abs(eigenvalues.front()));
  }
};

/// Dense symmetric eigensolve. Post: ||M - Q diag(l) Q^T||_inf <= 10 tol ||M||_inf.
inline Spectrum eig_sym(const Matrix& m, double tol = 1e-14, Tolerances flags_tol = {}) {
  auto raw = jacobi_eigen(m, tol);
  return Spectrum{std::move(raw.values), std::move(raw.vectors), flags_tol};
}

inline Spectrum laplacian_spectrum(const DiscreteGraph& g, Tolerances tol = {}) {
  return eig_sym(laplacian(g), 1e-14, tol);
}

struct GenericityFlags {
  std::vector<bool> simple;
  std::vector<bool> nowhere_zero;

  bool generic(int n) const { return simple[n] && nowhere_zero[n]; }
  int size() const { return static_cast<int>(simple.size()); }
};

inline bool nowhere_zero(std::span<const double> f, double zero_tol) {
  const double big = norm_inf(f);
  if (big == 0.0) return false;
  return std::all_of(f.begin(), f.end(), [&](double x) { return std::abs(x) > zero_tol * big; });
}

inline GenericityFlags genericity_flags(const Spectrum& s) {
  const int n = s.size();
  const double gap_tol = s.tol.degeneracy * s.scale();
  GenericityFlags flags;
  flags.simple.assign(static_cast<std::size_t>(n), true);
  flags.nowhere_zero.assign(static_cast<std::size_t>(n), true);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && s.eigenvalues[i] - s.eigenvalues[i - 1] <= gap_tol) flags.simple[i] = false;
    if (i + 1 < n && s.eigenvalues[i + 1] - s.eigenvalues[i] <= gap_tol) flags.simple[i] = false;
    flags.nowhere_zero[i] = nowhere_zero(s.eigenvectors[i], s.tol.zero);
  }
  return flags;
}

inline double max_eigenvalue_gap(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spectra have different dimensions");
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
  return worst;
}

inline double isospectral_bound(const Spectrum& a, const Spectrum& b, double tol) {
  double big = 0.0;
  for (double x : a.eigenvalues) big = std::max(big, std::abs(x));
  for (double x : b.eigenvalues) big = std::max(big, std::abs(x));
  return tol * (1.0 + big);
}

/// max_n |l_n(a) - l_n(b)| <= tol (1 + max|l|).
inline bool is_isospectral(const Spectrum& a, const Spectrum& b, double tol = 1e-9) {
  return max_eigenvalue_gap(a, b) <= isospectral_bound(a, b, tol);
}

/// Max-norm residual ||M f - l f||_inf.
inline double eigen_residual(const Matrix& m, std::span<const double> f, double lambda) {
  auto y = m.apply(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - lambda * f[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Leaf-exchange symmetry
// ---------------------------------------------------------------------------

enum class Parity : std::uint8_t { even, odd, mixed };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "mixed";
  }
}

struct SymmetryClassification {
  std::vector<Parity> labels;
  Spectrum adapted;  ///< same eigenvalues, eigenvectors rotated into even/odd within clusters
};

namespace detail {

inline std::vector<double> permute(std::span<const double> f, std::span<const Vertex> perm) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[perm[i]] = f[i];
  return out;
}

inline Parity parity_of(std::span<const double> f, std::span<const Vertex> perm, double tol) {
  const auto pf = permute(f, perm);
  const double scale = std::max(norm_inf(f), 1e-300);
  double even_dev = 0.0, odd_dev = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    even_dev = std::max(even_dev, std::abs(pf[i] - f[i]));
    odd_dev = std::max(odd_dev, std::abs(pf[i] + f[i]));
  }
  if (even_dev <= tol * scale) return Parity::even;
  if (odd_dev <= tol * scale) return Parity::odd;
  return Parity::mixed;
}

/// Modified Gram-Schmidt keeping vectors whose residual norm exceeds drop.
inline std::vector<std::vector<double>> orthonormalize(std::vector<std::vector<double>> in, double drop) {
  std::vector<std::vector<double>> basis;
  // Largest first, so well-conditioned directions anchor the basis.
  std::stable_sort(in.begin(), in.end(), [](const auto& a, const auto& b) { return norm2(a) > norm2(b); });
  for (auto v : in) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    const double nv = norm2(v);
    if (nv <= drop) continue;
    for (double& x : v) x /= nv;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

/// Labels each eigenvector even/odd under the arm exchange. Inside a
/// degenerate cluster the eigenvectors are first re-projected onto the even
/// and odd subspaces, so `mixed` only appears if that re-projection fails.
inline SymmetryClassification leaf_symmetry_classify(const DiscreteGraph& g, const LeafPair& pair, const Spectrum& s,
                                                     double tol = 1e-8) {
  const int n = g.vertex_count();
  if (s.size() != n) throw std::invalid_argument("leaf_symmetry_classify: spectrum size mismatch");
  const auto perm = exchange_permutation(n, pair);
  if (!is_automorphism(g, perm)) throw GraphError("leaf_symmetry_classify: arm exchange is not a graph symmetry");

  SymmetryClassification out;
  out.adapted = s;
  out.labels.assign(static_cast<std::size_t>(n), Parity::mixed);
  const double gap_tol = s.tol.degeneracy * s.scale();

  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && s.eigenvalues[end] - s.eigenvalues[end - 1] <= gap_tol) ++end;
    if (end - start > 1) {
      std::vector<std::vector<double>> evens, odds;
      for (int i = start; i < end; ++i) {
        const auto& f = s.eigenvectors[i];
        const auto pf = detail::permute(f, perm);
        std::vector<double> e(f.size()), o(f.size());
        for (std::size_t r = 0; r < f.size(); ++r) {
          e[r] = 0.5 * (f[r] + pf[r]);
          o[r] = 0.5 * (f[r] - pf[r]);
        }
        evens.push_back(std::move(e));
        odds.push_back(std::move(o));
      }
      auto eb = detail::orthonormalize(std::move(evens), 1e-6);
      auto ob = detail::orthonormalize(std::move(odds), 1e-6);
      if (static_cast<int>(eb.size() + ob.size()) == end - start) {
        int slot = start;
        for (auto* basis : {&eb, &ob})
          for (auto& v : *basis) {
            int pivot = 0;
            for (int r = 1; r < n; ++r)
              if (std::abs(v[r]) > std::abs(v[pivot]) + 1e-12) pivot = r;
            if (v[pivot] < 0)
              for (double& x : v) x = -x;
            out.adapted.eigenvectors[slot++] = std::move(v);
          }
      }
    }
    for (int i = start; i < end; ++i) out.labels[i] = detail::parity_of(out.adapted.eigenvectors[i], perm, tol);
    start = end;
  }
  return out;
}

/// gamma(i) = delta(i, plus(j)) - delta(i, minus(j)).
inline std::vector<double> pair_gamma(int vertex_count, const LeafPair& pair, int j) {
  std::vector<double> gamma(static_cast<std::size_t>(vertex_count), 0.0);
  gamma[pair.plus(j)] = 1.0;
  gamma[pair.minus(j)] = -1.0;
  return gamma;
}

/// True iff L(gbar) == L(g) + gamma gamma^T entrywise.
inline bool rank_one_check(const DiscreteGraph& g, const DiscreteGraph& gbar, const LeafPair& pair, int j) {
  if (g.vertex_count() != gbar.vertex_count()) return false;
  if (j < 1 || j > pair.k()) return false;
  const auto gamma = pair_gamma(g.vertex_count(), pair, j);
  const Matrix l = laplacian(g), lbar = laplacian(gbar);
  for (int r = 0; r < l.size(); ++r)
    for (int c = 0; c < l.size(); ++c)
      if (lbar(r, c) != l(r, c) + gamma[r] * gamma[c]) return false;
  return true;
}

}  // namespace isoflip
