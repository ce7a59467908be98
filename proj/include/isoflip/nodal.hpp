#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflip/graph.hpp"
#include "isoflip/spectra.hpp"

namespace isoflip {

/// Raised when a nodal quantity is requested for a vector with (numerical) zeros.
class NonGenericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Edges across which f changes sign strictly.
inline std::vector<Edge> flip_set(const DiscreteGraph& g, std::span<const double> f, double zero_tol = 1e-8) {
  if (static_cast<int>(f.size()) != g.vertex_count()) throw std::invalid_argument("flip_set: vector size mismatch");
  if (!nowhere_zero(f, zero_tol)) throw NonGenericError("flip_set: non-generic vector (zero entry)");
  std::vector<Edge> flips;
  for (const Edge& e : g.edges())
    if (f[e.u] * f[e.v] < 0) flips.push_back(e);
  return flips;
}

inline int flip_count(const DiscreteGraph& g, std::span<const double> f, double zero_tol = 1e-8) {
  return static_cast<int>(flip_set(g, f, zero_tol).size());
}

/// Number of components of G once the flip edges are removed.
inline int nodal_count(const DiscreteGraph& g, std::span<const double> f, double zero_tol = 1e-8) {
  const auto flips = flip_set(g, f, zero_tol);
  return connected_components(g, flips).count;
}

struct NodalProfile {
  int n = 0;  ///< 1-based spectral position
  double lambda = 0.0;
  bool generic = false;
  std::optional<int> mu;
  std::optional<int> nu;
  std::vector<Edge> flips;
};

/// One profile per spectral position; non-generic positions stay in place as gaps.
inline std::vector<NodalProfile> nodal_profiles(const DiscreteGraph& g, const Spectrum& s) {
  const auto flags = genericity_flags(s);
  std::vector<NodalProfile> out;
  out.reserve(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.size(); ++i) {
    NodalProfile p;
    p.n = i + 1;
    p.lambda = s.eigenvalues[i];
    p.generic = flags.generic(i);
    if (p.generic) {
      p.flips = flip_set(g, s.eigenvectors[i], s.tol.zero);
      p.mu = static_cast<int>(p.flips.size());
      p.nu = connected_components(g, p.flips).count;
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct BoundRow {
  int n = 0;
  bool pass = true;
  std::string detail;
};

struct BoundsReport {
  int beta = 0;
  bool tree = false;
  std::vector<BoundRow> rows;  ///< generic indices only

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

/// n - beta <= nu_n <= n and n - 1 <= mu_n <= n - 1 + beta on generic n; on
/// trees both collapse to nu_n = mu_n + 1 = n.
inline BoundsReport check_bounds(int beta, const std::vector<NodalProfile>& profiles) {
  BoundsReport rep;
  rep.beta = beta;
  rep.tree = rep.beta == 0;
  for (const auto& p : profiles) {
    if (!p.generic || !p.mu || !p.nu) continue;
    const int n = p.n, mu = *p.mu, nu = *p.nu, b = rep.beta;
    BoundRow row{n, true, {}};
    if (nu < n - b || nu > n) {
      row.pass = false;
      row.detail += "nu=" + std::to_string(nu) + " outside [" + std::to_string(n - b) + "," + std::to_string(n) + "] ";
    }
    if (mu < n - 1 || mu > n - 1 + b) {
      row.pass = false;
      row.detail +=
          "mu=" + std::to_string(mu) + " outside [" + std::to_string(n - 1) + "," + std::to_string(n - 1 + b) + "]";
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline BoundsReport check_bounds(const DiscreteGraph& g, const std::vector<NodalProfile>& profiles) {
  return check_bounds(betti(g), profiles);
}

enum class NodalQuantity { flips, domains, both };

/// Generic index sets coincide and the chosen counts agree on every one of them.
inline bool sequences_match(const std::vector<NodalProfile>& a, const std::vector<NodalProfile>& b,
                            NodalQuantity which = NodalQuantity::both) {
  if (a.size() != b.size()) throw std::invalid_argument("sequences_match: profile sequences differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].generic != b[i].generic) return false;
    if (!a[i].generic) continue;
    if (which != NodalQuantity::domains && a[i].mu != b[i].mu) return false;
    if (which != NodalQuantity::flips && a[i].nu != b[i].nu) return false;
  }
  return true;
}

}  // namespace isoflip
