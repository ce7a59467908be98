#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflip/dense.hpp"
#include "isoflip/metric.hpp"

namespace isoflip {

class SecularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// psi(x) = R sin(k x + phi) on x in [0, l_e].
struct EdgeWave {
  int edge = 0;
  double amplitude = 0.0;
  double phase = 0.0;  ///< in [0, 2 pi)

  double value(double k, double x) const { return amplitude * std::sin(k * x + phase); }
  double derivative(double k, double x) const { return amplitude * k * std::cos(k * x + phase); }
};

/// Real eigenfunction with unit L2 norm.
struct QEigenfunction {
  std::vector<double> vertex_values;
  std::vector<EdgeWave> waves;  ///< one per edge, indexed by edge id
};

struct QEigenpair {
  double k = 0.0;
  double lambda = 0.0;
  int multiplicity = 1;
  double sigma_min = 0.0;  ///< smallest singular value of I - U(k) at the root
  std::vector<QEigenfunction> basis;
  bool generic = false;
};

struct SecularOptions {
  double kmax = 10.0;
  double grid_density = 20.0;  ///< grid samples per mean eigenvalue spacing pi / L
  double multiplicity_tol = 1e-7;
  double zero_tol = 1e-6;  ///< relative vertex-value threshold for genericity
  bool keep_trace = false;
};

struct QSpectrum {
  std::vector<QEigenpair> eigenpairs;  ///< distinct k, ascending
  std::vector<std::array<double, 2>> trace;  ///< (k, sigma_min) on the scan grid

  /// Total count with multiplicity.
  int size() const {
    int n = 0;
    for (const auto& p : eigenpairs) n += p.multiplicity;
    return n;
  }

  /// k at 1-based spectral positions 1..size(), repeated by multiplicity.
  std::vector<double> k_values() const {
    std::vector<double> out;
    for (const auto& p : eigenpairs) out.insert(out.end(), static_cast<std::size_t>(p.multiplicity), p.k);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Bond scattering
// ---------------------------------------------------------------------------

namespace detail {

inline Vertex bond_origin(const MetricGraph& m, int b) { return b % 2 == 0 ? m.edge(b / 2).u : m.edge(b / 2).v; }
inline Vertex bond_terminus(const MetricGraph& m, int b) { return b % 2 == 0 ? m.edge(b / 2).v : m.edge(b / 2).u; }

}  // namespace detail

/// Neumann vertex scattering on directed bonds: S[b'][b] = 2/d - [b' reverses b]
/// when b ends where b' starts.
inline Eigen::MatrixXd scattering_matrix(const MetricGraph& m) {
  const int nb = 2 * m.edge_count();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nb, nb);
  for (int b = 0; b < nb; ++b) {
    const Vertex v = detail::bond_terminus(m, b);
    const double d = m.degree(v);
    for (int e : m.incident(v))
      for (int bp : {2 * e, 2 * e + 1})
        if (detail::bond_origin(m, bp) == v) s(bp, b) = 2.0 / d - ((bp ^ 1) == b ? 1.0 : 0.0);
  }
  return s;
}

/// U(k) = S diag(exp(i k l_b)).
inline Eigen::MatrixXcd bond_evolution(const MetricGraph& m, const Eigen::MatrixXd& s, double k) {
  const int nb = 2 * m.edge_count();
  Eigen::MatrixXcd u(nb, nb);
  for (int b = 0; b < nb; ++b) {
    const std::complex<double> ph = std::polar(1.0, k * m.edge(b / 2).length);
    u.col(b) = s.col(b).cast<std::complex<double>>() * ph;
  }
  return u;
}

inline Eigen::MatrixXcd bond_evolution(const MetricGraph& m, double k) {
  return bond_evolution(m, scattering_matrix(m), k);
}

inline Eigen::VectorXd secular_singular_values(const MetricGraph& m, const Eigen::MatrixXd& s, double k) {
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(s.rows(), s.cols()) - bond_evolution(m, s, k);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
}

inline double smallest_singular_value(const MetricGraph& m, const Eigen::MatrixXd& s, double k) {
  const auto sv = secular_singular_values(m, s, k);
  return sv(sv.size() - 1);
}

/// Real secular function det(I - U) / sqrt(det U); its sign changes bracket
/// eigenvalues of odd multiplicity.
inline double secular_z(const MetricGraph& m, const Eigen::MatrixXd& s, double det_s, double k) {
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(s.rows(), s.cols()) - bond_evolution(m, s, k);
  const std::complex<double> det = a.partialPivLu().determinant();
  const std::complex<double> root_det_s = det_s > 0 ? 1.0 : std::complex<double>(0.0, 1.0);
  return (det / root_det_s * std::polar(1.0, -k * m.total_length())).real();
}

// ---------------------------------------------------------------------------
// Eigenfunctions
// ---------------------------------------------------------------------------

namespace detail {

/// Real function A cos(kx) + B sin(kx) per edge.
struct CosSin {
  std::vector<double> a, b;
};

/// Integral over [0,l] of (a1 cos + b1 sin)(a2 cos + b2 sin).
inline double edge_inner(double k, double l, double a1, double b1, double a2, double b2) {
  if (k == 0.0) return a1 * a2 * l;
  const double cc = 0.5 * l + std::sin(2 * k * l) / (4 * k);
  const double ss = 0.5 * l - std::sin(2 * k * l) / (4 * k);
  const double cs = std::sin(k * l) * std::sin(k * l) / (2 * k);
  return a1 * a2 * cc + b1 * b2 * ss + (a1 * b2 + b1 * a2) * cs;
}

inline double l2_inner(const MetricGraph& m, double k, const CosSin& f, const CosSin& g) {
  double s = 0.0;
  for (int e = 0; e < m.edge_count(); ++e) s += edge_inner(k, m.edge(e).length, f.a[e], f.b[e], g.a[e], g.b[e]);
  return s;
}

inline QEigenfunction to_eigenfunction(const MetricGraph& m, double k, const CosSin& f) {
  QEigenfunction out;
  out.vertex_values.assign(static_cast<std::size_t>(m.vertex_count()), 0.0);
  std::vector<int> hits(static_cast<std::size_t>(m.vertex_count()), 0);
  for (int e = 0; e < m.edge_count(); ++e) {
    const double l = m.edge(e).length;
    out.vertex_values[m.edge(e).u] += f.a[e];
    out.vertex_values[m.edge(e).v] += f.a[e] * std::cos(k * l) + f.b[e] * std::sin(k * l);
    ++hits[m.edge(e).u];
    ++hits[m.edge(e).v];
  }
  for (int v = 0; v < m.vertex_count(); ++v) out.vertex_values[v] /= hits[v];
  std::size_t big = 0;
  for (std::size_t v = 1; v < out.vertex_values.size(); ++v)
    if (std::abs(out.vertex_values[v]) > std::abs(out.vertex_values[big]) * (1 + 1e-12)) big = v;
  const double sign = out.vertex_values[big] < 0 ? -1.0 : 1.0;
  for (double& x : out.vertex_values) x *= sign;
  for (int e = 0; e < m.edge_count(); ++e) {
    const double a = sign * f.a[e], b = sign * f.b[e];
    double phi = std::atan2(a, b);
    if (phi < 0) phi += 2 * std::numbers::pi;
    out.waves.push_back({e, std::hypot(a, b), phi});
  }
  return out;
}

}  // namespace detail

/// Orthonormal real basis of the eigenspace at k from the null space of I - U(k).
inline std::vector<QEigenfunction> eigenspace(const MetricGraph& m, double k, int multiplicity) {
  if (k == 0.0) {
    detail::CosSin c{std::vector<double>(m.edge_count(), 1.0 / std::sqrt(m.total_length())),
                     std::vector<double>(m.edge_count(), 0.0)};
    return {detail::to_eigenfunction(m, 0.0, c)};
  }
  const Eigen::MatrixXd s = scattering_matrix(m);
  const int nb = static_cast<int>(s.rows());
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(nb, nb) - bond_evolution(m, s, k);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  std::vector<detail::CosSin> cand;
  for (int j = 0; j < multiplicity; ++j) {
    const Eigen::VectorXcd x = svd.matrixV().col(nb - 1 - j);
    detail::CosSin re{std::vector<double>(m.edge_count()), std::vector<double>(m.edge_count())};
    detail::CosSin im = re;
    for (int e = 0; e < m.edge_count(); ++e) {
      const std::complex<double> c1 = x(2 * e), c2 = x(2 * e + 1) * std::polar(1.0, k * m.edge(e).length);
      const std::complex<double> ca = c1 + c2, cb = std::complex<double>(0.0, 1.0) * (c1 - c2);
      re.a[e] = ca.real();
      re.b[e] = cb.real();
      im.a[e] = ca.imag();
      im.b[e] = cb.imag();
    }
    cand.push_back(std::move(re));
    cand.push_back(std::move(im));
  }
  const int nc = static_cast<int>(cand.size());
  Matrix gram(nc);
  for (int i = 0; i < nc; ++i)
    for (int j = i; j < nc; ++j) gram(i, j) = gram(j, i) = detail::l2_inner(m, k, cand[i], cand[j]);
  const auto ge = jacobi_eigen(gram);
  const double top = ge.values.back();
  if (ge.values[nc - multiplicity] <= 1e-8 * top)
    throw SecularError("eigenspace at k=" + std::to_string(k) + " is numerically degenerate");
  std::vector<QEigenfunction> out;
  for (int j = nc - 1; j >= nc - multiplicity; --j) {
    detail::CosSin f{std::vector<double>(m.edge_count(), 0.0), std::vector<double>(m.edge_count(), 0.0)};
    const double scale = 1.0 / std::sqrt(ge.values[j]);
    for (int i = 0; i < nc; ++i)
      for (int e = 0; e < m.edge_count(); ++e) {
        f.a[e] += scale * ge.vectors[j][i] * cand[i].a[e];
        f.b[e] += scale * ge.vectors[j][i] * cand[i].b[e];
      }
    out.push_back(detail::to_eigenfunction(m, k, f));
  }
  return out;
}

/// max |psi| over the whole graph (the largest edge amplitude).
inline double sup_norm(const QEigenfunction& f) {
  double s = norm_inf(f.vertex_values);
  for (const auto& w : f.waves) s = std::max(s, w.amplitude);
  return s;
}

struct VertexResidual {
  double continuity = 0.0;  ///< max endpoint mismatch against vertex values, relative to sup |psi|
  double current = 0.0;  ///< max |sum of outgoing derivatives|, relative to k sup |psi|
};

inline VertexResidual vertex_condition_residual(const MetricGraph& m, double k, const QEigenfunction& f) {
  VertexResidual r;
  // sup |psi| rather than the vertex values: modes vanishing on every vertex are legitimate.
  const double scale = std::max(sup_norm(f), 1e-300);
  std::vector<double> flux(static_cast<std::size_t>(m.vertex_count()), 0.0);
  for (int e = 0; e < m.edge_count(); ++e) {
    const auto& w = f.waves[e];
    const double l = m.edge(e).length;
    r.continuity = std::max(r.continuity, std::abs(w.value(k, 0.0) - f.vertex_values[m.edge(e).u]) / scale);
    r.continuity = std::max(r.continuity, std::abs(w.value(k, l) - f.vertex_values[m.edge(e).v]) / scale);
    flux[m.edge(e).u] += w.derivative(k, 0.0);
    flux[m.edge(e).v] -= w.derivative(k, l);
  }
  const double dscale = std::max(k, 1.0) * scale;
  for (double x : flux) r.current = std::max(r.current, std::abs(x) / dscale);
  return r;
}

/// Simple, and no vertex value within zero_tol * sup |psi| of zero.
inline bool quantum_generic(const QEigenpair& p, double zero_tol) {
  if (p.multiplicity != 1 || p.basis.empty()) return false;
  const auto& vv = p.basis.front().vertex_values;
  const double big = sup_norm(p.basis.front());
  return std::all_of(vv.begin(), vv.end(), [&](double x) { return std::abs(x) > zero_tol * big; });
}

// ---------------------------------------------------------------------------
// Secular root finding
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double golden_minimise(F&& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 300 && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

template <class F>
double bisect_sign_change(F&& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fa > 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

inline int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace detail

/// Eigenpairs with 0 <= k <= kmax. Scans the smallest singular value of
/// I - U(k) on a uniform grid, refines every local minimum, and cross-checks
/// the odd-multiplicity roots against sign changes of the real secular function.
inline QSpectrum secular_spectrum(const MetricGraph& m, const SecularOptions& opt) {
  if (!(opt.kmax > 0.0)) throw std::invalid_argument("secular_spectrum: kmax must be positive");
  if (!(opt.grid_density > 0.0)) throw std::invalid_argument("secular_spectrum: grid density must be positive");
  const Eigen::MatrixXd s = scattering_matrix(m);
  const double det_s = s.determinant();
  const double dk = std::numbers::pi / (opt.grid_density * m.total_length());
  const int n_grid = static_cast<int>(std::ceil(opt.kmax / dk)) + 3;

  std::vector<double> ks(static_cast<std::size_t>(n_grid)), sig(ks.size()), zs(ks.size());
  for (int i = 0; i < n_grid; ++i) {
    ks[i] = (i + 1) * dk;
    sig[i] = smallest_singular_value(m, s, ks[i]);
    zs[i] = secular_z(m, s, det_s, ks[i]);
  }

  QSpectrum out;
  if (opt.keep_trace)
    for (int i = 0; i < n_grid; ++i)
      if (ks[i] <= opt.kmax) out.trace.push_back({ks[i], sig[i]});

  auto sigma = [&](double k) { return smallest_singular_value(m, s, k); };
  auto zf = [&](double k) { return secular_z(m, s, det_s, k); };
  const double kres = 1e-13 * std::max(1.0, opt.kmax);
  const double accept = 10.0 * opt.multiplicity_tol;

  struct Root {
    double k;
    int mult;
    double smin;
  };
  std::vector<Root> roots;
  for (int i = 1; i + 1 < n_grid; ++i) {
    if (!(sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1])) continue;
    double k = detail::golden_minimise(sigma, ks[i - 1], ks[i + 1], kres);
    double smin = sigma(k);
    if (detail::sign_of(zs[i - 1]) * detail::sign_of(zs[i + 1]) < 0) {
      const double kb = detail::bisect_sign_change(zf, ks[i - 1], ks[i + 1]);
      const double sb = sigma(kb);
      if (sb <= smin) {
        k = kb;
        smin = sb;
      }
    }
    if (smin > accept) continue;
    const auto sv = secular_singular_values(m, s, k);
    int mult = 0;
    for (int j = 0; j < sv.size(); ++j)
      if (sv(j) < opt.multiplicity_tol) ++mult;
    roots.push_back({k, std::max(mult, 1), smin});
  }
  // A sign change of the secular function proves a root in its cell. Roots
  // whose singular-value dip merged with a neighbour's are recovered here.
  const double eps = 1e-9 * dk;
  for (int i = 0; i + 2 < n_grid; ++i) {
    if (detail::sign_of(zs[i]) * detail::sign_of(zs[i + 1]) >= 0) continue;
    const bool found = std::any_of(roots.begin(), roots.end(), [&](const Root& r) {
      return r.mult % 2 == 1 && r.k >= ks[i] - eps && r.k <= ks[i + 1] + eps;
    });
    if (found) continue;
    const double k = detail::bisect_sign_change(zf, ks[i], ks[i + 1]);
    const auto sv = secular_singular_values(m, s, k);
    const double smin = sv(sv.size() - 1);
    if (smin > accept)
      throw SecularError("grid too coarse: sign change without a resolvable root in [" + std::to_string(ks[i]) + ", " +
                         std::to_string(ks[i + 1]) + "]; increase grid density");
    int mult = 0;
    for (int j = 0; j < sv.size(); ++j)
      if (sv(j) < opt.multiplicity_tol) ++mult;
    roots.push_back({k, std::max(mult, 1), smin});
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.k < b.k; });
  for (std::size_t r = 1; r < roots.size(); ++r)
    if (roots[r].k - roots[r - 1].k < 1e-3 * dk)
      throw SecularError("grid too coarse: refined roots collide near k=" + std::to_string(roots[r].k) +
                         "; increase grid density");

  // Every odd-multiplicity root needs a sign change next to it; otherwise an
  // unresolved cluster hides behind a single dip.
  for (const Root& r : roots) {
    if (r.mult % 2 == 0 || r.k < ks[1] || r.k > ks[n_grid - 3]) continue;
    bool change = false;
    for (int i = 0; i + 1 < n_grid && !change; ++i)
      if (ks[i + 1] >= r.k - dk - eps && ks[i] <= r.k + dk + eps &&
          detail::sign_of(zs[i]) * detail::sign_of(zs[i + 1]) < 0)
        change = true;
    if (!change)
      throw SecularError("grid too coarse: unresolved root cluster near k=" + std::to_string(r.k) +
                         "; increase grid density");
  }

  QEigenpair zero;
  zero.k = 0.0;
  zero.multiplicity = 1;
  zero.basis = eigenspace(m, 0.0, 1);
  zero.generic = quantum_generic(zero, opt.zero_tol);
  out.eigenpairs.push_back(std::move(zero));
  for (const Root& r : roots) {
    if (r.k > opt.kmax * (1 + 1e-9)) continue;
    QEigenpair p;
    p.k = r.k;
    p.lambda = r.k * r.k;
    p.multiplicity = r.mult;
    p.sigma_min = r.smin;
    p.basis = eigenspace(m, r.k, r.mult);
    p.generic = quantum_generic(p, opt.zero_tol);
    out.eigenpairs.push_back(std::move(p));
  }
  return out;
}

/// Smallest kmax (grown geometrically) whose spectrum holds at least `count`
/// eigenvalues with the last cluster closed off by a larger eigenvalue.
inline QSpectrum secular_spectrum_count(const MetricGraph& m, int count, SecularOptions opt) {
  opt.kmax = std::numbers::pi * (count + 1) / m.total_length();
  for (int attempt = 0; attempt < 40; ++attempt) {
    auto spec = secular_spectrum(m, opt);
    if (spec.size() > count) return spec;
    opt.kmax *= 1.3;
  }
  throw SecularError("could not collect " + std::to_string(count) + " eigenvalues");
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

inline constexpr long kFdNodeCap = 2'000'000;

/// Lowest `count` eigenvalues lambda of a lumped-mass linear finite-element
/// discretisation with max(2, round(l * ppu)) intervals per edge. Eigenvalues
/// are isolated by bisection on the inertia of A - sigma B, with each edge's
/// interior chain eliminated exactly and the vertex Schur complement
/// diagonalised densely.
inline std::vector<double> fd_oracle(const MetricGraph& m, double points_per_unit, int count = 15) {
  if (points_per_unit < 100) throw std::invalid_argument("fd_oracle: need at least 100 points per unit length");
  std::vector<int> cells(static_cast<std::size_t>(m.edge_count()));
  long nodes = m.vertex_count();
  for (int e = 0; e < m.edge_count(); ++e) {
    cells[e] = std::max(2, static_cast<int>(std::lround(m.edge(e).length * points_per_unit)));
    nodes += cells[e] - 1;
  }
  if (nodes > kFdNodeCap)
    throw std::invalid_argument("fd_oracle: " + std::to_string(nodes) + " nodes exceeds the cap of " +
                                std::to_string(kFdNodeCap));

  const int nv = m.vertex_count();
  // Number of eigenvalues strictly below sigma.
  auto below = [&](double sigma) {
    Matrix schur(nv);
    int negative = 0;
    for (int e = 0; e < m.edge_count(); ++e) {
      const int n = cells[e];
      const double h = m.edge(e).length / n;
      const Vertex u = m.edge(e).u, v = m.edge(e).v;
      const double ends = 1.0 / h - sigma * h / 2.0;
      schur(u, u) += ends;
      schur(v, v) += ends;
      const double d = 2.0 / h - sigma * h, off2 = 1.0 / (h * h);
      double c = d, g = -1.0 / h;  // pivot and fill towards u
      for (int i = 1; i < n; ++i) {
        if (c == 0.0) c = 1e-300;
        if (c < 0) ++negative;
        const bool last = i == n - 1;
        schur(u, u) -= g * g / c;
        if (last) {
          schur(v, v) -= off2 / c;
          schur(u, v) += g / (h * c);
          schur(v, u) += g / (h * c);
        } else {
          g = g / (h * c);
          c = d - off2 / c;
        }
      }
    }
    for (double x : jacobi_eigen(schur).values)
      if (x < 0) ++negative;
    return negative;
  };

  std::vector<double> out;
  double hi = 1.0;
  for (int j = 0; j < count; ++j) {
    while (below(hi) <= j) hi *= 2.0;
    double lo = j == 0 ? -1.0 : out.back();
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (below(mid) <= j)
        lo = mid;
      else
        hi = mid;
    }
    out.push_back(0.5 * (lo + hi));
    hi = std::max({hi, 2.0 * out.back(), 1.0});
  }
  return out;
}

/// Closed-form k of the odd (arm-antisymmetric) modes of one l-leaf-pair below
/// kmax. Unglued: Dirichlet at the root, Neumann at the leaf end. Glued at l1:
/// Dirichlet-Dirichlet on [0,l1] and Dirichlet-Neumann on [l1,l].
inline std::vector<double> odd_leaf_spectrum(double l, std::optional<double> l1, bool glued, double kmax) {
  const double pi = std::numbers::pi;
  if (!(l > 0.0)) throw std::invalid_argument("odd_leaf_spectrum: leaf length must be positive");
  std::vector<double> out;
  if (!glued) {
    for (int m = 0; (2 * m + 1) * pi / (2 * l) <= kmax; ++m) out.push_back((2 * m + 1) * pi / (2 * l));
    return out;
  }
  if (!l1 || !(*l1 > 0.0 && *l1 < l)) throw std::invalid_argument("odd_leaf_spectrum: need 0 < l1 < l when glued");
  const double l2 = l - *l1;
  for (int m = 1; m * pi / *l1 <= kmax; ++m) out.push_back(m * pi / *l1);
  for (int m = 0; (2 * m + 1) * pi / (2 * l2) <= kmax; ++m) out.push_back((2 * m + 1) * pi / (2 * l2));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace isoflip
