#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace isoflip {

/// Dense square matrix, row-major. Only what the spectral code needs.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

  /// Maximum absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (double x : row(i)) s += std::abs(x);
      best = std::max(best, s);
    }
    return best;
  }

  double max_asymmetry() const {
    double worst = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    return worst;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Raw output of the symmetric eigensolver: ascending eigenvalues and the
/// matching orthonormal eigenvectors (one vector per eigenvalue).
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// tol * ||M||_F. Eigenvectors are sign-fixed so their largest-magnitude entry
/// (first one on ties) is positive, which keeps output reproducible.
inline SymmetricEigen jacobi_eigen(const Matrix& m, double tol = 1e-14, int max_sweeps = 100) {
  const int n = m.size();
  const double scale = std::max(1.0, m.norm_inf());
  if (m.max_asymmetry() > 1e-10 * scale) throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");

  Matrix a = m;
  Matrix v(n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  double frob = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
  frob = std::sqrt(frob);

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > tol * frob) {
    if (++sweep > max_sweeps) throw std::runtime_error("jacobi_eigen: no convergence");
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (int r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });

  SymmetricEigen out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (int idx : order) {
    out.values.push_back(a(idx, idx));
    std::vector<double> vec(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) vec[r] = v(r, idx);
    int pivot = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(vec[r]) > std::abs(vec[pivot]) + 1e-12) pivot = r;
    if (vec[pivot] < 0)
      for (double& x : vec) x = -x;
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

}  // namespace isoflip
