#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadhull/symmat.hpp"

namespace quadhull {

// Thrown when an iterative kernel fails to reach its tolerance; carries the
// residual it got stuck at.
struct NumericsError : std::runtime_error {
  double residual;
  explicit NumericsError(const std::string& what, double res = 0.0)
      : std::runtime_error(what), residual(res) {}
};

struct EigDecomposition {
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // eigenvectors[k] pairs with eigenvalues[k]
};

// Cyclic Jacobi. Dimensions here stay small (<= ~60), where plane rotations
// are both simple and backward stable.
inline EigDecomposition eigendecompose(const SymMatrix& M) {
  const int n = M.dim();
  if (n < 1) throw std::invalid_argument("eigendecompose: empty matrix");
  std::vector<double> a(M.raw());
  std::vector<double> V(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double v = a[static_cast<std::size_t>(p) * n + q];
        s += v * v;
      }
    return std::sqrt(2.0 * s);
  };

  const double scale = 1.0 + M.frobenius_norm();
  const double stop = 1e-14 * scale;
  const int max_sweeps = 30;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[static_cast<std::size_t>(p) * n + q];
        if (std::abs(apq) <= stop / (10.0 * n * n)) continue;
        const double app = a[static_cast<std::size_t>(p) * n + p];
        const double aqq = a[static_cast<std::size_t>(q) * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a[static_cast<std::size_t>(p) * n + p] = app - t * apq;
        a[static_cast<std::size_t>(q) * n + q] = aqq + t * apq;
        a[static_cast<std::size_t>(p) * n + q] = 0.0;
        a[static_cast<std::size_t>(q) * n + p] = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a[static_cast<std::size_t>(r) * n + p];
            const double arq = a[static_cast<std::size_t>(r) * n + q];
            const double nrp = arp - s * (arq + tau * arp);
            const double nrq = arq + s * (arp - tau * arq);
            a[static_cast<std::size_t>(r) * n + p] = nrp;
            a[static_cast<std::size_t>(p) * n + r] = nrp;
            a[static_cast<std::size_t>(r) * n + q] = nrq;
            a[static_cast<std::size_t>(q) * n + r] = nrq;
          }
          const double vrp = V[static_cast<std::size_t>(r) * n + p];
          const double vrq = V[static_cast<std::size_t>(r) * n + q];
          V[static_cast<std::size_t>(r) * n + p] = vrp - s * (vrq + tau * vrp);
          V[static_cast<std::size_t>(r) * n + q] = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  const double residual = off_norm();
  if (residual > stop)
    throw NumericsError("eigendecompose: Jacobi did not converge in 30 sweeps", residual);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return a[static_cast<std::size_t>(i) * n + i] < a[static_cast<std::size_t>(j) * n + j];
  });

  EigDecomposition e;
  e.eigenvalues.resize(n);
  e.eigenvectors.assign(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    const int c = order[k];
    e.eigenvalues[k] = a[static_cast<std::size_t>(c) * n + c];
    for (int r = 0; r < n; ++r) e.eigenvectors[k][r] = V[static_cast<std::size_t>(r) * n + c];
  }
  return e;
}

inline double min_eigenvalue(const SymMatrix& M) {
  return eigendecompose(M).eigenvalues.front();
}

inline double max_eigenvalue(const SymMatrix& M) {
  return eigendecompose(M).eigenvalues.back();
}

// true iff min eigenvalue >= -tol * (1 + ||M||_F)
inline bool psd_cone_projection_check(const SymMatrix& M, double tol) {
  if (tol < 0.0) throw std::invalid_argument("psd_cone_projection_check: tol < 0");
  return min_eigenvalue(M) >= -tol * (1.0 + M.frobenius_norm());
}

// Count of eigenvalues with |lambda| > tol * max(1, |lambda|_max).
// Default tolerance sits above interior-point solution noise (~1e-8).
inline int numerical_rank(const SymMatrix& M, double tol = 1e-7) {
  if (tol <= 0.0) throw std::invalid_argument("numerical_rank: tol must be > 0");
  const auto e = eigendecompose(M);
  double amax = 0.0;
  for (double v : e.eigenvalues) amax = std::max(amax, std::abs(v));
  const double thr = tol * std::max(1.0, amax);
  int r = 0;
  for (double v : e.eigenvalues)
    if (std::abs(v) > thr) ++r;
  return r;
}

// Moore-Penrose inverse through the eigendecomposition; eigenvalues below
// rel_tol * max(1, |lambda|_max) are treated as zero.
inline SymMatrix pseudo_inverse(const SymMatrix& M, double rel_tol = 1e-10) {
  const auto e = eigendecompose(M);
  double amax = 0.0;
  for (double v : e.eigenvalues) amax = std::max(amax, std::abs(v));
  const double thr = rel_tol * std::max(1.0, amax);
  SymMatrix r(M.dim());
  for (int k = 0; k < M.dim(); ++k) {
    if (std::abs(e.eigenvalues[k]) <= thr) continue;
    const double w = 1.0 / e.eigenvalues[k];
    const auto& v = e.eigenvectors[k];
    for (int i = 0; i < M.dim(); ++i)
      for (int j = i; j < M.dim(); ++j) r.set(i, j, r(i, j) + w * v[i] * v[j]);
  }
  return r;
}

// Projector onto the span of eigenvectors with eigenvalue > rel_tol-threshold.
inline SymMatrix range_projector(const SymMatrix& M, double rel_tol = 1e-7) {
  const auto e = eigendecompose(M);
  double amax = 0.0;
  for (double v : e.eigenvalues) amax = std::max(amax, std::abs(v));
  const double thr = rel_tol * std::max(1.0, amax);
  SymMatrix p(M.dim());
  for (int k = 0; k < M.dim(); ++k) {
    if (e.eigenvalues[k] <= thr) continue;
    const auto& v = e.eigenvectors[k];
    for (int i = 0; i < M.dim(); ++i)
      for (int j = i; j < M.dim(); ++j) p.set(i, j, p(i, j) + v[i] * v[j]);
  }
  return p;
}

// Nearest PSD matrix (eigenvalue clipping).
inline SymMatrix psd_clip(const SymMatrix& M) {
  const auto e = eigendecompose(M);
  SymMatrix r(M.dim());
  for (int k = 0; k < M.dim(); ++k) {
    if (e.eigenvalues[k] <= 0.0) continue;
    const auto& v = e.eigenvectors[k];
    for (int i = 0; i < M.dim(); ++i)
      for (int j = i; j < M.dim(); ++j)
        r.set(i, j, r(i, j) + e.eigenvalues[k] * v[i] * v[j]);
  }
  return r;
}

// ---------- Cholesky (used by the interior-point solver) ----------

struct Cholesky {
  int n = 0;
  std::vector<double> L;  // row-major lower triangle (full storage)
  bool ok = false;
};

inline Cholesky cholesky(const SymMatrix& M) {
  Cholesky ch;
  ch.n = M.dim();
  const int n = ch.n;
  ch.L.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = M(i, j);
      for (int k = 0; k < j; ++k)
        s -= ch.L[static_cast<std::size_t>(i) * n + k] * ch.L[static_cast<std::size_t>(j) * n + k];
      if (i == j) {
        if (s <= 0.0) return ch;  // not (numerically) positive definite
        ch.L[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
      } else {
        ch.L[static_cast<std::size_t>(i) * n + j] = s / ch.L[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  ch.ok = true;
  return ch;
}

inline std::vector<double> chol_solve(const Cholesky& ch, std::vector<double> b) {
  const int n = ch.n;
  for (int i = 0; i < n; ++i) {  // L y = b
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= ch.L[static_cast<std::size_t>(i) * n + k] * b[k];
    b[i] = s / ch.L[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {  // L^T x = y
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= ch.L[static_cast<std::size_t>(k) * n + i] * b[k];
    b[i] = s / ch.L[static_cast<std::size_t>(i) * n + i];
  }
  return b;
}

inline SymMatrix chol_inverse(const Cholesky& ch) {
  const int n = ch.n;
  std::vector<std::vector<double>> cols(n);
  std::vector<double> e(n, 0.0);
  for (int c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    cols[c] = chol_solve(ch, e);
  }
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.set(i, j, 0.5 * (cols[j][i] + cols[i][j]));
  return out;
}

}  // namespace quadhull
