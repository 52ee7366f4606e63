#pragma once

// Dense symmetric linear algebra for the small matrices (n <= ~8) that show
// up as metric and curvature values at a point.

#include <cmath>
#include <cstddef>
#include <vector>

#include "staticgeo/errors.hpp"

namespace staticgeo {

struct Mat {
  int n = 0;
  std::vector<double> a;  // row-major n*n

  Mat() = default;
  explicit Mat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  double max_abs() const {
    double v = 0.0;
    for (double x : a) v = std::max(v, std::abs(x));
    return v;
  }
};

inline Mat mat_mul(const Mat& x, const Mat& y) {
  Mat z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < x.n; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

namespace detail {

// Diagonally pivoted Cholesky: P A P^T = L L^T.  Fails (returns false) when a
// pivot is non-positive or the pivot ratio exceeds the conditioning guard.
struct PivotedCholesky {
  int n = 0;
  Mat L;                 // lower triangular factor, in pivoted order
  std::vector<int> perm; // perm[k] = original index of pivoted row k
  double pivot_ratio = 1.0;

  bool factor(const Mat& g, double max_ratio) {
    n = g.n;
    Mat w = g;
    L = Mat(n);
    perm.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

    double first_pivot = 0.0;
    for (int k = 0; k < n; ++k) {
      int best = k;
      for (int i = k + 1; i < n; ++i)
        if (w(perm[i], perm[i]) > w(perm[best], perm[best])) best = i;
      if (best != k) {
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(best)]);
        // rows k and best of the partial factor swap along with the permutation
        for (int j = 0; j < k; ++j) std::swap(L(k, j), L(best, j));
      }
      const int pk = perm[k];
      double d = w(pk, pk);
      if (k == 0) first_pivot = d;
      if (!(d > 0.0)) return false;
      if (first_pivot / d > max_ratio) {
        pivot_ratio = first_pivot / d;
        return false;
      }
      pivot_ratio = first_pivot / d;
      const double root = std::sqrt(d);
      L(k, k) = root;
      for (int i = k + 1; i < n; ++i) L(i, k) = w(perm[i], pk) / root;
      for (int i = k + 1; i < n; ++i)
        for (int j = k + 1; j <= i; ++j) {
          const double upd = w(perm[i], perm[j]) - L(i, k) * L(j, k);
          w(perm[i], perm[j]) = upd;
          w(perm[j], perm[i]) = upd;
        }
    }
    return true;
  }

  // Solve L y = b (forward), then L^T x = y (backward); b indexed in pivoted order.
  std::vector<double> solve(std::vector<double> b) const {
    for (int i = 0; i < n; ++i) {
      double s = b[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) s -= L(i, j) * b[static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = b[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < n; ++j) s -= L(j, i) * b[static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    return b;
  }
};

}  // namespace detail

// Inverse of a symmetric positive definite matrix via pivoted Cholesky.
// Throws SingularMetricError on non-PD input or pivot ratio above 1e12.
inline Mat spd_inverse(const Mat& g, double max_pivot_ratio = 1e12) {
  detail::PivotedCholesky chol;
  if (!chol.factor(g, max_pivot_ratio))
    throw SingularMetricError("matrix is not positive definite within conditioning limits");
  Mat inv(g.n);
  std::vector<double> e(static_cast<std::size_t>(g.n), 0.0);
  for (int c = 0; c < g.n; ++c) {
    // unit vector in pivoted order
    for (int i = 0; i < g.n; ++i)
      e[static_cast<std::size_t>(i)] = (chol.perm[static_cast<std::size_t>(i)] == c) ? 1.0 : 0.0;
    auto x = chol.solve(e);
    for (int i = 0; i < g.n; ++i) inv(chol.perm[static_cast<std::size_t>(i)], c) = x[static_cast<std::size_t>(i)];
  }
  // symmetrize away the last rounding
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

inline bool is_positive_definite(const Mat& g, double max_pivot_ratio = 1e12) {
  detail::PivotedCholesky chol;
  return chol.factor(g, max_pivot_ratio);
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> sym_eigenvalues(Mat m) {
  const int n = m.n;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = m(i, i);
  return eig;
}

// Eigenvalues of g^{-1} T for symmetric T and SPD g: transform to the
// symmetric problem L^{-1} T L^{-T} with g = L L^T.
inline std::vector<double> generalized_eigenvalues(const Mat& t, const Mat& g) {
  detail::PivotedCholesky chol;
  if (!chol.factor(g, 1e12))
    throw SingularMetricError("metric is not positive definite within conditioning limits");
  const int n = g.n;
  // Y = L^{-1} (P T P^T): forward-solve column by column, then N = Y L^{-T}
  Mat y(n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      b[static_cast<std::size_t>(i)] =
          t(chol.perm[static_cast<std::size_t>(i)], chol.perm[static_cast<std::size_t>(c)]);
    for (int i = 0; i < n; ++i) {
      double s = b[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) s -= chol.L(i, j) * b[static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] = s / chol.L(i, i);
    }
    for (int i = 0; i < n; ++i) y(i, c) = b[static_cast<std::size_t>(i)];
  }
  Mat nmat(n);
  for (int r = 0; r < n; ++r) {
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) b[static_cast<std::size_t>(c)] = y(r, c);
    for (int i = 0; i < n; ++i) {
      double s = b[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) s -= chol.L(i, j) * b[static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] = s / chol.L(i, i);
    }
    for (int c = 0; c < n; ++c) nmat(r, c) = b[static_cast<std::size_t>(c)];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (nmat(i, j) + nmat(j, i));
      nmat(i, j) = v;
      nmat(j, i) = v;
    }
  return sym_eigenvalues(nmat);
}

// Operator norm of a symmetric bilinear form T measured against SPD g.
inline double op_norm(const Mat& t, const Mat& g) {
  double v = 0.0;
  for (double lam : generalized_eigenvalues(t, g)) v = std::max(v, std::abs(lam));
  return v;
}

// Squared Frobenius norm of T against g: sum of squared eigenvalues of g^{-1}T.
inline double frobenius2(const Mat& t, const Mat& g) {
  double v = 0.0;
  for (double lam : generalized_eigenvalues(t, g)) v += lam * lam;
  return v;
}

}  // namespace staticgeo
