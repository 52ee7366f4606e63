#pragma once

// Pointwise tensor values: dense symmetric 2-tensors and Riemann-type
// 4-tensors with all indices lowered.

#include <cmath>
#include <cstddef>
#include <vector>

#include "staticgeo/linalg.hpp"

namespace staticgeo {

enum class Valence { Covariant, Contravariant };

struct SymTensor2 {
  Mat m;
  Valence valence = Valence::Covariant;

  SymTensor2() = default;
  explicit SymTensor2(int dim, Valence v = Valence::Covariant) : m(dim), valence(v) {}

  int dim() const { return m.n; }
  double& operator()(int i, int j) { return m(i, j); }
  double operator()(int i, int j) const { return m(i, j); }

  void set_sym(int i, int j, double v) {
    m(i, j) = v;
    m(j, i) = v;
  }

  double max_asymmetry() const {
    double v = 0.0;
    for (int i = 0; i < dim(); ++i)
      for (int j = i + 1; j < dim(); ++j) v = std::max(v, std::abs(m(i, j) - m(j, i)));
    return v;
  }

  SymTensor2& add_scaled(const SymTensor2& other, double c) {
    for (std::size_t k = 0; k < m.a.size(); ++k) m.a[k] += c * other.m.a[k];
    return *this;
  }
};

inline double trace(const SymTensor2& t, const Mat& ginv) {
  double s = 0.0;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) s += ginv(i, j) * t(i, j);
  return s;
}

// <T, U>_g = g^{ik} g^{jl} T_ij U_kl for covariant symmetric tensors.
inline double inner(const SymTensor2& t, const SymTensor2& u, const Mat& ginv) {
  const int n = t.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double tu = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) tu += ginv(i, k) * ginv(j, l) * u(k, l);
      s += t(i, j) * tu;
    }
  return s;
}

inline double op_norm(const SymTensor2& t, const Mat& g) { return op_norm(t.m, g); }
inline double frobenius2(const SymTensor2& t, const Mat& g) { return frobenius2(t.m, g); }

// Fully lowered curvature-type tensor R_{ijkl}.
struct Tensor4 {
  int n = 0;
  std::vector<double> a;

  Tensor4() = default;
  explicit Tensor4(int dim)
      : n(dim), a(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  double& operator()(int i, int j, int k, int l) {
    return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }

  double max_abs() const {
    double v = 0.0;
    for (double x : a) v = std::max(v, std::abs(x));
    return v;
  }
};

struct Tensor4Symmetry {
  double antisym_first = 0.0;   // R_ijkl + R_jikl
  double antisym_second = 0.0;  // R_ijkl + R_ijlk
  double pair = 0.0;            // R_ijkl - R_klij
  double first_bianchi = 0.0;   // R_ijkl + R_jkil + R_kijl
  double max() const {
    return std::max(std::max(antisym_first, antisym_second), std::max(pair, first_bianchi));
  }
};

inline Tensor4Symmetry symmetry_violation(const Tensor4& r) {
  Tensor4Symmetry v;
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j)
      for (int k = 0; k < r.n; ++k)
        for (int l = 0; l < r.n; ++l) {
          v.antisym_first = std::max(v.antisym_first, std::abs(r(i, j, k, l) + r(j, i, k, l)));
          v.antisym_second = std::max(v.antisym_second, std::abs(r(i, j, k, l) + r(i, j, l, k)));
          v.pair = std::max(v.pair, std::abs(r(i, j, k, l) - r(k, l, i, j)));
          v.first_bianchi = std::max(
              v.first_bianchi, std::abs(r(i, j, k, l) + r(j, k, i, l) + r(k, i, j, l)));
        }
  return v;
}

}  // namespace staticgeo
