#pragma once

// Curvature of a coordinate-chart metric.  Conventions:
//   R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z,
//   R_{ijkl} = <R(d_i, d_j) d_k, d_l>,
//   Ric(Y,Z) = trace(X -> R(X,Y)Z),   R = tr_g Ric,
// so the unit round sphere has Ric = (n-1) g.  All coordinate derivatives of
// the metric come from exact symbolic trees; first derivatives of the Ricci
// tensor (needed for divergences and dR) are assembled by the chain rule from
// third metric derivatives, with no numerical differencing anywhere.

#include <vector>

#include "staticgeo/chart.hpp"
#include "staticgeo/tensor.hpp"

namespace staticgeo {

// Gamma[k][i][j] = Gamma^k_{ij}
using Christoffel = std::vector<Mat>;

namespace detail {

inline Christoffel christoffel_from_jet(const MetricJet& jet) {
  const int n = jet.n;
  Christoffel gamma(static_cast<std::size_t>(n), Mat(n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += jet.ginv(k, l) * (jet.dg[static_cast<std::size_t>(i)](j, l) +
                                 jet.dg[static_cast<std::size_t>(j)](i, l) -
                                 jet.dg[static_cast<std::size_t>(l)](i, j));
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
        gamma[static_cast<std::size_t>(k)](j, i) = 0.5 * s;
      }
  return gamma;
}

// d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
inline std::vector<Mat> dginv_from_jet(const MetricJet& jet) {
  const int n = jet.n;
  std::vector<Mat> dginv(static_cast<std::size_t>(n), Mat(n));
  for (int m = 0; m < n; ++m) {
    Mat tmp = mat_mul(jet.ginv, mat_mul(jet.dg[static_cast<std::size_t>(m)], jet.ginv));
    for (auto& x : tmp.a) x = -x;
    dginv[static_cast<std::size_t>(m)] = tmp;
  }
  return dginv;
}

// dGamma[m][k](i,j) = d_m Gamma^k_{ij}
inline std::vector<Christoffel> christoffel_partials_from_jet(const MetricJet& jet,
                                                              const std::vector<Mat>& dginv) {
  const int n = jet.n;
  std::vector<Christoffel> dgamma(static_cast<std::size_t>(n),
                                  Christoffel(static_cast<std::size_t>(n), Mat(n)));
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            const double c = jet.dg[static_cast<std::size_t>(i)](j, l) +
                             jet.dg[static_cast<std::size_t>(j)](i, l) -
                             jet.dg[static_cast<std::size_t>(l)](i, j);
            const double dc = jet.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)](j, l) +
                              jet.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)](i, l) -
                              jet.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)](i, j);
            s += dginv[static_cast<std::size_t>(m)](k, l) * c + jet.ginv(k, l) * dc;
          }
          dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)](i, j) = 0.5 * s;
          dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)](j, i) = 0.5 * s;
        }
  return dgamma;
}

// ddGamma[q][m][k](i,j) = d_q d_m Gamma^k_{ij}; needs third metric derivatives.
inline std::vector<std::vector<Christoffel>> christoffel_second_partials_from_jet(
    const MetricJet& jet, const std::vector<Mat>& dginv) {
  const int n = jet.n;
  // dd(g^{-1})[q][m]
  std::vector<std::vector<Mat>> ddginv(static_cast<std::size_t>(n),
                                       std::vector<Mat>(static_cast<std::size_t>(n), Mat(n)));
  for (int q = 0; q < n; ++q)
    for (int m = 0; m < n; ++m) {
      Mat t1 = mat_mul(dginv[static_cast<std::size_t>(q)],
                       mat_mul(jet.dg[static_cast<std::size_t>(m)], jet.ginv));
      Mat t2 = mat_mul(jet.ginv,
                       mat_mul(jet.ddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)], jet.ginv));
      Mat t3 = mat_mul(jet.ginv,
                       mat_mul(jet.dg[static_cast<std::size_t>(m)], dginv[static_cast<std::size_t>(q)]));
      Mat out(n);
      for (std::size_t x = 0; x < out.a.size(); ++x) out.a[x] = -(t1.a[x] + t2.a[x] + t3.a[x]);
      ddginv[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)] = out;
    }

  std::vector<std::vector<Christoffel>> ddgamma(
      static_cast<std::size_t>(n),
      std::vector<Christoffel>(static_cast<std::size_t>(n),
                               Christoffel(static_cast<std::size_t>(n), Mat(n))));
  for (int q = 0; q < n; ++q)
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) {
              const double c = jet.dg[static_cast<std::size_t>(i)](j, l) +
                               jet.dg[static_cast<std::size_t>(j)](i, l) -
                               jet.dg[static_cast<std::size_t>(l)](i, j);
              const double dc_m = jet.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)](j, l) +
                                  jet.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)](i, l) -
                                  jet.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)](i, j);
              const double dc_q = jet.ddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)](j, l) +
                                  jet.ddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)](i, l) -
                                  jet.ddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(l)](i, j);
              const double ddc =
                  jet.dddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)][static_cast<std::size_t>(i)](j, l) +
                  jet.dddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)][static_cast<std::size_t>(j)](i, l) -
                  jet.dddg[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)][static_cast<std::size_t>(l)](i, j);
              s += ddginv[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)](k, l) * c +
                   dginv[static_cast<std::size_t>(m)](k, l) * dc_q +
                   dginv[static_cast<std::size_t>(q)](k, l) * dc_m + jet.ginv(k, l) * ddc;
            }
            ddgamma[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)][static_cast<std::size_t>(k)](i, j) = 0.5 * s;
            ddgamma[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)][static_cast<std::size_t>(k)](j, i) = 0.5 * s;
          }
  return ddgamma;
}

inline SymTensor2 ricci_from_pieces(int n, const Christoffel& gamma,
                                    const std::vector<Christoffel>& dgamma) {
  SymTensor2 ric(n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)](j, k) -
             dgamma[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)](i, k);
        for (int m = 0; m < n; ++m)
          s += gamma[static_cast<std::size_t>(i)](i, m) * gamma[static_cast<std::size_t>(m)](j, k) -
               gamma[static_cast<std::size_t>(i)](j, m) * gamma[static_cast<std::size_t>(m)](i, k);
      }
      ric.set_sym(j, k, s);
    }
  return ric;
}

}  // namespace detail

inline Christoffel christoffel(const ChartMetric& metric, const Point& p) {
  return detail::christoffel_from_jet(metric.jet(p, 1));
}

inline Tensor4 riemann(const ChartMetric& metric, const Point& p) {
  const MetricJet jet = metric.jet(p, 2);
  const int n = jet.n;
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const auto dgamma = detail::christoffel_partials_from_jet(jet, dginv);
  Tensor4 rm(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // Rupper^m_{ijk}, then lower the output slot
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            double r_m = dgamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)](j, k) -
                         dgamma[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)](i, k);
            for (int a = 0; a < n; ++a)
              r_m += gamma[static_cast<std::size_t>(m)](i, a) * gamma[static_cast<std::size_t>(a)](j, k) -
                     gamma[static_cast<std::size_t>(m)](j, a) * gamma[static_cast<std::size_t>(a)](i, k);
            s += jet.g(l, m) * r_m;
          }
          rm(i, j, k, l) = s;
        }
      }
  return rm;
}

inline SymTensor2 ricci(const ChartMetric& metric, const Point& p) {
  const MetricJet jet = metric.jet(p, 2);
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const auto dgamma = detail::christoffel_partials_from_jet(jet, dginv);
  return detail::ricci_from_pieces(jet.n, gamma, dgamma);
}

inline double scalar(const ChartMetric& metric, const Point& p) {
  const MetricJet jet = metric.jet(p, 2);
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const auto dgamma = detail::christoffel_partials_from_jet(jet, dginv);
  return trace(detail::ricci_from_pieces(jet.n, gamma, dgamma), jet.ginv);
}

// dRic[l](j,k) = d_l Ric_{jk}, exact.
inline std::vector<SymTensor2> ricci_partials(const ChartMetric& metric, const Point& p) {
  const MetricJet jet = metric.jet(p, 3);
  const int n = jet.n;
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const auto dgamma = detail::christoffel_partials_from_jet(jet, dginv);
  const auto ddgamma = detail::christoffel_second_partials_from_jet(jet, dginv);
  std::vector<SymTensor2> dric(static_cast<std::size_t>(n), SymTensor2(n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          s += ddgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)][static_cast<std::size_t>(i)](j, k) -
               ddgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)][static_cast<std::size_t>(i)](i, k);
          for (int m = 0; m < n; ++m)
            s += dgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)](i, m) *
                     gamma[static_cast<std::size_t>(m)](j, k) +
                 gamma[static_cast<std::size_t>(i)](i, m) *
                     dgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)](j, k) -
                 dgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)](j, m) *
                     gamma[static_cast<std::size_t>(m)](i, k) -
                 gamma[static_cast<std::size_t>(i)](j, m) *
                     dgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)](i, k);
        }
        dric[static_cast<std::size_t>(l)].set_sym(j, k, s);
      }
  return dric;
}

// Differential of the scalar curvature, dR_l = d_l R, exact.
inline std::vector<double> scalar_gradient(const ChartMetric& metric, const Point& p) {
  const MetricJet jet = metric.jet(p, 3);
  const int n = jet.n;
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const auto dgamma = detail::christoffel_partials_from_jet(jet, dginv);
  const SymTensor2 ric = detail::ricci_from_pieces(n, gamma, dgamma);
  const auto dric = ricci_partials(metric, p);
  std::vector<double> dr(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        s += dginv[static_cast<std::size_t>(l)](j, k) * ric(j, k) +
             jet.ginv(j, k) * dric[static_cast<std::size_t>(l)](j, k);
    dr[static_cast<std::size_t>(l)] = s;
  }
  return dr;
}

// A scalar function on a chart with its exact first and second derivative trees.
class ScalarField {
public:
  ScalarField(const ChartMetric& metric, Expr f) : f_(std::move(f)) {
    const auto& coords = metric.coordinates();
    const int n = static_cast<int>(coords.size());
    d1_.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) d1_.push_back(differentiate(f_, coords[static_cast<std::size_t>(k)]));
    d2_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      d2_[static_cast<std::size_t>(k)].reserve(static_cast<std::size_t>(n - k));
      for (int l = k; l < n; ++l)
        d2_[static_cast<std::size_t>(k)].push_back(
            differentiate(d1_[static_cast<std::size_t>(k)], coords[static_cast<std::size_t>(l)]));
    }
  }

  const Expr& expr() const { return f_; }
  double value(const VarEnv& env) const { return evaluate(f_, env); }
  double d(int k, const VarEnv& env) const { return evaluate(d1_[static_cast<std::size_t>(k)], env); }
  double dd(int k, int l, const VarEnv& env) const {
    if (k > l) std::swap(k, l);
    return evaluate(d2_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k)], env);
  }

private:
  Expr f_;
  std::vector<Expr> d1_;
  std::vector<std::vector<Expr>> d2_;
};

inline SymTensor2 hessian(const ChartMetric& metric, const ScalarField& f, const Point& p) {
  const MetricJet jet = metric.jet(p, 1);
  const auto gamma = detail::christoffel_from_jet(jet);
  const VarEnv env = metric.env_at(p);
  const int n = jet.n;
  SymTensor2 h(n);
  std::vector<double> df(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) df[static_cast<std::size_t>(k)] = f.d(k, env);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = f.dd(i, j, env);
      for (int k = 0; k < n; ++k) s -= gamma[static_cast<std::size_t>(k)](i, j) * df[static_cast<std::size_t>(k)];
      h.set_sym(i, j, s);
    }
  return h;
}

inline SymTensor2 hessian(const ChartMetric& metric, const Expr& f, const Point& p) {
  return hessian(metric, ScalarField(metric, f), p);
}

inline double laplacian(const ChartMetric& metric, const ScalarField& f, const Point& p) {
  const Mat ginv = spd_inverse(metric.value(p));
  return trace(hessian(metric, f, p), ginv);
}

inline double laplacian(const ChartMetric& metric, const Expr& f, const Point& p) {
  return laplacian(metric, ScalarField(metric, f), p);
}

// A symmetric 2-tensor field given componentwise as expressions, with exact
// first-derivative trees.
class SymExprField {
public:
  SymExprField(const ChartMetric& metric, std::vector<std::vector<Expr>> upper_tri) {
    const auto& coords = metric.coordinates();
    n_ = static_cast<int>(coords.size());
    if (static_cast<int>(upper_tri.size()) != n_)
      throw InvalidArgument("tensor field: wrong number of component rows");
    comp_.resize(static_cast<std::size_t>(n_ * (n_ + 1) / 2));
    for (int i = 0; i < n_; ++i) {
      if (static_cast<int>(upper_tri[static_cast<std::size_t>(i)].size()) != n_ - i)
        throw InvalidArgument("tensor field: bad component row length");
      for (int j = i; j < n_; ++j)
        comp_[tri(i, j)] = upper_tri[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)];
    }
    d1_.resize(comp_.size());
    for (std::size_t t = 0; t < comp_.size(); ++t)
      for (int k = 0; k < n_; ++k)
        d1_[t].push_back(differentiate(comp_[t], coords[static_cast<std::size_t>(k)]));
  }

  int dim() const { return n_; }

  SymTensor2 value(const VarEnv& env) const {
    SymTensor2 t(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) t.set_sym(i, j, evaluate(comp_[tri(i, j)], env));
    return t;
  }

  SymTensor2 partial(int k, const VarEnv& env) const {
    SymTensor2 t(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        t.set_sym(i, j, evaluate(d1_[tri(i, j)][static_cast<std::size_t>(k)], env));
    return t;
  }

private:
  std::size_t tri(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
  }

  int n_ = 0;
  std::vector<Expr> comp_;
  std::vector<std::vector<Expr>> d1_;
};

namespace detail {

// (div T)_j = g^{ik} (d_i T_kj - Gamma^l_ik T_lj - Gamma^l_ij T_kl)
inline std::vector<double> divergence_pointwise(const MetricJet& jet, const Christoffel& gamma,
                                                const SymTensor2& t,
                                                const std::vector<SymTensor2>& dt) {
  const int n = jet.n;
  std::vector<double> div(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double term = dt[static_cast<std::size_t>(i)](k, j);
        for (int l = 0; l < n; ++l)
          term -= gamma[static_cast<std::size_t>(l)](i, k) * t(l, j) +
                  gamma[static_cast<std::size_t>(l)](i, j) * t(k, l);
        s += jet.ginv(i, k) * term;
      }
    div[static_cast<std::size_t>(j)] = s;
  }
  return div;
}

}  // namespace detail

inline std::vector<double> divergence_symtensor(const ChartMetric& metric, const SymExprField& t,
                                                const Point& p) {
  const MetricJet jet = metric.jet(p, 1);
  const auto gamma = detail::christoffel_from_jet(jet);
  const VarEnv env = metric.env_at(p);
  const SymTensor2 tv = t.value(env);
  std::vector<SymTensor2> dt;
  dt.reserve(static_cast<std::size_t>(jet.n));
  for (int k = 0; k < jet.n; ++k) dt.push_back(t.partial(k, env));
  return detail::divergence_pointwise(jet, gamma, tv, dt);
}

// Divergence of the Ricci tensor itself, with d(Ric) computed exactly.
inline std::vector<double> divergence_ricci(const ChartMetric& metric, const Point& p) {
  const MetricJet jet = metric.jet(p, 2);
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const auto dgamma = detail::christoffel_partials_from_jet(jet, dginv);
  const SymTensor2 ric = detail::ricci_from_pieces(jet.n, gamma, dgamma);
  const auto dric = ricci_partials(metric, p);
  return detail::divergence_pointwise(jet, gamma, ric, dric);
}

}  // namespace staticgeo
