#pragma once

// Boundary geometry of a coordinate face: outward unit normal, induced
// metric, second fundamental form h(X,Y) = -<nu, D_X Y>, mean curvature
// H = tr h, umbilicity deficit, and the boundary splitting identities for
// the Laplacian.  Sign convention: the unit sphere bounding the unit ball
// in flat space has H = n-1 > 0.

#include <cmath>
#include <vector>

#include "staticgeo/cohomog1.hpp"
#include "staticgeo/curvature.hpp"

namespace staticgeo {

// Deterministic low-discrepancy sequence (radical inverse in prime bases).
inline double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

// Deterministic samples on a boundary face (the frozen coordinate is pinned,
// the rest sweep the box through a Halton sequence).  Unbounded face
// coordinates are capped.
inline std::vector<Point> face_samples(const ChartMetric& metric, const BoundaryFace& face,
                                       int count, double cap = 50.0) {
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  const int n = metric.dim();
  const double frozen = face.end == BoundaryFace::End::Lower
                            ? metric.domain()[static_cast<std::size_t>(face.coordinate)].lo
                            : metric.domain()[static_cast<std::size_t>(face.coordinate)].hi;
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    Point p(static_cast<std::size_t>(n));
    int d = 0;
    for (int i = 0; i < n; ++i) {
      if (i == face.coordinate) {
        p[static_cast<std::size_t>(i)] = frozen;
        continue;
      }
      const auto& iv = metric.domain()[static_cast<std::size_t>(i)];
      const double lo = std::isinf(iv.lo) ? -cap : iv.lo;
      const double hi = std::isinf(iv.hi) ? std::max(lo + 1.0, cap) : iv.hi;
      p[static_cast<std::size_t>(i)] = lo + (hi - lo) * halton(k, primes[d % 6]);
      ++d;
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct SecondFundamentalForm {
  SymTensor2 h;        // (n-1) x (n-1), tangential coordinate indices
  SymTensor2 induced;  // induced metric on the same indices
  double H = 0.0;      // mean curvature w.r.t. the outward normal
};

// Components of the outward unit normal, nu^i = sign * g^{ic} / sqrt(g^{cc}).
inline std::vector<double> outward_normal(const MetricJet& jet, const BoundaryFace& face) {
  const int c = face.coordinate;
  const double gcc = jet.ginv(c, c);
  if (!(gcc > 0.0)) throw SingularMetricError("face normal direction is degenerate");
  const double scale = face.outward_sign() / std::sqrt(gcc);
  std::vector<double> nu(static_cast<std::size_t>(jet.n));
  for (int i = 0; i < jet.n; ++i) nu[static_cast<std::size_t>(i)] = scale * jet.ginv(i, c);
  return nu;
}

inline SecondFundamentalForm second_fundamental_form(const ChartMetric& metric,
                                                     const BoundaryFace& face, const Point& q) {
  const int n = metric.dim();
  const int c = face.coordinate;
  const MetricJet jet = metric.jet(q, 1);
  const auto gamma = detail::christoffel_from_jet(jet);
  const double gcc = jet.ginv(c, c);
  if (!(gcc > 0.0)) throw SingularMetricError("face normal direction is degenerate");
  // nu_k = sign * delta_k^c / sqrt(g^{cc}); h_ab = -nu_k Gamma^k_ab
  const double nu_c = face.outward_sign() / std::sqrt(gcc);

  SecondFundamentalForm out;
  out.h = SymTensor2(n - 1);
  out.induced = SymTensor2(n - 1);
  std::vector<int> tang;
  for (int i = 0; i < n; ++i)
    if (i != c) tang.push_back(i);
  for (int a = 0; a < n - 1; ++a)
    for (int b = a; b < n - 1; ++b) {
      const int i = tang[static_cast<std::size_t>(a)];
      const int j = tang[static_cast<std::size_t>(b)];
      out.h.set_sym(a, b, -nu_c * gamma[static_cast<std::size_t>(c)](i, j));
      out.induced.set_sym(a, b, jet.g(i, j));
    }
  const Mat ghat_inv = spd_inverse(out.induced.m);
  out.H = trace(out.h, ghat_inv);
  return out;
}

struct BoundaryReport {
  int samples = 0;
  double h_mean = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double h_variation = 0.0;          // max - min over samples
  double umbilicity_deficit = 0.0;   // sup |h - (H/(n-1)) ghat| (operator norm)
  double normal_ricci_deficit = 0.0; // sup |Ric(tangent, nu)| (covector norm)
};

inline BoundaryReport boundary_report(const ChartMetric& metric, const BoundaryFace& face,
                                      int sample_count, double cap = 50.0) {
  if (sample_count < 1) throw InvalidArgument("boundary report needs at least one sample");
  const int n = metric.dim();
  const int c = face.coordinate;
  BoundaryReport rep;
  rep.samples = sample_count;
  bool first = true;
  for (const Point& q : face_samples(metric, face, sample_count, cap)) {
    auto sff = second_fundamental_form(metric, face, q);
    if (first) {
      rep.h_min = rep.h_max = sff.H;
      first = false;
    } else {
      rep.h_min = std::min(rep.h_min, sff.H);
      rep.h_max = std::max(rep.h_max, sff.H);
    }
    rep.h_mean += sff.H / sample_count;

    SymTensor2 tracefree = sff.h;
    tracefree.add_scaled(sff.induced, -sff.H / (n - 1));
    rep.umbilicity_deficit =
        std::max(rep.umbilicity_deficit, op_norm(tracefree, sff.induced.m));

    const MetricJet jet = metric.jet(q, 2);
    const auto nu = outward_normal(jet, face);
    const SymTensor2 ric = ricci(metric, q);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += ric(i, j) * nu[static_cast<std::size_t>(j)];
      v.push_back(s);
    }
    const Mat ghat_inv = spd_inverse(second_fundamental_form(metric, face, q).induced.m);
    double norm2 = 0.0;
    for (int a = 0; a < n - 1; ++a)
      for (int b = 0; b < n - 1; ++b)
        norm2 += ghat_inv(a, b) * v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
    rep.normal_ricci_deficit = std::max(rep.normal_ricci_deficit, std::sqrt(std::max(0.0, norm2)));
  }
  rep.h_variation = rep.h_max - rep.h_min;
  return rep;
}

// Report for a cohomogeneity-one metric through its chart realization, so the
// deficits are genuinely recomputed rather than assumed from the radial
// structure.
inline BoundaryReport boundary_report(const Cohomog1Metric& metric, int sample_count,
                                      double cap = 50.0) {
  if (!metric.boundary_end()) throw InvalidArgument("metric has no boundary face");
  ChartMetric chart = to_chart(metric, cap);
  return boundary_report(chart, *chart.face(), sample_count, cap);
}

struct BoundaryIdentityResiduals {
  // |Lap V - (Lap_face V + H V_nu + V_nunu)|: the orthogonal splitting of the
  // Laplacian, an identity for any smooth V.
  double gauss_residual = 0.0;
  // |Lap_face V + (H^2/(n-1) + Ric(nu,nu)) V|: vanishes when V satisfies both
  // the interior equations and the boundary condition.
  double laplace_split_residual = 0.0;
};

inline BoundaryIdentityResiduals boundary_identity_residual(const ChartMetric& metric,
                                                            const BoundaryFace& face,
                                                            const Expr& v, const Point& q) {
  const int n = metric.dim();
  const int c = face.coordinate;
  const ScalarField vf(metric, v);
  const MetricJet jet = metric.jet(q, 2);
  const auto nu = outward_normal(jet, face);
  const VarEnv env = metric.env_at(q);

  const double lap = laplacian(metric, vf, q);
  const SymTensor2 hess = hessian(metric, vf, q);
  double v_nu = 0.0;
  for (int i = 0; i < n; ++i) v_nu += nu[static_cast<std::size_t>(i)] * vf.d(i, env);
  double v_nunu = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      v_nunu += nu[static_cast<std::size_t>(i)] * nu[static_cast<std::size_t>(j)] * hess(i, j);

  const double H = second_fundamental_form(metric, face, q).H;

  // intrinsic face Laplacian of the restricted potential
  const ChartMetric induced = metric.induced_on_face(face);
  const Expr v_restricted =
      substitute(v, metric.coordinates()[static_cast<std::size_t>(c)], q[static_cast<std::size_t>(c)]);
  Point qhat;
  for (int i = 0; i < n; ++i)
    if (i != c) qhat.push_back(q[static_cast<std::size_t>(i)]);
  const double lap_face = laplacian(induced, v_restricted, qhat);

  const SymTensor2 ric = ricci(metric, q);
  double ric_nunu = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ric_nunu += nu[static_cast<std::size_t>(i)] * nu[static_cast<std::size_t>(j)] * ric(i, j);

  const double vv = evaluate(v, env);
  BoundaryIdentityResiduals out;
  out.gauss_residual = std::abs(lap - (lap_face + H * v_nu + v_nunu));
  out.laplace_split_residual = std::abs(lap_face + (H * H / (n - 1) + ric_nunu) * vv);
  return out;
}

}  // namespace staticgeo
