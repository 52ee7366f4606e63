#pragma once

// The static operators and pointwise identities:
//   L* u   = -(Lap u) g + Hess u - u Ric
//   Phi* u = (L* u, u_nu ghat - u h)
//   S      = Ric + H^2/(n-1) g          (H a constant supplied by the caller)
// together with the local identity satisfied by a static potential V with
// constant scalar curvature,
//   V |S|^2 = div(S(DV,.)) + (R+H^2)/(n-1) (R + n H^2/(n-1)) V,
// where div(S(DV,.)) = <Hess V, S> + (div S).DV.  Both the combined and the
// split form of the divergence term are computed.  Everything degenerate
// about V -> 0 on the boundary is evaluated in the V-multiplied form.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "staticgeo/boundary.hpp"
#include "staticgeo/cohomog1.hpp"
#include "staticgeo/curvature.hpp"

namespace staticgeo {

// ---------------------------------------------------------------------------
// chart versions

inline SymTensor2 l_star(const ChartMetric& metric, const ScalarField& u, const Point& p) {
  const int n = metric.dim();
  const Mat g = metric.value(p);
  const Mat ginv = spd_inverse(g);
  const SymTensor2 hess = hessian(metric, u, p);
  const SymTensor2 ric = ricci(metric, p);
  const double lap = trace(hess, ginv);
  const double uv = u.value(metric.env_at(p));
  SymTensor2 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out.set_sym(i, j, -lap * g(i, j) + hess(i, j) - uv * ric(i, j));
  return out;
}

inline SymTensor2 l_star(const ChartMetric& metric, const Expr& u, const Point& p) {
  return l_star(metric, ScalarField(metric, u), p);
}

struct PhiStar {
  SymTensor2 interior;  // L* u at q
  SymTensor2 boundary;  // u_nu ghat - u h on tangential indices
};

inline PhiStar phi_star(const ChartMetric& metric, const BoundaryFace& face, const Expr& u,
                        const Point& q) {
  const ScalarField uf(metric, u);
  PhiStar out;
  out.interior = l_star(metric, uf, q);
  const MetricJet jet = metric.jet(q, 1);
  const auto nu = outward_normal(jet, face);
  const VarEnv env = metric.env_at(q);
  double u_nu = 0.0;
  for (int i = 0; i < metric.dim(); ++i) u_nu += nu[static_cast<std::size_t>(i)] * uf.d(i, env);
  const double uv = uf.value(env);
  auto sff = second_fundamental_form(metric, face, q);
  out.boundary = sff.induced;
  for (auto& x : out.boundary.m.a) x *= u_nu;
  out.boundary.add_scaled(sff.h, -uv);
  return out;
}

inline SymTensor2 s_tensor(const ChartMetric& metric, double h_const, const Point& p) {
  const int n = metric.dim();
  SymTensor2 s = ricci(metric, p);
  const Mat g = metric.value(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) += h_const * h_const / (n - 1) * g(i, j);
  return s;
}

struct LocalIdentityTerms {
  double lhs = 0.0;             // V |S|^2
  double div_term = 0.0;        // div(S(DV,.)) assembled directly
  double div_term_split = 0.0;  // <Hess V, S> + (div S).DV
  double pinching_term = 0.0;   // (R+H^2)/(n-1) (R + n H^2/(n-1)) V
  double residual = 0.0;        // |lhs - div_term - pinching_term|
};

inline LocalIdentityTerms local_identity_terms(const ChartMetric& metric, const Expr& v,
                                               double h_const, const Point& p) {
  const int n = metric.dim();
  const MetricJet jet = metric.jet(p, 1);
  const auto gamma = detail::christoffel_from_jet(jet);
  const auto dginv = detail::dginv_from_jet(jet);
  const ScalarField vf(metric, v);
  const VarEnv env = metric.env_at(p);

  // constant scalar curvature is part of the identity's hypotheses
  const double rs = scalar(metric, p);
  {
    const auto dr = scalar_gradient(metric, p);
    double norm = 0.0;
    for (double x : dr) norm = std::max(norm, std::abs(x));
    if (norm > 1e-6 * (1.0 + std::abs(rs)))
      throw InvalidArgument("local identity requires constant scalar curvature");
  }

  const SymTensor2 ric = ricci(metric, p);
  const auto dric = ricci_partials(metric, p);
  const double h2n = h_const * h_const / (n - 1);
  SymTensor2 s = ric;
  SymTensor2 gten(n);
  gten.m = jet.g;
  s.add_scaled(gten, h2n);

  const SymTensor2 hess = hessian(metric, vf, p);
  const double vv = vf.value(env);

  LocalIdentityTerms out;
  out.lhs = vv * frobenius2(s, jet.g);

  // split form
  const auto div_ric = detail::divergence_pointwise(jet, gamma, ric, dric);
  std::vector<double> dv_up(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double x = 0.0;
    for (int k = 0; k < n; ++k) x += jet.ginv(j, k) * vf.d(k, env);
    dv_up[static_cast<std::size_t>(j)] = x;
  }
  double div_dot_dv = 0.0;
  for (int j = 0; j < n; ++j)
    div_dot_dv += div_ric[static_cast<std::size_t>(j)] * dv_up[static_cast<std::size_t>(j)];
  out.div_term_split = inner(hess, s, jet.ginv) + div_dot_dv;

  // direct form: omega_j = S_jk g^{kl} d_l V, then div omega
  std::vector<double> omega(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double x = 0.0;
    for (int k = 0; k < n; ++k) x += s(j, k) * dv_up[static_cast<std::size_t>(k)];
    omega[static_cast<std::size_t>(j)] = x;
  }
  double div_omega = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // d_i omega_j
      double domega = 0.0;
      for (int k = 0; k < n; ++k) {
        double ds_jk = dric[static_cast<std::size_t>(i)](j, k) +
                       h2n * jet.dg[static_cast<std::size_t>(i)](j, k);
        double ddv_k = 0.0;
        for (int l = 0; l < n; ++l)
          ddv_k += dginv[static_cast<std::size_t>(i)](k, l) * vf.d(l, env) +
                   jet.ginv(k, l) * vf.dd(i, l, env);
        domega += ds_jk * dv_up[static_cast<std::size_t>(k)] + s(j, k) * ddv_k;
      }
      double corr = 0.0;
      for (int l = 0; l < n; ++l)
        corr += gamma[static_cast<std::size_t>(l)](i, j) * omega[static_cast<std::size_t>(l)];
      div_omega += jet.ginv(i, j) * (domega - corr);
    }
  out.div_term = div_omega;

  out.pinching_term = (rs + h_const * h_const) / (n - 1) *
                      (rs + static_cast<double>(n) / (n - 1) * h_const * h_const) * vv;
  out.residual = std::abs(out.lhs - out.div_term - out.pinching_term);
  return out;
}

inline double local_identity_residual(const ChartMetric& metric, const Expr& v, double h_const,
                                      const Point& p) {
  return local_identity_terms(metric, v, h_const, p).residual;
}

// ---------------------------------------------------------------------------
// radial versions

// All radial trees for one (metric, V, H) triple, built once and evaluated
// anywhere in the domain.
class StaticRadialSystem {
public:
  StaticRadialSystem(const Cohomog1Metric& metric, Expr v, double h_const)
      : metric_(&metric), pot_(metric, std::move(v)), h_const_(h_const) {
    const int n = metric.dim();
    const double h2n = h_const * h_const / (n - 1);
    const Expr& v_ = pot_.v();

    s_tt_ = metric.ric_tt_expr() + Expr::constant(h2n);
    s_tan_ = metric.ric_tan_expr() + Expr::constant(h2n);
    l_star_tt_ = Expr::constant(0.0) - pot_.laplacian() + pot_.vpp() - v_ * metric.ric_tt_expr();
    l_star_tan_ = Expr::constant(0.0) - pot_.laplacian() + pot_.hess_tan() -
                  v_ * metric.ric_tan_expr();
    trace_identity_ = pot_.laplacian() + metric.scalar_expr() / Expr::constant(n - 1) * v_;

    // local identity pieces
    lhs_ = v_ * (s_tt_ * s_tt_ + Expr::constant(n - 1) * s_tan_ * s_tan_);
    Expr fp_over_f = metric.warp_prime_expr() / metric.warp();
    div_s_t_ = metric.arclength_derivative(s_tt_) +
               Expr::constant(n - 1) * fp_over_f * (s_tt_ - s_tan_);
    Expr hess_dot_s = pot_.vpp() * s_tt_ + Expr::constant(n - 1) * pot_.hess_tan() * s_tan_;
    div_split_ = hess_dot_s + div_s_t_ * pot_.vp();
    Expr omega = pot_.vp() * s_tt_;
    div_direct_ = metric.arclength_derivative(omega) + Expr::constant(n - 1) * fp_over_f * omega;
    pinch_coeff_ = (metric.scalar_expr() + Expr::constant(h_const * h_const)) /
                   Expr::constant(n - 1) *
                   (metric.scalar_expr() +
                    Expr::constant(static_cast<double>(n) / (n - 1) * h_const * h_const));

    const double lambda = h_const / (n - 1);
    q_ = pot_.vp() * pot_.vp() - Expr::constant(lambda * lambda) * v_ * v_;
    q_prime_ = metric.arclength_derivative(q_);

    // flux integrand coefficients on an s-slice, per unit fiber volume times
    // the fiber volume (area = B^{n-1} Vol):
    flux_s_density_ = pot_.vp() * s_tt_ * metric.area_expr();
    flux_ric_lambda_density_ =
        pot_.vp() * (metric.ric_tt_expr() + Expr::constant(n - 1)) * metric.area_expr();
    // volume integrands for the truncated identity
    lhs_volume_integrand_ = lhs_ * metric.volume_density_expr();
    v_volume_integrand_ = v_ * metric.volume_density_expr();
  }

  const Cohomog1Metric& metric() const { return *metric_; }
  const RadialPotential& potential() const { return pot_; }
  double h_const() const { return h_const_; }
  double lambda() const { return h_const_ / (metric_->dim() - 1); }

  double eval(const Expr& e, double s) const { return metric_->eval(e, s); }

  const Expr& s_tt() const { return s_tt_; }
  const Expr& s_tan() const { return s_tan_; }
  const Expr& l_star_tt() const { return l_star_tt_; }
  const Expr& l_star_tan() const { return l_star_tan_; }
  const Expr& trace_identity() const { return trace_identity_; }
  const Expr& q() const { return q_; }
  const Expr& q_prime() const { return q_prime_; }
  const Expr& flux_s_density() const { return flux_s_density_; }
  const Expr& flux_ric_lambda_density() const { return flux_ric_lambda_density_; }
  const Expr& lhs_volume_integrand() const { return lhs_volume_integrand_; }
  const Expr& v_volume_integrand() const { return v_volume_integrand_; }

  double l_star_norm(double s) const {
    return std::max(std::abs(eval(l_star_tt_, s)), std::abs(eval(l_star_tan_, s)));
  }

  LocalIdentityTerms local_identity(double s) const {
    LocalIdentityTerms out;
    out.lhs = eval(lhs_, s);
    out.div_term = eval(div_direct_, s);
    out.div_term_split = eval(div_split_, s);
    out.pinching_term = eval(pinch_coeff_, s) * pot_.value(s);
    out.residual = std::abs(out.lhs - out.div_term - out.pinching_term);
    return out;
  }

  // |V_nu ghat - V h| at the boundary in operator norm; independent of the
  // outward orientation.
  double admissibility_residual() const {
    const double sb = metric_->boundary_value();
    const double fp_over_f =
        eval(metric_->warp_prime_expr(), sb) / eval(metric_->warp(), sb);
    return std::abs(pot_.prime(sb) - pot_.value(sb) * fp_over_f);
  }

private:
  const Cohomog1Metric* metric_;
  RadialPotential pot_;
  double h_const_;

  Expr s_tt_, s_tan_;
  Expr l_star_tt_, l_star_tan_;
  Expr trace_identity_;
  Expr lhs_, div_s_t_, div_split_, div_direct_, pinch_coeff_;
  Expr q_, q_prime_;
  Expr flux_s_density_, flux_ric_lambda_density_;
  Expr lhs_volume_integrand_, v_volume_integrand_;
};

struct RadialLStar {
  double tt = 0.0;
  double tan = 0.0;
  double norm() const { return std::max(std::abs(tt), std::abs(tan)); }
};

inline RadialLStar l_star_radial(const Cohomog1Metric& metric, const Expr& u, double s) {
  StaticRadialSystem sys(metric, u, 0.0);
  return {sys.eval(sys.l_star_tt(), s), sys.eval(sys.l_star_tan(), s)};
}

struct RadialPhiStar {
  RadialLStar interior;
  double boundary = 0.0;  // operator norm of u_nu ghat - u h
};

inline RadialPhiStar phi_star_radial(const Cohomog1Metric& metric, const Expr& u) {
  StaticRadialSystem sys(metric, u, 0.0);
  RadialPhiStar out;
  const double sb = metric.boundary_value();
  out.interior = {sys.eval(sys.l_star_tt(), sb), sys.eval(sys.l_star_tan(), sb)};
  out.boundary = sys.admissibility_residual();
  return out;
}

struct RadialSTensor {
  double tt = 0.0;
  double tan = 0.0;
};

inline RadialSTensor s_tensor_radial(const Cohomog1Metric& metric, double h_const, double s) {
  const auto c = curvature_radial(metric, s);
  const double h2n = h_const * h_const / (metric.dim() - 1);
  return {c.ric_tt + h2n, c.ric_tan + h2n};
}

inline double local_identity_residual(const Cohomog1Metric& metric, const Expr& v, double h_const,
                                      double s) {
  return StaticRadialSystem(metric, v, h_const).local_identity(s).residual;
}

// ---------------------------------------------------------------------------
// full verification

struct VerifyPlan {
  int interior_samples = 200;
  int boundary_samples = 32;
  double cap = 50.0;         // truncation of unbounded domains
  double tolerance = 1e-8;   // residual tolerance for the verdicts
  double h_mismatch_warning = 1e-6;
};

struct StaticReport {
  double interior_residual = 0.0;       // sup |L* V| over interior samples
  double trace_residual = 0.0;          // sup |Lap V + R/(n-1) V|
  double trace_compat_residual = 0.0;   // sup |tr L*V + (n-1)(Lap V + R/(n-1)V)|
  double admissibility_residual = 0.0;  // sup |V_nu ghat - V h| over the boundary
  double r_constancy = 0.0;             // max - min of R over samples
  double r_value = 0.0;                 // mean R over samples
  double boundary_h = 0.0;              // mean curvature found at the boundary
  double h_const_used = 0.0;
  bool h_mismatch = false;
  bool has_boundary = true;
  double sup_v = 0.0;
  int interior_samples = 0;
  double tolerance = 1e-8;
  bool is_static_potential = false;
  bool is_admissible = false;
};

// Interior sample coordinates: uniform midpoints of the (possibly truncated)
// domain, endpoints excluded so a potential vanishing on the boundary stays
// admissible input.
inline std::vector<double> interior_sample_coords(const Cohomog1Metric& metric, int count,
                                                  double cap) {
  Interval iv = metric.domain();
  double lo = std::isinf(iv.lo) ? -cap : iv.lo;
  double hi = std::isinf(iv.hi) ? std::max(lo + 1.0, cap) : iv.hi;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * (k + 0.5) / count);
  return out;
}

inline StaticReport verify_static(const Cohomog1Metric& metric, const Expr& v,
                                  const VerifyPlan& plan = {},
                                  std::optional<double> h_const = std::nullopt) {
  StaticReport rep;
  rep.tolerance = plan.tolerance;
  rep.has_boundary = metric.boundary_end().has_value();
  rep.boundary_h = rep.has_boundary ? metric.boundary_mean_curvature() : 0.0;
  rep.h_const_used = h_const.value_or(rep.boundary_h);
  rep.h_mismatch = rep.has_boundary &&
                   std::abs(rep.h_const_used - rep.boundary_h) > plan.h_mismatch_warning;

  StaticRadialSystem sys(metric, v, rep.h_const_used);
  const int n = metric.dim();
  double r_min = 0.0, r_max = 0.0, r_sum = 0.0;
  bool first = true;
  const auto samples = interior_sample_coords(metric, plan.interior_samples, plan.cap);
  rep.interior_samples = static_cast<int>(samples.size());
  for (double s : samples) {
    metric.check_positive_lapse_warp(s);
    const double vv = sys.potential().value(s);
    if (!(vv > 0.0))
      throw InvalidArgument("potential is not positive at interior sample s = " +
                            std::to_string(s));
    rep.sup_v = std::max(rep.sup_v, vv);
    const double ltt = sys.eval(sys.l_star_tt(), s);
    const double ltan = sys.eval(sys.l_star_tan(), s);
    rep.interior_residual = std::max(rep.interior_residual,
                                     std::max(std::abs(ltt), std::abs(ltan)));
    const double trace_resid = sys.eval(sys.trace_identity(), s);
    rep.trace_residual = std::max(rep.trace_residual, std::abs(trace_resid));
    const double tr_l = ltt + (n - 1) * ltan;
    rep.trace_compat_residual =
        std::max(rep.trace_compat_residual, std::abs(tr_l + (n - 1) * trace_resid));
    const double rs = curvature_radial(metric, s).scalar;
    if (first) {
      r_min = r_max = rs;
      first = false;
    } else {
      r_min = std::min(r_min, rs);
      r_max = std::max(r_max, rs);
    }
    r_sum += rs;
  }
  rep.r_constancy = r_max - r_min;
  rep.r_value = r_sum / std::max<std::size_t>(1, samples.size());
  if (rep.has_boundary) rep.admissibility_residual = sys.admissibility_residual();

  rep.is_static_potential = rep.interior_residual < plan.tolerance;
  rep.is_admissible = rep.is_static_potential && rep.admissibility_residual < plan.tolerance;
  return rep;
}

inline StaticReport verify_static(const ChartMetric& metric, const BoundaryFace& face,
                                  const Expr& v, const VerifyPlan& plan = {},
                                  std::optional<double> h_const = std::nullopt) {
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  StaticReport rep;
  rep.tolerance = plan.tolerance;
  rep.has_boundary = true;

  const int n = metric.dim();
  const ScalarField vf(metric, v);

  // boundary pass
  {
    double h_sum = 0.0;
    int count = 0;
    for (const Point& q : face_samples(metric, face, plan.boundary_samples, plan.cap)) {
      auto sff = second_fundamental_form(metric, face, q);
      h_sum += sff.H;
      ++count;
      const MetricJet jet = metric.jet(q, 1);
      const auto nu = outward_normal(jet, face);
      const VarEnv env = metric.env_at(q);
      double v_nu = 0.0;
      for (int i = 0; i < n; ++i) v_nu += nu[static_cast<std::size_t>(i)] * vf.d(i, env);
      SymTensor2 resid = sff.induced;
      for (auto& x : resid.m.a) x *= v_nu;
      resid.add_scaled(sff.h, -vf.value(env));
      rep.admissibility_residual =
          std::max(rep.admissibility_residual, op_norm(resid, sff.induced.m));
    }
    rep.boundary_h = h_sum / std::max(1, count);
  }
  rep.h_const_used = h_const.value_or(rep.boundary_h);
  rep.h_mismatch = std::abs(rep.h_const_used - rep.boundary_h) > plan.h_mismatch_warning;

  // interior pass over a Halton sweep of the box
  double r_min = 0.0, r_max = 0.0, r_sum = 0.0;
  bool first = true;
  for (int k = 1; k <= plan.interior_samples; ++k) {
    Point p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& iv = metric.domain()[static_cast<std::size_t>(i)];
      const double lo = std::isinf(iv.lo) ? -plan.cap : iv.lo;
      const double hi = std::isinf(iv.hi) ? std::max(lo + 1.0, plan.cap) : iv.hi;
      const double u = halton(k, primes[i % 6]);
      p[static_cast<std::size_t>(i)] = lo + (hi - lo) * (0.02 + 0.96 * u);
    }
    const VarEnv env = metric.env_at(p);
    const double vv = vf.value(env);
    if (!(vv > 0.0))
      throw InvalidArgument("potential is not positive at an interior sample");
    rep.sup_v = std::max(rep.sup_v, vv);

    const Mat g = metric.value(p);
    const Mat ginv = spd_inverse(g);
    const SymTensor2 lst = l_star(metric, vf, p);
    rep.interior_residual = std::max(rep.interior_residual, op_norm(lst, g));
    const double rs = scalar(metric, p);
    const double lap = trace(hessian(metric, vf, p), ginv);
    const double trace_resid = lap + rs / (n - 1) * vv;
    rep.trace_residual = std::max(rep.trace_residual, std::abs(trace_resid));
    rep.trace_compat_residual = std::max(
        rep.trace_compat_residual, std::abs(trace(lst, ginv) + (n - 1) * trace_resid));
    if (first) {
      r_min = r_max = rs;
      first = false;
    } else {
      r_min = std::min(r_min, rs);
      r_max = std::max(r_max, rs);
    }
    r_sum += rs;
    ++rep.interior_samples;
  }
  rep.r_constancy = r_max - r_min;
  rep.r_value = r_sum / std::max(1, rep.interior_samples);

  rep.is_static_potential = rep.interior_residual < plan.tolerance;
  rep.is_admissible = rep.is_static_potential && rep.admissibility_residual < plan.tolerance;
  return rep;
}

}  // namespace staticgeo
