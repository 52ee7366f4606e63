#pragma once

// Cohomogeneity-one metrics g = A(s)^2 ds^2 + B(s)^2 b over an Einstein fiber
// (Ric_b = kappa b).  The fiber is abstract: only its Einstein constant, its
// volume, and a flatness flag are stored, and tangential quantities are
// reported as scalar coefficients on unit directions.  Derivatives written
// with a prime are arclength derivatives, f' = A^{-1} df/ds; the chart
// coordinate is never assumed to be arclength.
//
// With f = B and k = n-1 the fiber dimension:
//   Ric_tt  = -k f''/f                      (unit radial direction)
//   Ric_tan = kappa/f^2 - f''/f - (k-1) f'^2/f^2
//   R       = Ric_tt + k Ric_tan
// and for radial V:
//   Hess_tt = V'',  Hess_tan = (f'/f) V',  Lap V = V'' + k (f'/f) V'.
//
// All radial quantities are built once as exact symbolic trees in the chart
// coordinate; instances are immutable and evaluations pure.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "staticgeo/chart.hpp"
#include "staticgeo/expr.hpp"

namespace staticgeo {

struct FiberData {
  double einstein_constant = 0.0;  // kappa with Ric_b = kappa b
  double volume = 1.0;             // Vol(fiber, b)
  bool flat = false;               // whether Rm_b = 0 (consulted by the classifier)
};

struct RadialCurvature {
  double ric_tt = 0.0;
  double ric_tan = 0.0;
  double scalar = 0.0;
};

struct RadialHessian {
  double tt = 0.0;
  double tan = 0.0;
};

class Cohomog1Metric {
public:
  Cohomog1Metric(int dim, std::string coordinate, Expr lapse, Expr warp, FiberData fiber,
                 Interval domain, std::optional<BoundaryFace::End> boundary_end)
      : n_(dim),
        coord_(std::move(coordinate)),
        lapse_(std::move(lapse)),
        warp_(std::move(warp)),
        fiber_(fiber),
        domain_(domain),
        boundary_end_(boundary_end) {
    if (n_ < 2) throw InvalidArgument("cohomogeneity-one metric needs dimension >= 2");
    if (fiber_.volume <= 0.0) throw InvalidArgument("fiber volume must be positive");
    if (fiber_.flat && fiber_.einstein_constant != 0.0)
      throw InvalidArgument("a flat fiber must have einstein constant 0");
    if (boundary_end_) {
      const double v = boundary_value();
      if (!std::isfinite(v)) throw InvalidArgument("boundary end must be at a finite coordinate");
    }

    const int k = n_ - 1;
    const Expr f = warp_;
    fp_ = arclength_derivative(f);
    fpp_ = arclength_derivative(fp_);
    ric_tt_ = Expr::constant(-k) * fpp_ / f;
    ric_tan_ = Expr::constant(fiber_.einstein_constant) / (f * f) - fpp_ / f -
               Expr::constant(k - 1) * fp_ * fp_ / (f * f);
    scalar_ = ric_tt_ + Expr::constant(k) * ric_tan_;
    area_ = pow(f, Expr::constant(k)) * Expr::constant(fiber_.volume);
    volume_density_ = lapse_ * area_;
  }

  int dim() const { return n_; }
  const std::string& coordinate() const { return coord_; }
  const Expr& lapse() const { return lapse_; }
  const Expr& warp() const { return warp_; }
  const FiberData& fiber() const { return fiber_; }
  const Interval& domain() const { return domain_; }
  const std::optional<BoundaryFace::End>& boundary_end() const { return boundary_end_; }

  double boundary_value() const {
    if (!boundary_end_) throw InvalidArgument("metric has no boundary face");
    return *boundary_end_ == BoundaryFace::End::Lower ? domain_.lo : domain_.hi;
  }

  // +1 if the outward normal at the boundary is +e_t, -1 if it is -e_t.
  double boundary_outward_sign() const {
    if (!boundary_end_) throw InvalidArgument("metric has no boundary face");
    return *boundary_end_ == BoundaryFace::End::Upper ? 1.0 : -1.0;
  }

  bool domain_unbounded() const { return domain_.unbounded(); }

  // The end (as a +/-1 direction along s) toward which the manifold is
  // unbounded; used to orient exhaustions.
  double unbounded_direction() const {
    if (std::isinf(domain_.hi)) return 1.0;
    if (std::isinf(domain_.lo)) return -1.0;
    throw InvalidArgument("domain is compact; no exhaustion direction");
  }

  Expr arclength_derivative(const Expr& e) const {
    return differentiate(e, coord_) / lapse_;
  }

  double eval(const Expr& e, double s) const {
    check_in_domain(s);
    VarEnv env;
    env.bind(coord_, s);
    return evaluate(e, env);
  }

  void check_in_domain(double s) const {
    const double slack = 1e-12 * (1.0 + std::abs(s));
    if (!domain_.contains(s, slack))
      throw InvalidArgument("coordinate value outside the domain interval");
  }

  // A(s) > 0 and B(s) > 0 are part of the contract; call sites that sweep the
  // domain use this to turn a violation into a clear error.
  void check_positive_lapse_warp(double s) const {
    if (eval(lapse_, s) <= 0.0) throw InvalidArgument("lapse A(s) must be positive");
    if (eval(warp_, s) <= 0.0) throw InvalidArgument("warp B(s) must be positive");
  }

  const Expr& ric_tt_expr() const { return ric_tt_; }
  const Expr& ric_tan_expr() const { return ric_tan_; }
  const Expr& scalar_expr() const { return scalar_; }
  const Expr& warp_prime_expr() const { return fp_; }
  const Expr& warp_second_expr() const { return fpp_; }
  const Expr& area_expr() const { return area_; }            // B^{n-1} Vol
  const Expr& volume_density_expr() const { return volume_density_; }  // A B^{n-1} Vol

  // Mean curvature of the s-slice with respect to the +e_t normal.
  double slice_mean_curvature(double s) const {
    const int k = n_ - 1;
    return k * eval(fp_, s) / eval(warp_, s);
  }

  // Mean curvature of the boundary with respect to the outward normal.
  double boundary_mean_curvature() const {
    return boundary_outward_sign() * slice_mean_curvature(boundary_value());
  }

private:
  int n_;
  std::string coord_;
  Expr lapse_, warp_;
  FiberData fiber_;
  Interval domain_;
  std::optional<BoundaryFace::End> boundary_end_;

  Expr fp_, fpp_;
  Expr ric_tt_, ric_tan_, scalar_;
  Expr area_, volume_density_;
};

inline RadialCurvature curvature_radial(const Cohomog1Metric& metric, double s) {
  metric.check_positive_lapse_warp(s);
  RadialCurvature out;
  out.ric_tt = metric.eval(metric.ric_tt_expr(), s);
  out.ric_tan = metric.eval(metric.ric_tan_expr(), s);
  out.scalar = out.ric_tt + (metric.dim() - 1) * out.ric_tan;
  return out;
}

// Both sectional curvatures of a flat-fiber metric: planes containing the
// radial direction, and planes tangent to the fiber.
inline std::pair<double, double> sectional_radial(const Cohomog1Metric& metric, double s) {
  if (!metric.fiber().flat)
    throw InvalidArgument("sectional curvatures need a flat fiber");
  const double f = metric.eval(metric.warp(), s);
  const double fp = metric.eval(metric.warp_prime_expr(), s);
  const double fpp = metric.eval(metric.warp_second_expr(), s);
  return {-fpp / f, -(fp * fp) / (f * f)};
}

// Radial potential bound to a metric: V and its arclength derivatives as
// exact trees.
class RadialPotential {
public:
  RadialPotential(const Cohomog1Metric& metric, Expr v)
      : metric_(&metric), v_(std::move(v)) {
    vp_ = metric.arclength_derivative(v_);
    vpp_ = metric.arclength_derivative(vp_);
    hess_tan_ = metric.warp_prime_expr() / metric.warp() * vp_;
    lap_ = vpp_ + Expr::constant(metric.dim() - 1) * hess_tan_;
  }

  const Cohomog1Metric& metric() const { return *metric_; }
  const Expr& v() const { return v_; }
  const Expr& vp() const { return vp_; }
  const Expr& vpp() const { return vpp_; }
  const Expr& hess_tan() const { return hess_tan_; }
  const Expr& laplacian() const { return lap_; }

  double value(double s) const { return metric_->eval(v_, s); }
  double prime(double s) const { return metric_->eval(vp_, s); }

private:
  const Cohomog1Metric* metric_;
  Expr v_, vp_, vpp_, hess_tan_, lap_;
};

inline RadialHessian hessian_radial(const Cohomog1Metric& metric, const Expr& v, double s) {
  RadialPotential pot(metric, v);
  RadialHessian h;
  h.tt = metric.eval(pot.vpp(), s);
  h.tan = metric.eval(pot.hess_tan(), s);
  return h;
}

inline double laplacian_radial(const Cohomog1Metric& metric, const Expr& v, double s) {
  RadialPotential pot(metric, v);
  return metric.eval(pot.laplacian(), s);
}

struct RadialOdeResult {
  std::vector<double> s;
  std::vector<double> v;
  std::vector<double> vp;          // arclength derivative
  double tangential_residual = 0.0;
  double step_error_estimate = 0.0;  // Richardson estimate from one halving
};

// Integrate the radial second-order equation V'' = (Ric_tt - R/(n-1)) V with
// a classical fixed-step RK4 scheme in the chart coordinate, monitoring the
// tangential component (f'/f)V' = (Ric_tan - R/(n-1)) V as a residual.
// Requires constant scalar curvature along the grid.
inline RadialOdeResult solve_radial_static_ode(const Cohomog1Metric& metric, double v0,
                                               double v0_prime, double s_begin, double s_end,
                                               int grid_points) {
  if (grid_points < 2) throw InvalidArgument("ODE grid needs at least two points");
  metric.check_in_domain(s_begin);
  metric.check_in_domain(s_end);

  const int n = metric.dim();
  const double r_first = curvature_radial(metric, s_begin).scalar;
  {
    const int probes = 17;
    for (int i = 0; i < probes; ++i) {
      const double s = s_begin + (s_end - s_begin) * i / (probes - 1.0);
      if (std::abs(curvature_radial(metric, s).scalar - r_first) > 1e-8)
        throw InvalidArgument("scalar curvature is not constant along the grid");
    }
  }
  const double r_over = r_first / (n - 1);

  auto coeff = [&](double s) {
    return metric.eval(metric.ric_tt_expr(), s) - r_over;
  };
  auto lapse = [&](double s) { return metric.eval(metric.lapse(), s); };

  auto integrate = [&](int steps_per_cell) {
    RadialOdeResult res;
    res.s.resize(static_cast<std::size_t>(grid_points));
    res.v.resize(static_cast<std::size_t>(grid_points));
    res.vp.resize(static_cast<std::size_t>(grid_points));
    double v = v0, w = v0_prime;
    const int cells = (grid_points - 1) * steps_per_cell;
    const double h = (s_end - s_begin) / cells;
    res.s[0] = s_begin;
    res.v[0] = v;
    res.vp[0] = w;
    int out = 1;
    for (int c = 0; c < cells; ++c) {
      const double s = s_begin + c * h;
      auto rhs = [&](double sx, double vx, double wx, double& dv, double& dw) {
        const double a = lapse(sx);
        dv = a * wx;
        dw = a * coeff(sx) * vx;
      };
      double k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
      rhs(s, v, w, k1v, k1w);
      rhs(s + 0.5 * h, v + 0.5 * h * k1v, w + 0.5 * h * k1w, k2v, k2w);
      rhs(s + 0.5 * h, v + 0.5 * h * k2v, w + 0.5 * h * k2w, k3v, k3w);
      rhs(s + h, v + h * k3v, w + h * k3w, k4v, k4w);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      if (!std::isfinite(v) || !std::isfinite(w))
        throw NumericsError("radial ODE step failed (non-finite state)");
      if ((c + 1) % steps_per_cell == 0) {
        res.s[static_cast<std::size_t>(out)] = s_begin + (c + 1) * h;
        res.v[static_cast<std::size_t>(out)] = v;
        res.vp[static_cast<std::size_t>(out)] = w;
        ++out;
      }
    }
    return res;
  };

  const int base_cells = std::max(1, 4096 / std::max(1, grid_points - 1));
  RadialOdeResult coarse = integrate(base_cells);
  RadialOdeResult fine = integrate(2 * base_cells);
  double step_err = 0.0;
  for (int i = 0; i < grid_points; ++i)
    step_err = std::max(step_err, std::abs(coarse.v[static_cast<std::size_t>(i)] -
                                           fine.v[static_cast<std::size_t>(i)]) / 15.0);
  fine.step_error_estimate = step_err;

  double tres = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double s = fine.s[static_cast<std::size_t>(i)];
    const double fp_over_f = metric.eval(metric.warp_prime_expr(), s) / metric.eval(metric.warp(), s);
    const double tan_coeff = metric.eval(metric.ric_tan_expr(), s) - r_over;
    tres = std::max(tres, std::abs(fp_over_f * fine.vp[static_cast<std::size_t>(i)] -
                                   tan_coeff * fine.v[static_cast<std::size_t>(i)]));
  }
  fine.tangential_residual = tres;
  return fine;
}

// Realize the metric as a coordinate chart for cross-checking against the
// generic engine.  Supports flat fibers (torus chart) and unit-sphere fibers
// (kappa = n-2, iterated polar chart with a sub-box that stays clear of the
// coordinate degeneracies).  `cap` truncates an unbounded radial domain.
inline ChartMetric to_chart(const Cohomog1Metric& metric, double cap = 50.0) {
  const int n = metric.dim();
  const int k = n - 1;
  const Expr a2 = metric.lapse() * metric.lapse();
  const Expr b2 = metric.warp() * metric.warp();

  Interval radial = metric.domain();
  if (std::isinf(radial.hi)) radial.hi = cap;
  if (std::isinf(radial.lo)) radial.lo = -cap;

  std::optional<BoundaryFace> face;
  if (metric.boundary_end()) face = BoundaryFace{0, *metric.boundary_end()};

  std::vector<std::string> coords{metric.coordinate()};
  std::vector<Interval> domain{radial};
  std::vector<std::vector<Expr>> rows;

  if (metric.fiber().flat || metric.fiber().einstein_constant == 0.0) {
    if (metric.fiber().einstein_constant != 0.0)
      throw InvalidArgument("chart realization: non-flat kappa = 0 fibers not supported");
    for (int i = 0; i < k; ++i) {
      coords.push_back("y" + std::to_string(i + 1));
      domain.push_back({0.0, 6.2831853071795865});
    }
    for (int i = 0; i < n; ++i) {
      std::vector<Expr> row;
      for (int j = i; j < n; ++j) {
        if (i != j) row.push_back(Expr::constant(0.0));
        else row.push_back(i == 0 ? a2 : b2);
      }
      rows.push_back(std::move(row));
    }
  } else if (std::abs(metric.fiber().einstein_constant - (n - 2)) < 1e-12) {
    // unit round sphere fiber: b = da_1^2 + sin^2(a_1) da_2^2 + ...
    for (int i = 0; i < k; ++i) {
      coords.push_back("a" + std::to_string(i + 1));
      domain.push_back(i + 1 < k ? Interval{0.4, 2.7} : Interval{0.3, 6.0});
    }
    for (int i = 0; i < n; ++i) {
      std::vector<Expr> row;
      for (int j = i; j < n; ++j) {
        if (i != j) {
          row.push_back(Expr::constant(0.0));
          continue;
        }
        if (i == 0) {
          row.push_back(a2);
          continue;
        }
        Expr comp = b2;
        for (int q = 1; q < i; ++q) {
          Expr sq = sin(Expr::variable("a" + std::to_string(q)));
          comp = comp * sq * sq;
        }
        row.push_back(comp);
      }
      rows.push_back(std::move(row));
    }
  } else {
    throw InvalidArgument(
        "chart realization supports flat fibers or unit-sphere fibers (kappa = n-2) only");
  }
  return ChartMetric(std::move(coords), std::move(rows), std::move(domain), face);
}

}  // namespace staticgeo
