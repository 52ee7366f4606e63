#pragma once

// Flux integrals over the slices of a cohomogeneity-one metric, truncated
// divergence-theorem bookkeeping, tail-limit estimation, and the mass
// integral with the Ric + (n-1)g weight.
//
// Radial symmetry makes every slice integral an exact product
// (pointwise integrand) x B^{n-1} x Vol(fiber); quadrature is only ever 1D,
// along the radial coordinate.  Exhaustions are coordinate slices oriented
// toward the unbounded end of the domain; scans are parametrized by a radius
// rho >= 0 mapping to the slice coordinate rho (domain unbounded above) or
// -rho (unbounded below).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "staticgeo/quadrature.hpp"
#include "staticgeo/static_ops.hpp"

namespace staticgeo {

enum class FluxWeight {
  S,                // S = Ric + H^2/(n-1) g
  RicPlusLambdaG,   // Ric + (n-1) g
};

struct QuadratureSettings {
  double rel_tol = 1e-9;
  double abs_floor = 1e-14;
  int max_panels = 1 << 20;
  double r_max = 1000.0;       // outer radius for scans and improper integrals
  int scan_points = 16;
  int tail_fit_points = 12;
  double decay_tolerance = 1e-6;    // c0 <= tolerance declares the decay condition
  double fit_residual_threshold = 1e-3;  // relative; above this the fit is inconclusive
};

namespace detail {

inline const Expr& flux_density(const StaticRadialSystem& sys, FluxWeight weight) {
  return weight == FluxWeight::S ? sys.flux_s_density() : sys.flux_ric_lambda_density();
}

}  // namespace detail

// Flux of the chosen weight through the slice at coordinate r, with the
// normal pointing toward increasing coordinate.
inline double flux_integral(const Cohomog1Metric& metric, const Expr& v, double h_const, double r,
                            FluxWeight weight = FluxWeight::S) {
  StaticRadialSystem sys(metric, v, h_const);
  return sys.eval(detail::flux_density(sys, weight), r);
}

struct FluxScan {
  std::vector<std::pair<double, double>> samples;  // (rho, flux toward the unbounded end)
  double c0 = 0.0;            // fitted limit
  double c1 = 0.0;
  double p = 0.0;             // fitted decay exponent
  double fit_residual = 0.0;  // RMS relative model mismatch over the tail
  double raw_min = 0.0;       // plain minimum over the samples
  bool decay_holds = false;   // c0 <= decay tolerance
  bool inconclusive = false;  // fit residual above threshold
};

namespace detail {

// Slice coordinate and flux orientation for an exhaustion radius rho.
struct Exhaustion {
  double direction;  // +1 or -1 along the coordinate
  double slice(double rho) const { return direction > 0 ? rho : -rho; }
};

inline Exhaustion exhaustion_of(const Cohomog1Metric& metric) {
  return {metric.unbounded_direction()};
}

// flux(rho) ~ c0 + c1 rho^{-p} fitted with c0 tied to the last sample and the
// power-law pieces obtained by log-linear regression, iterated twice.
inline void fit_tail(FluxScan& scan, int tail_points, double decay_tol, double fit_threshold) {
  const auto& all = scan.samples;
  const int n_all = static_cast<int>(all.size());
  const int n_tail = std::min(tail_points, n_all);
  const std::size_t start = static_cast<std::size_t>(n_all - n_tail);

  scan.raw_min = all.front().second;
  double scale = 0.0;
  for (const auto& s : all) {
    scan.raw_min = std::min(scan.raw_min, s.second);
    scale = std::max(scale, std::abs(s.second));
  }
  const double last_rho = all.back().first;
  const double last_flux = all.back().second;

  // degenerate tail: flux constant (or identically zero) to working precision
  double max_dev = 0.0;
  for (std::size_t i = start; i < all.size(); ++i)
    max_dev = std::max(max_dev, std::abs(all[i].second - last_flux));
  if (max_dev <= std::max(1e-13, 1e-12 * scale)) {
    scan.c0 = last_flux;
    scan.c1 = 0.0;
    scan.p = 0.0;
    scan.fit_residual = scale > 0.0 ? max_dev / scale : 0.0;
    scan.decay_holds = scan.c0 <= decay_tol;
    scan.inconclusive = false;
    return;
  }

  double c0 = last_flux;
  double c1 = 0.0, p = 0.0;
  for (int iter = 0; iter < 2; ++iter) {
    // log-linear regression of |flux - c0| against log rho over the tail,
    // excluding points that have already converged to c0
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (std::size_t i = start; i + 1 < all.size(); ++i) {
      const double dev = std::abs(all[i].second - c0);
      if (dev <= std::max(1e-13, 1e-12 * scale)) continue;
      const double x = std::log(all[i].first);
      const double y = std::log(dev);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    if (count < 2) break;
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) break;
    const double slope = (count * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / count;
    p = -slope;
    const double sign = (all[start].second - c0) >= 0.0 ? 1.0 : -1.0;
    c1 = sign * std::exp(intercept);
    c0 = last_flux - c1 * std::pow(last_rho, -p);
  }
  scan.c0 = c0;
  scan.c1 = c1;
  scan.p = p;

  double rms = 0.0;
  for (std::size_t i = start; i < all.size(); ++i) {
    const double model = c0 + c1 * std::pow(all[i].first, -p);
    const double dev = (all[i].second - model) / std::max(scale, 1e-300);
    rms += dev * dev;
  }
  scan.fit_residual = std::sqrt(rms / n_tail);
  scan.inconclusive = !(scan.fit_residual < fit_threshold);
  scan.decay_holds = !scan.inconclusive && scan.c0 <= decay_tol;
}

}  // namespace detail

// Flux scan along a coordinate-slice exhaustion with the tail fitted to
// c0 + c1 rho^{-p}; c0 estimates the limit.
inline FluxScan decay_liminf(const Cohomog1Metric& metric, const Expr& v, double h_const,
                             const QuadratureSettings& settings = {},
                             FluxWeight weight = FluxWeight::S) {
  if (!metric.domain_unbounded())
    throw InvalidArgument("decay scan is undefined on a compact domain");
  const auto exh = detail::exhaustion_of(metric);
  StaticRadialSystem sys(metric, v, h_const);
  const Expr& density = detail::flux_density(sys, weight);

  const double edge = exh.direction > 0 ? metric.domain().lo : -metric.domain().hi;
  double rho_lo = std::max(std::sqrt(settings.r_max), edge + 0.5);
  rho_lo = std::min(rho_lo, 0.25 * settings.r_max);
  rho_lo = std::max(rho_lo, edge + 1e-3);
  if (!(settings.r_max > rho_lo))
    throw InvalidArgument("scan radius limit is too small for the domain");

  FluxScan scan;
  const int npts = std::max(4, settings.scan_points);
  for (int k = 0; k < npts; ++k) {
    const double rho = rho_lo * std::pow(settings.r_max / rho_lo, k / (npts - 1.0));
    const double s = exh.slice(rho);
    const double flux = exh.direction * sys.eval(density, s);
    scan.samples.emplace_back(rho, flux);
  }
  detail::fit_tail(scan, settings.tail_fit_points, settings.decay_tolerance,
                   settings.fit_residual_threshold);
  return scan;
}

struct TruncatedIdentity {
  double lhs_volume = 0.0;            // integral of V |S|^2 over the truncation
  double inner_flux = 0.0;            // flux through the manifold boundary, outward of M
  double outer_flux = 0.0;            // flux through the far slice, outward of the truncation
  double pinching_volume_term = 0.0;  // (R+H^2)/(n-1) (R + n H^2/(n-1)) * integral of V
  double residual = 0.0;
  double relative_residual = 0.0;
};

// Divergence-theorem bookkeeping over the truncation bounded by the manifold
// boundary and the slice at exhaustion radius rho.
inline TruncatedIdentity truncated_identity(const Cohomog1Metric& metric, const Expr& v,
                                            double h_const, double rho,
                                            const QuadratureSettings& settings = {}) {
  if (!metric.boundary_end())
    throw InvalidArgument("truncated identity needs a manifold boundary");
  const auto exh = detail::exhaustion_of(metric);
  const double s_edge = metric.boundary_value();
  const double s_far = exh.slice(rho);
  if ((s_far - s_edge) * exh.direction <= 0.0)
    throw InvalidArgument("truncation slice does not enclose the boundary");

  StaticRadialSystem sys(metric, v, h_const);
  const double a = std::min(s_edge, s_far);
  const double b = std::max(s_edge, s_far);

  // constant-R hypothesis
  {
    const double r0 = curvature_radial(metric, a).scalar;
    for (int i = 1; i <= 8; ++i) {
      const double s = a + (b - a) * i / 8.0;
      if (std::abs(curvature_radial(metric, s).scalar - r0) > 1e-6 * (1.0 + std::abs(r0)))
        throw InvalidArgument("truncated identity requires constant scalar curvature");
    }
  }

  TruncatedIdentity out;
  auto lhs_f = [&](double s) { return sys.eval(sys.lhs_volume_integrand(), s); };
  out.lhs_volume =
      integrate(lhs_f, a, b, settings.rel_tol, settings.abs_floor, settings.max_panels).value;

  const int n = metric.dim();
  const double rs = curvature_radial(metric, 0.5 * (a + b)).scalar;
  const double pinch_coeff = (rs + h_const * h_const) / (n - 1) *
                             (rs + static_cast<double>(n) / (n - 1) * h_const * h_const);
  auto v_f = [&](double s) { return sys.eval(sys.v_volume_integrand(), s); };
  out.pinching_volume_term =
      pinch_coeff *
      integrate(v_f, a, b, settings.rel_tol, settings.abs_floor, settings.max_panels).value;

  const Expr& density = sys.flux_s_density();
  out.inner_flux = metric.boundary_outward_sign() * sys.eval(density, s_edge);
  out.outer_flux = exh.direction * sys.eval(density, s_far);

  out.residual =
      std::abs(out.lhs_volume - out.inner_flux - out.outer_flux - out.pinching_volume_term);
  const double denom = std::max({std::abs(out.lhs_volume), std::abs(out.inner_flux),
                                 std::abs(out.outer_flux), std::abs(out.pinching_volume_term)});
  out.relative_residual = denom > 0.0 ? out.residual / denom : out.residual;
  return out;
}

struct MassResult {
  double mass = 0.0;   // -2/(n-2) x fitted flux limit
  double limit = 0.0;  // fitted limit of the Ric + (n-1)g flux
  FluxScan scan;
};

inline MassResult wch_mass(const Cohomog1Metric& metric, const Expr& v,
                           const QuadratureSettings& settings = {}) {
  if (!metric.domain_unbounded())
    throw InvalidArgument("the mass integral needs an unbounded domain");
  MassResult out;
  out.scan = decay_liminf(metric, v, 0.0, settings, FluxWeight::RicPlusLambdaG);
  if (out.scan.inconclusive)
    throw NumericsError("mass integral: flux tail did not converge to the model");
  out.limit = out.scan.c0;
  out.mass = -2.0 / (metric.dim() - 2) * out.limit;
  return out;
}

// CSV serialization of a scan: header `r,flux`, one row per sample,
// 17-significant-digit decimal.
inline void write_csv(const FluxScan& scan, std::ostream& os) {
  os << "r,flux\n";
  char buf[80];
  for (const auto& [rho, flux] : scan.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", rho, flux);
    os << buf;
  }
}

}  // namespace staticgeo
