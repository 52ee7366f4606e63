#pragma once

// Hand-built chart fixtures shared across test files.  These are written out
// directly (not through the catalog) so they stay independent of the code
// they are used to check.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "staticgeo/chart.hpp"
#include "staticgeo/cohomog1.hpp"

namespace fixtures {

using staticgeo::BoundaryFace;
using staticgeo::ChartMetric;
using staticgeo::Expr;
using staticgeo::Interval;
using staticgeo::parse;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline ChartMetric flat3(double lo = -1.0, double hi = 1.0) {
  return ChartMetric({"x", "y", "z"},
                     {{parse("1"), parse("0"), parse("0")},
                      {parse("1"), parse("0")},
                      {parse("1")}},
                     {{lo, hi}, {lo, hi}, {lo, hi}});
}

inline ChartMetric polar_plane() {
  return ChartMetric({"r", "th"},
                     {{parse("1"), parse("0")}, {parse("r^2")}},
                     {{0.1, 10.0}, {0.0, 6.2831853071795865}});
}

// Round 2-sphere of radius a in polar coordinates.
inline ChartMetric sphere2(double a) {
  const std::string a2 = std::to_string(a * a);
  return ChartMetric({"th", "ph"},
                     {{parse(a2), parse("0")}, {parse(a2 + "*sin(th)^2")}},
                     {{0.3, 2.8}, {0.0, 6.2831853071795865}});
}

inline ChartMetric conformal2() {  // e^{2x} (dx^2 + dy^2)
  return ChartMetric({"x", "y"},
                     {{parse("exp(2*x)"), parse("0")}, {parse("exp(2*x)")}},
                     {{-1.0, 1.0}, {-1.0, 1.0}});
}

// Flat ball in polar coordinates, spherical face at r = 1.
inline ChartMetric ball3() {
  return ChartMetric({"r", "th", "ph"},
                     {{parse("1"), parse("0"), parse("0")},
                      {parse("r^2"), parse("0")},
                      {parse("r^2*sin(th)^2")}},
                     {{0.1, 1.0}, {0.4, 2.7}, {0.3, 6.0}},
                     BoundaryFace{0, BoundaryFace::End::Upper});
}

// Kottler chart, n = 3, fiber = unit 2-sphere.
inline ChartMetric kottler3(double m) {
  const double rc = 2.0 * m;
  Expr u = staticgeo::substitute(parse("r^2 + 1 - 2*m/r"), "m", m);
  return ChartMetric({"r", "th", "ph"},
                     {{Expr::constant(1.0) / u, parse("0"), parse("0")},
                      {parse("r^2"), parse("0")},
                      {parse("r^2*sin(th)^2")}},
                     {{rc, kInf}, {0.4, 2.7}, {0.3, 6.0}},
                     BoundaryFace{0, BoundaryFace::End::Lower});
}

// Kottler chart, n = 4, fiber = unit 3-sphere.
inline ChartMetric kottler4(double m) {
  const double rc = std::sqrt(2.0 * m);
  Expr u = staticgeo::substitute(parse("r^2 + 1 - 2*m/r^2"), "m", m);
  return ChartMetric({"r", "ps", "th", "ph"},
                     {{Expr::constant(1.0) / u, parse("0"), parse("0"), parse("0")},
                      {parse("r^2"), parse("0"), parse("0")},
                      {parse("r^2*sin(ps)^2"), parse("0")},
                      {parse("r^2*sin(ps)^2*sin(th)^2")}},
                     {{rc, kInf}, {0.4, 2.7}, {0.4, 2.7}, {0.3, 6.0}},
                     BoundaryFace{0, BoundaryFace::End::Lower});
}

// Hyperbolic cusp chart, n = 3, flat torus fiber, boundary at t = 0.
inline ChartMetric cusp3(double lambda) {
  Expr w = staticgeo::substitute(parse("exp(2*k*t)"), "k", lambda);
  return ChartMetric({"t", "x", "y"},
                     {{parse("1"), parse("0"), parse("0")}, {w, parse("0")}, {w}},
                     {{-kInf, 0.0}, {0.0, 6.2831853071795865}, {0.0, 6.2831853071795865}},
                     BoundaryFace{0, BoundaryFace::End::Upper});
}

// Flat half-cylinder chart, n = 3, boundary at t = 0.
inline ChartMetric half_cylinder3() {
  return ChartMetric({"t", "x", "y"},
                     {{parse("1"), parse("0"), parse("0")},
                      {parse("1"), parse("0")},
                      {parse("1")}},
                     {{0.0, kInf}, {0.0, 6.2831853071795865}, {0.0, 6.2831853071795865}},
                     BoundaryFace{0, BoundaryFace::End::Lower});
}

// Region bounded by the ellipsoid x^2 + 4y^2 + 4z^2 = 4, i.e. semi-axes
// (2, 1, 1), as a pullback chart with the ellipsoid at u = 1.
inline ChartMetric spheroid_region() {
  return ChartMetric(
      {"u", "th", "ph"},
      {{parse("4*cos(th)^2 + sin(th)^2"), parse("-3*u*sin(th)*cos(th)"), parse("0")},
       {parse("u^2*(4*sin(th)^2 + cos(th)^2)"), parse("0")},
       {parse("u^2*sin(th)^2")}},
      {{0.5, 1.0}, {0.4, 2.7}, {0.3, 6.0}},
      BoundaryFace{0, BoundaryFace::End::Upper});
}

// Small deterministic pseudo-random perturbations of the flat metric on a box
// around the origin; cubic polynomial components keep all third derivatives
// nontrivial.
inline ChartMetric perturbed_flat3(unsigned seed, double amplitude = 0.05) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const char* vars[3] = {"x", "y", "z"};
  auto poly = [&]() {
    Expr p = Expr::constant(0.0);
    for (int a = 0; a < 3; ++a) {
      p = p + Expr::constant(amplitude * coeff(rng)) * Expr::variable(vars[a]);
      for (int b = a; b < 3; ++b) {
        p = p + Expr::constant(amplitude * coeff(rng)) * Expr::variable(vars[a]) *
                    Expr::variable(vars[b]);
        for (int c = b; c < 3; ++c)
          p = p + Expr::constant(amplitude * coeff(rng)) * Expr::variable(vars[a]) *
                      Expr::variable(vars[b]) * Expr::variable(vars[c]);
      }
    }
    return p;
  };
  std::vector<std::vector<Expr>> rows(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Expr e = poly();
      if (i == j) e = Expr::constant(1.0) + e;
      rows[static_cast<std::size_t>(i)].push_back(e);
    }
  return ChartMetric({"x", "y", "z"}, rows, {{-0.4, 0.4}, {-0.4, 0.4}, {-0.4, 0.4}});
}

// Deterministic analytic (non-polynomial) metric perturbations.
inline ChartMetric analytic_metric3(unsigned seed, double amplitude = 0.08) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const char* vars[3] = {"x", "y", "z"};
  auto wave = [&]() {
    Expr arg = Expr::constant(0.0);
    for (auto* v : vars) arg = arg + Expr::constant(coeff(rng)) * Expr::variable(v);
    Expr w = staticgeo::sin(arg);
    if (coeff(rng) > 0.0) w = w * staticgeo::exp(Expr::constant(0.3 * coeff(rng)) * Expr::variable(vars[0]));
    return Expr::constant(amplitude * coeff(rng)) * w;
  };
  std::vector<std::vector<Expr>> rows(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Expr e = wave();
      if (i == j) e = Expr::constant(1.0) + e;
      rows[static_cast<std::size_t>(i)].push_back(e);
    }
  return ChartMetric({"x", "y", "z"}, rows, {{-0.4, 0.4}, {-0.4, 0.4}, {-0.4, 0.4}});
}

// Independently written cohomogeneity-one fixtures (kept separate from the
// catalog constructors on purpose).
inline staticgeo::Cohomog1Metric kottler_c1(int n, double m, double vol) {
  using staticgeo::Cohomog1Metric;
  Expr u = staticgeo::substitute(
      staticgeo::substitute(parse("r^2 + 1 - 2*m*r^(2-n)"), "n", static_cast<double>(n)), "m", m);
  const double rc = std::pow(2.0 * m, 1.0 / (n - 2));
  return Cohomog1Metric(n, "r", Expr::constant(1.0) / staticgeo::sqrt(u), parse("r"),
                        {static_cast<double>(n - 2), vol, false}, {rc, kInf},
                        BoundaryFace::End::Lower);
}

inline staticgeo::Cohomog1Metric schwarzschild_c1(int n, double m, double vol) {
  using staticgeo::Cohomog1Metric;
  Expr phi = staticgeo::substitute(
      staticgeo::substitute(parse("1 + m/2*r^(2-n)"), "n", static_cast<double>(n)), "m", m);
  Expr a = staticgeo::pow(phi, Expr::constant(2.0 / (n - 2)));
  const double rh = std::pow(0.5 * m, 1.0 / (n - 2));
  return Cohomog1Metric(n, "r", a, a * parse("r"), {static_cast<double>(n - 2), vol, false},
                        {rh, kInf}, BoundaryFace::End::Lower);
}

inline Expr schwarzschild_potential(int n, double m) {
  Expr phi = staticgeo::substitute(
      staticgeo::substitute(parse("1 + m/2*r^(2-n)"), "n", static_cast<double>(n)), "m", m);
  return Expr::constant(2.0) / phi - Expr::constant(1.0);
}

inline staticgeo::Cohomog1Metric cusp_c1(int n, double lambda, double vol) {
  using staticgeo::Cohomog1Metric;
  Expr w = staticgeo::substitute(parse("exp(k*t)"), "k", lambda);
  return Cohomog1Metric(n, "t", Expr::constant(1.0), w, {0.0, vol, true}, {-kInf, 0.0},
                        BoundaryFace::End::Upper);
}

inline staticgeo::Cohomog1Metric half_cylinder_c1(int n, double vol) {
  using staticgeo::Cohomog1Metric;
  return Cohomog1Metric(n, "t", Expr::constant(1.0), Expr::constant(1.0), {0.0, vol, true},
                        {0.0, kInf}, BoundaryFace::End::Lower);
}

inline std::vector<staticgeo::Point> box_samples(const ChartMetric& metric, int count,
                                                 unsigned seed, double cap = 10.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<staticgeo::Point> pts;
  for (int k = 0; k < count; ++k) {
    staticgeo::Point p;
    for (const auto& iv : metric.domain()) {
      double lo = std::isinf(iv.lo) ? -cap : iv.lo;
      double hi = std::isinf(iv.hi) ? std::max(lo + 1.0, cap) : iv.hi;
      p.push_back(lo + (hi - lo) * u(rng));
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace fixtures
