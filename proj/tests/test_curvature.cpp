#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "staticgeo/curvature.hpp"
#include "test_fixtures.hpp"

using namespace staticgeo;

namespace {

double cov_norm(const std::vector<double>& w, const Mat& ginv) {
  double s = 0.0;
  for (int i = 0; i < ginv.n; ++i)
    for (int j = 0; j < ginv.n; ++j)
      s += ginv(i, j) * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
  return std::sqrt(std::max(0.0, s));
}

}  // namespace

TEST_CASE("flat metric has no curvature") {
  auto flat = fixtures::flat3();
  Point p{0.3, -0.2, 0.7};
  auto gamma = christoffel(flat, p);
  for (const auto& m : gamma) CHECK(m.max_abs() == 0.0);
  CHECK(riemann(flat, p).max_abs() == 0.0);
  CHECK(ricci(flat, p).m.max_abs() == 0.0);
  CHECK(scalar(flat, p) == 0.0);
}

TEST_CASE("polar coordinates on the flat plane") {
  auto polar = fixtures::polar_plane();
  Point p{2.0, 1.0};
  auto gamma = christoffel(polar, p);
  CHECK(gamma[0](1, 1) == Catch::Approx(-2.0).epsilon(1e-14));   // Gamma^r_thth
  CHECK(gamma[1](0, 1) == Catch::Approx(0.5).epsilon(1e-14));    // Gamma^th_rth
  CHECK(scalar(polar, p) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("conformal plane Christoffel symbols") {
  auto conf = fixtures::conformal2();
  Point p{0.0, 0.2};
  auto gamma = christoffel(conf, p);
  CHECK(gamma[0](0, 0) == Catch::Approx(1.0).epsilon(1e-13));    // Gamma^x_xx
  CHECK(gamma[0](1, 1) == Catch::Approx(-1.0).epsilon(1e-13));   // Gamma^x_yy
  CHECK(gamma[1](0, 1) == Catch::Approx(1.0).epsilon(1e-13));    // Gamma^y_xy

  // numerical-derivative oracle for the defining formula, independent path
  const double h = 1e-6;
  auto g_at = [&](double x) { return conf.value(Point{x, 0.2}); };
  const double dgxx = (g_at(h)(0, 0) - g_at(-h)(0, 0)) / (2.0 * h);
  const Mat ginv = spd_inverse(conf.value(p));
  CHECK(gamma[0](0, 0) == Catch::Approx(0.5 * ginv(0, 0) * dgxx).epsilon(1e-8));
}

TEST_CASE("round sphere scalar curvature and Ricci sign") {
  for (double a : {1.0, 2.0}) {
    auto sph = fixtures::sphere2(a);
    Point p{1.1, 0.7};
    CHECK(scalar(sph, p) == Catch::Approx(2.0 / (a * a)).epsilon(1e-12));
    // unit sphere: Ric = (n-1) g = g
    if (a == 1.0) {
      SymTensor2 ric = ricci(sph, p);
      Mat g = sph.value(p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          CHECK(ric(i, j) == Catch::Approx(g(i, j)).margin(1e-12));
    }
  }
}

TEST_CASE("Kottler chart scalar curvature") {
  auto k3 = fixtures::kottler3(1.0);
  for (double r : {2.0, 3.0, 7.5}) {
    Point p{r, 1.2, 2.1};
    CHECK(std::abs(scalar(k3, p) - (-6.0)) < 1e-8);
  }
  auto k4 = fixtures::kottler4(1.0);
  Point p4{2.0, 1.2, 0.9, 2.1};
  CHECK(std::abs(scalar(k4, p4) - (-12.0)) < 1e-8);
}

TEST_CASE("hessian and laplacian on flat space") {
  auto flat = fixtures::flat3();
  ScalarField f(flat, parse("x^2"));
  Point p{0.4, -0.3, 0.1};
  SymTensor2 h = hessian(flat, f, p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(h(i, j) == Catch::Approx(i == 0 && j == 0 ? 2.0 : 0.0).margin(1e-15));
  CHECK(laplacian(flat, f, p) == Catch::Approx(2.0).epsilon(1e-14));

  ScalarField q(flat, parse("x^2 + y^2 + z^2"));
  CHECK(laplacian(flat, q, p) == Catch::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("cusp hessian is proportional to the metric") {
  auto cusp = fixtures::cusp3(1.0);
  ScalarField f(cusp, parse("exp(t)"));
  Point p{-1.0, 0.3, 0.4};
  SymTensor2 h = hessian(cusp, f, p);
  Mat g = cusp.value(p);
  const double c = std::exp(-1.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(h(i, j) == Catch::Approx(c * g(i, j)).margin(1e-12));
}

TEST_CASE("static equation residual for the Kottler potential") {
  auto k4 = fixtures::kottler4(1.0);
  Expr v = substitute(parse("sqrt(r^2 + 1 - 2*m/r^2)"), "m", 1.0);
  ScalarField vf(k4, v);
  for (double r : {2.0, 3.0, 5.0}) {
    Point p{r, 1.2, 0.9, 2.1};
    SymTensor2 hess = hessian(k4, vf, p);
    SymTensor2 ric = ricci(k4, p);
    const double rs = scalar(k4, p);
    Mat g = k4.value(p);
    const double vv = evaluate(v, VarEnv{{"r", r}});
    // Hess V - (Ric - R/(n-1) g) V
    SymTensor2 resid = hess;
    resid.add_scaled(ric, -vv);
    SymTensor2 gt(4);
    gt.m = g;
    resid.add_scaled(gt, vv * rs / 3.0);
    CHECK(op_norm(resid, g) < 1e-8);
  }
}

TEST_CASE("laplacian equals trace of hessian") {
  auto m = fixtures::analytic_metric3(11);
  ScalarField f(m, parse("exp(0.3*x)*sin(y) + z^2"));
  for (const auto& p : fixtures::box_samples(m, 10, 21)) {
    const Mat ginv = spd_inverse(m.value(p));
    const double lap = laplacian(m, f, p);
    const double tr = trace(hessian(m, f, p), ginv);
    CHECK(std::abs(lap - tr) <= 1e-12 * std::max(1.0, std::abs(lap)));
  }
}

TEST_CASE("scalar equals trace of ricci") {
  auto m = fixtures::analytic_metric3(12);
  for (const auto& p : fixtures::box_samples(m, 10, 22)) {
    const Mat ginv = spd_inverse(m.value(p));
    const double rs = scalar(m, p);
    CHECK(std::abs(rs - trace(ricci(m, p), ginv)) <= 1e-12 * std::max(1.0, std::abs(rs)));
  }
}

TEST_CASE("riemann symmetries on random analytic metrics") {
  for (unsigned seed : {101u, 102u, 103u, 104u, 105u}) {
    auto m = fixtures::analytic_metric3(seed);
    for (const auto& p : fixtures::box_samples(m, 100, seed + 500)) {
      Tensor4 rm = riemann(m, p);
      const double scale = std::max(1.0, rm.max_abs());
      CHECK(symmetry_violation(rm).max() <= 1e-10 * scale);
    }
  }
}

TEST_CASE("metric is parallel") {
  auto m = fixtures::perturbed_flat3(31);
  std::vector<std::vector<Expr>> rows(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) rows[static_cast<std::size_t>(i)].push_back(m.component(i, j));
  SymExprField gfield(m, rows);
  for (const auto& p : fixtures::box_samples(m, 10, 32)) {
    auto div = divergence_symtensor(m, gfield, p);
    for (double c : div) CHECK(std::abs(c) < 1e-12);
  }
}

TEST_CASE("contracted second Bianchi identity") {
  for (unsigned seed : {41u, 42u, 43u}) {
    auto m = fixtures::perturbed_flat3(seed);
    for (const auto& p : fixtures::box_samples(m, 30, seed + 900)) {
      const Mat ginv = spd_inverse(m.value(p));
      auto div_ric = divergence_ricci(m, p);
      auto dr = scalar_gradient(m, p);
      std::vector<double> diff(3);
      for (int i = 0; i < 3; ++i)
        diff[static_cast<std::size_t>(i)] =
            div_ric[static_cast<std::size_t>(i)] - 0.5 * dr[static_cast<std::size_t>(i)];
      CHECK(cov_norm(diff, ginv) <= 1e-7 * (1.0 + cov_norm(dr, ginv)));
    }
  }
}

TEST_CASE("singular metric raises") {
  // metric degenerates along y at x = 0
  ChartMetric bad({"x", "y"}, {{parse("1"), parse("0")}, {parse("x^2")}},
                  {{-1.0, 1.0}, {-1.0, 1.0}});
  CHECK_THROWS_AS(ricci(bad, Point{0.0, 0.5}), SingularMetricError);
}

TEST_CASE("points outside the domain are rejected") {
  auto flat = fixtures::flat3();
  CHECK_THROWS_AS(scalar(flat, Point{3.0, 0.0, 0.0}), InvalidArgument);
}
