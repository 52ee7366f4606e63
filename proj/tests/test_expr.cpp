#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "staticgeo/expr.hpp"

using namespace staticgeo;

namespace {

// Independent derivative oracles used throughout: plain centered difference
// and the 5-point stencil.
double centered_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double five_point_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

// Small random expression generator over variables x, y.
class ExprGen {
public:
  explicit ExprGen(unsigned seed) : rng_(seed) {}

  Expr gen(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(10)) {
      case 0: return leaf();
      case 1: return gen(depth - 1) + gen(depth - 1);
      case 2: return gen(depth - 1) - gen(depth - 1);
      case 3: return gen(depth - 1) * gen(depth - 1);
      case 4: return gen(depth - 1) / gen(depth - 1);
      case 5: return pow(gen(depth - 1), Expr::constant(small_exponent()));
      case 6: return staticgeo::exp(Expr::constant(0.3) * gen(depth - 1));
      case 7: return staticgeo::sin(gen(depth - 1));
      case 8: return staticgeo::cos(gen(depth - 1));
      case 9: return staticgeo::sqrt(Expr::constant(1.0) + gen(depth - 1) * gen(depth - 1));
    }
    return leaf();
  }

  double point() { return 0.5 + 1.5 * uniform(); }

private:
  Expr leaf() {
    switch (pick(4)) {
      case 0: return Expr::variable("x");
      case 1: return Expr::variable("y");
      default: return Expr::constant(0.25 + 2.25 * uniform());
    }
  }

  double small_exponent() {
    const double choices[] = {-2.0, -1.0, 2.0, 3.0, 0.5, 1.5};
    return choices[pick(6)];
  }

  int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("parse basic forms") {
  Expr e = parse("1 + m/(2*r)");
  VarEnv env{{"m", 2.0}, {"r", 4.0}};
  CHECK(evaluate(e, env) == Catch::Approx(1.25).epsilon(1e-15));

  // two free variables: both must be bound
  CHECK_THROWS_AS(evaluate(e, VarEnv{{"m", 2.0}}), EvalError);
}

TEST_CASE("parse with parameters bound at build time") {
  Expr u = parse("r^2 + 1 - 2*m*r^(2-n)");
  u = substitute(substitute(u, "n", 4.0), "m", 1.0);
  VarEnv env{{"r", 2.0}};
  CHECK(evaluate(u, env) == Catch::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("(");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 0);
  }

  try {
    parse("1 + foo(2)");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 4);
    CHECK(std::string(err.what()).find("unknown function") != std::string::npos);
  }

  CHECK_THROWS_AS(parse("2 +"), ParseError);
  CHECK_THROWS_AS(parse("x y"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("grammar shape") {
  // no implicit multiplication
  CHECK_THROWS_AS(parse("2 x"), ParseError);
  // '^' is right-associative
  CHECK(evaluate(parse("2^3^2"), VarEnv{}) == Catch::Approx(512.0));
  // unary minus binds tighter than '^'
  CHECK(evaluate(parse("-2^2"), VarEnv{}) == Catch::Approx(4.0));
  CHECK(evaluate(parse("-(2^2)"), VarEnv{}) == Catch::Approx(-4.0));
  // scientific notation
  CHECK(evaluate(parse("1.5e-3 + 2E2"), VarEnv{}) == Catch::Approx(200.0015));
}

TEST_CASE("differentiate simple") {
  Expr d = differentiate(parse("r^2"), "r");
  CHECK(evaluate(d, VarEnv{{"r", 3.0}}) == Catch::Approx(6.0).epsilon(1e-15));

  Expr e2 = parse("exp(2*t)");
  Expr dd = differentiate(differentiate(e2, "t"), "t");
  CHECK(evaluate(dd, VarEnv{{"t", 0.0}}) == Catch::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("derivative matches centered finite difference") {
  Expr v = parse("sqrt(r^2 + 1 - 2/r^2)");
  Expr dv = differentiate(v, "r");
  auto f = [&](double r) { return evaluate(v, VarEnv{{"r", r}}); };
  const double fd = centered_diff(f, 2.0, 1e-5);
  const double sym = evaluate(dv, VarEnv{{"r", 2.0}});
  CHECK(std::abs(sym - fd) < 1e-8);
}

TEST_CASE("evaluate examples") {
  CHECK(evaluate(parse("2/phi - 1"), VarEnv{{"phi", 1.5}}) ==
        Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(evaluate(parse("r^2+1-2/r^2"), VarEnv{{"r", std::sqrt(2.0)}}) ==
        Catch::Approx(2.0).margin(1e-14));
  CHECK_THROWS_AS(evaluate(parse("log(x)"), VarEnv{{"x", -1.0}}), EvalError);
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(evaluate(parse("1/x"), VarEnv{{"x", 0.0}}), EvalError);
  CHECK_THROWS_AS(evaluate(parse("sqrt(x)"), VarEnv{{"x", -0.5}}), EvalError);
  // non-integer exponent needs a positive base
  CHECK_THROWS_AS(evaluate(parse("x^0.5"), VarEnv{{"x", -2.0}}), EvalError);
  CHECK(evaluate(parse("x^3"), VarEnv{{"x", -2.0}}) == Catch::Approx(-8.0));
  CHECK(evaluate(parse("x^-2"), VarEnv{{"x", -2.0}}) == Catch::Approx(0.25));
  CHECK_THROWS_AS(evaluate(parse("x^-2"), VarEnv{{"x", 0.0}}), EvalError);
  // d|x| at 0 is an evaluation-time domain error
  Expr dabs = differentiate(parse("abs(x)"), "x");
  CHECK(evaluate(dabs, VarEnv{{"x", -3.0}}) == Catch::Approx(-1.0));
  CHECK_THROWS_AS(evaluate(dabs, VarEnv{{"x", 0.0}}), EvalError);
}

TEST_CASE("derivative vs 5-point difference on random expressions") {
  ExprGen gen(911);
  int tested = 0;
  int generated = 0;
  while (tested < 1000 && generated < 20000) {
    ++generated;
    Expr e = gen.gen(4);
    Expr dx = differentiate(e, "x");
    const double x0 = gen.point();
    const double y0 = gen.point();
    auto f = [&](double x) { return evaluate(e, VarEnv{{"x", x}, {"y", y0}}); };
    double value, sym;
    try {
      value = f(x0);
      sym = evaluate(dx, VarEnv{{"x", x0}, {"y", y0}});
      const double h = 1e-4 * std::max(1.0, std::abs(x0));
      // keep the whole stencil in a scale where the difference quotient is
      // trustworthy; wilder expressions are regenerated
      bool tame = std::isfinite(value) && std::isfinite(sym) && std::abs(value) < 1e4 &&
                  std::abs(sym) < 1e4;
      for (int s = -2; s <= 2 && tame; ++s) {
        const double fs = f(x0 + s * h);
        tame = std::isfinite(fs) && std::abs(fs) < 1e4;
      }
      if (!tame) continue;
      const double fd = five_point_diff(f, x0, h);
      const double tol = std::max(1e-7, 1e-6 * std::max(std::abs(sym), std::abs(value)));
      // the difference quotient is only an oracle where it has converged
      if (std::abs(fd - five_point_diff(f, x0, 0.5 * h)) > 0.25 * tol) continue;
      CHECK(std::abs(sym - fd) < tol);
      ++tested;
    } catch (const EvalError&) {
      continue;  // generated expression undefined near the sample point
    }
  }
  REQUIRE(tested == 1000);
}

TEST_CASE("mixed partials commute") {
  ExprGen gen(402);
  int tested = 0;
  int generated = 0;
  while (tested < 200 && generated < 5000) {
    ++generated;
    Expr e = gen.gen(3);
    Expr dxy = differentiate(differentiate(e, "x"), "y");
    Expr dyx = differentiate(differentiate(e, "y"), "x");
    const double x0 = gen.point(), y0 = gen.point();
    try {
      const double a = evaluate(dxy, VarEnv{{"x", x0}, {"y", y0}});
      const double b = evaluate(dyx, VarEnv{{"x", x0}, {"y", y0}});
      if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a) > 1e8) continue;
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
      ++tested;
    } catch (const EvalError&) {
      continue;
    }
  }
  REQUIRE(tested == 200);
}

TEST_CASE("print-parse round trip preserves values") {
  ExprGen gen(77);
  int tested = 0;
  int generated = 0;
  while (tested < 500 && generated < 10000) {
    ++generated;
    Expr e = gen.gen(4);
    Expr back = parse(to_string(e));
    const double x0 = gen.point(), y0 = gen.point();
    VarEnv env{{"x", x0}, {"y", y0}};
    try {
      const double a = evaluate(e, env);
      const double b = evaluate(back, env);
      if (!std::isfinite(a)) continue;
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
      ++tested;
    } catch (const EvalError&) {
      continue;
    }
  }
  REQUIRE(tested == 500);

  // a couple of tricky fixed cases
  for (const char* src : {"-(x^2)", "-x^2", "x/(y/x)", "x^-2", "(-2)^3", "x - -y"}) {
    Expr e = parse(src);
    Expr back = parse(to_string(e));
    VarEnv env{{"x", 1.7}, {"y", 0.3}};
    CHECK(evaluate(back, env) == Catch::Approx(evaluate(e, env)).epsilon(1e-14));
  }
}

TEST_CASE("derivatives of any order") {
  // d^3/dr^3 of r^5 = 60 r^2
  Expr e = parse("r^5");
  for (int i = 0; i < 3; ++i) e = differentiate(e, "r");
  CHECK(evaluate(e, VarEnv{{"r", 2.0}}) == Catch::Approx(240.0).epsilon(1e-14));
}
