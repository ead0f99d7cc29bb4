#include <doctest.h>

#include <cmath>
#include <random>

#include "cdlab/error.hpp"
#include "cdlab/grid.hpp"
#include "cdlab/profiles.hpp"

using namespace cdlab;

namespace {

Field gaussian_derivative(const Grid1D& g) {
  // cell averages of d/dx exp(-x^2) from edge differences
  Field f{g, std::vector<double>(g.n()), 0.0};
  double left = std::exp(-g.x_min() * g.x_min());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = g.right_edge(i);
    const double right = std::exp(-x * x);
    f.values[i] = (right - left) / g.dx();
    left = right;
  }
  return f;
}

}  // namespace

TEST_CASE("grid construction rejects degenerate meshes") {
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 10), Error);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 4), Error);
  const Grid1D g(-1.0, 1.0, 20);
  CHECK(g.dx() == doctest::Approx(0.1));
  CHECK(g.center(0) == doctest::Approx(-0.95));
  CHECK(g.right_edge(19) == doctest::Approx(1.0));
}

TEST_CASE("norm selectors parse and reject unknown values") {
  CHECK(parse_norm("1") == Norm::L1);
  CHECK(parse_norm("2") == Norm::L2);
  CHECK(parse_norm("inf") == Norm::Linf);
  try {
    parse_norm("3");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
  }
}

TEST_CASE("quadrature is exact for constants and linear") {
  const Grid1D g(-2.0, 3.0, 50);
  const Field one = sample(g, 0.0, [](double) { return 1.0; });
  CHECK(quadrature(one) == doctest::Approx(5.0).epsilon(1e-15));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field a{g, std::vector<double>(g.n()), 0.0}, b = a, c = a;
  for (std::size_t i = 0; i < g.n(); ++i) {
    a.values[i] = U(rng);
    b.values[i] = U(rng);
    c.values[i] = 2.5 * a.values[i] - 0.75 * b.values[i];
  }
  CHECK(quadrature(c) == doctest::Approx(2.5 * quadrature(a) - 0.75 * quadrature(b)).epsilon(1e-13));
}

TEST_CASE("first moment of a shifted zero-mass field is unchanged") {
  const Grid1D g(-10.0, 10.0, 400);
  const Field f = gaussian_derivative(g);
  Field shifted = f;
  for (std::size_t i = g.n() - 1; i > 0; --i) shifted.values[i] = f.values[i - 1];
  shifted.values[0] = 0.0;
  // int x u = -int exp(-x^2) = -sqrt(pi)
  CHECK(first_moment(f).value == doctest::Approx(-std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(first_moment(shifted).value == doctest::Approx(first_moment(f).value).epsilon(1e-12));
  CHECK_FALSE(first_moment(f).boundary_warning);
  const Field clipped = gaussian_derivative(Grid1D(-1.0, 1.0, 40));
  CHECK(first_moment(clipped).boundary_warning);
}

TEST_CASE("unit box norms and homogeneity") {
  const Grid1D g(-1.0, 2.0, 30);
  Field box = sample(g, 0.0, [](double x) { return x > 0.0 && x < 1.0 ? 1.0 : 0.0; });
  CHECK(lp_norm(box, Norm::L1) == doctest::Approx(1.0));
  CHECK(lp_norm(box, Norm::L2) == doctest::Approx(1.0));
  CHECK(lp_norm(box, Norm::Linf) == doctest::Approx(1.0));
  Field scaled = box;
  for (double& v : scaled.values) v *= -3.0;
  for (Norm p : {Norm::L1, Norm::L2, Norm::Linf}) CHECK(lp_norm(scaled, p) == doctest::Approx(3.0 * lp_norm(box, p)));
}

TEST_CASE("norms of the q=2 N-wave at t=1") {
  const Grid1D g(-3.0, 3.0, 60000);
  const NWaveParams nw{1.0, 1.0, 2.0};
  const Field f = sample(g, 1.0, [&](double x) { return nwave_eval(nw, x, 1.0); });
  CHECK(lp_norm(f, Norm::L1) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(lp_norm(f, Norm::Linf) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("lp norms satisfy the triangle inequality on random pairs") {
  std::mt19937 rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  const Grid1D g(0.0, 1.0, 64);
  for (int trial = 0; trial < 50; ++trial) {
    Field a{g, std::vector<double>(g.n()), 0.0}, b = a, s = a;
    for (std::size_t i = 0; i < g.n(); ++i) {
      a.values[i] = N(rng);
      b.values[i] = N(rng);
      s.values[i] = a.values[i] + b.values[i];
    }
    for (Norm p : {Norm::L1, Norm::L2, Norm::Linf})
      CHECK(lp_norm(s, p) <= (lp_norm(a, p) + lp_norm(b, p)) * (1.0 + 1e-12));
  }
}

TEST_CASE("cumulative primitive") {
  SUBCASE("zero field") {
    const Field z = sample(Grid1D(0.0, 1.0, 16), 0.0, [](double) { return 0.0; });
    const Primitive P = cumulative_primitive(z);
    for (double v : P.field.values) CHECK(v == 0.0);
    CHECK(P.zero_mass);
  }
  SUBCASE("recovers the bump and closes at zero") {
    const Grid1D g(-8.0, 8.0, 1600);
    const Field u = gaussian_derivative(g);
    const Primitive P = cumulative_primitive(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double x = g.right_edge(i);
      worst = std::max(worst, std::abs(P.field.values[i] - std::exp(-x * x)));
    }
    CHECK(worst < g.dx());
    CHECK(std::abs(P.field.values.back()) <= 1e-9 * lp_norm(u, Norm::L1));
    CHECK(P.zero_mass);
  }
  SUBCASE("forward differences give back the values") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid1D g(0.0, 2.0, 40);
    Field u{g, std::vector<double>(g.n()), 0.0};
    for (double& v : u.values) v = U(rng);
    const Field P = cumulative_primitive(u).field;
    double prev = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
      CHECK((P.values[i] - prev) / g.dx() == doctest::Approx(u.values[i]).epsilon(1e-12));
      prev = P.values[i];
    }
    CHECK_FALSE(cumulative_primitive(u).zero_mass);
  }
}

TEST_CASE("resample") {
  const Grid1D g(-10.0, 10.0, 200);
  const Field u = gaussian_derivative(g);
  SUBCASE("identity grid is bitwise equal") {
    const Field r = resample(u, g);
    CHECK(r.values == u.values);
  }
  SUBCASE("extension with the same spacing keeps the quadrature") {
    const Field r = resample(u, Grid1D(-20.0, 20.0, 400));
    CHECK(std::abs(quadrature(r) - quadrature(u)) <= 1e-12 * lp_norm(u, Norm::L1));
    CHECK(r.values[100] == u.values[0]);
  }
  SUBCASE("integer refinement keeps the quadrature") {
    const Field r = resample(u, Grid1D(-10.0, 10.0, 800));
    CHECK(std::abs(quadrature(r) - quadrature(u)) <= 1e-12 * lp_norm(u, Norm::L1));
  }
  SUBCASE("clipping a Gaussian is an error") {
    const Field gauss = sample(g, 0.0, [](double x) { return std::exp(-x * x); });
    try {
      resample(gauss, Grid1D(-1.0, 1.0, 20));
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SupportClipping);
    }
  }
}

TEST_CASE("validate rejects malformed fields") {
  Field f{Grid1D(0.0, 1.0, 8), std::vector<double>(7), 0.0};
  CHECK_THROWS_AS(validate(f), Error);
  f.values.assign(8, 0.0);
  f.values[3] = std::nan("");
  CHECK_THROWS_AS(validate(f), Error);
}
