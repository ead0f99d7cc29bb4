#include <doctest.h>

#include <cmath>
#include <random>

#include "cdlab/error.hpp"
#include "cdlab/profiles.hpp"
#include "cdlab/solver.hpp"

using namespace cdlab;

namespace {

// Cell averages of d/dx P from edge differences of the primitive P.
template <typename Prim>
Field from_primitive(const Grid1D& g, double t, Prim P) {
  Field f{g, std::vector<double>(g.n()), t};
  double left = P(g.x_min());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double right = P(g.right_edge(i));
    f.values[i] = (right - left) / g.dx();
    left = right;
  }
  return f;
}

// u0 = -d/dx G(., 1), so U0 = G(., 1) >= 0.
Field dipole(const Grid1D& g) {
  return from_primitive(g, 0.0, [](double x) { return heat_kernel(x, 1.0); });
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::Fit;
}

}  // namespace

TEST_CASE("model parameters") {
  CHECK(kind_of([] { ModelParams p(1.0); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { ModelParams p(0.5); }) == ErrorKind::Configuration);
  CHECK(ModelParams(1.25).a() == doctest::Approx(3.0));
  CHECK(ModelParams(2.0).a() == 0.0);
  CHECK(ModelParams(1.75).a() > 0.0);
  CHECK(ModelParams(2.5).a() < 0.0);
}

TEST_CASE("Engquist-Osher flux") {
  CHECK(eo_flux(0.0, 0.0, 2.0) == 0.0);
  CHECK(eo_flux(1.0, -1.0, 2.0) == doctest::Approx(2.0));
  CHECK(eo_flux(-1.0, 1.0, 2.0) == 0.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double a = U(rng), b = U(rng), d = std::abs(U(rng));
    const double q = 1.1 + 0.4 * std::abs(U(rng));
    CHECK(eo_flux(a, a, q) == doctest::Approx(std::pow(std::abs(a), q)));
    CHECK(eo_flux(a + d, b, q) >= eo_flux(a, b, q));
    CHECK(eo_flux(a, b + d, q) <= eo_flux(a, b, q));
  }
}

TEST_CASE("stable time step") {
  const Grid1D g(0.0, 1.0, 10);
  Field f{g, std::vector<double>(10, 0.0), 0.0};
  f.values[3] = -1.0;
  CHECK(stable_dt(f, ModelParams(2.0), 0.9) == doctest::Approx(0.9 / 220.0).epsilon(1e-14));
  const Field z{g, std::vector<double>(10, 0.0), 0.0};
  CHECK(stable_dt(z, ModelParams(2.0), 0.9) == doctest::Approx(0.9 * 0.01 / 2.0).epsilon(1e-14));
  const Field z2{Grid1D(0.0, 2.0, 10), std::vector<double>(10, 0.0), 0.0};
  CHECK(stable_dt(z2, ModelParams(2.0), 0.9) == doctest::Approx(4.0 * stable_dt(z, ModelParams(2.0), 0.9)));
  const Field empty{g, {}, 0.0};
  CHECK(kind_of([&] { stable_dt(empty, ModelParams(2.0), 0.9); }) == ErrorKind::InvalidField);
}

TEST_CASE("single steps") {
  const ModelParams params(2.0);
  const Grid1D g(-1.0, 1.0, 20);
  SUBCASE("zero is a fixed point") {
    const Field z{g, std::vector<double>(g.n(), 0.0), 0.0};
    const Field out = step(z, params, stable_dt(z, params, 0.9));
    for (double v : out.values) CHECK(v == 0.0);
  }
  SUBCASE("a single cell keeps its mass") {
    Field f{g, std::vector<double>(g.n(), 0.0), 0.0};
    f.values[7] = 3.0;
    const Field out = step(f, params, stable_dt(f, params, 0.9));
    CHECK(std::abs(quadrature(out) - quadrature(f)) <= 1e-14 * quadrature(f));
    CHECK(out.time == doctest::Approx(stable_dt(f, params, 0.9)));
  }
  SUBCASE("mass leaves through neither face") {
    Field f{g, std::vector<double>(g.n(), 0.0), 0.0};
    f.values.front() = 2.0;
    f.values.back() = -1.5;
    Field out = f;
    for (int k = 0; k < 50; ++k) out = step(out, params, stable_dt(out, params, 0.9));
    CHECK(quadrature(out) == doctest::Approx(quadrature(f)).epsilon(1e-14));
  }
  SUBCASE("a step above the stability bound is refused") {
    Field f{g, std::vector<double>(g.n(), 0.0), 0.0};
    f.values[5] = 1.0;
    const double dt = 1.5 * stable_dt(f, params, 1.0);
    CHECK(kind_of([&] { step(f, params, dt); }) == ErrorKind::Stability);
  }
}

TEST_CASE("without the flux the scheme is second-order for the heat equation") {
  ModelParams heat(2.0);
  heat.convection = false;
  auto error_at = [&](std::size_t n) {
    const Grid1D g(-12.0, 12.0, n);
    Field u = sample(g, 1.0, [](double x) { return heat_kernel(x, 1.0); });
    const double t_end = 1.1;
    while (u.time < t_end) {
      const double dt = std::min(stable_dt(u, heat, 0.9), t_end - u.time);
      u = step(u, heat, dt);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(u.values[i] - heat_kernel(g.center(i), t_end)));
    return worst;
  };
  const double e1 = error_at(240);
  const double e2 = error_at(480);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("evolve rejects inadmissible data") {
  const Grid1D g(-5.0, 5.0, 100);
  SolverConfig c;
  c.t_end = 1.0;
  const Field zero{g, std::vector<double>(g.n(), 0.0), 0.0};
  CHECK(kind_of([&] { evolve(zero, ModelParams(2.0), c); }) == ErrorKind::Admissibility);
  const Field bump = sample(g, 0.0, [](double x) { return std::exp(-x * x); });
  CHECK(kind_of([&] { evolve(bump, ModelParams(2.0), c); }) == ErrorKind::Admissibility);
  c.output_times = {2.0};
  CHECK(kind_of([&] { evolve(dipole(g), ModelParams(2.0), c); }) == ErrorKind::Configuration);
}

TEST_CASE("dipole run: conservation, maximum principle, exact output times") {
  const Grid1D g(-30.0, 30.0, 1200);
  const Field u0 = dipole(g);
  SolverConfig c;
  c.t_end = 10.0;
  c.output_times = {0.5, 1.0, 2.0, 3.7, 5.0, 7.5, 10.0};
  const Trajectory tr = evolve(u0, ModelParams(2.0), c);
  REQUIRE(tr.snapshots.size() == c.output_times.size());
  double prev_U = cumulative_primitive(u0).field.values.empty() ? 0.0 : tr.datum.linf_U;
  double prev_lq = 0.0;
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const Snapshot& s = tr.snapshots[k];
    CHECK(s.u.time == c.output_times[k]);
    CHECK(std::abs(quadrature(s.u)) <= 1e-12);
    const double U = lp_norm(s.U, Norm::Linf);
    CHECK(U <= prev_U + 1e-10);
    prev_U = U;
    CHECK(s.lq_spacetime >= prev_lq);
    prev_lq = s.lq_spacetime;
    // U0 >= 0 stays non-negative up to the discrete slack
    for (double v : s.U.values) CHECK(v >= -10.0 * g.dx() * tr.datum.linf_u);
  }
}

TEST_CASE("mass is conserved to 1e-12 across domain expansions") {
  const Grid1D g(-12.0, 12.0, 240);
  const Field u0 = from_primitive(g, 0.0, [](double x) { return -3.0 * std::exp(-x * x / 4.0); });
  for (double q : {1.25, 1.75, 2.0}) {
    SolverConfig c;
    c.t_end = 60.0;
    c.output_times = {5.0, 20.0, 60.0};
    const Trajectory tr = evolve(u0, ModelParams(q), c);
    CHECK(tr.expansions > 0);
    for (const Snapshot& s : tr.snapshots)
      CHECK(std::abs(quadrature(s.u)) <= 1e-12 * lp_norm(u0, Norm::L1));
    CHECK(tr.snapshots.back().u.grid.dx() == doctest::Approx(g.dx()).epsilon(1e-14));
  }
}

TEST_CASE("discrete comparison principle on random ordered pairs") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.0, 0.5);
  for (int pair = 0; pair < 20; ++pair) {
    const ModelParams params(1.1 + 0.9 * gap(rng) * 2.0);
    const Grid1D g(-2.0, 2.0, 24);
    Field u{g, std::vector<double>(g.n()), 0.0};
    Field v = u;
    for (std::size_t i = 0; i < g.n(); ++i) {
      u.values[i] = U(rng);
      v.values[i] = u.values[i] + gap(rng);
    }
    for (int k = 0; k < 200; ++k) {
      const double dt = std::min(stable_dt(u, params, 0.9), stable_dt(v, params, 0.9));
      u = step(u, params, dt);
      v = step(v, params, dt);
      for (std::size_t i = 0; i < g.n(); ++i) REQUIRE(u.values[i] <= v.values[i] + 1e-15);
    }
  }
}

TEST_CASE("Hamilton-Jacobi residual") {
  const ModelParams params(2.0);
  const Grid1D g(-10.0, 10.0, 400);
  SUBCASE("zero pair") {
    const Field z0{g, std::vector<double>(g.n(), 0.0), 1.0};
    const Field z1{g, std::vector<double>(g.n(), 0.0), 1.1};
    CHECK(hj_residual(z0, z1, params) == 0.0);
  }
  SUBCASE("mismatched grids") {
    const Field a{g, std::vector<double>(g.n(), 0.0), 1.0};
    const Field b{Grid1D(-10.0, 10.0, 200), std::vector<double>(200, 0.0), 1.1};
    CHECK(kind_of([&] { hj_residual(a, b, params); }) == ErrorKind::GridMismatch);
  }
  SUBCASE("a heat solution is detected as the wrong model") {
    // U = G(x, t) solves the heat equation, so the residual is |U_x|^q
    auto at = [&](double t) {
      Field U{g, std::vector<double>(g.n()), t};
      for (std::size_t i = 0; i < g.n(); ++i) U.values[i] = heat_kernel(g.right_edge(i), t);
      return U;
    };
    const double r = hj_residual(at(1.0), at(1.001), params);
    double ux_max = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double x = g.right_edge(i);
      ux_max = std::max(ux_max, std::abs(-x / 2.0 * heat_kernel(x, 1.0)));
    }
    CHECK(r == doctest::Approx(ux_max * ux_max).epsilon(0.02));
  }
  SUBCASE("the solver's primitive drives the residual to zero under refinement") {
    auto residual = [&](std::size_t n) {
      const Grid1D gg(-15.0, 15.0, n);
      SolverConfig c;
      c.t_end = 1.05;
      c.output_times = {1.0, 1.05};
      c.domain = DomainPolicy::Fixed;
      const Trajectory tr = evolve(dipole(gg), params, c);
      return hj_residual(tr.snapshots[0].U, tr.snapshots[1].U, params);
    };
    const double r1 = residual(300);
    const double r2 = residual(600);
    CHECK(r2 < r1);
    CHECK(r1 / r2 > 1.6);
  }
}

TEST_CASE("scaled sup norm stays below the N-wave ceiling") {
  // |u| <= ((||U0||/(q-1)) / t)^{1/q}; an N-wave carrying all of U0 attains it
  const Grid1D g(-20.0, 20.0, 400);
  const Field u0 = from_primitive(g, 0.0, [](double x) { return -2.0 * std::exp(-x * x / 4.0); });
  for (double q : {1.25, 1.75}) {
    SolverConfig c;
    c.t_end = 1000.0;
    c.output_times = {10.0, 50.0, 200.0, 1000.0};
    const Trajectory tr = evolve(u0, ModelParams(q), c);
    const double ceiling = std::pow(1.0 / (q - 1.0), 1.0 / q);
    for (const Snapshot& s : tr.snapshots) {
      const double scaled = lp_norm(s.u, Norm::Linf) * std::pow(s.u.time / tr.datum.linf_U, 1.0 / q);
      CHECK(scaled < ceiling);
    }
  }
}
