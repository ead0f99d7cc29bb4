#include <doctest.h>

#include <cmath>
#include <random>

#include "cdlab/diagnostics.hpp"
#include "cdlab/error.hpp"
#include "cdlab/scenarios.hpp"

using namespace cdlab;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::Fit;
}

RateSeries power_series(double c, double slope, std::vector<double> times) {
  RateSeries s;
  for (double t : times) {
    s.times.push_back(t);
    s.values.push_back(c * std::pow(t, slope));
  }
  return s;
}

std::vector<double> log_times(double a, double b, int n) {
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(a * std::pow(b / a, k / double(n - 1)));
  return t;
}

}  // namespace

TEST_CASE("rate fit recovers power laws") {
  const auto times = log_times(1.0, 1000.0, 31);
  CHECK(rate_fit(power_series(2.0, -0.5, times)).slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(rate_fit(power_series(4.0, 0.0, times)).slope) < 1e-12);
  CHECK(rate_fit(power_series(1.0, -0.5, times), 0.5).points >= 4);

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  RateSeries noisy = power_series(3.0, -0.8, times);
  for (double& v : noisy.values) v *= std::exp(noise(rng));
  const RateFit f = rate_fit(noisy);
  CHECK(f.slope > -0.85);
  CHECK(f.slope < -0.75);

  // the slope does not see a constant factor
  RateSeries scaled = noisy;
  for (double& v : scaled.values) v *= 17.0;
  CHECK(rate_fit(scaled).slope == doctest::Approx(f.slope).epsilon(1e-12));
}

TEST_CASE("rate fit rejects degenerate input") {
  CHECK(kind_of([] { rate_fit(power_series(1.0, -1.0, {1.0, 2.0, 3.0})); }) == ErrorKind::Fit);
  CHECK(kind_of([] { rate_fit(power_series(1.0, -1.0, {5.0, 5.0, 5.0, 5.0, 5.0})); }) == ErrorKind::Fit);
  RateSeries zeros = power_series(0.0, 0.0, log_times(1.0, 10.0, 8));
  CHECK(rate_fit(zeros).floored);
}

TEST_CASE("verdicts") {
  RateFit f;
  f.slope = -0.3;
  CHECK(classify_rate(f, 0.1) == Verdict::Converging);
  CHECK(classify_rate(f, 0.7) == Verdict::Bounded);
  CHECK(classify_rate(f, 0.7, 0.8) == Verdict::Converging);
  f.slope = 0.01;
  CHECK(classify_rate(f, 0.0) == Verdict::Bounded);
  f.slope = 0.2;
  CHECK(classify_rate(f, 0.0) == Verdict::Diverging);
}

TEST_CASE("I_inf estimators on a q=2 run") {
  ExperimentSetup s;
  s.q = 2.0;
  s.grid = Grid1D(-40.0, 40.0, 1600);
  s.solver.t_end = 20.0;
  s.solver.output_times = {5.0, 10.0, 20.0};
  const Datum d = make_datum(s.datum, s.grid);
  const Trajectory tr = evolve(d.field, ModelParams(2.0), s.solver);
  const IInfinityEstimate e = i_infinity_estimate(tr);
  // -int x u0 = int U0 = A w sqrt(pi) is the upper bound
  const double upper = 2.0 * std::sqrt(M_PI);
  CHECK(e.integral_based > 0.0);
  CHECK(e.integral_based < upper);
  CHECK(e.identity_defect < 1e-3 * upper);
  CHECK(e.gap < 0.1 * e.integral_based);
  CHECK_FALSE(e.boundary_warning);
  // the integral estimate can only shrink as lq_spacetime grows
  CHECK(i_infinity_estimate(tr, 0).integral_based >= e.integral_based);
  CHECK(kind_of([&] { i_infinity_estimate(tr, 7); }) == ErrorKind::Configuration);
}

TEST_CASE("without convection I_inf is the initial moment") {
  const Grid1D g(-30.0, 30.0, 600);
  const Datum d = make_datum(DatumSpec{}, g);
  ModelParams heat(2.0);
  heat.convection = false;
  SolverConfig c;
  c.t_end = 5.0;
  c.output_times = {1.0, 5.0};
  const Trajectory tr = evolve(d.field, heat, c);
  const IInfinityEstimate early = i_infinity_estimate(tr, 0);
  const IInfinityEstimate e = i_infinity_estimate(tr);
  CHECK(e.moment_based == doctest::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(early.moment_based == doctest::Approx(e.moment_based).epsilon(1e-12));
  // the dipole fit is asymptotic: it closes in on the moment as t grows
  CHECK(std::abs(e.projection_based - e.moment_based) < std::abs(early.projection_based - early.moment_based));
}

TEST_CASE("sigma of an exact N-wave is its lobe mass") {
  const NWaveParams nw{1.0, 1.0, 2.0};
  const Trajectory tr = sampled_trajectory(nw, Grid1D(-20.0, 20.0, 4000), {1.0, 2.0, 5.0, 10.0, 20.0, 50.0},
                                           ModelParams(2.0));
  const SigmaEstimate s = sigma_estimate(tr);
  CHECK(s.sigma == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(std::abs(s.tail_slope) < 1e-2);
  CHECK(s.hyperbolic);
}

TEST_CASE("sigma needs U0 <= 0") {
  const Trajectory tr = sampled_trajectory(HeatDipole{1.0}, Grid1D(-20.0, 20.0, 400), {1.0, 2.0}, ModelParams(2.0));
  CHECK(kind_of([&] { sigma_estimate(tr); }) == ErrorKind::Regime);
}

TEST_CASE("a small q=2 datum loses its lobe mass") {
  DatumSpec spec;
  spec.amplitude = 0.05;
  spec.orientation = Orientation::U0Nonpos;
  const Grid1D g(-100.0, 100.0, 1000);
  const Datum d = make_datum(spec, g);
  SolverConfig c;
  c.t_end = 500.0;
  c.output_times = log_times(5.0, 500.0, 11);
  const SigmaEstimate s = sigma_estimate(evolve(d.field, ModelParams(2.0), c));
  CHECK(s.sigma < 0.05 * spec.amplitude);
  CHECK_FALSE(s.hyperbolic);
}

TEST_CASE("one-sided gradient bound on an exact q=2 N-wave") {
  const NWaveParams nw{1.0, 1.0, 2.0};
  const Trajectory tr =
      sampled_trajectory(nw, Grid1D(-30.0, 30.0, 6000), log_times(1.0, 64.0, 13), ModelParams(2.0));
  const OleinikReport r = oleinik_check(tr);
  for (double v : r.scaled_sup) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.fitted_C == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(r.tail_slope) < 1e-9);
  CHECK(r.static_ok);
  CHECK_FALSE(r.trivially_met_at_start);
  const OleinikReport windowed = oleinik_check(tr, TimeWindow{30.0, 100.0});
  CHECK(std::isnan(windowed.tail_slope));
  CHECK(windowed.times.size() == tr.snapshots.size());
  CHECK(kind_of([&] {
          Trajectory bad = tr;
          bad.params = ModelParams(2.5);
          oleinik_check(bad);
        }) == ErrorKind::Regime);
}

TEST_CASE("one-sided bound along a solver run") {
  DatumSpec spec;
  spec.orientation = Orientation::U0Nonpos;
  const Grid1D g(-40.0, 40.0, 800);
  const Datum d = make_datum(spec, g);
  for (double q : {1.25, 1.75, 2.0}) {
    SolverConfig c;
    c.t_end = 100.0;
    c.output_times = log_times(1.0, 100.0, 9);
    const OleinikReport r = oleinik_check(evolve(d.field, ModelParams(q), c));
    CHECK(r.static_ok);
    for (double s : r.sup_ux) CHECK(s <= r.bound_static + r.slack);
  }
}

TEST_CASE("profile error series") {
  const NWaveParams nw{1.0, 1.0, 2.0};
  const Grid1D g(-30.0, 30.0, 3000);
  const std::vector<double> times{1.0, 2.0, 4.0, 8.0};
  const Trajectory tr = sampled_trajectory(nw, g, times, ModelParams(2.0));
  const RateSeries self = profile_error_series(tr, nw, Norm::L1, 0.0);
  REQUIRE(self.values.size() == 3);
  for (double v : self.values) CHECK(v == 0.0);
  CHECK(kind_of([&] { profile_error_series(tr, nw, Norm::Linf, 0.0); }) == ErrorKind::Configuration);
  const RateSeries windowed = profile_error_series(tr, nw, Norm::L2, 0.0, TimeWindow{3.0, 5.0});
  CHECK(windowed.times == std::vector<double>{4.0});
  const Trajectory narrow = sampled_trajectory(nw, Grid1D(-3.0, 3.0, 300), times, ModelParams(2.0));
  CHECK(kind_of([&] { profile_error_series(narrow, nw, Norm::L1, 0.0); }) == ErrorKind::GridCoverage);
  const RateSeries other = profile_error_series(tr, NWaveParams{1.0, 2.0, 2.0}, Norm::L1, 0.5);
  for (double r : other.relative) CHECK(r > 0.1);
}
