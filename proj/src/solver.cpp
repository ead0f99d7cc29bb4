#include "cdlab/solver.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <span>
#include <sstream>
#include <string>

#include "cdlab/error.hpp"
#include "cdlab/power.hpp"

namespace cdlab {

ModelParams::ModelParams(double q) : q_(q) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    std::ostringstream msg;
    msg << "exponent q must satisfy q > 1 (got " << q << "); a = (2-q)/(q-1) is undefined otherwise";
    throw Error(ErrorKind::Configuration, msg.str());
  }
  a_ = (2.0 - q) / (q - 1.0);
}

void validate(const SolverConfig& c, double t0) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Configuration, m); };
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(c.t_end > t0) || !std::isfinite(c.t_end)) fail("t_end must exceed the initial time");
  double prev = t0;
  for (double t : c.output_times) {
    if (!(t > prev)) fail("output_times must be strictly increasing and after the initial time");
    if (t > c.t_end) fail("output time exceeds t_end");
    prev = t;
  }
  if (c.domain == DomainPolicy::Expand && !(c.expand_growth > 1.0))
    fail("expand_growth must exceed 1");
  if (!(c.expand_trigger > 0.0)) fail("expand_trigger must be positive");
  if (!(c.tol.far_field > 0.0) || !(c.tol.mass_relative > 0.0)) fail("tolerances must be positive");
}

DatumSummary summarize_datum(const Field& u0) {
  validate(u0);
  DatumSummary s;
  const double dx = u0.grid.dx();
  const auto& v = u0.values;
  s.linf_u = lp_norm(u0, Norm::Linf);
  s.l1_u = lp_norm(u0, Norm::L1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    s.linf_ux = std::max(s.linf_ux, std::abs(v[i + 1] - v[i]) / dx);
  // zero ghost values outside the grid
  s.linf_ux = std::max({s.linf_ux, std::abs(v.front()) / dx, std::abs(v.back()) / dx});
  s.first_moment = first_moment(u0).value;
  s.mass = quadrature(u0);

  const Field U = cumulative_primitive(u0).field;
  s.linf_U = lp_norm(U, Norm::Linf);
  const double floor = 1e-12 * s.linf_U;
  const bool has_pos = std::any_of(U.values.begin(), U.values.end(), [&](double x) { return x > floor; });
  const bool has_neg = std::any_of(U.values.begin(), U.values.end(), [&](double x) { return x < -floor; });
  s.sign_U = has_pos && has_neg ? Sign::Mixed : has_pos ? Sign::Nonneg : has_neg ? Sign::Nonpos : Sign::Zero;

  s.far_x = std::max(std::abs(u0.grid.x_min()), std::abs(u0.grid.x_max()));
  const std::size_t band = std::max<std::size_t>(1, v.size() / 20);
  for (std::size_t i = 0; i < band; ++i) {
    s.far_U = std::max({s.far_U, std::abs(U.values[i]), std::abs(U.values[v.size() - 1 - i])});
  }
  return s;
}

double eo_flux(double u_left, double u_right, double q) {
  return std::pow(std::max(u_left, 0.0), q) + std::pow(-std::min(u_right, 0.0), q);
}

namespace {

struct FluxSweep {
  double flux_integral = 0.0;  // dx * sum |u_i|^q
  double max_abs = 0.0;
};

// w_i = |u_i|^q; also returns the |u|^q integral and max |u|.
FluxSweep power_sweep(std::span<const double> u, std::span<double> w, const PowerLaw& pw, double dx) {
  const std::size_t n = u.size();
  const double* __restrict src = u.data();
  double* __restrict dst = w.data();
  pw.dispatch([&](auto pow_q) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = pow_q(std::abs(src[i]));
    return 0;
  });
  // blocked accumulators so the reductions vectorize; |u| is compared by its
  // bit pattern, which orders non-negative doubles and puts NaN above inf
  constexpr std::size_t B = 8;
  double s[B] = {};
  std::uint64_t m[B] = {};
  std::size_t i = 0;
  for (; i + B <= n; i += B) {
    for (std::size_t k = 0; k < B; ++k) {
      s[k] += dst[i + k];
      const std::uint64_t bits = std::bit_cast<std::uint64_t>(src[i + k]) & 0x7fffffffffffffffULL;
      m[k] = bits > m[k] ? bits : m[k];
    }
  }
  for (; i < n; ++i) {
    s[0] += dst[i];
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(src[i]) & 0x7fffffffffffffffULL;
    m[0] = bits > m[0] ? bits : m[0];
  }
  double total = 0.0;
  std::uint64_t mx = 0;
  for (std::size_t k = 0; k < B; ++k) {
    total += s[k];
    mx = std::max(mx, m[k]);
  }
  const double max_abs = std::bit_cast<double>(mx);
  return FluxSweep{dx * total, std::isfinite(total) ? max_abs : total};
}

double wave_speed(double max_abs, const ModelParams& params) {
  if (!params.convection || max_abs == 0.0) return 0.0;
  return params.q() * std::pow(max_abs, params.q() - 1.0);
}

double dt_bound(double dx, double speed, double cfl) {
  return cfl / (2.0 / (dx * dx) + speed / dx);
}

// out = u - (dt/dx)(F_{i+1/2} - F_{i-1/2}) + (dt/dx^2)(u_{i+1} - 2u_i + u_{i-1}),
// F from the Engquist-Osher splitting with w = |u|^q, and zero flux through
// both domain faces.
void advance(std::span<const double> u, std::span<const double> w, std::span<double> out, double dx,
             double dt, bool convection) {
  const std::size_t n = u.size();
  const double lam = convection ? dt / dx : 0.0;
  const double mu = dt / (dx * dx);
  const double* __restrict uu = u.data();
  const double* __restrict ww = w.data();
  double* __restrict o = out.data();
  auto flux = [&](std::size_t i) {  // F_{i+1/2}, 0 <= i < n-1
    return (uu[i] > 0.0 ? ww[i] : 0.0) + (uu[i + 1] < 0.0 ? ww[i + 1] : 0.0);
  };
  o[0] = uu[0] - lam * flux(0) + mu * (uu[1] - uu[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double fr = (uu[i] > 0.0 ? ww[i] : 0.0) + (uu[i + 1] < 0.0 ? ww[i + 1] : 0.0);
    const double fl = (uu[i - 1] > 0.0 ? ww[i - 1] : 0.0) + (uu[i] < 0.0 ? ww[i] : 0.0);
    o[i] = uu[i] - lam * (fr - fl) + mu * (uu[i + 1] - 2.0 * uu[i] + uu[i - 1]);
  }
  o[n - 1] = uu[n - 1] + lam * flux(n - 2) - mu * (uu[n - 1] - uu[n - 2]);
}

void check_finite(std::span<const double> v, double t) {
  for (double x : v) {
    if (!std::isfinite(x))
      throw Error(ErrorKind::BlowUp, "non-finite value produced at t=" + std::to_string(t));
  }
}

}  // namespace

double stable_dt(const Field& f, const ModelParams& params, double cfl) {
  validate(f);
  if (f.values.empty()) throw Error(ErrorKind::InvalidField, "empty field");
  return dt_bound(f.grid.dx(), wave_speed(lp_norm(f, Norm::Linf), params), cfl);
}

Field step(const Field& f, const ModelParams& params, double dt) {
  const double limit = stable_dt(f, params, 1.0);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt=" << dt << " violates the stability bound " << limit;
    throw Error(ErrorKind::Stability, msg.str());
  }
  const PowerLaw pw(params.q());
  std::vector<double> w(f.values.size());
  power_sweep(f.values, w, pw, f.grid.dx());
  Field out{f.grid, std::vector<double>(f.values.size()), f.time + dt};
  advance(f.values, w, out.values, f.grid.dx(), dt, params.convection);
  check_finite(out.values, out.time);
  return out;
}

Trajectory evolve(const Field& u0, const ModelParams& params, const SolverConfig& config) {
  validate(u0);
  validate(config, u0.time);

  Trajectory traj;
  traj.params = params;
  traj.initial = u0;
  traj.datum = summarize_datum(u0);
  if (traj.datum.linf_u == 0.0)
    throw Error(ErrorKind::Admissibility, "initial datum vanishes identically");
  if (std::abs(traj.datum.mass) > config.tol.mass_relative * traj.datum.l1_u) {
    std::ostringstream msg;
    msg << "initial datum has mass " << traj.datum.mass << " (||u0||_1 = " << traj.datum.l1_u
        << "); zero mass is required";
    throw Error(ErrorKind::Admissibility, msg.str());
  }

  Grid1D grid = u0.grid;
  std::vector<double> u = u0.values;
  std::vector<double> w(u.size());
  std::vector<double> next(u.size());
  const PowerLaw pw(params.q());
  const auto& outs = config.output_times;

  double t = u0.time;
  double lq = 0.0;
  double q_prev = 0.0;
  double dt_prev = 0.0;
  std::size_t k = 0;

  for (;;) {
    const FluxSweep sweep = power_sweep(u, w, pw, grid.dx());
    if (!std::isfinite(sweep.max_abs) || !std::isfinite(sweep.flux_integral))
      throw Error(ErrorKind::BlowUp, "non-finite value produced at t=" + std::to_string(t));
    if (dt_prev > 0.0) lq += 0.5 * dt_prev * (q_prev + sweep.flux_integral);

    if (k < outs.size() && t == outs[k]) {
      Field uf{grid, u, t};
      Field Uf = cumulative_primitive(uf, config.tol).field;
      traj.snapshots.push_back(Snapshot{std::move(uf), std::move(Uf), lq});
      ++k;
    }
    if (t >= config.t_end) break;

    const double target = k < outs.size() ? outs[k] : config.t_end;
    double dt = dt_bound(grid.dx(), wave_speed(sweep.max_abs, params), config.cfl);
    double t_new = t + dt;
    if (t + dt * (1.0 + 1e-9) >= target) {
      dt = target - t;
      t_new = target;
    } else if (t + 2.0 * dt > target) {
      dt = 0.5 * (target - t);
      t_new = t + dt;
    }

    advance(u, w, next, grid.dx(), dt, params.convection);
    u.swap(next);
    t = t_new;
    q_prev = sweep.flux_integral;
    dt_prev = dt;
    ++traj.steps;

    if (config.domain == DomainPolicy::Expand &&
        (std::abs(u.front()) > config.expand_trigger || std::abs(u.back()) > config.expand_trigger)) {
      const auto extra = static_cast<std::size_t>(
          std::ceil(0.5 * (config.expand_growth - 1.0) * static_cast<double>(grid.n())));
      const Grid1D wider = Grid1D::from_spacing(
          grid.x_min() - static_cast<double>(extra) * grid.dx(), grid.dx(), grid.n() + 2 * extra);
      std::vector<double> grown(wider.n(), 0.0);
      std::copy(u.begin(), u.end(), grown.begin() + static_cast<std::ptrdiff_t>(extra));
      u.swap(grown);
      grid = wider;
      w.assign(u.size(), 0.0);
      next.assign(u.size(), 0.0);
      ++traj.expansions;
    }
  }
  return traj;
}

double hj_residual(const Field& U1, const Field& U2, const ModelParams& params) {
  validate(U1);
  validate(U2);
  if (!U1.grid.same_as(U2.grid)) throw Error(ErrorKind::GridMismatch, "snapshots live on different grids");
  const double span = U2.time - U1.time;
  if (span == 0.0) throw Error(ErrorKind::GridMismatch, "snapshots share the same time");

  const double dx = U1.grid.dx();
  const double q = params.q();
  auto spatial = [&](const std::vector<double>& U, std::size_t j) {
    const double uxx = (U[j + 1] - 2.0 * U[j] + U[j - 1]) / (dx * dx);
    const double ux = (U[j + 1] - U[j - 1]) / (2.0 * dx);
    return uxx - std::pow(std::abs(ux), q);
  };
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < U1.values.size(); ++j) {
    const double ut = (U2.values[j] - U1.values[j]) / span;
    const double r = ut - 0.5 * (spatial(U1.values, j) + spatial(U2.values, j));
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace cdlab
