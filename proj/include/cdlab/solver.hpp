#pragma once

#include <cstddef>
#include <vector>

#include "cdlab/grid.hpp"

namespace cdlab {

/// Exponent of the convective flux |u|^q and the self-similarity exponent
/// a = (2 - q) / (q - 1) of the associated Hamilton-Jacobi equation.
class ModelParams {
 public:
  /// Throws Configuration unless q > 1.
  explicit ModelParams(double q);

  double q() const noexcept { return q_; }
  double a() const noexcept { return a_; }

  /// Test hook: false drops the flux term, leaving the heat equation.
  bool convection = true;

 private:
  double q_;
  double a_;
};

enum class DomainPolicy { Fixed, Expand };

struct SolverConfig {
  double cfl = 0.9;
  double t_end = 1.0;
  /// Absolute times, strictly increasing, in (u0.time, t_end].
  std::vector<double> output_times;
  DomainPolicy domain = DomainPolicy::Expand;
  /// Boundary-cell level that triggers a domain extension.
  double expand_trigger = 1e-10;
  /// Width multiplier applied on each extension (same dx).
  double expand_growth = 1.5;
  Tolerances tol;
};

/// Throws Configuration on an inconsistent configuration.
void validate(const SolverConfig& config, double t0);

enum class Sign { Nonneg, Nonpos, Mixed, Zero };

/// Size and shape quantities of an initial datum that the regime
/// conditions are phrased in.
struct DatumSummary {
  double linf_u = 0.0;   // ||u0||_inf
  double linf_ux = 0.0;  // ||d/dx u0||_inf, forward differences
  double linf_U = 0.0;   // ||U0||_inf
  double l1_u = 0.0;
  double first_moment = 0.0;  // int x u0 dx
  double mass = 0.0;
  Sign sign_U = Sign::Zero;
  /// Largest |x| on the datum grid and max |U0| over the outer 5% of cells;
  /// the finite-grid stand-in for the decay condition |x|^a U0(x) -> 0.
  double far_x = 0.0;
  double far_U = 0.0;
};

DatumSummary summarize_datum(const Field& u0);

struct Snapshot {
  Field u;
  Field U;
  /// int_{t0}^{t} int |u|^q dx ds.
  double lq_spacetime = 0.0;
};

struct Trajectory {
  ModelParams params{2.0};
  Field initial;
  DatumSummary datum;
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  std::size_t expansions = 0;
};

/// Engquist-Osher flux for f(u) = |u|^q: f(max(a,0)) + f(min(b,0)).
double eo_flux(double u_left, double u_right, double q);

/// cfl / (2/dx^2 + s/dx) with s = q max|u|^(q-1) the largest wave speed.
double stable_dt(const Field& f, const ModelParams& params, double cfl);

/// One explicit step of the conservative monotone scheme with no-flux
/// domain faces. Throws Stability if dt exceeds stable_dt(f, params, 1) and
/// BlowUp on a non-finite result.
Field step(const Field& f, const ModelParams& params, double dt);

/// Advances u0 from u0.time to config.t_end, recording (u, U) at each output
/// time. Throws Admissibility for data violating zero mass or u0 == 0.
Trajectory evolve(const Field& u0, const ModelParams& params, const SolverConfig& config);

/// Sup-norm residual of U_t - U_xx + |U_x|^q over interior cells, with U_t
/// from the two snapshots and spatial terms averaged between them.
double hj_residual(const Field& U1, const Field& U2, const ModelParams& params);

}  // namespace cdlab
