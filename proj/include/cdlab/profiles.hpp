#pragma once

#include <iosfwd>
#include <utility>
#include <variant>
#include <vector>

#include "cdlab/solver.hpp"

namespace cdlab {

/// I * G_x(x, t) with G the heat kernel.
struct HeatDipole {
  double i_infinity = 0.0;
};

/// Heat kernel (4 pi t)^{-1/2} exp(-x^2 / 4t).
double heat_kernel(double x, double t);
double heat_dipole_eval(const HeatDipole& p, double x, double t);

/// N-wave of z_t + (|z|^q)_x = 0 with negative-lobe mass alpha and
/// positive-lobe mass beta.
struct NWaveParams {
  double alpha = 0.0;
  double beta = 0.0;
  double q = 2.0;
};

/// Support [x_-(t), x_+(t)] with x_+ = q (beta/(q-1))^{(q-1)/q} t^{1/q} and
/// x_- the mirror image built from alpha. Both endpoints use the exponent
/// (q-1)/q, the one for which the lobe masses come out as alpha and beta.
std::pair<double, double> nwave_support(const NWaveParams& p, double t);
double nwave_eval(const NWaveParams& p, double x, double t);
/// (negative-lobe mass, positive-lobe mass) by quadrature over the support.
std::pair<double, double> nwave_lobe_masses(const NWaveParams& p, double t);

/// f'' of the self-similar profile W(x,t) = t^{-a/2} f(x / sqrt t):
///   f'' = -xi f'/2 - a f/2 + |f'|^q.
double vss_ode_rhs(double xi, double f, double fp, const ModelParams& params);

struct VssConfig {
  double xi_max = 20.0;
  /// xi_max is doubled on bracketing failure, up to this value.
  double xi_max_limit = 80.0;
  double rtol = 1e-10;
  double atol = 1e-16;
  double certificate_tol = 1e-6;
  double bisection_tol = 1e-12;
  int max_bisections = 200;
  /// Spacing of the stored (xi, f, f') table.
  double sample_step = 0.005;
  double probe_low = 1.0;
  double probe_high = 2.0;
};

/// Even, positive, decreasing profile f of the very singular solution on
/// [0, xi_max], tabulated with its derivative.
struct VssProfile {
  double q = 0.0;
  double a = 0.0;
  double mu_star = 0.0;
  double xi_max = 0.0;
  std::vector<double> xi;
  std::vector<double> f;
  std::vector<double> fp;
  /// xi_max^a f(xi_max).
  double certificate = 0.0;
  /// Fritsch-Carlson slopes for monotone cubic interpolation of f and f'.
  std::vector<double> f_slopes;
  std::vector<double> fp_slopes;
};

enum class ShotClass { Low, High };

/// Integrates the profile ODE from (mu, 0); Low if f reaches zero before
/// xi_max, High if f stays positive.
ShotClass vss_classify(double mu, const ModelParams& params, const VssConfig& config, double xi_max);

/// Shooting on f(0) = mu with bisection between Low and High initial values.
/// Throws Regime unless 1 < q < 3/2, BracketNotFound when no Low/High pair is
/// found up to xi_max_limit, NoConvergence when bisection or the decay
/// certificate fails.
VssProfile vss_shoot(const ModelParams& params, const VssConfig& config = {});

/// Largest per-unit-length defect of the table: each stored (f, f') is
/// advanced to the next sample by an independent fine RK4 and the mismatch
/// with the stored value is divided by the sample spacing.
double vss_table_residual(const VssProfile& p);

/// f and f' at xi >= 0 by monotone cubic interpolation; zero past xi_max.
double vss_profile_f(const VssProfile& p, double xi);
double vss_profile_fp(const VssProfile& p, double xi);

/// W(x, t) and W_x(x, t).
double vss_eval_U(const VssProfile& p, double x, double t);
double vss_eval_u(const VssProfile& p, double x, double t);

void write_vss_csv(std::ostream& os, const VssProfile& p);

using Profile = std::variant<HeatDipole, NWaveParams, VssProfile>;

/// u-level value of any profile at (x, t).
double profile_eval(const Profile& p, double x, double t);
const char* profile_name(const Profile& p);

}  // namespace cdlab
