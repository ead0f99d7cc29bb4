#pragma once

#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

#include "cdlab/profiles.hpp"
#include "cdlab/solver.hpp"

namespace cdlab {

/// (t, value) pairs of a scaled quantity, e.g. t^e ||u(t) - P(t)||_p.
struct RateSeries {
  std::vector<double> times;
  std::vector<double> values;
  /// ||u(t) - P(t)||_p / ||u(t)||_p; empty for series that are not errors.
  std::vector<double> relative;
  double exponent = 0.0;
  Norm p = Norm::L1;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS of the log-log residuals over the fitted window.
  double residual = 0.0;
  std::size_t points = 0;
  /// Non-positive values were replaced by the smallest normal double.
  bool floored = false;
};

/// Least-squares line through (log t, log value) over the last
/// `tail_fraction` of the series in log-time. Throws Fit with fewer than 4
/// points in the window or when all times coincide.
RateFit rate_fit(const RateSeries& series, double tail_fraction = 0.5);

/// Slopes below -kRateTolerance certify decay, |slope| <= kRateTolerance
/// certifies boundedness.
inline constexpr double kRateTolerance = 0.05;

enum class Verdict { Converging, Bounded, Diverging };
std::string_view to_string(Verdict v);

/// Converging needs a decaying fit and a final relative error below
/// `relative_gate`; a decaying absolute error against a profile that is
/// itself far from the solution is not convergence.
Verdict classify_rate(const RateFit& fit, double final_relative,
                      double relative_gate = 0.5);

struct IInfinityEstimate {
  double t_end = 0.0;
  /// -int x u0 dx - int_0^t int |u|^q dx ds.
  double integral_based = 0.0;
  /// Least-squares amplitude of the dipole G_x(., t) fitted to u(t).
  double projection_based = 0.0;
  /// -int x u(t) dx; equals integral_based up to discretization.
  double moment_based = 0.0;
  /// |integral_based - projection_based|.
  double gap = 0.0;
  /// |integral_based - moment_based|, the discrete-identity defect.
  double identity_defect = 0.0;
  bool boundary_warning = false;
};

/// Estimates from snapshot `index` (default: the last one).
IInfinityEstimate i_infinity_estimate(const Trajectory& traj, std::size_t index);
IInfinityEstimate i_infinity_estimate(const Trajectory& traj);

struct TimeWindow {
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
};

struct SigmaThresholds {
  double fraction_of_U0 = 0.05;
  double min_tail_slope = -0.05;
};

struct SigmaEstimate {
  double sigma = 0.0;  // ||U(t_end)||_inf
  double tail_slope = 0.0;
  std::vector<double> times;
  std::vector<double> linf_U;
  /// sigma > fraction * ||U0||_inf and tail slope above min_tail_slope.
  bool hyperbolic = false;
};

/// Surviving lobe mass lim ||U(t)||_inf. Throws Regime unless U0 <= 0.
SigmaEstimate sigma_estimate(const Trajectory& traj, const SigmaThresholds& th = {});

struct OleinikReport {
  std::vector<double> times;
  std::vector<double> sup_ux;
  double bound_static = 0.0;
  std::vector<double> scaled_sup;
  /// Largest scaled value over the fitted tail.
  double fitted_C = 0.0;
  /// NaN when the window holds fewer than 4 tail snapshots.
  double tail_slope = 0.0;
  /// Largest sup_ux - bound_static over the snapshots.
  double static_excess = -std::numeric_limits<double>::infinity();
  double slack = 0.0;
  bool static_ok = true;
  /// sup_ux(t0) <= 0: the one-sided bound holds trivially at the start.
  bool trivially_met_at_start = false;
};

/// One-sided gradient bound sup_x u_x(t) <= min(||u0_x||, C t^{-2/q} ||U0||^{(2-q)/q}).
/// The static bound is checked at every snapshot; the scaled tail is fitted
/// over snapshots inside `window`. `slack` defaults to 10 dx of the initial
/// grid. Throws Regime unless 1 < q <= 2.
OleinikReport oleinik_check(const Trajectory& traj, const TimeWindow& window = {}, double slack = -1.0);

/// t^exponent ||u(t) - profile(., t)||_p for snapshots inside `window`.
/// Throws Configuration for N-wave targets with p = inf and GridCoverage when
/// the profile is significant at the snapshot grid boundary.
RateSeries profile_error_series(const Trajectory& traj, const Profile& profile, Norm p, double exponent,
                                const TimeWindow& window = {});

/// Test hook: a trajectory whose datum and snapshots are the profile itself
/// sampled at `times` (the first time becomes the datum).
Trajectory sampled_trajectory(const Profile& profile, const Grid1D& grid, const std::vector<double>& times,
                              const ModelParams& params);

void write_rate_series_csv(std::ostream& os, const RateSeries& s, double q);
void write_oleinik_csv(std::ostream& os, const OleinikReport& r, double q);

}  // namespace cdlab
