#include "cdlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "cdlab/error.hpp"

namespace cdlab {

namespace {

std::vector<std::size_t> tail_indices(const std::vector<double>& times, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw Error(ErrorKind::Configuration, "tail fraction must lie in (0, 1]");
  std::vector<std::size_t> idx;
  if (times.empty()) return idx;
  const double l0 = std::log(times.front());
  const double l1 = std::log(times.back());
  const double cut = l1 - tail_fraction * (l1 - l0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::log(times[i]) >= cut - 1e-12 * std::max(1.0, std::abs(cut))) idx.push_back(i);
  }
  return idx;
}

}  // namespace

RateFit rate_fit(const RateSeries& series, double tail_fraction) {
  if (series.times.size() != series.values.size())
    throw Error(ErrorKind::Fit, "times and values differ in length");
  for (double t : series.times) {
    if (!(t > 0.0)) throw Error(ErrorKind::Fit, "rate fits need positive times");
  }
  const auto idx = tail_indices(series.times, tail_fraction);
  if (idx.size() < 4)
    throw Error(ErrorKind::Fit, "rate fit needs at least 4 points in the tail window (have " +
                                    std::to_string(idx.size()) + ")");
  RateFit fit;
  fit.points = idx.size();
  std::vector<double> lx, ly;
  for (std::size_t i : idx) {
    double v = series.values[i];
    if (!(v > 0.0)) {
      v = std::numeric_limits<double>::min();
      fit.floored = true;
    }
    lx.push_back(std::log(series.times[i]));
    ly.push_back(std::log(v));
  }
  const auto m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx))) throw Error(ErrorKind::Fit, "degenerate series: all times coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Converging: return "CONVERGING";
    case Verdict::Bounded: return "BOUNDED";
    case Verdict::Diverging: return "DIVERGING";
  }
  return "?";
}

Verdict classify_rate(const RateFit& fit, double final_relative, double relative_gate) {
  if (fit.slope > kRateTolerance) return Verdict::Diverging;
  if (fit.slope < -kRateTolerance && final_relative < relative_gate) return Verdict::Converging;
  return Verdict::Bounded;
}

IInfinityEstimate i_infinity_estimate(const Trajectory& traj, std::size_t index) {
  if (index >= traj.snapshots.size())
    throw Error(ErrorKind::Configuration, "snapshot index out of range");
  const Snapshot& s = traj.snapshots[index];
  IInfinityEstimate e;
  e.t_end = s.u.time;
  const MomentResult m0 = first_moment(traj.initial);
  const MomentResult mt = first_moment(s.u);
  e.integral_based = -m0.value - s.lq_spacetime;
  e.moment_based = -mt.value;
  e.boundary_warning = m0.boundary_warning || mt.boundary_warning;

  // G_x is measured from the datum's time origin.
  const double t = s.u.time;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.u.values.size(); ++i) {
    const double g = heat_dipole_eval(HeatDipole{1.0}, s.u.grid.center(i), t);
    num += s.u.values[i] * g;
    den += g * g;
  }
  e.projection_based = den > 0.0 ? num / den : 0.0;
  e.gap = std::abs(e.integral_based - e.projection_based);
  e.identity_defect = std::abs(e.integral_based - e.moment_based);
  return e;
}

IInfinityEstimate i_infinity_estimate(const Trajectory& traj) {
  if (traj.snapshots.empty()) throw Error(ErrorKind::Configuration, "trajectory has no snapshots");
  return i_infinity_estimate(traj, traj.snapshots.size() - 1);
}

SigmaEstimate sigma_estimate(const Trajectory& traj, const SigmaThresholds& th) {
  if (traj.datum.sign_U != Sign::Nonpos)
    throw Error(ErrorKind::Regime, "sigma estimation needs a datum with U0 <= 0");
  if (traj.snapshots.empty()) throw Error(ErrorKind::Configuration, "trajectory has no snapshots");
  SigmaEstimate est;
  for (const Snapshot& s : traj.snapshots) {
    est.times.push_back(s.u.time);
    est.linf_U.push_back(lp_norm(s.U, Norm::Linf));
  }
  est.sigma = est.linf_U.back();

  // last decade of snapshots, at least four points
  const double t_end = est.times.back();
  std::size_t first = est.times.size();
  while (first > 0 && est.times[first - 1] >= 0.1 * t_end) --first;
  first = std::min(first, est.times.size() >= 4 ? est.times.size() - 4 : 0);
  RateSeries tail;
  tail.times.assign(est.times.begin() + static_cast<std::ptrdiff_t>(first), est.times.end());
  tail.values.assign(est.linf_U.begin() + static_cast<std::ptrdiff_t>(first), est.linf_U.end());
  est.tail_slope = tail.times.size() >= 4 ? rate_fit(tail, 1.0).slope : 0.0;
  est.hyperbolic = est.sigma > th.fraction_of_U0 * traj.datum.linf_U && est.tail_slope > th.min_tail_slope;
  return est;
}

OleinikReport oleinik_check(const Trajectory& traj, const TimeWindow& window, double slack) {
  const double q = traj.params.q();
  if (!(q > 1.0 && q <= 2.0))
    throw Error(ErrorKind::Regime, "the one-sided gradient bound is checked for 1 < q <= 2");
  OleinikReport r;
  r.slack = slack >= 0.0 ? slack : 10.0 * traj.initial.grid.dx();
  r.bound_static = traj.datum.linf_ux;

  auto sup_forward = [](const Field& u) {
    double m = -std::numeric_limits<double>::infinity();
    const double dx = u.grid.dx();
    for (std::size_t i = 0; i + 1 < u.values.size(); ++i) m = std::max(m, (u.values[i + 1] - u.values[i]) / dx);
    return m;
  };
  r.trivially_met_at_start = sup_forward(traj.initial) <= 0.0;

  const double norm = std::pow(traj.datum.linf_U, (2.0 - q) / q);
  for (const Snapshot& s : traj.snapshots) {
    const double t = s.u.time;
    const double sup = sup_forward(s.u);
    r.times.push_back(t);
    r.sup_ux.push_back(sup);
    r.scaled_sup.push_back(sup * std::pow(t, 2.0 / q) / norm);
    r.static_excess = std::max(r.static_excess, sup - r.bound_static);
  }
  r.static_ok = r.static_excess <= r.slack;

  RateSeries scaled;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] < window.t_min || r.times[i] > window.t_max) continue;
    scaled.times.push_back(r.times[i]);
    scaled.values.push_back(r.scaled_sup[i]);
  }
  for (double v : scaled.values) r.fitted_C = std::max(r.fitted_C, v);
  r.tail_slope = std::numeric_limits<double>::quiet_NaN();
  if (tail_indices(scaled.times, 0.5).size() >= 4) {
    r.tail_slope = rate_fit(scaled, 0.5).slope;
    r.fitted_C = 0.0;
    for (std::size_t i : tail_indices(scaled.times, 0.5)) r.fitted_C = std::max(r.fitted_C, scaled.values[i]);
  }
  return r;
}

RateSeries profile_error_series(const Trajectory& traj, const Profile& profile, Norm p, double exponent,
                                const TimeWindow& window) {
  if (std::holds_alternative<NWaveParams>(profile) && p == Norm::Linf)
    throw Error(ErrorKind::Configuration, "N-wave targets are compared in L1 and L2 only");
  RateSeries out;
  out.exponent = exponent;
  out.p = p;
  const Tolerances tol;
  for (const Snapshot& s : traj.snapshots) {
    const double t = s.u.time;
    if (t < window.t_min || t > window.t_max) continue;
    const Grid1D& g = s.u.grid;
    if (const auto* nw = std::get_if<NWaveParams>(&profile)) {
      const auto [lo, hi] = nwave_support(*nw, t);
      if (lo < g.x_min() || hi > g.x_max())
        throw Error(ErrorKind::GridCoverage, "N-wave support exceeds the snapshot grid at t=" + std::to_string(t));
    } else if (std::abs(profile_eval(profile, g.x_min(), t)) > tol.far_field ||
               std::abs(profile_eval(profile, g.x_max(), t)) > tol.far_field) {
      throw Error(ErrorKind::GridCoverage,
                  std::string(profile_name(profile)) + " profile is significant at the grid boundary at t=" +
                      std::to_string(t));
    }
    std::vector<double> diff(s.u.values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = s.u.values[i] - profile_eval(profile, g.center(i), t);
    const double err = lp_norm(diff, g.dx(), p);
    const double size = lp_norm(s.u, p);
    out.times.push_back(t);
    out.values.push_back(std::pow(t, exponent) * err);
    out.relative.push_back(size > 0.0 ? err / size : std::numeric_limits<double>::infinity());
  }
  return out;
}

Trajectory sampled_trajectory(const Profile& profile, const Grid1D& grid, const std::vector<double>& times,
                              const ModelParams& params) {
  if (times.empty()) throw Error(ErrorKind::Configuration, "need at least one time");
  Trajectory traj;
  traj.params = params;
  auto at = [&](double t) { return sample(grid, t, [&](double x) { return profile_eval(profile, x, t); }); };
  traj.initial = at(times.front());
  traj.datum = summarize_datum(traj.initial);
  for (std::size_t k = 1; k < times.size(); ++k) {
    Field u = at(times[k]);
    Field U = cumulative_primitive(u).field;
    traj.snapshots.push_back(Snapshot{std::move(u), std::move(U), 0.0});
  }
  return traj;
}

void write_rate_series_csv(std::ostream& os, const RateSeries& s, double q) {
  os << std::setprecision(17);
  os << "# exponent=" << s.exponent << ",p=" << to_string(s.p) << ",q=" << q << '\n';
  os << "t,value" << (s.relative.empty() ? "" : ",relative") << '\n';
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    os << s.times[i] << ',' << s.values[i];
    if (!s.relative.empty()) os << ',' << s.relative[i];
    os << '\n';
  }
}

void write_oleinik_csv(std::ostream& os, const OleinikReport& r, double q) {
  os << std::setprecision(17);
  os << "# exponent=" << 2.0 / q << ",p=inf,q=" << q << ",fitted_C=" << r.fitted_C << ",tail_slope=" << r.tail_slope
     << '\n';
  os << "t,value,bound,scaled\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    os << r.times[i] << ',' << r.sup_ux[i] << ',' << r.bound_static << ',' << r.scaled_sup[i] << '\n';
}

}  // namespace cdlab
