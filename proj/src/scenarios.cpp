#include "cdlab/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "cdlab/error.hpp"

namespace cdlab {

DatumFamily parse_family(std::string_view s) {
  if (s == "dipole_gaussian") return DatumFamily::DipoleGaussian;
  if (s == "dipole_compact") return DatumFamily::DipoleCompact;
  throw Error(ErrorKind::Configuration, "unknown datum family '" + std::string(s) + "'");
}

Orientation parse_orientation(std::string_view s) {
  if (s == "U0_nonneg") return Orientation::U0Nonneg;
  if (s == "U0_nonpos") return Orientation::U0Nonpos;
  throw Error(ErrorKind::Configuration, "unknown orientation '" + std::string(s) + "'");
}

std::string_view to_string(DatumFamily f) {
  return f == DatumFamily::DipoleGaussian ? "dipole_gaussian" : "dipole_compact";
}

std::string_view to_string(Orientation o) { return o == Orientation::U0Nonneg ? "U0_nonneg" : "U0_nonpos"; }

double datum_primitive(const DatumSpec& spec, double x) {
  const double s = spec.orientation == Orientation::U0Nonneg ? spec.amplitude : -spec.amplitude;
  const double z = x / spec.width;
  if (spec.family == DatumFamily::DipoleGaussian) return s * std::exp(-z * z);
  if (std::abs(z) >= 1.0) return 0.0;
  const double b = 1.0 - z * z;
  return s * b * b * b;
}

Datum make_datum(const DatumSpec& spec, const Grid1D& grid, const Tolerances& tol) {
  if (spec.amplitude == 0.0) throw Error(ErrorKind::Admissibility, "zero amplitude gives u0 == 0");
  if (!(spec.amplitude > 0.0) || !(spec.width > 0.0))
    throw Error(ErrorKind::Configuration, "amplitude and width must be positive");

  const double dx = grid.dx();
  Field u{grid, std::vector<double>(grid.n()), 0.0};
  double left = datum_primitive(spec, grid.x_min());
  const double U_left = left;
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double right = datum_primitive(spec, grid.right_edge(i));
    u.values[i] = (right - left) / dx;
    left = right;
  }
  if (std::abs(U_left) > tol.far_field || std::abs(left) > tol.far_field ||
      std::abs(u.values.front()) > tol.far_field || std::abs(u.values.back()) > tol.far_field) {
    std::ostringstream msg;
    msg << "grid [" << grid.x_min() << ", " << grid.x_max() << "] clips the datum of width " << spec.width;
    throw Error(ErrorKind::SupportClipping, msg.str());
  }
  return Datum{u, summarize_datum(u)};
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::DiffusionDominated: return "DiffusionDominated";
    case Regime::VssBalance: return "VssBalance";
    case Regime::HyperbolicNWave: return "HyperbolicNWave";
    case Regime::Unclassified: return "Unclassified";
  }
  return "?";
}

RegimeVerdict classify_regime(const DatumSummary& s, const ModelParams& params, const RegimeThresholds& th) {
  const double q = params.q();
  RegimeVerdict v;
  auto add = [&](std::string name, double value, bool ok) {
    v.conditions.push_back(Condition{std::move(name), value, ok});
    return ok;
  };
  const double sign = s.sign_U == Sign::Nonneg ? 1.0 : s.sign_U == Sign::Nonpos ? -1.0 : 0.0;
  add("U0 has one sign", sign, s.sign_U == Sign::Nonneg || s.sign_U == Sign::Nonpos);

  if (s.sign_U == Sign::Nonneg) {
    if (add("(i) U0 >= 0 and q > 3/2", q, q > 1.5)) {
      v.regime = Regime::DiffusionDominated;
      v.rule = "diffusion (i)";
      return v;
    }
    const bool in_range = add("VSS: U0 >= 0 and 1 < q < 3/2", q, q < 1.5);
    const double tail = std::pow(s.far_x, params.a()) * s.far_U;
    const bool decays = add("VSS: |x|^a U0(x) -> 0 at the grid edge", tail, tail <= th.decay_tol);
    if (in_range && decays) {
      v.regime = Regime::VssBalance;
      v.rule = "very singular balance";
    } else {
      v.rule = "no case applies to U0 >= 0";
    }
    return v;
  }

  if (s.sign_U == Sign::Nonpos) {
    if (add("(ii) U0 <= 0 and q >= 2", q, q >= 2.0)) {
      v.regime = Regime::DiffusionDominated;
      v.rule = "diffusion (ii)";
      return v;
    }
    const double small = std::abs(s.first_moment) * std::pow(s.linf_u, 2.0 * q - 3.0);
    const double large = s.linf_U * std::pow(s.linf_ux, 1.0 - 2.0 / q);
    const bool small_ok = add("(iii) 3/2 < q < 2", q, q > 1.5) &
                          add("(iii) |int x u0| ||u0||^(2q-3) <= theta_small", small, small <= th.theta_small);
    const bool unconditional = add("q < 4/(1+sqrt 3)", q, q < kUnconditionalHyperbolicQ);
    const bool large_ok = add("||U0|| ||u0_x||^(1-2/q) >= theta_large", large, large >= th.theta_large);
    const bool hyperbolic = unconditional || large_ok;
    if (small_ok && !hyperbolic) {
      v.regime = Regime::DiffusionDominated;
      v.rule = "diffusion (iii)";
    } else if (hyperbolic && !small_ok) {
      v.regime = Regime::HyperbolicNWave;
      v.rule = unconditional ? "hyperbolic (unconditional range)" : "hyperbolic (large datum)";
    } else {
      v.rule = small_ok ? "small and large conditions both hold" : "neither size condition holds";
    }
    return v;
  }

  v.rule = "U0 changes sign or vanishes";
  return v;
}

TargetKind parse_target(std::string_view s) {
  if (s == "heat_dipole") return TargetKind::HeatDipole;
  if (s == "nwave") return TargetKind::NWave;
  if (s == "vss") return TargetKind::Vss;
  throw Error(ErrorKind::Configuration, "unknown target '" + std::string(s) + "'");
}

std::string_view to_string(TargetKind k) {
  switch (k) {
    case TargetKind::HeatDipole: return "heat_dipole";
    case TargetKind::NWave: return "nwave";
    case TargetKind::Vss: return "vss";
  }
  return "?";
}

Regime regime_of(TargetKind k) {
  switch (k) {
    case TargetKind::HeatDipole: return Regime::DiffusionDominated;
    case TargetKind::NWave: return Regime::HyperbolicNWave;
    case TargetKind::Vss: return Regime::VssBalance;
  }
  return Regime::Unclassified;
}

double target_exponent(TargetKind kind, Norm p, const ModelParams& params) {
  const double inv_p = p == Norm::Linf ? 0.0 : 1.0 / norm_exponent(p);
  switch (kind) {
    case TargetKind::HeatDipole: return 0.5 * (1.0 - inv_p) + 0.5;
    case TargetKind::Vss: return 0.5 * (1.0 - inv_p) + 0.5 * params.a();
    case TargetKind::NWave: return (1.0 - inv_p) / params.q();
  }
  return 0.0;
}

ExperimentReport run_experiment(const ExperimentSetup& setup) {
  const ModelParams params(setup.q);
  if (setup.solver.output_times.empty())
    throw Error(ErrorKind::Configuration, "experiments need at least one output time");

  ExperimentReport rep;
  rep.datum = setup.datum;
  rep.q = setup.q;
  const Datum datum = make_datum(setup.datum, setup.grid, setup.solver.tol);
  rep.summary = datum.summary;
  rep.regime = classify_regime(datum.summary, params, setup.options.regime);

  Trajectory traj = evolve(datum.field, params, setup.solver);
  rep.steps = traj.steps;
  rep.expansions = traj.expansions;
  rep.i_infinity = i_infinity_estimate(traj);
  if (datum.summary.sign_U == Sign::Nonpos) rep.sigma = sigma_estimate(traj, setup.options.sigma);
  if (params.q() <= 2.0) rep.oleinik = oleinik_check(traj, setup.options.window);

  for (const TargetRequest& req : setup.targets) {
    std::optional<Profile> profile;
    double parameter = 0.0;
    std::optional<std::string> build_error;
    try {
      switch (req.kind) {
        case TargetKind::HeatDipole:
          parameter = rep.i_infinity.integral_based;
          profile = HeatDipole{parameter};
          break;
        case TargetKind::NWave:
          // Outside U0 <= 0 the surviving lobe mass is read off ||U(t_end)||.
          parameter = rep.sigma ? rep.sigma->sigma : lp_norm(traj.snapshots.back().U, Norm::Linf);
          profile = NWaveParams{parameter, parameter, params.q()};
          break;
        case TargetKind::Vss: {
          VssProfile vss = vss_shoot(params, setup.options.vss);
          parameter = vss.mu_star;
          profile = std::move(vss);
          break;
        }
      }
    } catch (const Error& e) {
      build_error = e.what();
    }
    for (Norm p : req.norms) {
      TargetResult tr;
      tr.kind = req.kind;
      tr.p = p;
      tr.exponent = target_exponent(req.kind, p, params);
      tr.profile_parameter = parameter;
      tr.expected = regime_of(req.kind) == rep.regime.regime;
      if (build_error) {
        tr.error = build_error;
      } else {
        try {
          tr.series = profile_error_series(traj, *profile, p, tr.exponent, setup.options.window);
          tr.fit = rate_fit(tr.series, setup.options.tail_fraction);
          tr.verdict = classify_rate(tr.fit, tr.series.relative.back(), setup.options.relative_gate);
        } catch (const Error& e) {
          tr.error = e.what();
        }
      }
      rep.targets.push_back(std::move(tr));
    }
  }
  if (setup.options.keep_trajectory) rep.trajectory = std::move(traj);
  return rep;
}

SweepAxis parse_axis(std::string_view s) {
  if (s == "q") return SweepAxis::Q;
  if (s == "amplitude") return SweepAxis::Amplitude;
  throw Error(ErrorKind::Configuration, "unknown sweep axis '" + std::string(s) + "'");
}

std::string_view to_string(SweepAxis a) { return a == SweepAxis::Q ? "q" : "amplitude"; }

SweepReport sweep(SweepAxis axis, const std::vector<double>& values, const ExperimentSetup& base,
                  unsigned workers) {
  if (values.empty()) throw Error(ErrorKind::Configuration, "sweep needs at least one value");
  SweepReport out;
  out.axis = axis;
  out.rows.resize(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepRow& row = out.rows[i];
      row.value = values[i];
      ExperimentSetup setup = base;
      setup.options.keep_trajectory = false;
      if (axis == SweepAxis::Q)
        setup.q = values[i];
      else
        setup.datum.amplitude = values[i];
      try {
        row.report = run_experiment(setup);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
  return out;
}

void write_rates_csv(std::ostream& os, const ExperimentReport& r) {
  os << std::setprecision(17);
  os << "target,p,exponent,slope,residual,verdict,expected\n";
  for (const TargetResult& t : r.targets) {
    os << to_string(t.kind) << ',' << to_string(t.p) << ',' << t.exponent << ',';
    if (t.error)
      os << "nan,nan,ERROR";
    else
      os << t.fit.slope << ',' << t.fit.residual << ',' << to_string(t.verdict);
    os << ',' << (t.expected ? "expected" : "informational") << '\n';
  }
}

void write_report_text(std::ostream& os, const ExperimentReport& r) {
  os << std::setprecision(8);
  os << "datum: " << to_string(r.datum.family) << " amplitude=" << r.datum.amplitude << " width=" << r.datum.width
     << " " << to_string(r.datum.orientation) << "\n";
  os << "q = " << r.q << "\n";
  os << "regime: " << to_string(r.regime.regime) << " (" << r.regime.rule << ")\n";
  for (const Condition& c : r.regime.conditions)
    os << "  [" << (c.satisfied ? "x" : " ") << "] " << c.name << " : " << c.value << "\n";
  os << "datum summary: ||u0||_inf=" << r.summary.linf_u << " ||u0_x||_inf=" << r.summary.linf_ux
     << " ||U0||_inf=" << r.summary.linf_U << " int x u0=" << r.summary.first_moment << "\n";
  os << "steps=" << r.steps << " domain expansions=" << r.expansions << "\n";
  const auto& ii = r.i_infinity;
  os << "I_inf at t=" << ii.t_end << ": integral=" << ii.integral_based << " projection=" << ii.projection_based
     << " moment=" << ii.moment_based << " gap=" << ii.gap << (ii.boundary_warning ? " (boundary warning)" : "")
     << "\n";
  if (r.sigma)
    os << "sigma=" << r.sigma->sigma << " tail slope=" << r.sigma->tail_slope
       << (r.sigma->hyperbolic ? " (hyperbolic)" : " (not hyperbolic)") << "\n";
  if (r.oleinik)
    os << "one-sided gradient: bound=" << r.oleinik->bound_static << " worst excess=" << r.oleinik->static_excess
       << " fitted C=" << r.oleinik->fitted_C << " tail slope=" << r.oleinik->tail_slope << "\n";
  for (const TargetResult& t : r.targets) {
    os << "target " << to_string(t.kind) << " p=" << to_string(t.p) << " exponent=" << t.exponent
       << (t.expected ? " [expected]" : " [informational]") << ": ";
    if (t.error) {
      os << "ERROR " << *t.error << "\n";
      continue;
    }
    os << to_string(t.verdict) << " slope=" << t.fit.slope << " residual=" << t.fit.residual;
    if (!t.series.relative.empty()) os << " final relative error=" << t.series.relative.back();
    os << "\n";
  }
}

void write_sweep_csv(std::ostream& os, const SweepReport& r) {
  os << std::setprecision(17);
  os << to_string(r.axis)
     << ",regime,sigma,sigma_tail_slope,i_infinity,target,p,exponent,slope,residual,verdict,expected\n";
  for (const SweepRow& row : r.rows) {
    if (!row.report) {
      os << row.value << ",ERROR,nan,nan,nan,,,nan,nan,nan,ERROR,\n";
      continue;
    }
    const ExperimentReport& rep = *row.report;
    auto prefix = [&] {
      os << row.value << ',' << to_string(rep.regime.regime) << ',';
      if (rep.sigma)
        os << rep.sigma->sigma << ',' << rep.sigma->tail_slope;
      else
        os << "nan,nan";
      os << ',' << rep.i_infinity.integral_based << ',';
    };
    if (rep.targets.empty()) {
      prefix();
      os << ",,nan,nan,nan,,\n";
    }
    for (const TargetResult& t : rep.targets) {
      prefix();
      os << to_string(t.kind) << ',' << to_string(t.p) << ',' << t.exponent << ',';
      if (t.error)
        os << "nan,nan,ERROR";
      else
        os << t.fit.slope << ',' << t.fit.residual << ',' << to_string(t.verdict);
      os << ',' << (t.expected ? "expected" : "informational") << '\n';
    }
  }
}

void write_sweep_text(std::ostream& os, const SweepReport& r) {
  os << "sweep over " << to_string(r.axis) << "\n";
  for (const SweepRow& row : r.rows) {
    os << "=== " << to_string(r.axis) << " = " << row.value << "\n";
    if (row.error)
      os << "ERROR " << *row.error << "\n";
    else
      write_report_text(os, *row.report);
  }
}

}  // namespace cdlab
