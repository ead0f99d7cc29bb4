// Runs the acceptance scenarios and prints one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cdlab/commands.hpp"
#include "cdlab/config.hpp"
#include "cdlab/scenarios.hpp"

using namespace cdlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator()(const std::string& name, const T& value) {
    if (!first_) os_ << ' ';
    first_ = false;
    os_ << name << '=' << value;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_{[] {
    std::ostringstream o;
    o << std::setprecision(4);
    return o;
  }()};
  bool first_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const TargetResult* find_target(const ExperimentReport& r, TargetKind kind, Norm p) {
  for (const TargetResult& t : r.targets)
    if (t.kind == kind && t.p == p) return &t;
  return nullptr;
}

std::size_t snapshot_at(const Trajectory& tr, double t) {
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k)
    if (std::abs(tr.snapshots[k].u.time - t) <= 1e-9 * t) return k;
  throw Error(ErrorKind::Configuration, "no snapshot at t=" + std::to_string(t));
}

// Slope below -0.05 and a final value under half the value at t_ref.
bool decays(const TargetResult* t, double t_ref, Detail& d, const std::string& tag) {
  if (!t || t->error) {
    d(tag, t && t->error ? *t->error : std::string("missing"));
    return false;
  }
  double ref = NAN;
  for (std::size_t k = 0; k < t->series.times.size(); ++k)
    if (std::abs(t->series.times[k] - t_ref) <= 1e-9 * t_ref) ref = t->series.values[k];
  const double last = t->series.values.back();
  d(tag + "_slope", t->fit.slope)(tag + "_final/start", last / ref);
  return t->fit.slope < -kRateTolerance && last < 0.5 * ref;
}

bool slope_below(const TargetResult* t, Detail& d, const std::string& tag) {
  if (!t || t->error) {
    d(tag, t && t->error ? *t->error : std::string("missing"));
    return false;
  }
  d(tag + "_slope", t->fit.slope)(tag + "_verdict", to_string(t->verdict));
  return t->fit.slope < -kRateTolerance;
}

bool not_converging(const TargetResult* t, Detail& d, const std::string& tag) {
  if (!t || t->error) {
    d(tag, t && t->error ? *t->error : std::string("missing"));
    return false;
  }
  d(tag + "_slope", t->fit.slope)(tag + "_verdict", to_string(t->verdict));
  return t->verdict != Verdict::Converging;
}

bool mass_conserved(const Trajectory& tr, double& worst) {
  const double l1 = lp_norm(tr.initial, Norm::L1);
  for (const Snapshot& s : tr.snapshots) worst = std::max(worst, std::abs(quadrature(s.u)) / l1);
  return worst <= 1e-12;
}

// Cell averages of W_x(., t) from edge differences of W.
Field vss_cells(const VssProfile& p, const Grid1D& g, double t) {
  Field f{g, std::vector<double>(g.n()), t};
  double left = vss_eval_U(p, g.x_min(), t);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double right = vss_eval_U(p, g.right_edge(i), t);
    f.values[i] = (right - left) / g.dx();
    left = right;
  }
  return f;
}

struct Runner {
  std::string config_dir;
  std::string out_dir;

  ExperimentReport experiment(const std::string& name, bool keep) const {
    RunConfig cfg = load_run_config(config_dir + "/" + name + ".ini");
    cfg.setup.options.keep_trajectory = keep;
    ExperimentReport rep = run_experiment(cfg.setup);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream txt(out_dir + "/" + name + "_report.txt");
      write_report_text(txt, rep);
      std::ofstream csv(out_dir + "/" + name + "_rates.csv");
      write_rates_csv(csv, rep);
    }
    return rep;
  }

  SweepReport sweep_run(const std::string& name) const {
    const RunConfig cfg = load_run_config(config_dir + "/" + name + ".ini");
    SweepReport rep = sweep(cfg.sweep->axis, cfg.sweep->values, cfg.setup, 1);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream txt(out_dir + "/" + name + "_report.txt");
      write_sweep_text(txt, rep);
      std::ofstream csv(out_dir + "/" + name + "_rates.csv");
      write_sweep_csv(csv, rep);
    }
    return rep;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance runs A1-A10"};
  Runner run;
  run.config_dir = CDLAB_CONFIG_DIR;
  std::vector<std::string> only;
  app.add_option("--configs", run.config_dir, "Directory holding a1.ini, a2.ini, a5.ini, a6.ini, a8_sweep.ini");
  app.add_option("--out", run.out_dir, "Write each scenario's report and rates here");
  app.add_option("--only", only, "Scenarios to run: a1 a2 a4 a5 a6 a8 invariants")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<std::string> chosen(only.begin(), only.end());
  auto wanted = [&](const std::string& s) { return chosen.empty() || chosen.count(s) > 0; };

  std::map<std::string, Outcome> results;
  auto record = [&](const std::string& id, bool pass, const std::string& detail) {
    results[id] = Outcome{pass, detail};
    std::cerr << id << (pass ? " PASS " : " FAIL ") << detail << std::endl;
  };
  // A failing run marks every criterion that depends on it as failed.
  auto guarded = [&](std::initializer_list<const char*> ids, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      for (const char* id : ids) record(id, false, std::string("run failed: ") + e.what());
    }
  };
  std::vector<Outcome> a9_parts;
  double worst_mass = 0.0;
  bool mass_ok = true;

  if (wanted("a1")) guarded({"A1", "A3", "A9"}, [&] {
      const auto t0 = std::chrono::steady_clock::now();
      const ExperimentReport r = run.experiment("a1", true);
      const double elapsed = seconds_since(t0);
      const Trajectory& tr = *r.trajectory;
      mass_ok = mass_conserved(tr, worst_mass) && mass_ok;

      Detail d;
      bool ok = decays(find_target(r, TargetKind::HeatDipole, Norm::L1), 10.0, d, "p1");
      ok = decays(find_target(r, TargetKind::HeatDipole, Norm::Linf), 10.0, d, "pinf") && ok;
      const double iinf = r.i_infinity.integral_based;
      const double int_U0 = -r.summary.first_moment;
      d("I_inf", iinf)("int_U0", int_U0)("n", tr.snapshots.back().u.grid.n())("runtime_s", elapsed);
      ok = ok && iinf > 0.0 && iinf < int_U0 && elapsed <= 300.0;
      record("A1", ok, d.str());

      const IInfinityEstimate at100 = i_infinity_estimate(tr, snapshot_at(tr, 100.0));
      const IInfinityEstimate& at1000 = r.i_infinity;
      const double rel = at1000.gap / std::abs(at1000.integral_based);
      Detail d3;
      d3("integral", at1000.integral_based)("projection", at1000.projection_based)("relative_gap", rel)(
          "gap_t100", at100.gap)("gap_t1000", at1000.gap);
      record("A3", rel < 0.02 && at1000.gap < at100.gap, d3.str());

      Detail d9;
      const bool control = not_converging(find_target(r, TargetKind::NWave, Norm::L1), d9, "a1_nwave");
      a9_parts.push_back(Outcome{control, d9.str()});
    });

  if (wanted("a2")) guarded({"A2"}, [&] {
      const ExperimentReport r = run.experiment("a2", false);
      Detail d;
      bool ok = decays(find_target(r, TargetKind::HeatDipole, Norm::L1), 10.0, d, "p1");
      ok = decays(find_target(r, TargetKind::HeatDipole, Norm::Linf), 10.0, d, "pinf") && ok;
      d("I_inf", r.i_infinity.integral_based)("relative_gap", r.i_infinity.gap / std::abs(r.i_infinity.integral_based));
      record("A2", ok && r.i_infinity.integral_based < 0.0, d.str());
    });

  if (wanted("a4")) guarded({"A4"}, [&] {
      const ModelParams params(1.25);
      const VssProfile p = vss_shoot(params);
      const double residual = vss_table_residual(p);
      auto error_at = [&](std::size_t n, double& bound) {
        const Grid1D g(-60.0, 60.0, n);
        const Field u0 = vss_cells(p, g, 1.0);
        SolverConfig c;
        c.t_end = 2.0;
        c.output_times = {2.0};
        c.domain = DomainPolicy::Fixed;
        const Trajectory tr = evolve(u0, params, c);
        const Field exact = vss_cells(p, g, 2.0);
        std::vector<double> diff(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) diff[i] = tr.snapshots.back().u.values[i] - exact.values[i];
        bound = 5.0 * g.dx() * lp_norm(u0, Norm::L1);
        return lp_norm(diff, g.dx(), Norm::L1);
      };
      double bound = 0.0, coarse_bound = 0.0;
      const double fine = error_at(20000, bound);
      const double coarse = error_at(10000, coarse_bound);
      const double ratio = fine / coarse;
      Detail d;
      d("mu_star", p.mu_star)("ode_residual", residual)("certificate", p.certificate)("L1_err_n20000", fine)(
          "bound", bound)("L1_err_n10000", coarse)("ratio", ratio);
      record("A4",
             residual <= 1e-8 && p.certificate <= 1e-6 && fine <= bound && ratio >= 0.35 && ratio <= 0.65,
             d.str());
    });

  if (wanted("a5")) guarded({"A5"}, [&] {
      const ExperimentReport r = run.experiment("a5", false);
      Detail d;
      d("regime", to_string(r.regime.regime));
      bool ok = slope_below(find_target(r, TargetKind::Vss, Norm::L1), d, "p1");
      ok = slope_below(find_target(r, TargetKind::Vss, Norm::Linf), d, "pinf") && ok;
      record("A5", ok, d.str());
    });

  if (wanted("a6")) guarded({"A6", "A7", "A9"}, [&] {
      const ExperimentReport r = run.experiment("a6", true);
      mass_ok = mass_conserved(*r.trajectory, worst_mass) && mass_ok;
      const SigmaEstimate& s = *r.sigma;
      const double U0 = r.summary.linf_U;
      Detail d;
      d("sigma", s.sigma)("sigma/U0", s.sigma / U0)("sigma_tail_slope", s.tail_slope);
      bool ok = s.sigma > 0.05 * U0 && s.tail_slope > -0.05;
      ok = slope_below(find_target(r, TargetKind::NWave, Norm::L1), d, "p1") && ok;
      ok = slope_below(find_target(r, TargetKind::NWave, Norm::L2), d, "p2") && ok;
      d("expansions", r.expansions);
      record("A6", ok, d.str());

      const OleinikReport& o = *r.oleinik;
      Detail d7;
      d7("bound", o.bound_static)("worst_excess", o.static_excess)("fitted_C", o.fitted_C)("tail_slope",
                                                                                           o.tail_slope);
      record("A7", o.static_excess <= 0.0 && std::abs(o.tail_slope) <= 0.05, d7.str());

      Detail d9;
      bool control = not_converging(find_target(r, TargetKind::HeatDipole, Norm::L1), d9, "a6_heat_p1");
      control = not_converging(find_target(r, TargetKind::HeatDipole, Norm::Linf), d9, "a6_heat_pinf") && control;
      a9_parts.push_back(Outcome{control, d9.str()});
    });
  // A9 needs both control runs; a failed run has already recorded it
  if (wanted("a1") && wanted("a6") && !results.count("A9")) {
    std::string detail;
    for (const Outcome& o : a9_parts) detail += (detail.empty() ? "" : " ") + o.detail;
    record("A9", a9_parts.size() == 2 && a9_parts[0].pass && a9_parts[1].pass, detail);
  }

  if (wanted("a8")) guarded({"A8"}, [&] {
      const SweepReport r = run.sweep_run("a8_sweep");
      Detail d;
      bool ok = true;
      double prev = -1.0;
      for (const SweepRow& row : r.rows) {
        if (!row.report || !row.report->sigma) {
          d("A=" + std::to_string(row.value), row.error.value_or("no sigma"));
          ok = false;
          continue;
        }
        const double sigma = row.report->sigma->sigma;
        const double ratio = sigma / row.report->summary.linf_U;
        std::ostringstream key;
        key << "sigma/U0(A=" << std::setprecision(3) << row.value << ")";
        d(key.str(), ratio);
        ok = ok && sigma >= prev;
        prev = sigma;
      }
      if (ok) {
        const auto& lo = *r.rows.front().report;
        const auto& hi = *r.rows.back().report;
        ok = lo.sigma->sigma < 0.05 * lo.summary.linf_U && hi.sigma->sigma > 0.05 * hi.summary.linf_U;
        d("smallest_regime", to_string(lo.regime.regime))("largest_regime", to_string(hi.regime.regime));
      }
      record("A8", ok, d.str());
    });

  if (wanted("invariants")) guarded({"A10"}, [&] {
      // discrete comparison principle on random ordered pairs
      std::mt19937 rng(20240611);
      std::uniform_real_distribution<double> U(-1.0, 1.0), gap(0.0, 0.5);
      bool ordered = true;
      for (int pair = 0; pair < 20; ++pair) {
        const ModelParams params(1.1 + 1.8 * gap(rng));
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
          for (std::size_t i = 0; i < g.n(); ++i) ordered = ordered && u.values[i] <= v.values[i];
        }
      }
      // rate_fit on exact power laws
      double fit_err = 0.0;
      for (double slope : {-0.5, -1.0, -0.25, 0.0, 0.3}) {
        RateSeries s;
        for (int k = 0; k <= 30; ++k) {
          const double t = std::pow(10.0, k / 10.0);
          s.times.push_back(t);
          s.values.push_back(2.5 * std::pow(t, slope));
        }
        fit_err = std::max(fit_err, std::abs(rate_fit(s).slope - slope));
      }
      // mass on a short run when the long runs were skipped
      if (!wanted("a1") && !wanted("a6")) {
        const Datum d = make_datum(DatumSpec{}, Grid1D(-40.0, 40.0, 800));
        SolverConfig c;
        c.t_end = 50.0;
        c.output_times = {10.0, 50.0};
        mass_ok = mass_conserved(evolve(d.field, ModelParams(1.5), c), worst_mass) && mass_ok;
      }
      Detail d;
      d("worst_relative_mass", worst_mass)("comparison_pairs_ordered", ordered ? "20/20" : "no")("fit_error",
                                                                                                 fit_err);
      record("A10", mass_ok && ordered && fit_err <= 1e-12, d.str());
    });

  std::cout << "\n";
  bool all = true;
  for (int k = 1; k <= 10; ++k) {
    const std::string id = "A" + std::to_string(k);
    auto it = results.find(id);
    if (it == results.end()) {
      std::cout << id << " SKIP\n";
      continue;
    }
    all = all && it->second.pass;
    std::cout << id << (it->second.pass ? " PASS " : " FAIL ") << it->second.detail << "\n";
  }
  return all ? kExitOk : kExitAcceptance;
}
