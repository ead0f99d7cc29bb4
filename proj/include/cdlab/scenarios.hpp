#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/diagnostics.hpp"
#include "cdlab/profiles.hpp"
#include "cdlab/solver.hpp"

namespace cdlab {

enum class DatumFamily { DipoleGaussian, DipoleCompact };
enum class Orientation { U0Nonneg, U0Nonpos };

/// u0 = d/dx U0 with U0 = +-A exp(-x^2/w^2) (Gaussian) or
/// U0 = +-A (1 - x^2/w^2)^3 on |x| < w (compact, C^2).
struct DatumSpec {
  DatumFamily family = DatumFamily::DipoleGaussian;
  double amplitude = 1.0;
  double width = 2.0;
  Orientation orientation = Orientation::U0Nonneg;
};

DatumFamily parse_family(std::string_view s);
Orientation parse_orientation(std::string_view s);
std::string_view to_string(DatumFamily f);
std::string_view to_string(Orientation o);

/// U0 itself at x.
double datum_primitive(const DatumSpec& spec, double x);

struct Datum {
  Field field;
  DatumSummary summary;
};

/// Cell averages (U0(x_{i+1/2}) - U0(x_{i-1/2})) / dx, so the sampled mass
/// telescopes to zero. Throws Admissibility for zero amplitude and
/// SupportClipping when the grid is too narrow for the far-field tolerance.
Datum make_datum(const DatumSpec& spec, const Grid1D& grid, const Tolerances& tol = {});

enum class Regime { DiffusionDominated, VssBalance, HyperbolicNWave, Unclassified };
std::string_view to_string(Regime r);

struct RegimeThresholds {
  double theta_small = 0.1;
  double theta_large = 10.0;
  /// Bound on far_x^a * far_U standing in for |x|^a U0(x) -> 0.
  double decay_tol = 1e-8;
};

struct Condition {
  std::string name;
  double value = 0.0;
  bool satisfied = false;
};

struct RegimeVerdict {
  Regime regime = Regime::Unclassified;
  /// Which case fired, e.g. "diffusion (ii)".
  std::string rule;
  std::vector<Condition> conditions;
};

/// q below which the hyperbolic case needs no size condition.
inline const double kUnconditionalHyperbolicQ = 4.0 / (1.0 + 1.7320508075688772);

RegimeVerdict classify_regime(const DatumSummary& summary, const ModelParams& params,
                              const RegimeThresholds& th = {});

enum class TargetKind { HeatDipole, NWave, Vss };
TargetKind parse_target(std::string_view s);
std::string_view to_string(TargetKind k);
Regime regime_of(TargetKind k);

/// Scaling exponent for which t^e ||u(t) - P(t)||_p has the target's
/// predicted limit 0.
double target_exponent(TargetKind kind, Norm p, const ModelParams& params);

struct TargetRequest {
  TargetKind kind = TargetKind::HeatDipole;
  std::vector<Norm> norms;
};

struct ExperimentOptions {
  TimeWindow window;
  double tail_fraction = 0.5;
  double relative_gate = 0.5;
  VssConfig vss;
  SigmaThresholds sigma;
  RegimeThresholds regime;
  /// Keep the full trajectory in the report (memory heavy for sweeps).
  bool keep_trajectory = false;
};

struct ExperimentSetup {
  DatumSpec datum;
  double q = 2.0;
  Grid1D grid{-200.0, 200.0, 20000};
  SolverConfig solver;
  std::vector<TargetRequest> targets;
  ExperimentOptions options;
};

struct TargetResult {
  TargetKind kind = TargetKind::HeatDipole;
  Norm p = Norm::L1;
  double exponent = 0.0;
  /// I_inf, sigma or mu_star, depending on the kind.
  double profile_parameter = 0.0;
  /// Target family matches the classified regime.
  bool expected = false;
  RateSeries series;
  RateFit fit;
  Verdict verdict = Verdict::Bounded;
  std::optional<std::string> error;
};

struct ExperimentReport {
  DatumSpec datum;
  double q = 2.0;
  DatumSummary summary;
  RegimeVerdict regime;
  IInfinityEstimate i_infinity;
  std::optional<SigmaEstimate> sigma;
  std::optional<OleinikReport> oleinik;
  std::vector<TargetResult> targets;
  std::size_t steps = 0;
  std::size_t expansions = 0;
  std::optional<Trajectory> trajectory;
};

/// Builds the datum, classifies it, evolves it and compares the solution
/// against every requested profile.
ExperimentReport run_experiment(const ExperimentSetup& setup);

enum class SweepAxis { Q, Amplitude };
SweepAxis parse_axis(std::string_view s);
std::string_view to_string(SweepAxis a);

struct SweepRow {
  double value = 0.0;
  std::optional<ExperimentReport> report;
  std::optional<std::string> error;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::Amplitude;
  std::vector<SweepRow> rows;  // sorted by value
};

/// Runs one experiment per axis value on up to `workers` threads; per-run
/// errors are recorded and the sweep continues.
SweepReport sweep(SweepAxis axis, const std::vector<double>& values, const ExperimentSetup& base,
                  unsigned workers = 1);

/// One row per (target, p): target,p,exponent,slope,residual,verdict,expected.
void write_rates_csv(std::ostream& os, const ExperimentReport& r);
void write_report_text(std::ostream& os, const ExperimentReport& r);
void write_sweep_csv(std::ostream& os, const SweepReport& r);
void write_sweep_text(std::ostream& os, const SweepReport& r);

}  // namespace cdlab
