#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdlab/scenarios.hpp"

namespace cdlab {

/// What an expected-regime target must reach for a run to pass.
enum class Requirement { Converging, Bounded };

struct SweepSpec {
  SweepAxis axis = SweepAxis::Amplitude;
  std::vector<double> values;
};

/// Everything a run needs, read from a sectioned `key = value` file:
///
///   [model]    q, theta_small, theta_large, decay_tol
///   [datum]    family, amplitude, width, orientation
///   [solver]   x_min, x_max, n, cfl, t_end, output_times | output_log,
///              domain, expand_trigger, expand_growth, far_field, mass_relative
///   [targets]  heat_dipole, nwave, vss (norm lists), require, window_start,
///              window_end, tail_fraction, relative_gate
///   [output]   dir, workers
///   [sweep]    axis, values
///
/// `output_log = t_first, t_last, count` asks for log-spaced output times.
/// '#' or ';' starts a comment that runs to the end of the line.
struct RunConfig {
  ExperimentSetup setup;
  Requirement require = Requirement::Converging;
  std::string out_dir = ".";
  unsigned workers = 0;  // 0: machine parallelism
  std::optional<SweepSpec> sweep;
};

/// Parses and validates; throws Configuration naming the section, key and
/// line of the first problem. `source` labels the messages.
RunConfig parse_run_config(std::istream& in, const std::string& source = "config");
RunConfig load_run_config(const std::string& path);

/// Checks the parsed values against the module preconditions (grid, model,
/// solver, targets, datum) without running anything heavier than the datum
/// construction. Called by the parsers.
void validate(const RunConfig& config);

std::vector<double> log_spaced(double first, double last, std::size_t count);

}  // namespace cdlab
