#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "cdlab/error.hpp"
#include "cdlab/profiles.hpp"

namespace cdlab {

/// Process exit statuses of the command-line tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitShooting = 4,
  kExitAcceptance = 5,
};

int exit_status(ErrorKind kind);

/// Flags shared by the config-driven commands; set ones override the file.
struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
};

struct VssOptions {
  double q = 1.25;
  VssConfig config;
  std::string out_dir = ".";
};

struct NWaveOptions {
  double q = 2.0;
  double alpha = 1.0;
  double beta = 1.0;
  double t = 1.0;
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t n = 2001;
  std::string out_dir = ".";
};

/// Each command reports progress on `out`, problems on `err`, and returns an
/// ExitStatus. Library errors never escape.
int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_experiment(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_vss(const VssOptions& opt, std::ostream& out, std::ostream& err);
int cmd_nwave(const NWaveOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace cdlab
