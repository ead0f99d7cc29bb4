#include <CLI11.hpp>

#include <iostream>

#include "cdlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Large-time behaviour experiments for u_t = u_xx - (|u|^q)_x"};
  app.require_subcommand(1);

  cdlab::CommandOptions run;
  std::string out_dir;
  unsigned workers = 0;
  unsigned long long seed = 0;  // reserved; every command is deterministic
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", run.config_path, "Config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    sub->add_option("--workers", workers, "Worker threads (overrides [output] workers)");
    sub->add_option("--seed", seed, "Reserved; has no effect");
  };
  auto* simulate = app.add_subcommand("simulate", "Evolve a datum and write snapshots and conserved quantities");
  auto* experiment = app.add_subcommand("experiment", "Run a datum against the requested profiles");
  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over q or the amplitude");
  for (auto* sub : {simulate, experiment, sweep}) add_run_flags(sub);

  cdlab::VssOptions vss;
  auto* vss_cmd = app.add_subcommand("vss", "Shoot for the very singular profile");
  vss_cmd->add_option("--q", vss.q, "Exponent, 1 < q < 3/2")->required();
  vss_cmd->add_option("--xi-max", vss.config.xi_max, "Initial shooting horizon");
  vss_cmd->add_option("--rtol", vss.config.rtol, "Integrator relative tolerance");
  vss_cmd->add_option("--atol", vss.config.atol, "Integrator absolute tolerance");
  vss_cmd->add_option("--certificate-tol", vss.config.certificate_tol, "Bound on xi_max^a |f(xi_max)|");
  vss_cmd->add_option("--bisection-tol", vss.config.bisection_tol, "Bracket width at which bisection stops");
  vss_cmd->add_option("--max-bisections", vss.config.max_bisections, "Bisection iteration cap");
  vss_cmd->add_option("--out", vss.out_dir, "Output directory");

  cdlab::NWaveOptions nw;
  auto* nwave = app.add_subcommand("nwave", "Tabulate an N-wave");
  nwave->add_option("--q", nw.q, "Exponent")->required();
  nwave->add_option("--alpha", nw.alpha, "Left lobe mass");
  nwave->add_option("--beta", nw.beta, "Right lobe mass");
  nwave->add_option("--t", nw.t, "Time");
  nwave->add_option("--x-min", nw.x_min);
  nwave->add_option("--x-max", nw.x_max);
  nwave->add_option("--n", nw.n, "Number of cells");
  nwave->add_option("--out", nw.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cdlab::kExitConfig;
  }

  for (auto* sub : {simulate, experiment, sweep}) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) run.out_dir = out_dir;
    if (sub->count("--workers")) run.workers = workers;
  }
  if (simulate->parsed()) return cdlab::cmd_simulate(run, std::cout, std::cerr);
  if (experiment->parsed()) return cdlab::cmd_experiment(run, std::cout, std::cerr);
  if (sweep->parsed()) return cdlab::cmd_sweep(run, std::cout, std::cerr);
  if (vss_cmd->parsed()) return cdlab::cmd_vss(vss, std::cout, std::cerr);
  return cdlab::cmd_nwave(nw, std::cout, std::cerr);
}
