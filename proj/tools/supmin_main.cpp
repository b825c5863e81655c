#include <iostream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "supmin/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sup-norm minimisers of supremal functionals along paths"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 0;
  supmin::cli::Options opts;
  app.add_option("--jobs", jobs, "worker threads (fallback: SUPMIN_JOBS)");

  auto* solve = app.add_subcommand("solve", "run the m-sweep and write the candidate");
  solve->add_option("config", config_path, "JSON run config")->required();

  auto* audit = app.add_subcommand("audit", "audit the candidate on random subintervals");
  audit->add_option("config", config_path, "JSON run config")->required();
  audit->add_flag("--solve-first", opts.solve_first, "run solve before auditing");
  audit->add_option("--candidate", opts.candidate, "candidate CSV to audit");

  auto* check = app.add_subcommand("check", "sample the hypotheses on the Lagrangian");
  check->add_option("config", config_path, "JSON run config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : supmin::cli::kConfigError;
  }

#ifdef _OPENMP
  if (const int n = supmin::cli::resolve_jobs(jobs); n > 0) omp_set_num_threads(n);
#endif

  const std::string command = app.get_subcommands().front()->get_name();
  return supmin::cli::run_command(command, config_path, opts, std::cout, std::cerr);
}
