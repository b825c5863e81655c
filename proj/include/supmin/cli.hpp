#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "supmin/config.hpp"

namespace supmin::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kSolverFailure = 2,
  kAuditViolation = 3,
  kHypothesisWitness = 4,
};

struct Options {
  bool solve_first = false;
  std::optional<std::string> candidate;  // overrides <output_dir>/candidate.csv
};

/// Writes sweep.json, candidate.csv, energies.csv, residuals.csv and the
/// per-m paths into config.output_dir.
int run_solve(const RunConfig& config, std::ostream& out);

/// Audits candidate.csv (or opts.candidate) and writes audit.json.
int run_audit(const RunConfig& config, const Options& opts, std::ostream& out);

/// Samples the level-convexity and growth hypotheses; writes hypotheses.json.
int run_check(const RunConfig& config, std::ostream& out);

/// Loads the config file and dispatches one of solve, audit, check.
int run_command(const std::string& command, const std::string& config_path,
                const Options& opts, std::ostream& out, std::ostream& err);

/// --jobs value, falling back to SUPMIN_JOBS; 0 means the OpenMP default.
int resolve_jobs(int flag_value);

}  // namespace supmin::cli
