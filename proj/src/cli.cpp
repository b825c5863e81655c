#include "supmin/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "supmin/aronsson.hpp"
#include "supmin/error.hpp"
#include "supmin/format.hpp"
#include "supmin/report.hpp"

namespace supmin::cli {

namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& file, const Json& j) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + file.string());
  out << j.dump(2) << '\n';
}

std::string alt_candidate_name(std::size_t start) {
  return "candidate_start" + std::to_string(start) + ".csv";
}

}  // namespace

int run_solve(const RunConfig& config, std::ostream& out) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const Grid grid = config.grid();
  const auto& model = *config.model;

  const MultiStartResult ms =
      multi_start_sweep(model, grid, config.boundary, config.schedule,
                        config.solve, config.restarts, config.seed);
  const SweepResult& sweep = ms.best();

  for (const auto& rec : sweep.records) {
    write_path_csv((dir / sweep_path_filename(rec.m)).string(), rec.path);
  }
  write_path_csv((dir / "candidate.csv").string(), sweep.candidate);
  {
    std::ofstream e(dir / "energies.csv");
    e << "m,normalized_root\n";
    for (const auto& rec : sweep.records) {
      e << rec.m << ',' << format_double(rec.normalized_root) << '\n';
    }
  }
  {
    ResidualProfile profile;
    if (grid.elements() >= 4 && !sweep.records.empty()) {
      profile = residual_profile(model, sweep.candidate);
    }
    write_residual_csv((dir / "residuals.csv").string(), profile, config.N);
  }

  Json j = to_json(sweep, sweep_path_filename, "candidate.csv");
  if (config.restarts > 0) {
    Json starts = Json::array();
    for (std::size_t r = 0; r < ms.runs.size(); ++r) {
      Json s;
      s["start"] = r;
      s["sup_of_candidate"] = ms.runs[r].sup_of_candidate;
      s["aborted"] = ms.runs[r].aborted;
      starts.push_back(std::move(s));
    }
    j["best_start"] = ms.best_index;
    j["starts"] = std::move(starts);
    Json alts = Json::array();
    for (const std::size_t r : ms.alternatives) {
      write_path_csv((dir / alt_candidate_name(r)).string(), ms.runs[r].candidate);
      Json a;
      a["start"] = r;
      a["sup_of_candidate"] = ms.runs[r].sup_of_candidate;
      a["candidate_file"] = alt_candidate_name(r);
      alts.push_back(std::move(a));
    }
    j["alternatives"] = std::move(alts);
  }
  write_json(dir / "sweep.json", j);

  out << "solve: " << sweep.records.size() << " m-levels, sup_of_candidate = "
      << format_double(sweep.sup_of_candidate) << '\n';
  if (sweep.aborted) {
    out << "solve: sweep aborted: " << sweep.failure << '\n';
    return kSolverFailure;
  }
  return kOk;
}

int run_audit(const RunConfig& config, const Options& opts, std::ostream& out) {
  const fs::path dir(config.output_dir);
  if (opts.solve_first) {
    const int rc = run_solve(config, out);
    if (rc != kOk) return rc;
  }
  const fs::path file =
      opts.candidate ? fs::path(*opts.candidate) : dir / "candidate.csv";
  if (!fs::exists(file)) {
    out << "audit: missing candidate " << file.string() << '\n';
    return kConfigError;
  }
  const Path candidate = read_path_csv(file.string());
  if (candidate.dim() != config.N) {
    out << "audit: candidate has " << candidate.dim() << " components, N = "
        << config.N << '\n';
    return kConfigError;
  }
  fs::create_directories(dir);
  const AuditReport report =
      audit_absolute_minimality(*config.model, candidate, config.audit);
  write_json(dir / "audit.json", to_json(report));

  out << "audit: " << report.entries.size() << " subintervals, "
      << report.violations.size() << " violations, " << report.inconclusive
      << " inconclusive, max_deficit = " << format_double(report.max_deficit)
      << '\n';
  if (!report.violations.empty()) {
    out << std::setw(12) << "alpha" << std::setw(12) << "beta" << std::setw(16)
        << "sup_global" << std::setw(16) << "sup_local" << std::setw(16)
        << "deficit" << '\n';
    for (const auto k : report.violations) {
      const auto& e = report.entries[k];
      out << std::setw(12) << e.alpha << std::setw(12) << e.beta
          << std::setw(16) << e.sup_global_restricted << std::setw(16)
          << e.sup_local_solution << std::setw(16) << e.deficit << '\n';
    }
    return kAuditViolation;
  }
  return kOk;
}

int run_check(const RunConfig& config, std::ostream& out) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const auto& model = *config.model;
  const LevelConvexityResult lc = check_level_convexity(model, config.check.plan);
  Json j;
  j["level_convexity"] = to_json(lc);
  bool pass = lc.pass;
  if (config.check.growth) {
    const GrowthResult gr =
        check_growth_bounds(model, *config.check.growth, config.check.plan);
    j["growth"] = to_json(gr);
    pass = pass && gr.pass;
  }
  j["pass"] = pass;
  write_json(dir / "hypotheses.json", j);
  out << "check: level_convexity " << (lc.pass ? "pass" : "WITNESS") << " ("
      << lc.witnesses.size() << " witnesses)";
  if (config.check.growth) out << ", growth " << (j["growth"]["pass"].get<bool>() ? "pass" : "WITNESS");
  out << '\n';
  return pass ? kOk : kHypothesisWitness;
}

int run_command(const std::string& command, const std::string& config_path,
                const Options& opts, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  try {
    if (command == "solve") return run_solve(config, out);
    if (command == "audit") return run_audit(config, opts, out);
    if (command == "check") return run_check(config, out);
  } catch (const Error& e) {
    err << command << ": " << e.what() << '\n';
    return command == "solve" ? kSolverFailure : kConfigError;
  }
  err << "unknown command " << command << '\n';
  return kConfigError;
}

int resolve_jobs(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SUPMIN_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

}  // namespace supmin::cli
