#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "supmin/audit.hpp"
#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"
#include "supmin/solver.hpp"

namespace supmin {

/// Config rejection, anchored to the line of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(message), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

struct CheckConfig {
  SamplePlan plan;
  std::optional<GrowthParams> growth;
};

struct RunConfig {
  std::optional<LagrangianModel> model;
  double a = 0.0;
  double b = 1.0;
  int N = 1;
  int grid_points = 65;
  AffineMap boundary;
  SweepSchedule schedule;
  SolveOptions solve;
  int restarts = 0;
  AuditConfig audit;
  CheckConfig check;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  [[nodiscard]] Grid grid() const {
    return Grid::uniform(a, b, grid_points - 1);
  }
};

/// Parses and validates a JSON run config. Unknown fields are rejected.
/// Messages read "<source>:<line>: <field>: <problem>".
RunConfig parse_config(std::string_view text, std::string_view source = "config");
RunConfig load_config(const std::string& filename);

}  // namespace supmin
