#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "supmin/audit.hpp"
#include "supmin/energy.hpp"
#include "supmin/lagrangian.hpp"
#include "supmin/solver.hpp"

// JSON views of the result types. Field order is fixed so identical runs
// serialize to identical bytes.
namespace supmin {

using Json = nlohmann::ordered_json;

Json to_json(const EnergyReport& report);

/// path_file(m) names the CSV each per-m path is written to.
Json to_json(const SweepResult& sweep,
             const std::function<std::string(int)>& path_file,
             const std::string& candidate_file);

Json to_json(const AuditReport& report);
Json to_json(const LevelConvexityResult& result);
Json to_json(const GrowthResult& result);
Json to_json(const QuotientScan& scan);

/// File name used for the per-m path CSV, e.g. path_m0016.csv.
std::string sweep_path_filename(int m);

}  // namespace supmin
