#include "supmin/report.hpp"

#include <cstdio>

namespace supmin {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

std::string sweep_path_filename(int m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_m%04d.csv", m);
  return buf;
}

Json to_json(const EnergyReport& r) {
  Json j;
  if (r.m) {
    j["m"] = *r.m;
  } else {
    j["m"] = "inf";
  }
  j["raw"] = r.overflow ? Json(nullptr) : Json(r.raw);
  j["overflow"] = r.overflow;
  j["normalized_root"] = r.normalized_root;
  j["sup"] = r.sup;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  return j;
}

Json to_json(const SweepResult& sweep,
             const std::function<std::string(int)>& path_file,
             const std::string& candidate_file) {
  Json j;
  Json records = Json::array();
  for (const auto& rec : sweep.records) {
    Json r;
    r["m"] = rec.m;
    r["normalized_root"] = rec.normalized_root;
    r["iterations"] = rec.stats.iterations;
    r["converged"] = rec.stats.converged;
    r["line_search_failed"] = rec.stats.line_search_failed;
    r["stagnated"] = rec.stats.stagnated;
    r["grad_inf_norm"] = rec.stats.grad_inf_norm;
    r["objective"] = rec.stats.objective;
    r["path_file"] = path_file(rec.m);
    records.push_back(std::move(r));
  }
  j["records"] = std::move(records);
  j["C_sequence"] = sweep.C_sequence;
  j["candidate_file"] = candidate_file;
  j["sup_of_candidate"] = sweep.sup_of_candidate;
  j["aborted"] = sweep.aborted;
  j["failure"] = sweep.failure;
  return j;
}

Json to_json(const AuditReport& report) {
  Json j;
  j["tol_audit"] = report.tol_audit;
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json r;
    r["alpha"] = e.alpha;
    r["beta"] = e.beta;
    r["first_node"] = e.first_node;
    r["last_node"] = e.last_node;
    r["sup_global_restricted"] = e.sup_global_restricted;
    r["sup_local_solution"] = e.sup_local_solution;
    r["deficit"] = e.deficit;
    r["violation"] = e.violation;
    r["inconclusive"] = e.inconclusive;
    if (!e.message.empty()) r["message"] = e.message;
    entries.push_back(std::move(r));
  }
  j["subintervals"] = std::move(entries);
  j["violations"] = report.violations;
  j["num_violations"] = report.violations.size();
  j["inconclusive"] = report.inconclusive;
  j["max_deficit"] = report.max_deficit;
  return j;
}

Json to_json(const LevelConvexityResult& result) {
  Json j;
  j["pass"] = result.pass;
  Json w = Json::array();
  for (const auto& v : result.witnesses) {
    Json e;
    e["x"] = v.x;
    e["eta"] = vec_json(v.eta);
    e["P1"] = vec_json(v.P1);
    e["P2"] = vec_json(v.P2);
    e["lambda"] = v.lambda;
    e["value_at_combination"] = v.value_at_combination;
    e["max_at_ends"] = v.max_at_ends;
    w.push_back(std::move(e));
  }
  j["witnesses"] = std::move(w);
  return j;
}

Json to_json(const GrowthResult& result) {
  Json j;
  j["pass"] = result.pass;
  j["lower_margin"] = result.lower_margin;
  j["upper_margin"] = result.upper_margin;
  Json w = Json::array();
  for (const auto& v : result.witnesses) {
    Json e;
    e["x"] = v.x;
    e["eta"] = vec_json(v.eta);
    e["P"] = vec_json(v.P);
    e["value"] = v.value;
    e["side"] = v.lower_side ? "lower" : "upper";
    e["margin"] = v.margin;
    w.push_back(std::move(e));
  }
  j["witnesses"] = std::move(w);
  return j;
}

Json to_json(const QuotientScan& scan) {
  auto side = [](const std::vector<LayerSample>& samples) {
    Json a = Json::array();
    for (const auto& s : samples) {
      Json e;
      e["delta"] = s.delta;
      e["quotient"] = vec_json(s.quotient);
      e["layer_sup"] = s.layer_sup;
      e["boundary_deviation"] = s.boundary_deviation;
      a.push_back(std::move(e));
    }
    return a;
  };
  Json j;
  j["global_sup"] = scan.global_sup;
  j["left"] = side(scan.left);
  j["right"] = side(scan.right);
  j["left_quotient_limit"] = vec_json(scan.left_quotient_limit);
  j["right_quotient_limit"] = vec_json(scan.right_quotient_limit);
  j["left_sup_limit"] = scan.left_sup_limit;
  j["right_sup_limit"] = scan.right_sup_limit;
  j["left_cauchy"] = scan.left_cauchy;
  j["right_cauchy"] = scan.right_cauchy;
  j["bound_holds"] = scan.bound_holds;
  return j;
}

}  // namespace supmin
