#include "supmin/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "supmin/error.hpp"

namespace supmin {

namespace {

using nlohmann::json;

class Parser {
 public:
  Parser(std::string_view text, std::string_view source)
      : text_(text), source_(source) {}

  // Line of the last key in `path`, searching each key after its parent.
  int line_of(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    std::size_t found = std::string::npos;
    for (const auto& key : path) {
      const auto at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      found = at;
      pos = at + 1;
    }
    if (found == std::string::npos) return 1;
    return 1 + static_cast<int>(std::count(text_.begin(),
                                           text_.begin() + static_cast<long>(found),
                                           '\n'));
  }

  [[noreturn]] void fail(const std::vector<std::string>& path,
                         const std::string& problem) const {
    std::string field;
    for (const auto& k : path) field += (field.empty() ? "" : ".") + k;
    const int line = line_of(path);
    throw ConfigError(line, std::string(source_) + ":" + std::to_string(line) +
                                ": " + field + ": " + problem);
  }

  void expect_keys(const json& obj, const std::vector<std::string>& path,
                   std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
      if (!ok.count(item.key())) {
        auto p = path;
        p.push_back(item.key());
        fail(p, "unknown field");
      }
    }
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  Vec vector(const json& v, const std::vector<std::string>& path,
             long expected = -1) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vec out(static_cast<long>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<long>(i)] = number(v[i], path);
    if (expected >= 0 && out.size() != expected) {
      fail(path, "array length must be " + std::to_string(expected));
    }
    return out;
  }

  Mat matrix(const json& v, const std::vector<std::string>& path, long rows,
             long cols) const {
    if (!v.is_array() || v.empty()) fail(path, "expected an array of rows");
    if (rows >= 0 && static_cast<long>(v.size()) != rows) {
      fail(path, "expected " + std::to_string(rows) + " rows");
    }
    Mat out(static_cast<long>(v.size()), cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.row(static_cast<long>(i)) = vector(v[i], path, cols).transpose();
    }
    return out;
  }

  SampledSignal signal(const json& v, const std::vector<std::string>& path,
                       long dim) const {
    if (!v.is_array() || v.empty()) fail(path, "expected (x, value) pairs");
    std::vector<double> xs;
    std::vector<Vec> values;
    for (const auto& pair : v) {
      if (!pair.is_array() || pair.size() != 2) fail(path, "expected (x, value) pairs");
      xs.push_back(number(pair[0], path));
      if (pair[1].is_number() && dim == 1) {
        values.emplace_back(Vec::Constant(1, pair[1].get<double>()));
      } else {
        values.push_back(vector(pair[1], path, dim));
      }
    }
    try {
      return SampledSignal(std::move(xs), std::move(values));
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }

  VelocityField velocity(const json& obj, const std::vector<std::string>& path,
                         int n) const {
    VelocityField V;
    V.A = obj.contains("A") ? matrix(obj["A"], sub(path, "A"), n, n)
                            : Mat(Mat::Zero(n, n));
    V.c = obj.contains("c") ? signal(obj["c"], sub(path, "c"), n)
                            : SampledSignal::constant(Vec::Zero(n));
    return V;
  }

  static std::vector<std::string> sub(std::vector<std::string> path,
                                      const std::string& key) {
    path.push_back(key);
    return path;
  }

  LagrangianModel model(const json& obj, int n) const {
    const std::vector<std::string> path{"lagrangian"};
    if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string()) {
      fail(path, "object with a string \"kind\" required");
    }
    const auto kind = obj["kind"].get<std::string>();
    try {
      if (kind == "power_norm") {
        expect_keys(obj, path, {"kind", "exponent", "offset"});
        const double s =
            obj.contains("exponent") ? number(obj["exponent"], sub(path, "exponent")) : 2.0;
        const Vec offset = obj.contains("offset")
                               ? vector(obj["offset"], sub(path, "offset"), n)
                               : Vec(Vec::Zero(n));
        return LagrangianModel::power_norm(s, offset);
      }
      if (kind == "data_assimilation") {
        expect_keys(obj, path, {"kind", "K", "k", "A", "c"});
        DataAssimilationParams p;
        if (obj.contains("K")) {
          const auto& K = obj["K"];
          p.K = matrix(K, sub(path, "K"), -1, n);
        } else {
          p.K = Mat::Zero(1, n);
        }
        p.k = obj.contains("k") ? signal(obj["k"], sub(path, "k"), p.K.rows())
                                : SampledSignal::constant(Vec::Zero(p.K.rows()));
        p.V = velocity(obj, path, n);
        return LagrangianModel::data_assimilation(std::move(p));
      }
      if (kind == "radial") {
        expect_keys(obj, path, {"kind", "profile", "beta", "gamma", "A", "c"});
        RadialParams p;
        const std::string profile =
            obj.contains("profile") ? obj["profile"].get<std::string>() : "identity";
        if (profile == "identity") {
          p.profile = RadialProfile::kIdentity;
        } else if (profile == "shifted") {
          p.profile = RadialProfile::kShifted;
        } else if (profile == "power") {
          p.profile = RadialProfile::kPower;
        } else {
          fail(sub(path, "profile"), "one of identity, shifted, power");
        }
        if (obj.contains("beta")) p.beta = number(obj["beta"], sub(path, "beta"));
        if (obj.contains("gamma")) p.gamma = number(obj["gamma"], sub(path, "gamma"));
        p.V = velocity(obj, path, n);
        return LagrangianModel::radial(std::move(p));
      }
      if (kind == "custom") {
        expect_keys(obj, path, {"kind", "form", "wells"});
        const std::string form =
            obj.contains("form") ? obj["form"].get<std::string>() : "";
        if (form != "min_of_norms") fail(sub(path, "form"), "supported: min_of_norms");
        if (!obj.contains("wells") || !obj["wells"].is_array() || obj["wells"].empty()) {
          fail(sub(path, "wells"), "nonempty array of points required");
        }
        std::vector<Vec> wells;
        for (const auto& w : obj["wells"]) wells.push_back(vector(w, sub(path, "wells"), n));
        return LagrangianModel::min_of_norms(std::move(wells));
      }
    } catch (const Error& e) {
      fail(path, e.what());
    } catch (const json::exception& e) {
      fail(path, e.what());
    }
    fail(sub(path, "kind"),
         "one of power_norm, data_assimilation, radial, custom");
  }

  std::pair<double, double> range(const json& v,
                                  const std::vector<std::string>& path) const {
    const Vec r = vector(v, path, 2);
    if (!(r[0] <= r[1])) fail(path, "range needs lo <= hi");
    return {r[0], r[1]};
  }

  RunConfig parse() const {
    json root;
    try {
      root = json::parse(text_);
    } catch (const json::parse_error& e) {
      const auto byte = std::min<std::size_t>(e.byte, text_.size());
      const int line = 1 + static_cast<int>(std::count(
                               text_.begin(), text_.begin() + static_cast<long>(byte), '\n'));
      throw ConfigError(line, std::string(source_) + ":" + std::to_string(line) +
                                  ": parse error: " + e.what());
    }
    expect_keys(root, {}, {"lagrangian", "domain", "N", "grid_points", "boundary",
                           "schedule", "solve", "audit", "check", "seed",
                           "output_dir"});
    RunConfig cfg;

    for (const char* key : {"lagrangian", "domain", "N", "grid_points", "boundary"}) {
      if (!root.contains(key)) fail({key}, "required");
    }
    cfg.N = integer(root["N"], {"N"});
    if (cfg.N < 1) fail({"N"}, "N >= 1 required");
    const Vec domain = vector(root["domain"], {"domain"}, 2);
    cfg.a = domain[0];
    cfg.b = domain[1];
    if (!(cfg.a < cfg.b)) fail({"domain"}, "a < b required");
    cfg.grid_points = integer(root["grid_points"], {"grid_points"});
    if (cfg.grid_points < 3) fail({"grid_points"}, "grid_points >= 3 required");

    const auto& bnd = root["boundary"];
    expect_keys(bnd, {"boundary"}, {"b0", "b1"});
    if (!bnd.contains("b0") || !bnd.contains("b1")) {
      fail({"boundary"}, "b0 and b1 required");
    }
    cfg.boundary.b0 = vector(bnd["b0"], {"boundary", "b0"}, cfg.N);
    cfg.boundary.b1 = vector(bnd["b1"], {"boundary", "b1"}, cfg.N);

    cfg.model = model(root["lagrangian"], cfg.N);

    if (root.contains("seed")) {
      const auto& s = root["seed"];
      if (!s.is_number_unsigned()) fail({"seed"}, "unsigned integer required");
      cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("output_dir")) {
      if (!root["output_dir"].is_string()) fail({"output_dir"}, "string required");
      cfg.output_dir = root["output_dir"].get<std::string>();
    }

    if (root.contains("schedule")) {
      const auto& s = root["schedule"];
      const std::vector<std::string> p{"schedule"};
      expect_keys(s, p, {"m_start", "factor", "m_max", "tol_sweep"});
      if (s.contains("m_start")) cfg.schedule.m_start = integer(s["m_start"], sub(p, "m_start"));
      if (s.contains("factor")) cfg.schedule.factor = integer(s["factor"], sub(p, "factor"));
      if (s.contains("m_max")) cfg.schedule.m_max = integer(s["m_max"], sub(p, "m_max"));
      if (s.contains("tol_sweep")) cfg.schedule.tol_sweep = number(s["tol_sweep"], sub(p, "tol_sweep"));
      try {
        cfg.schedule.validate();
      } catch (const Error& e) {
        fail(p, e.what());
      }
    }

    if (root.contains("solve")) {
      const auto& s = root["solve"];
      const std::vector<std::string> p{"solve"};
      expect_keys(s, p, {"max_iters", "grad_tol", "initial_step", "backtrack",
                         "sufficient_decrease", "history", "restarts"});
      auto& o = cfg.solve;
      if (s.contains("max_iters")) o.max_iters = integer(s["max_iters"], sub(p, "max_iters"));
      if (s.contains("grad_tol")) o.grad_tol = number(s["grad_tol"], sub(p, "grad_tol"));
      if (s.contains("initial_step")) o.initial_step = number(s["initial_step"], sub(p, "initial_step"));
      if (s.contains("backtrack")) o.backtrack = number(s["backtrack"], sub(p, "backtrack"));
      if (s.contains("sufficient_decrease")) {
        o.sufficient_decrease = number(s["sufficient_decrease"], sub(p, "sufficient_decrease"));
      }
      if (s.contains("history")) o.history = integer(s["history"], sub(p, "history"));
      if (s.contains("restarts")) {
        cfg.restarts = integer(s["restarts"], sub(p, "restarts"));
        if (cfg.restarts < 0) fail(sub(p, "restarts"), "restarts >= 0 required");
      }
      try {
        o.validate();
      } catch (const Error& e) {
        fail(p, e.what());
      }
    }

    cfg.audit.schedule = cfg.schedule;
    cfg.audit.solve = cfg.solve;
    cfg.audit.seed = cfg.seed;
    if (root.contains("audit")) {
      const auto& s = root["audit"];
      const std::vector<std::string> p{"audit"};
      expect_keys(s, p, {"num_subintervals", "min_elements", "tol_audit"});
      if (s.contains("num_subintervals")) {
        cfg.audit.num_subintervals = integer(s["num_subintervals"], sub(p, "num_subintervals"));
        if (cfg.audit.num_subintervals < 1) {
          fail(sub(p, "num_subintervals"), "num_subintervals >= 1 required");
        }
      }
      if (s.contains("min_elements")) {
        cfg.audit.min_elements = integer(s["min_elements"], sub(p, "min_elements"));
        if (cfg.audit.min_elements < 1) fail(sub(p, "min_elements"), ">= 1 required");
      }
      if (s.contains("tol_audit")) {
        cfg.audit.tol_audit = number(s["tol_audit"], sub(p, "tol_audit"));
        if (!(cfg.audit.tol_audit > 0.0)) fail(sub(p, "tol_audit"), "tol_audit > 0 required");
      }
    }

    auto& plan = cfg.check.plan;
    plan.seed = cfg.seed;
    plan.box.x_lo = cfg.a;
    plan.box.x_hi = cfg.b;
    if (root.contains("check")) {
      const auto& s = root["check"];
      const std::vector<std::string> p{"check"};
      expect_keys(s, p, {"num_triples", "t_levels", "box", "growth"});
      if (s.contains("num_triples")) {
        plan.num_triples = integer(s["num_triples"], sub(p, "num_triples"));
        if (plan.num_triples < 1) fail(sub(p, "num_triples"), ">= 1 required");
      }
      if (s.contains("t_levels")) {
        plan.t_levels = integer(s["t_levels"], sub(p, "t_levels"));
        if (plan.t_levels < 1) fail(sub(p, "t_levels"), ">= 1 required");
      }
      if (s.contains("box")) {
        const auto& box = s["box"];
        const auto bp = sub(p, "box");
        expect_keys(box, bp, {"x", "eta", "P"});
        if (box.contains("x")) std::tie(plan.box.x_lo, plan.box.x_hi) = range(box["x"], sub(bp, "x"));
        if (box.contains("eta")) std::tie(plan.box.eta_lo, plan.box.eta_hi) = range(box["eta"], sub(bp, "eta"));
        if (box.contains("P")) std::tie(plan.box.P_lo, plan.box.P_hi) = range(box["P"], sub(bp, "P"));
      }
      if (s.contains("growth")) {
        const auto& gr = s["growth"];
        const auto gp = sub(p, "growth");
        expect_keys(gr, gp, {"C1", "C2", "C3", "q", "r", "h"});
        for (const char* key : {"C1", "C2", "C3", "q", "r", "h"}) {
          if (!gr.contains(key)) fail(sub(gp, key), "required");
        }
        GrowthParams g = GrowthParams::with_constant_h(
            number(gr["C1"], sub(gp, "C1")), number(gr["C2"], sub(gp, "C2")),
            number(gr["C3"], sub(gp, "C3")), number(gr["q"], sub(gp, "q")),
            number(gr["r"], sub(gp, "r")), number(gr["h"], sub(gp, "h")));
        if (!(number(gr["h"], sub(gp, "h")) > 0.0)) fail(sub(gp, "h"), "h > 0 required");
        try {
          g.validate();
        } catch (const Error& e) {
          fail(gp, e.what());
        }
        cfg.check.growth = std::move(g);
      }
    }
    return cfg;
  }

 private:
  std::string text_;
  std::string_view source_;
};

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
  return Parser(text, source).parse();
}

RunConfig load_config(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(0, filename + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), filename);
}

}  // namespace supmin
