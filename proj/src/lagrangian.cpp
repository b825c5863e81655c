#include "supmin/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supmin/error.hpp"
#include "supmin/parallel.hpp"
#include "supmin/random.hpp"

namespace supmin {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Step that is exactly representable as the difference of z + h and z.
double exact_step(double z, double h) {
  volatile double shifted = z + h;
  return shifted - z;
}

struct RadialValues {
  double H, dH, d2H;
};

RadialValues radial_profile(const RadialParams& p, double t) {
  switch (p.profile) {
    case RadialProfile::kIdentity:
      return {t, 1.0, 0.0};
    case RadialProfile::kShifted:
      return {t + p.beta, 1.0, 0.0};
    case RadialProfile::kPower: {
      const double g = p.gamma;
      const double base = 1.0 + t;
      return {std::expm1(g * std::log1p(t)), g * std::pow(base, g - 1.0),
              g * (g - 1.0) * std::pow(base, g - 2.0)};
    }
  }
  return {0.0, 0.0, 0.0};
}

void check_finite_vec(const Vec& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorKind::kNonFinite, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// SampledSignal

SampledSignal::SampledSignal(std::vector<double> xs, std::vector<Vec> values)
    : xs_(std::move(xs)), values_(std::move(values)) {
  if (xs_.empty() || xs_.size() != values_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "sampled signal needs matching, nonempty x and value arrays");
  }
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i] > xs_[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "sampled signal x must be strictly increasing");
    }
    if (values_[i].size() != values_[0].size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "sampled signal values must share one dimension");
    }
  }
  for (const auto& v : values_) check_finite_vec(v, "sampled signal value");
}

SampledSignal SampledSignal::constant(const Vec& value) {
  return SampledSignal({0.0}, {value});
}

int SampledSignal::dim() const {
  return values_.empty() ? 0 : static_cast<int>(values_.front().size());
}

Vec SampledSignal::value(double x) const {
  if (xs_.size() == 1 || x <= xs_.front()) return values_.front();
  if (x >= xs_.back()) return values_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double theta = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return values_[i] + theta * (values_[i + 1] - values_[i]);
}

Vec SampledSignal::slope(double x) const {
  if (xs_.size() == 1 || x < xs_.front() || x > xs_.back()) {
    return Vec::Zero(dim());
  }
  // Left segment at interior samples; first segment at xs_.front().
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  i = (i == 0) ? 0 : i - 1;
  return (values_[i + 1] - values_[i]) / (xs_[i + 1] - xs_[i]);
}

// ---------------------------------------------------------------------------
// GrowthParams

GrowthParams GrowthParams::with_constant_h(double C1, double C2, double C3,
                                           double q, double r, double h) {
  GrowthParams g;
  g.C1 = C1;
  g.C2 = C2;
  g.C3 = C3;
  g.q = q;
  g.r = r;
  g.h_bound = [h](double, const Vec&) { return h; };
  return g;
}

void GrowthParams::validate() const {
  if (!(q > 0.0) || !(q <= r) || !std::isfinite(r)) {
    throw Error(ErrorKind::kInvalidArgument, "growth: 0 < q <= r required");
  }
  if (!(C1 >= 0.0) || !(C2 >= 0.0) || !(C3 >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "growth: C1, C2, C3 must be nonnegative");
  }
  if (!h_bound) {
    throw Error(ErrorKind::kInvalidArgument, "growth: h bound missing");
  }
}

// ---------------------------------------------------------------------------
// Construction

LagrangianModel LagrangianModel::power_norm(double exponent, Vec offset) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw Error(ErrorKind::kInvalidArgument, "power_norm: exponent > 0");
  }
  check_finite_vec(offset, "power_norm offset");
  LagrangianModel m;
  m.kind_ = ModelKind::kPowerNorm;
  m.dim_ = static_cast<int>(offset.size());
  m.analytic_first_ = true;
  m.analytic_second_ = true;
  m.name_ = "power_norm";
  m.params_ = PowerNormParams{exponent, std::move(offset)};
  return m;
}

namespace {

void validate_velocity(const VelocityField& V, int n) {
  if (V.A.rows() != n || V.A.cols() != n) {
    throw Error(ErrorKind::kInvalidArgument, "velocity: A must be N x N");
  }
  if (V.c.dim() != n) {
    throw Error(ErrorKind::kInvalidArgument, "velocity: c must be in R^N");
  }
  if (!V.A.allFinite()) throw Error(ErrorKind::kNonFinite, "velocity A");
}

}  // namespace

LagrangianModel LagrangianModel::data_assimilation(
    DataAssimilationParams params) {
  const int n = static_cast<int>(params.K.cols());
  if (n < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "data_assimilation: K must have N >= 1 columns");
  }
  if (params.k.dim() != params.K.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                "data_assimilation: k must be in R^M with K M x N");
  }
  if (!params.K.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "data_assimilation K");
  }
  validate_velocity(params.V, n);
  LagrangianModel m;
  m.kind_ = ModelKind::kDataAssimilation;
  m.dim_ = n;
  m.analytic_first_ = true;
  m.analytic_second_ = true;
  m.name_ = "data_assimilation";
  m.params_ = std::move(params);
  return m;
}

LagrangianModel LagrangianModel::radial(RadialParams params) {
  const int n = static_cast<int>(params.V.A.rows());
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "radial: N >= 1");
  validate_velocity(params.V, n);
  if (params.profile == RadialProfile::kShifted && !(params.beta >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "radial: beta >= 0 required");
  }
  if (params.profile == RadialProfile::kPower && !(params.gamma > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "radial: gamma > 0 required");
  }
  LagrangianModel m;
  m.kind_ = ModelKind::kRadial;
  m.dim_ = n;
  m.analytic_first_ = true;
  m.analytic_second_ = true;
  m.name_ = "radial";
  m.params_ = std::move(params);
  return m;
}

LagrangianModel LagrangianModel::custom(CustomParams params, int dim) {
  if (dim < 1) throw Error(ErrorKind::kInvalidArgument, "custom: N >= 1");
  if (!params.value) {
    throw Error(ErrorKind::kInvalidArgument, "custom: value function missing");
  }
  LagrangianModel m;
  m.kind_ = ModelKind::kCustom;
  m.dim_ = dim;
  m.analytic_first_ = static_cast<bool>(params.jet);
  m.analytic_second_ = m.analytic_first_;
  m.name_ = params.name.empty() ? "custom" : params.name;
  m.params_ = std::move(params);
  return m;
}

LagrangianModel LagrangianModel::min_of_norms(std::vector<Vec> wells) {
  if (wells.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "min_of_norms: no wells");
  }
  const int n = static_cast<int>(wells.front().size());
  for (const auto& w : wells) {
    if (w.size() != n) {
      throw Error(ErrorKind::kInvalidArgument,
                  "min_of_norms: wells must share one dimension");
    }
    check_finite_vec(w, "min_of_norms well");
  }
  CustomParams p;
  p.name = "min_of_norms";
  p.value = [wells = std::move(wells)](double, const Vec&, const Vec& P) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : wells) best = std::min(best, (P - w).norm());
    return best;
  };
  return custom(std::move(p), n);
}

// ---------------------------------------------------------------------------
// Evaluation

double LagrangianModel::raw_eval(double x, const Vec& eta,
                                 const Vec& P) const {
  switch (kind_) {
    case ModelKind::kPowerNorm: {
      const auto& p = std::get<PowerNormParams>(params_);
      const Vec d = P - p.offset;
      if (p.exponent == 2.0) return d.squaredNorm();
      return std::pow(d.norm(), p.exponent);
    }
    case ModelKind::kDataAssimilation: {
      const auto& p = std::get<DataAssimilationParams>(params_);
      const Vec obs = p.k.value(x) - p.K * eta;
      const Vec motion = P - p.V.eval(x, eta);
      return obs.squaredNorm() + motion.squaredNorm();
    }
    case ModelKind::kRadial: {
      const auto& p = std::get<RadialParams>(params_);
      const double t = 0.5 * (P - p.V.eval(x, eta)).squaredNorm();
      return radial_profile(p, t).H;
    }
    case ModelKind::kCustom:
      return std::get<CustomParams>(params_).value(x, eta, P);
  }
  return 0.0;
}

double LagrangianModel::eval(double x, const Vec& eta, const Vec& P) const {
  const double v = raw_eval(x, eta, P);
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::kNonFinite, name_ + " returned a non-finite value");
  }
  if (v < 0.0) {
    throw Error(ErrorKind::kNegativeLagrangian,
                name_ + " returned a negative value");
  }
  return v;
}

JetDerivatives LagrangianModel::analytic_jet(double x, const Vec& eta,
                                             const Vec& P) const {
  const int n = dim_;
  JetDerivatives j;
  j.L_eta = Vec::Zero(n);
  j.L_Peta = Mat::Zero(n, n);
  j.L_Px = Vec::Zero(n);
  switch (kind_) {
    case ModelKind::kPowerNorm: {
      const auto& p = std::get<PowerNormParams>(params_);
      const double s = p.exponent;
      const Vec d = P - p.offset;
      const double r = d.norm();
      j.L = raw_eval(x, eta, P);
      if (r == 0.0) {
        // Zero gradient at the vertex; the Hessian is 2I for s = 2, zero
        // for s > 2, and unbounded for s < 2 (reported as zero).
        j.L_P = Vec::Zero(n);
        j.L_PP = (s == 2.0) ? Mat(2.0 * Mat::Identity(n, n)) : Mat::Zero(n, n);
      } else {
        const double a = s * std::pow(r, s - 2.0);
        j.L_P = a * d;
        j.L_PP = a * Mat::Identity(n, n) +
                 s * (s - 2.0) * std::pow(r, s - 4.0) * (d * d.transpose());
      }
      break;
    }
    case ModelKind::kDataAssimilation: {
      const auto& p = std::get<DataAssimilationParams>(params_);
      const Vec obs = p.k.value(x) - p.K * eta;
      const Vec motion = P - p.V.eval(x, eta);
      const Vec dk = p.k.slope(x);
      const Vec dc = p.V.c.slope(x);
      j.L = obs.squaredNorm() + motion.squaredNorm();
      j.L_P = 2.0 * motion;
      j.L_eta = -2.0 * (p.K.transpose() * obs) - 2.0 * (p.V.A.transpose() * motion);
      j.L_x = 2.0 * obs.dot(dk) - 2.0 * motion.dot(dc);
      j.L_PP = 2.0 * Mat::Identity(n, n);
      j.L_Peta = -2.0 * p.V.A;
      j.L_Px = -2.0 * dc;
      break;
    }
    case ModelKind::kRadial: {
      const auto& p = std::get<RadialParams>(params_);
      const Vec d = P - p.V.eval(x, eta);
      const Vec dc = p.V.c.slope(x);
      const auto h = radial_profile(p, 0.5 * d.squaredNorm());
      const Vec t_eta = -(p.V.A.transpose() * d);
      const double t_x = -dc.dot(d);
      j.L = h.H;
      j.L_P = h.dH * d;
      j.L_eta = h.dH * t_eta;
      j.L_x = h.dH * t_x;
      j.L_PP = h.d2H * (d * d.transpose()) + h.dH * Mat::Identity(n, n);
      j.L_Peta = h.d2H * (d * t_eta.transpose()) - h.dH * p.V.A;
      j.L_Px = h.d2H * t_x * d - h.dH * dc;
      break;
    }
    case ModelKind::kCustom:
      j = std::get<CustomParams>(params_).jet(x, eta, P);
      break;
  }
  return j;
}

JetDerivatives LagrangianModel::fd_jet(double x, const Vec& eta,
                                       const Vec& P) const {
  const int n = dim_;
  // Packed coordinates z = (x, eta, P).
  const int nz = 2 * n + 1;
  Vec z(nz);
  z[0] = x;
  z.segment(1, n) = eta;
  z.segment(1 + n, n) = P;
  auto f = [&](const Vec& zz) {
    return eval(zz[0], zz.segment(1, n), zz.segment(1 + n, n));
  };

  // Second derivatives: Richardson extrapolation of central differences at
  // steps h and h/2, which tolerates a step large enough to keep roundoff
  // (about eps |L| / h^2) small when |L| dwarfs the curvature.
  const double h1_base = std::cbrt(kEps);
  const double h2_base = std::pow(kEps, 1.0 / 6.0);
  Vec h1(nz), h2(nz), h2_half(nz);
  for (int i = 0; i < nz; ++i) {
    h1[i] = exact_step(z[i], h1_base * (1.0 + std::abs(z[i])));
    h2[i] = exact_step(z[i], h2_base * (1.0 + std::abs(z[i])));
    h2_half[i] = exact_step(z[i], 0.5 * h2_base * (1.0 + std::abs(z[i])));
  }

  JetDerivatives j;
  j.L = f(z);
  Vec grad(nz);
  for (int i = 0; i < nz; ++i) {
    Vec zp = z, zm = z;
    zp[i] += h1[i];
    zm[i] -= h1[i];
    grad[i] = (f(zp) - f(zm)) / (2.0 * h1[i]);
  }
  j.L_x = grad[0];
  j.L_eta = grad.segment(1, n);
  j.L_P = grad.segment(1 + n, n);

  auto central = [&](int a, int b, const Vec& h) {
    if (a == b) {
      Vec zp = z, zm = z;
      zp[a] += h[a];
      zm[a] -= h[a];
      return (f(zp) - 2.0 * j.L + f(zm)) / (h[a] * h[a]);
    }
    Vec zpp = z, zpm = z, zmp = z, zmm = z;
    zpp[a] += h[a];
    zpp[b] += h[b];
    zpm[a] += h[a];
    zpm[b] -= h[b];
    zmp[a] -= h[a];
    zmp[b] += h[b];
    zmm[a] -= h[a];
    zmm[b] -= h[b];
    return (f(zpp) - f(zpm) - f(zmp) + f(zmm)) / (4.0 * h[a] * h[b]);
  };
  auto second = [&](int a, int b) {
    return (4.0 * central(a, b, h2_half) - central(a, b, h2)) / 3.0;
  };

  j.L_PP.resize(n, n);
  j.L_Peta.resize(n, n);
  j.L_Px.resize(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      j.L_PP(a, b) = second(1 + n + a, 1 + n + b);
      j.L_PP(b, a) = j.L_PP(a, b);
    }
    for (int b = 0; b < n; ++b) j.L_Peta(a, b) = second(1 + n + a, 1 + b);
    j.L_Px[a] = second(1 + n + a, 0);
  }
  j.L_PP = 0.5 * (j.L_PP + j.L_PP.transpose()).eval();

  if (!std::isfinite(j.L_x) || !j.L_P.allFinite() || !j.L_eta.allFinite() ||
      !j.L_PP.allFinite() || !j.L_Peta.allFinite() || !j.L_Px.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "finite-difference jet overflowed");
  }
  return j;
}

JetDerivatives LagrangianModel::jet(double x, const Vec& eta,
                                    const Vec& P) const {
  if (!analytic_second_) return fd_jet(x, eta, P);
  JetDerivatives j = analytic_jet(x, eta, P);
  if (!std::isfinite(j.L) || !j.L_P.allFinite() || !j.L_PP.allFinite()) {
    throw Error(ErrorKind::kNonFinite, name_ + " jet is not finite");
  }
  if (j.L < 0.0) {
    throw Error(ErrorKind::kNegativeLagrangian,
                name_ + " returned a negative value");
  }
  return j;
}

void LagrangianModel::first_order(double x, const Vec& eta, const Vec& P,
                                  double& L, Vec& L_P, Vec& L_eta) const {
  switch (kind_) {
    case ModelKind::kPowerNorm: {
      const auto& p = std::get<PowerNormParams>(params_);
      const double s = p.exponent;
      const Vec d = P - p.offset;
      const double r = d.norm();
      L = eval(x, eta, P);
      L_P = (r == 0.0) ? Vec(Vec::Zero(dim_)) : Vec(s * std::pow(r, s - 2.0) * d);
      L_eta = Vec::Zero(dim_);
      return;
    }
    case ModelKind::kDataAssimilation: {
      const auto& p = std::get<DataAssimilationParams>(params_);
      const Vec obs = p.k.value(x) - p.K * eta;
      const Vec motion = P - p.V.eval(x, eta);
      L = obs.squaredNorm() + motion.squaredNorm();
      L_P = 2.0 * motion;
      L_eta = -2.0 * (p.K.transpose() * obs) - 2.0 * (p.V.A.transpose() * motion);
      break;
    }
    case ModelKind::kRadial: {
      const auto& p = std::get<RadialParams>(params_);
      const Vec d = P - p.V.eval(x, eta);
      const auto h = radial_profile(p, 0.5 * d.squaredNorm());
      L = h.H;
      L_P = h.dH * d;
      L_eta = -h.dH * (p.V.A.transpose() * d);
      break;
    }
    case ModelKind::kCustom: {
      const auto& p = std::get<CustomParams>(params_);
      if (p.jet) {
        const JetDerivatives j = p.jet(x, eta, P);
        L = j.L;
        L_P = j.L_P;
        L_eta = j.L_eta;
      } else {
        // Central differences in (eta, P) only.
        const int n = dim_;
        L = eval(x, eta, P);
        L_P.resize(n);
        L_eta.resize(n);
        const double base = std::cbrt(kEps);
        Vec e = eta, q = P;
        for (int i = 0; i < n; ++i) {
          const double he = exact_step(eta[i], base * (1.0 + std::abs(eta[i])));
          e[i] = eta[i] + he;
          const double fp = eval(x, e, P);
          e[i] = eta[i] - he;
          const double fm = eval(x, e, P);
          e[i] = eta[i];
          L_eta[i] = (fp - fm) / (2.0 * he);

          const double hp = exact_step(P[i], base * (1.0 + std::abs(P[i])));
          q[i] = P[i] + hp;
          const double gp = eval(x, eta, q);
          q[i] = P[i] - hp;
          const double gm = eval(x, eta, q);
          q[i] = P[i];
          L_P[i] = (gp - gm) / (2.0 * hp);
        }
      }
      break;
    }
  }
  if (!std::isfinite(L) || !L_P.allFinite() || !L_eta.allFinite()) {
    throw Error(ErrorKind::kNonFinite, name_ + " first-order jet");
  }
  if (L < 0.0) {
    throw Error(ErrorKind::kNegativeLagrangian,
                name_ + " returned a negative value");
  }
}

// ---------------------------------------------------------------------------
// Hypothesis checks

double level_convexity_tolerance(double scale) {
  return 1e-9 * (1.0 + std::abs(scale));
}

std::optional<LevelConvexityWitness> level_convexity_violation(
    const LagrangianModel& model, double x, const Vec& eta, const Vec& P1,
    const Vec& P2, double lambda) {
  const double l1 = model.eval(x, eta, P1);
  const double l2 = model.eval(x, eta, P2);
  const Vec mid = lambda * P1 + (1.0 - lambda) * P2;
  const double lm = model.eval(x, eta, mid);
  const double top = std::max(l1, l2);
  if (lm > top + level_convexity_tolerance(top)) {
    return LevelConvexityWitness{x, eta, P1, P2, lambda, lm, top};
  }
  return std::nullopt;
}

LevelConvexityResult check_level_convexity(const LagrangianModel& model,
                                           const SamplePlan& plan,
                                           Exec exec) {
  if (plan.num_triples < 1 || plan.t_levels < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "level convexity plan: num_triples, t_levels >= 1");
  }
  const int n = model.dim();
  const auto& box = plan.box;
  struct Sample {
    double x;
    Vec eta, P1, P2;
  };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(plan.num_triples));
  Rng rng(plan.seed);
  for (int t = 0; t < plan.num_triples; ++t) {
    Sample s;
    s.x = rng.uniform(box.x_lo, box.x_hi);
    s.eta = rng.vector(n, box.eta_lo, box.eta_hi);
    s.P1 = rng.vector(n, box.P_lo, box.P_hi);
    s.P2 = rng.vector(n, box.P_lo, box.P_hi);
    samples.push_back(std::move(s));
  }

  const int levels = plan.t_levels;
  const auto total = static_cast<long>(samples.size()) * levels;
  std::vector<std::optional<LevelConvexityWitness>> found(
      static_cast<std::size_t>(total));
  auto body = [&](long idx) {
    const auto& s = samples[static_cast<std::size_t>(idx / levels)];
    const double lambda =
        static_cast<double>(idx % levels + 1) / static_cast<double>(levels + 1);
    found[static_cast<std::size_t>(idx)] =
        level_convexity_violation(model, s.x, s.eta, s.P1, s.P2, lambda);
  };
  parallel_for(total, exec == Exec::kParallel, body);

  LevelConvexityResult result;
  for (auto& w : found) {
    if (w) result.witnesses.push_back(std::move(*w));
  }
  result.pass = result.witnesses.empty();
  return result;
}

GrowthResult check_growth_bounds(const LagrangianModel& model,
                                 const GrowthParams& growth,
                                 const SamplePlan& plan) {
  growth.validate();
  if (plan.num_triples < 1) {
    throw Error(ErrorKind::kInvalidArgument, "growth plan: num_triples >= 1");
  }
  const int n = model.dim();
  const auto& box = plan.box;
  Rng rng(plan.seed);
  GrowthResult result;
  result.lower_margin = std::numeric_limits<double>::infinity();
  result.upper_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < plan.num_triples; ++t) {
    const double x = rng.uniform(box.x_lo, box.x_hi);
    const Vec eta = rng.vector(n, box.eta_lo, box.eta_hi);
    const Vec P = rng.vector(n, box.P_lo, box.P_hi);
    const double L = model.eval(x, eta, P);
    const double norm = P.norm();
    const double lower = growth.C1 * std::pow(norm, growth.q) - growth.C2;
    const double upper =
        growth.h_bound(x, eta) * std::pow(norm, growth.r) + growth.C3;
    const double lo_margin = L - lower;
    const double up_margin = upper - L;
    result.lower_margin = std::min(result.lower_margin, lo_margin);
    result.upper_margin = std::min(result.upper_margin, up_margin);
    const double tol = level_convexity_tolerance(L);
    if (lo_margin < -tol) {
      result.witnesses.push_back({x, eta, P, L, true, lo_margin});
    }
    if (up_margin < -tol) {
      result.witnesses.push_back({x, eta, P, L, false, up_margin});
    }
  }
  result.pass = result.witnesses.empty();
  return result;
}

}  // namespace supmin
