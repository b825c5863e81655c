#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "supmin/types.hpp"

namespace supmin {

/// Vector-valued signal given by samples (x_i, v_i) with x strictly
/// increasing. Linear interpolation inside, constant extension outside.
class SampledSignal {
 public:
  SampledSignal() = default;
  SampledSignal(std::vector<double> xs, std::vector<Vec> values);

  static SampledSignal constant(const Vec& value);

  [[nodiscard]] int dim() const;
  [[nodiscard]] Vec value(double x) const;
  /// Derivative of the interpolant; zero outside the sample range. At an
  /// interior sample the left segment is used.
  [[nodiscard]] Vec slope(double x) const;

  [[nodiscard]] const std::vector<double>& xs() const { return xs_; }
  [[nodiscard]] const std::vector<Vec>& values() const { return values_; }

 private:
  std::vector<double> xs_;
  std::vector<Vec> values_;
};

/// V(x, eta) = A eta + c(x).
struct VelocityField {
  Mat A;
  SampledSignal c;

  [[nodiscard]] Vec eval(double x, const Vec& eta) const {
    return A * eta + c.value(x);
  }
};

/// Partial derivatives of L at one point. Mixed blocks are indexed
/// [P component][eta component].
struct JetDerivatives {
  double L = 0.0;
  Vec L_P;
  Vec L_eta;
  double L_x = 0.0;
  Mat L_PP;
  Mat L_Peta;
  Vec L_Px;
};

/// |P - offset|^exponent
struct PowerNormParams {
  double exponent = 2.0;
  Vec offset;
};

/// |k(x) - K eta|^2 + |P - V(x, eta)|^2
struct DataAssimilationParams {
  Mat K;
  SampledSignal k;
  VelocityField V;
};

enum class RadialProfile { kIdentity, kShifted, kPower };

/// H(t) with t = |P - V(x, eta)|^2 / 2. Profiles: t, t + beta,
/// (1 + t)^gamma - 1.
struct RadialParams {
  RadialProfile profile = RadialProfile::kIdentity;
  double beta = 0.0;
  double gamma = 1.0;
  VelocityField V;
};

using LagrangianFn = std::function<double(double, const Vec&, const Vec&)>;
using JetFn = std::function<JetDerivatives(double, const Vec&, const Vec&)>;

/// User-supplied Lagrangian. A jet function is optional; without one all
/// derivatives come from finite differences.
struct CustomParams {
  std::string name;
  LagrangianFn value;
  JetFn jet;
};

/// C1 |P|^q - C2 <= L <= h(x, eta) |P|^r + C3
struct GrowthParams {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double q = 1.0;
  double r = 1.0;
  std::function<double(double, const Vec&)> h_bound;

  static GrowthParams with_constant_h(double C1, double C2, double C3,
                                      double q, double r, double h);
  /// Throws kInvalidArgument unless 0 < q <= r and C1, C2, C3 >= 0.
  void validate() const;
};

enum class ModelKind { kPowerNorm, kDataAssimilation, kRadial, kCustom };

class LagrangianModel {
 public:
  static LagrangianModel power_norm(double exponent, Vec offset);
  static LagrangianModel data_assimilation(DataAssimilationParams params);
  static LagrangianModel radial(RadialParams params);
  static LagrangianModel custom(CustomParams params, int dim);
  /// min_j |P - wells_j|: a tabulated non-level-convex example.
  static LagrangianModel min_of_norms(std::vector<Vec> wells);

  [[nodiscard]] ModelKind kind() const { return kind_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] bool analytic_first() const { return analytic_first_; }
  [[nodiscard]] bool analytic_second() const { return analytic_second_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  /// L(x, eta, P); throws kNegativeLagrangian / kNonFinite.
  [[nodiscard]] double eval(double x, const Vec& eta, const Vec& P) const;

  /// Analytic jet where available, finite differences otherwise.
  [[nodiscard]] JetDerivatives jet(double x, const Vec& eta,
                                   const Vec& P) const;

  /// Jet by central finite differences, regardless of analytic formulas.
  [[nodiscard]] JetDerivatives fd_jet(double x, const Vec& eta,
                                      const Vec& P) const;

  /// Cheaper variant used by the energy kernels: L, L_P and L_eta only.
  void first_order(double x, const Vec& eta, const Vec& P, double& L,
                   Vec& L_P, Vec& L_eta) const;

 private:
  LagrangianModel() = default;

  [[nodiscard]] double raw_eval(double x, const Vec& eta, const Vec& P) const;
  [[nodiscard]] JetDerivatives analytic_jet(double x, const Vec& eta,
                                            const Vec& P) const;

  ModelKind kind_ = ModelKind::kPowerNorm;
  int dim_ = 0;
  bool analytic_first_ = false;
  bool analytic_second_ = false;
  std::string name_;
  std::variant<PowerNormParams, DataAssimilationParams, RadialParams,
               CustomParams>
      params_;
};

/// Sampling box, applied per coordinate.
struct SampleBox {
  double x_lo = 0.0, x_hi = 1.0;
  double eta_lo = -1.0, eta_hi = 1.0;
  double P_lo = -1.0, P_hi = 1.0;
};

struct SamplePlan {
  int num_triples = 1000;
  SampleBox box;
  int t_levels = 5;  // convex-combination weights per pair
  std::uint64_t seed = 0;
};

struct LevelConvexityWitness {
  double x = 0.0;
  Vec eta;
  Vec P1;
  Vec P2;
  double lambda = 0.0;
  double value_at_combination = 0.0;
  double max_at_ends = 0.0;
};

struct LevelConvexityResult {
  bool pass = true;
  std::vector<LevelConvexityWitness> witnesses;
};

double level_convexity_tolerance(double scale);

/// Sampling test of sublevel-set convexity in P. Passing is evidence only.
LevelConvexityResult check_level_convexity(const LagrangianModel& model,
                                           const SamplePlan& plan,
                                           Exec exec = Exec::kParallel);

/// Exact level-convexity test for one (x, eta, P1, P2, lambda).
std::optional<LevelConvexityWitness> level_convexity_violation(
    const LagrangianModel& model, double x, const Vec& eta, const Vec& P1,
    const Vec& P2, double lambda);

struct GrowthWitness {
  double x = 0.0;
  Vec eta;
  Vec P;
  double value = 0.0;
  bool lower_side = true;  // which inequality failed
  double margin = 0.0;
};

struct GrowthResult {
  bool pass = true;
  double lower_margin = 0.0;  // min of L - (C1 |P|^q - C2)
  double upper_margin = 0.0;  // min of h |P|^r + C3 - L
  std::vector<GrowthWitness> witnesses;
};

GrowthResult check_growth_bounds(const LagrangianModel& model,
                                 const GrowthParams& growth,
                                 const SamplePlan& plan);

}  // namespace supmin
