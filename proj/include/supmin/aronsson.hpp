#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"

namespace supmin {

/// (x, u(x), u'(x), u''(x))
struct SecondOrderPoint {
  double x = 0.0;
  Vec eta;
  Vec P;
  Vec X;
};

inline constexpr double kDefaultSgnTolerance = 1e-12;

/// I - sgn(xi) sgn(xi)^T, with sgn(0) = 0 so that tiny xi (|xi| below
/// tol_rel * (1 + |xi|)) yields the identity.
Mat normal_projection(const Vec& xi, double tol_rel = kDefaultSgnTolerance);

/// Vectorial Aronsson operator assembled from a precomputed jet:
///   [L_P (x) L_P + L [L_P]^perp L_PP] X + (L_eta . P + L_x) L_P
///     + L [L_P]^perp (L_Peta P + L_Px - L_eta)
Vec f_infinity(const JetDerivatives& jet, const Vec& P, const Vec& X);

Vec f_infinity(const LagrangianModel& model, const SecondOrderPoint& pt);

struct ResidualEntry {
  double x = 0.0;
  Vec residual;
  double norm = 0.0;
};

struct ResidualProfile {
  std::vector<ResidualEntry> entries;  // interior nodes, ascending
  double max_norm = 0.0;
};

/// Residual at every interior node, with P the central slope and X the
/// second difference. Requires a uniform grid with at least 4 elements.
ResidualProfile residual_profile(const LagrangianModel& model,
                                 const Path& path,
                                 Exec exec = Exec::kParallel);

/// CSV with header x,res_1,...,res_N,norm.
void write_residual_csv(std::ostream& out, const ResidualProfile& profile,
                        int dim);
void write_residual_csv(const std::string& filename,
                        const ResidualProfile& profile, int dim);

}  // namespace supmin
