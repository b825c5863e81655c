#include "supmin/aronsson.hpp"

#include <algorithm>
#include <fstream>

#include "supmin/error.hpp"
#include "supmin/format.hpp"
#include "supmin/parallel.hpp"

namespace supmin {

Mat normal_projection(const Vec& xi, double tol_rel) {
  const auto n = xi.size();
  const double len = xi.norm();
  Mat Q = Mat::Identity(n, n);
  if (len <= tol_rel * (1.0 + len)) return Q;
  const Vec dir = xi / len;
  Q.noalias() -= dir * dir.transpose();
  return Q;
}

Vec f_infinity(const JetDerivatives& jet, const Vec& P, const Vec& X) {
  const Mat perp = normal_projection(jet.L_P);
  const Mat principal =
      jet.L_P * jet.L_P.transpose() + jet.L * perp * jet.L_PP;
  Vec out = principal * X;
  out += (jet.L_eta.dot(P) + jet.L_x) * jet.L_P;
  out += jet.L * perp * (jet.L_Peta * P + jet.L_Px - jet.L_eta);
  if (!out.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "Aronsson operator is not finite");
  }
  return out;
}

Vec f_infinity(const LagrangianModel& model, const SecondOrderPoint& pt) {
  return f_infinity(model.jet(pt.x, pt.eta, pt.P), pt.P, pt.X);
}

ResidualProfile residual_profile(const LagrangianModel& model,
                                 const Path& path, Exec exec) {
  const auto& g = path.grid();
  if (!g.is_uniform()) {
    throw Error(ErrorKind::kNonUniformGrid, "residual profile needs a uniform grid");
  }
  if (g.elements() < 4) {
    throw Error(ErrorKind::kInvalidArgument, "residual profile needs M >= 4");
  }
  const double h = g.length() / g.elements();
  const auto& v = path.values();
  ResidualProfile profile;
  profile.entries.resize(static_cast<std::size_t>(g.num_nodes() - 2));
  parallel_for(static_cast<long>(profile.entries.size()),
               exec == Exec::kParallel, [&](long k) {
                 const long i = k + 1;
                 SecondOrderPoint pt;
                 pt.x = g.node(static_cast<int>(i));
                 pt.eta = v.row(i).transpose();
                 pt.P = (v.row(i + 1) - v.row(i - 1)).transpose() / (2.0 * h);
                 pt.X = (v.row(i + 1) - 2.0 * v.row(i) + v.row(i - 1)).transpose() /
                        (h * h);
                 auto& entry = profile.entries[static_cast<std::size_t>(k)];
                 entry.x = pt.x;
                 entry.residual = f_infinity(model, pt);
                 entry.norm = entry.residual.norm();
               });
  for (const auto& e : profile.entries) {
    profile.max_norm = std::max(profile.max_norm, e.norm);
  }
  return profile;
}

void write_residual_csv(std::ostream& out, const ResidualProfile& profile,
                        int dim) {
  out << "x";
  for (int k = 1; k <= dim; ++k) out << ",res_" << k;
  out << ",norm\n";
  for (const auto& e : profile.entries) {
    out << format_double(e.x);
    for (int k = 0; k < dim; ++k) out << ',' << format_double(e.residual[k]);
    out << ',' << format_double(e.norm) << '\n';
  }
}

void write_residual_csv(const std::string& filename,
                        const ResidualProfile& profile, int dim) {
  std::ofstream out(filename);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + filename);
  write_residual_csv(out, profile, dim);
}

}  // namespace supmin
