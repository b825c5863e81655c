#include "supmin/audit.hpp"

#include <gtest/gtest.h>

#include "supmin/error.hpp"
#include "test_support.hpp"

namespace supmin {
namespace {

using testing::vec;

// Flat on [0, 1/2], slope 2 on [1/2, 1].
Path kinked_path(int M) {
  const Grid g = Grid::uniform(0, 1, M);
  NodeMatrix v(M + 1, 1);
  for (int i = 0; i <= M; ++i) v(i, 0) = std::max(0.0, 2 * g.node(i) - 1);
  return Path(g, v);
}

AuditConfig fast_config(std::uint64_t seed = 3) {
  AuditConfig c;
  c.seed = seed;
  c.schedule.m_max = 64;
  return c;
}

TEST(AuditConfig, Validation) {
  AuditConfig c;
  EXPECT_NO_THROW(c.validate());
  c.num_subintervals = 0;
  EXPECT_THROW(c.validate(), Error);
  c = AuditConfig{};
  c.tol_audit = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = AuditConfig{};
  c.min_elements = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(SampleSubintervals, SeededAndLongEnough) {
  const Grid g = Grid::uniform(0, 1, 40);
  const auto a = sample_subintervals(g, fast_config(11));
  const auto b = sample_subintervals(g, fast_config(11));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 20u);
  for (auto [i, j] : a) {
    EXPECT_GE(i, 0);
    EXPECT_LE(j, 40);
    EXPECT_GE(j - i, 3);
  }
  EXPECT_NE(a, sample_subintervals(g, fast_config(12)));
  EXPECT_THROW(sample_subintervals(Grid::uniform(0, 1, 2), fast_config()), Error);
}

TEST(Audit, AffineCandidateHasNoViolations) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  const Path p = interpolate_affine({vec({0, 1}), vec({1, -2})}, Grid::uniform(0, 1, 32));
  const auto r = audit_absolute_minimality(L, p, fast_config());
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.inconclusive, 0u);
  EXPECT_EQ(r.entries.size(), 20u);
  for (const auto& e : r.entries) {
    EXPECT_LE(e.deficit, 1e-12);
    EXPECT_EQ(e.deficit, e.sup_global_restricted - e.sup_local_solution);
  }
}

// Jensen's bound is attained by the chord for |P - V0|^s on every subinterval.
TEST(Audit, SoundOnExactOptimaForAnyExponent) {
  for (double s : {0.5, 1.0, 3.0}) {
    const auto L = LagrangianModel::power_norm(s, vec({0.4, -0.1}));
    const Path p = interpolate_affine({vec({0, 0}), vec({-1, 2})}, Grid::uniform(0, 1, 24));
    const auto r = audit_absolute_minimality(L, p, fast_config(static_cast<std::uint64_t>(s * 10)));
    EXPECT_TRUE(r.violations.empty()) << s;
  }
}

TEST(Audit, KinkedCandidateDeficitsMatchClosedForm) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const int M = 16;
  const Path p = kinked_path(M);
  AuditConfig cfg = fast_config(5);
  cfg.num_subintervals = 40;
  const auto r = audit_absolute_minimality(L, p, cfg);
  std::size_t spanning = 0;
  for (const auto& e : r.entries) {
    const double alpha = e.alpha, beta = e.beta;
    const double chord = (std::max(0.0, 2 * beta - 1) - std::max(0.0, 2 * alpha - 1)) / (beta - alpha);
    const double restricted = beta > 0.5 ? 4.0 : 0.0;
    EXPECT_NEAR(e.deficit, restricted - chord * chord, 1e-6);
    if (alpha < 0.5 && beta > 0.5) {
      ++spanning;
      EXPECT_TRUE(e.violation);
    } else {
      EXPECT_FALSE(e.violation);
    }
  }
  EXPECT_GT(spanning, 0u);
  EXPECT_EQ(r.violations.size(), spanning);
}

TEST(Audit, SerialAndParallelReportsMatch) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const Path p = kinked_path(16);
  const auto a = audit_absolute_minimality(L, p, fast_config(), Exec::kSerial);
  const auto b = audit_absolute_minimality(L, p, fast_config(), Exec::kParallel);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].deficit, b.entries[i].deficit);
  }
  EXPECT_EQ(a.violations, b.violations);
}

TEST(PerturbationAudit, AffineSurvivesAndIsSeeded) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  const Path p = interpolate_affine({vec({0, 0}), vec({1, 1})}, Grid::uniform(0, 1, 20));
  const auto a = perturbation_audit(L, p, fast_config(), 8);
  const auto b = perturbation_audit(L, p, fast_config(), 8);
  EXPECT_TRUE(a.violations.empty());
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].sup_local_solution, b.entries[i].sup_local_solution);
    EXPECT_GE(a.entries[i].sup_local_solution, a.entries[i].sup_global_restricted - 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Comparison map

TEST(BuildComparison, AffineGluedToItselfIsUnchanged) {
  const Path psi = interpolate_affine({vec({1, 0}), vec({-2, 3})}, Grid::uniform(0, 1, 30));
  const auto c = build_comparison(psi.node_value(0), psi.node_value(30), psi, 0.2);
  EXPECT_LT((c.path.values() - psi.values()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildComparison, ThreeBranchFormula) {
  Rng rng(8);
  const Path psi = testing::random_path(rng, 30, 2);
  const Vec ul = vec({5, -5}), ur = vec({-1, 2});
  const auto c = build_comparison(ul, ur, psi, 0.25);
  const double d = 7.0 / 30.0;  // snapped down to the grid
  EXPECT_NEAR(c.delta_left, d, 1e-15);
  EXPECT_NEAR(c.delta_right, d, 1e-14);
  EXPECT_EQ(c.left_node, 7);
  EXPECT_EQ(c.right_node, 23);
  EXPECT_EQ(c.path.node_value(0), ul);
  EXPECT_EQ(c.path.node_value(30), ur);
  for (int i = 7; i <= 23; ++i) EXPECT_EQ(c.path.node_value(i), psi.node_value(i)) << i;
  const Vec left_slope = (psi.node_value(7) - ul) / c.delta_left;
  const Vec right_slope = (ur - psi.node_value(23)) / c.delta_right;
  for (int e = 0; e < 7; ++e) EXPECT_LT((c.path.element_slope(e) - left_slope).norm(), 1e-12);
  for (int e = 23; e < 30; ++e) EXPECT_LT((c.path.element_slope(e) - right_slope).norm(), 1e-12);
}

TEST(BuildComparison, Errors) {
  const Path psi = interpolate_affine({vec({0}), vec({1})}, Grid::uniform(0, 1, 10));
  auto kind_of = [&](double delta) {
    try {
      (void)build_comparison(vec({0}), vec({1}), psi, delta);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  EXPECT_EQ(kind_of(0.0), ErrorKind::kBadDelta);
  EXPECT_EQ(kind_of(-0.1), ErrorKind::kBadDelta);
  EXPECT_EQ(kind_of(0.34), ErrorKind::kBadDelta);
  EXPECT_EQ(kind_of(0.05), ErrorKind::kGridTooCoarse);
}

// Slopes of the glued maps move by at most (2 / delta) ||u_m - u_inf||.
TEST(BuildComparison, StableUnderBoundaryPerturbation) {
  Rng rng(9);
  const Path psi = testing::random_path(rng, 40, 2);
  const double delta = 0.2;
  const auto limit = build_comparison(psi.node_value(0), psi.node_value(40), psi, delta);
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    Path um = psi;
    for (int i = 0; i <= 40; ++i) um.mutable_values().row(i) += rng.vector(2, -eps, eps).transpose();
    const double dist = (um.values() - psi.values()).rowwise().norm().maxCoeff();
    const auto glued = build_comparison(um.node_value(0), um.node_value(40), psi, delta);
    double slope_dev = 0.0;
    for (int e = 0; e < 40; ++e) {
      slope_dev = std::max(slope_dev, (glued.path.element_slope(e) - limit.path.element_slope(e)).norm());
    }
    EXPECT_LE(slope_dev, 2.0 / glued.delta_left * dist * (1 + 1e-12));
    EXPECT_LE((glued.path.values() - limit.path.values()).rowwise().norm().maxCoeff(), dist + 1e-15);
  }
}

TEST(BuildComparison, MaxSplittingBound) {
  Rng rng(10);
  const auto L = testing::random_radial(rng, 2, RadialProfile::kShifted);
  for (int trial = 0; trial < 100; ++trial) {
    const Path psi = testing::random_path(rng, 24, 2);
    const auto c = build_comparison(rng.vector(2, -1, 1), rng.vector(2, -1, 1), psi,
                                    rng.uniform(0.05, 0.33));
    const auto& g = psi.grid();
    const double left = sup_energy(L, c.path, {g.a(), g.node(c.left_node)});
    const double right = sup_energy(L, c.path, {g.node(c.right_node), g.b()});
    const double whole = sup_energy(L, c.path, {g.a(), g.b()});
    const double mid = sup_energy(L, psi, {g.a(), g.b()});
    EXPECT_LE(whole, std::max({left, mid, right}) * (1 + 1e-14));
  }
}

// ---------------------------------------------------------------------------
// Semicontinuity

TEST(Semicontinuity, ConstantSequencePasses) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const Path p = interpolate_affine({vec({0}), vec({1})}, Grid::uniform(0, 1, 8));
  const auto r = semicontinuity_check(L, {{2, p}, {4, p}, {8, p}, {16, p}}, p, {0, 1});
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.lhs, 1.0, 1e-15);
  for (double v : r.rhs) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Semicontinuity, WrongLimitIsFlagged) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const Grid g = Grid::uniform(0, 1, 8);
  const Path limit = interpolate_affine({vec({0}), vec({1})}, g);
  const Path shallow = interpolate_affine({vec({0}), vec({0.5})}, g);
  const auto r = semicontinuity_check(L, {{2, shallow}, {4, shallow}, {8, shallow}}, limit, {0, 1});
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.lhs, 1.0, 1e-15);
  EXPECT_NEAR(r.liminf_estimate, 0.25, 1e-14);
}

TEST(Semicontinuity, TailMinimumAndErrors) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const Grid g = Grid::uniform(0, 1, 8);
  auto slope = [&](double s) { return interpolate_affine({vec({0}), vec({s})}, g); };
  const auto r = semicontinuity_check(L, {{1, slope(0.1)}, {2, slope(2)}, {4, slope(1.5)}, {8, slope(1.2)}},
                                      slope(1), {0, 1});
  EXPECT_NEAR(r.liminf_estimate, 1.44, 1e-12);
  try {
    (void)semicontinuity_check(L, {{1, slope(1)}, {2, slope(1)}}, slope(1), {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTooFewEntries);
  }
}

// ---------------------------------------------------------------------------
// Endpoint quotient scan

TEST(QuotientScan, DefaultSchedule) {
  const auto d = default_delta_schedule(2.0);
  ASSERT_EQ(d.size(), 8u);
  EXPECT_EQ(d[0], 0.3);
  EXPECT_EQ(d[7], 0.6 / 256);
}

TEST(QuotientScan, AffineIsTight) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  const Vec v = vec({1.5, -0.5});
  const Path psi = interpolate_affine({vec({0, 0}), v}, Grid::uniform(0, 1, 1024));
  const auto s = endpoint_quotient_scan(L, psi, default_delta_schedule(1.0));
  ASSERT_EQ(s.left.size(), 8u);
  for (const auto* side : {&s.left, &s.right}) {
    for (const auto& e : *side) {
      EXPECT_LT((e.quotient - v).norm(), 1e-12);
      EXPECT_NEAR(e.layer_sup, v.squaredNorm(), 1e-12);
    }
  }
  EXPECT_NEAR(s.global_sup, v.squaredNorm(), 1e-12);
  EXPECT_TRUE(s.bound_holds);
  EXPECT_TRUE(s.left_cauchy);
  EXPECT_TRUE(s.right_cauchy);
}

TEST(QuotientScan, KinkedPathLimitsAndLayerConsistency) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const Path psi = kinked_path(1024);
  const auto sched = default_delta_schedule(1.0);
  const auto s = endpoint_quotient_scan(L, psi, sched);
  // Every delta lies inside one flat (left) or steep (right) piece.
  for (const auto& e : s.left) {
    EXPECT_EQ(e.quotient[0], 0.0);
    EXPECT_EQ(e.layer_sup, 0.0);
  }
  for (const auto& e : s.right) {
    EXPECT_NEAR(e.quotient[0], 2.0, 1e-12);
    EXPECT_NEAR(e.layer_sup, 4.0, 1e-11);
  }
  EXPECT_TRUE(s.bound_holds);
  for (std::size_t k = 1; k < s.right.size(); ++k) {
    EXPECT_LT(s.right[k].boundary_deviation, s.right[k - 1].boundary_deviation);
  }
  // Layer sup equals the sup energy of the glued path on the layer.
  const Vec start = psi.node_value(0), end = psi.node_value(1024);
  for (std::size_t k = 0; k < sched.size(); ++k) {
    const auto c = build_comparison(start, end, psi, sched[k]);
    EXPECT_NEAR(s.left[k].layer_sup, sup_energy(L, c.path, {0.0, psi.grid().node(c.left_node)}), 1e-12);
    EXPECT_NEAR(s.right[k].layer_sup, sup_energy(L, c.path, {psi.grid().node(c.right_node), 1.0}), 1e-11);
  }
}

TEST(QuotientScan, QuotientsConvergeToEndSlopes) {
  // Slope 1 on [0, 1/4], slope -1 on [1/4, 1/2], slope 3 on [1/2, 1].
  const int M = 512;
  const Grid g = Grid::uniform(0, 1, M);
  NodeMatrix v(M + 1, 1);
  for (int i = 0; i <= M; ++i) {
    const double x = g.node(i);
    v(i, 0) = x <= 0.25 ? x : x <= 0.5 ? 0.5 - x : 3 * (x - 0.5);
  }
  const Path psi(g, v);
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const auto s = endpoint_quotient_scan(L, psi, {0.3, 0.15, 0.075, 0.0375, 0.01875});
  EXPECT_NEAR(s.left_quotient_limit[0], 1.0, 1e-12);
  EXPECT_NEAR(s.right_quotient_limit[0], 3.0, 1e-12);
  EXPECT_NEAR(s.left.front().quotient[0], (psi.value_at(s.left.front().delta)[0]) / s.left.front().delta, 1e-12);
  EXPECT_LE(std::max(s.left_sup_limit, s.right_sup_limit), s.global_sup);
  EXPECT_THROW(endpoint_quotient_scan(L, psi, {0.1, 0.2}), Error);
}

}  // namespace
}  // namespace supmin
