#include "supmin/lagrangian.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "supmin/error.hpp"
#include "test_support.hpp"

namespace supmin {
namespace {

using testing::line_signal;
using testing::rel_err;
using testing::vec;

DataAssimilationParams zero_da(int n) {
  DataAssimilationParams p;
  p.K = Mat::Zero(1, n);
  p.k = SampledSignal::constant(Vec::Zero(1));
  p.V.A = Mat::Zero(n, n);
  p.V.c = SampledSignal::constant(Vec::Zero(n));
  return p;
}

TEST(LagrangianEval, PowerNormSquared) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  EXPECT_EQ(L.eval(0.3, vec({7, -1}), vec({3, 4})), 25.0);
}

TEST(LagrangianEval, DataAssimilationWithZeroFieldsIsSquaredNorm) {
  const auto L = LagrangianModel::data_assimilation(zero_da(2));
  EXPECT_EQ(L.eval(0.0, vec({0.4, 0.1}), vec({1, 0})), 1.0);
}

TEST(LagrangianEval, DataAssimilationObservationTerm) {
  DataAssimilationParams p = zero_da(1);
  p.K = Mat::Identity(1, 1);
  p.k = line_signal(vec({0}), vec({1}));  // k(x) = x
  const auto L = LagrangianModel::data_assimilation(std::move(p));
  const double obs = 0.5 - 0.2;
  EXPECT_NEAR(L.eval(0.5, vec({0.2}), vec({1})), obs * obs + 1.0, 1e-15);
  EXPECT_NEAR(L.eval(0.5, vec({0.2}), vec({1})), 1.09, 1e-15);
}

TEST(LagrangianEval, DataAssimilationSplitsIntoTwoSquaredTerms) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    DataAssimilationParams p;
    p.K = Mat::Random(2, 3);
    p.k = line_signal(rng.vector(2, -1, 1), rng.vector(2, -1, 1));
    p.V.A = Mat::Random(3, 3);
    p.V.c = line_signal(rng.vector(3, -1, 1), rng.vector(3, -1, 1));
    const Mat K = p.K, A = p.V.A;
    const SampledSignal k = p.k, c = p.V.c;
    const auto L = LagrangianModel::data_assimilation(std::move(p));
    const double x = rng.uniform(0, 1);
    const Vec eta = rng.vector(3, -2, 2), P = rng.vector(3, -2, 2);
    const double first = (k.value(x) - K * eta).squaredNorm();
    const double second = (P - A * eta - c.value(x)).squaredNorm();
    EXPECT_NEAR(L.eval(x, eta, P), first + second,
                4 * std::numeric_limits<double>::epsilon() * (first + second));
  }
}

TEST(LagrangianEval, CustomNegativeValueIsAHardError) {
  CustomParams p;
  p.value = [](double, const Vec&, const Vec& P) { return P[0]; };
  const auto L = LagrangianModel::custom(std::move(p), 1);
  EXPECT_EQ(L.eval(0, vec({0}), vec({2})), 2.0);
  try {
    (void)L.eval(0, vec({0}), vec({-1}));
    FAIL() << "expected NegativeLagrangian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNegativeLagrangian);
  }
}

TEST(LagrangianEval, NonFiniteValueIsAnError) {
  CustomParams p;
  p.value = [](double, const Vec&, const Vec&) { return std::nan(""); };
  const auto L = LagrangianModel::custom(std::move(p), 1);
  try {
    (void)L.eval(0, vec({0}), vec({0}));
    FAIL() << "expected NonFinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonFinite);
  }
}

TEST(LagrangianEval, NonnegativeOnRandomSamples) {
  Rng rng(17);
  std::vector<LagrangianModel> models{
      LagrangianModel::power_norm(0.5, rng.vector(2, -1, 1)),
      LagrangianModel::power_norm(3.0, rng.vector(2, -1, 1)),
      testing::random_data_assimilation(rng, 2, 1),
      testing::random_radial(rng, 2, RadialProfile::kIdentity),
      testing::random_radial(rng, 2, RadialProfile::kShifted),
      testing::random_radial(rng, 2, RadialProfile::kPower),
  };
  for (const auto& L : models) {
    for (int i = 0; i < 500; ++i) {
      EXPECT_GE(L.eval(rng.uniform(0, 1), rng.vector(2, -10, 10), rng.vector(2, -10, 10)), 0.0);
    }
  }
}

TEST(LagrangianJet, PowerNormGradientAndHessian) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  const auto j = L.jet(0.0, Vec::Zero(2), vec({1, 2}));
  EXPECT_EQ(j.L_P, vec({2, 4}));
  EXPECT_EQ(j.L_PP, Mat(2.0 * Mat::Identity(2, 2)));
  EXPECT_EQ(j.L_eta, Vec::Zero(2));
  EXPECT_EQ(j.L_x, 0.0);
}

TEST(LagrangianJet, DataAssimilationMinimumOfMotionTerm) {
  DataAssimilationParams p = zero_da(2);
  const Vec V = vec({0.7, -1.3});
  p.V.c = SampledSignal::constant(V);
  const auto L = LagrangianModel::data_assimilation(std::move(p));
  const auto j = L.jet(0.2, vec({1, 1}), V);
  EXPECT_EQ(j.L, 0.0);
  EXPECT_EQ(j.L_P, Vec::Zero(2));
}

TEST(LagrangianJet, FiniteDifferencesMatchAnalyticPowerNorm) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(3));
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(0, 1);
    const Vec eta = rng.vector(3, -10, 10), P = rng.vector(3, -10, 10);
    const auto an = L.jet(x, eta, P);
    const auto fd = L.fd_jet(x, eta, P);
    worst = std::max({worst, rel_err(fd.L_P, an.L_P), rel_err(fd.L_PP, an.L_PP),
                      rel_err(fd.L_eta, an.L_eta), rel_err(fd.L_Peta, an.L_Peta),
                      rel_err(fd.L_Px, an.L_Px)});
  }
  EXPECT_LT(worst, 1e-6);
}

// Analytic jets of every built-in model agree with finite differences.
TEST(LagrangianJet, FiniteDifferenceConsistencyAcrossModels) {
  Rng rng(202);
  std::vector<LagrangianModel> models{
      LagrangianModel::power_norm(2.0, rng.vector(2, -1, 1)),
      LagrangianModel::power_norm(3.0, rng.vector(2, -1, 1)),
      LagrangianModel::power_norm(4.0, rng.vector(3, -1, 1)),
      testing::random_data_assimilation(rng, 2, 1),
      testing::random_data_assimilation(rng, 3, 2),
      testing::random_radial(rng, 2, RadialProfile::kIdentity),
      testing::random_radial(rng, 2, RadialProfile::kShifted),
      testing::random_radial(rng, 3, RadialProfile::kPower),
  };
  for (const auto& L : models) {
    const int n = L.dim();
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(0.1, 0.9);
      const Vec eta = rng.vector(n, -10, 10), P = rng.vector(n, -10, 10);
      const auto an = L.jet(x, eta, P);
      const auto fd = L.fd_jet(x, eta, P);
      const double scale = std::max(1.0, an.L);
      worst = std::max({worst, std::abs(fd.L - an.L) / scale,
                        rel_err(fd.L_P, an.L_P), rel_err(fd.L_eta, an.L_eta),
                        rel_err(Vec::Constant(1, fd.L_x), Vec::Constant(1, an.L_x)),
                        rel_err(fd.L_PP, an.L_PP), rel_err(fd.L_Peta, an.L_Peta),
                        rel_err(fd.L_Px, an.L_Px)});
    }
    EXPECT_LT(worst, 1e-5) << L.name();
  }
}

TEST(LagrangianJet, FiniteDifferenceHessianIsSymmetric) {
  const auto L = LagrangianModel::min_of_norms({vec({2, 0}), vec({-2, 1})});
  const auto j = L.jet(0.0, Vec::Zero(2), vec({0.3, 0.7}));
  EXPECT_EQ(j.L_PP, Mat(j.L_PP.transpose()));
  EXPECT_FALSE(L.analytic_second());
}

TEST(LagrangianJet, CustomJetFunctionIsUsedWhenSupplied) {
  CustomParams p;
  p.value = [](double, const Vec&, const Vec& P) { return 0.5 * P.squaredNorm(); };
  p.jet = [](double, const Vec&, const Vec& P) {
    JetDerivatives j;
    j.L = 0.5 * P.squaredNorm();
    j.L_P = P;
    j.L_eta = Vec::Zero(P.size());
    j.L_PP = Mat::Identity(P.size(), P.size());
    j.L_Peta = Mat::Zero(P.size(), P.size());
    j.L_Px = Vec::Zero(P.size());
    return j;
  };
  const auto L = LagrangianModel::custom(std::move(p), 2);
  EXPECT_TRUE(L.analytic_second());
  EXPECT_EQ(L.jet(0, Vec::Zero(2), vec({1, 2})).L_P, vec({1, 2}));
}

// ---------------------------------------------------------------------------
// Level convexity

SamplePlan plan(double p_lo, double p_hi, int triples = 300, int levels = 5) {
  SamplePlan s;
  s.num_triples = triples;
  s.t_levels = levels;
  s.box.P_lo = p_lo;
  s.box.P_hi = p_hi;
  s.box.eta_lo = -2;
  s.box.eta_hi = 2;
  s.seed = 42;
  return s;
}

TEST(LevelConvexity, ConvexModelsPass) {
  Rng rng(3);
  EXPECT_TRUE(check_level_convexity(LagrangianModel::power_norm(2.0, Vec::Zero(2)),
                                    plan(-5, 5)).pass);
  EXPECT_TRUE(check_level_convexity(LagrangianModel::power_norm(0.5, vec({1, 0})),
                                    plan(-5, 5)).pass);
  EXPECT_TRUE(check_level_convexity(testing::random_data_assimilation(rng, 2, 1),
                                    plan(-5, 5)).pass);
  EXPECT_TRUE(check_level_convexity(testing::random_radial(rng, 3, RadialProfile::kPower),
                                    plan(-5, 5)).pass);
}

TEST(LevelConvexity, MinOfTwoNormsWitnessAtTheMidpoint) {
  const auto L = LagrangianModel::min_of_norms({vec({2}), vec({-2})});
  const auto w = level_convexity_violation(L, 0.0, vec({0}), vec({-2}), vec({2}), 0.5);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->value_at_combination, 2.0);
  EXPECT_EQ(w->max_at_ends, 0.0);
}

// Brute-force scan of (P1, P2, lambda) on a 1D grid: the witness region is
// nonempty, and the sampler reports only genuine violations.
TEST(LevelConvexity, BruteForceScanAgreesWithSampler) {
  auto L_direct = [](double P) { return std::min(std::abs(P - 2), std::abs(P + 2)); };
  int brute_witnesses = 0;
  for (int a = 0; a <= 24; ++a) {
    for (int b = 0; b <= 24; ++b) {
      for (int l = 1; l < 10; ++l) {
        const double p1 = -3 + 0.25 * a, p2 = -3 + 0.25 * b, lam = 0.1 * l;
        const double mid = L_direct(lam * p1 + (1 - lam) * p2);
        if (mid > std::max(L_direct(p1), L_direct(p2)) + 1e-9) ++brute_witnesses;
      }
    }
  }
  EXPECT_GT(brute_witnesses, 0);

  const auto L = LagrangianModel::min_of_norms({vec({2}), vec({-2})});
  const auto result = check_level_convexity(L, plan(-3, 3, 400, 5));
  EXPECT_FALSE(result.pass);
  ASSERT_FALSE(result.witnesses.empty());
  for (const auto& w : result.witnesses) {
    const double mid = L_direct(w.lambda * w.P1[0] + (1 - w.lambda) * w.P2[0]);
    const double top = std::max(L_direct(w.P1[0]), L_direct(w.P2[0]));
    EXPECT_GT(mid, top + level_convexity_tolerance(top));
  }
}

TEST(LevelConvexity, SerialAndParallelAgree) {
  const auto L = LagrangianModel::min_of_norms({vec({2, 0}), vec({-2, 0})});
  const auto a = check_level_convexity(L, plan(-3, 3), Exec::kSerial);
  const auto b = check_level_convexity(L, plan(-3, 3), Exec::kParallel);
  ASSERT_EQ(a.witnesses.size(), b.witnesses.size());
  for (std::size_t i = 0; i < a.witnesses.size(); ++i) {
    EXPECT_EQ(a.witnesses[i].P1, b.witnesses[i].P1);
    EXPECT_EQ(a.witnesses[i].lambda, b.witnesses[i].lambda);
  }
}

// ---------------------------------------------------------------------------
// Growth bounds

TEST(GrowthBounds, EqualityCaseHasZeroMargins) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  const auto g = GrowthParams::with_constant_h(1, 0, 0, 2, 2, 1);
  const auto r = check_growth_bounds(L, g, plan(-4, 4));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.lower_margin, 0.0, 1e-12);
  EXPECT_NEAR(r.upper_margin, 0.0, 1e-12);
}

TEST(GrowthBounds, FalseLowerBoundProducesWitnesses) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(2));
  const auto g = GrowthParams::with_constant_h(2, 0, 0, 2, 2, 1);
  const auto r = check_growth_bounds(L, g, plan(-4, 4));
  EXPECT_FALSE(r.pass);
  for (const auto& w : r.witnesses) {
    EXPECT_TRUE(w.lower_side);
    EXPECT_NEAR(w.margin, -w.P.squaredNorm(), 1e-9 * (1 + w.P.squaredNorm()));
  }
}

// |P - V|^2 >= |P|^2 / 2 - |V|^2 and |P - V|^2 <= 2|P|^2 + 2|V|^2.
TEST(GrowthBounds, DataAssimilationConstantsFromTheParallelogramBound) {
  DataAssimilationParams p = zero_da(2);
  const Vec V = vec({1.5, -0.5});
  p.V.c = SampledSignal::constant(V);
  const auto L = LagrangianModel::data_assimilation(std::move(p));
  const double v2 = V.squaredNorm();
  const auto g = GrowthParams::with_constant_h(0.5, v2, 2 * v2, 2, 2, 2);
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const Vec P = rng.vector(2, -20, 20);
    const double val = (P - V).squaredNorm();
    ASSERT_GE(val, 0.5 * P.squaredNorm() - v2 - 1e-12 * (1 + val));
    ASSERT_LE(val, 2 * P.squaredNorm() + 2 * v2 + 1e-12 * (1 + val));
  }
  EXPECT_TRUE(check_growth_bounds(L, g, plan(-20, 20, 2000)).pass);
}

TEST(GrowthBounds, InvalidExponentsRejected) {
  const auto L = LagrangianModel::power_norm(2.0, Vec::Zero(1));
  const auto g = GrowthParams::with_constant_h(1, 0, 0, 3, 2, 1);
  try {
    (void)check_growth_bounds(L, g, plan(-1, 1));
    FAIL() << "q > r must be rejected";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(SampledSignal, InterpolatesAndHoldsEnds) {
  const SampledSignal s({0.0, 1.0, 3.0}, {vec({0}), vec({2}), vec({0})});
  EXPECT_EQ(s.value(0.5)[0], 1.0);
  EXPECT_EQ(s.value(2.0)[0], 1.0);
  EXPECT_EQ(s.value(-1.0)[0], 0.0);
  EXPECT_EQ(s.value(5.0)[0], 0.0);
  EXPECT_EQ(s.slope(1.0)[0], 2.0);  // left segment at an interior sample
  EXPECT_EQ(s.slope(2.0)[0], -1.0);
  EXPECT_THROW(SampledSignal({1.0, 1.0}, {vec({0}), vec({1})}), Error);
}

}  // namespace
}  // namespace supmin
