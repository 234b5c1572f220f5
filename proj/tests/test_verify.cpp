#include "spiralmin/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spiralmin;

namespace {

SpiralProduct circle_product(double C1 = -1.0, double mult = 1.5, int joints = 2) {
  const C2Min cm = c2_min(1, 1, C1);
  ProfileCurve curve = integrate_profile(ProfileParams{1, 1, C1, mult * cm.c2min},
                                         cm.s_star, 0.0, 0.0, joints);
  return build(legendrian_circle(), legendrian_circle(), std::move(curve));
}

}  // namespace

TEST(TakahashiResidual, ConstantProductOfCircles) {
  const ImmersionSpec prod = constant_product({real_equator(1), real_equator(1)});
  const VerificationReport rep =
      takahashi_residual(prod, prod.name, 2.0, {.per_dim = 8}, {}, 1e-5);
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.residual_max, 1e-5);
  EXPECT_GE(rep.residual_max, rep.residual_mean);
  EXPECT_GE(rep.residual_mean, 0.0);
  EXPECT_NEAR(rep.eigen_estimate, 2.0, 1e-4);
}

TEST(TakahashiResidual, SpiralProductOfCircles) {
  const SpiralProduct prod = circle_product();
  const VerificationReport rep =
      takahashi_residual(prod, "spiral", 3.0, {.per_dim = 6}, {}, 1e-4);
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.residual_max, 1e-4);
  EXPECT_NEAR(rep.eigen_estimate, 3.0, 1e-3);
}

TEST(TakahashiResidual, WrongEigenvalueFails) {
  const SpiralProduct prod = circle_product();
  const VerificationReport rep =
      takahashi_residual(prod, "spiral", 2.5, {.per_dim = 4}, {}, 1e-4);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.residual_max, 0.1);
}

TEST(TakahashiResidual, SecondOrderInTheStep) {
  const SpiralProduct prod = circle_product();
  GridSpec grid;
  grid.per_dim = 4;
  const double r1 =
      takahashi_residual(prod, "h", 3.0, grid, {.step = 1e-3}, 1e-3).residual_max;
  const double r2 =
      takahashi_residual(prod, "h/2", 3.0, grid, {.step = 5e-4}, 1e-3).residual_max;
  const double ratio = r1 / r2;
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(SplitLaplacian, AgreesWithDirectComputation) {
  const SpiralProduct prod = circle_product();
  for (const auto& p : halton_points(prod.box(), 10, 0.1)) {
    const SplitCheck chk = split_laplacian_check(prod, p);
    EXPECT_LT(chk.diff, 1e-5);
  }
}

TEST(SplitLaplacian, SteadyBranchAtTurningPoint) {
  // at a joint a' = b' = 0, exercising the steady branch of the split form
  const SpiralProduct prod = circle_product(-1.0, 1.5, 2);
  const double tj = prod.curve->joints.front();
  const Vec pt{tj, 1.2, 2.1};
  const ArcState st = arc_state(gamma_eval(*prod.curve, tj).s,
                                prod.curve->params, 1);
  EXPECT_LT(std::abs(st.a_prime), 1e-6);
  const SplitCheck chk = split_laplacian_check(prod, pt);
  EXPECT_LT(chk.diff, 1e-5);
}

TEST(SplitLaplacian, SensitiveToWrongInputEigenvalue) {
  const SpiralProduct prod = circle_product();
  const Vec pt{0.4 * prod.curve->t_end(), 1.0, 2.0};
  const SplitCheck chk = split_laplacian_check(prod, pt, {}, true, 2.0);
  EXPECT_GT(chk.diff, 1e-2);
}

TEST(IdentitySuite, AcceptanceMatrix) {
  for (auto [k1, k2, C1] : {std::tuple{1.0, 1.0, 1.0},
                            {1.0, 1.0, -1.0},
                            {2.0, 3.0, -1.0},
                            {1.0, 2.0, 0.0}}) {
    ProfileParams p{k1, k2, C1, 0.0};
    p.C2 = 1.5 * c2_min(k1, k2, C1).c2min;
    const IdentityReport rep = identity_suite(p, identity_grid(p, 1000));
    for (const auto& [name, res] : rep.residuals)
      EXPECT_LT(res, 1e-8) << name << " at (" << k1 << "," << k2 << "," << C1
                           << ")";
    // X = II + III within 1e-10 on every sample
    for (const auto& t : rep.samples)
      EXPECT_NEAR(t.X, t.II + t.III, 1e-10);
  }
}

TEST(IdentitySuite, WiderParameterMatrix) {
  // C1 in {-1, 0, 1, 2} x C2 in {1.05, 1.5, 10} * c2min, positive real dims
  for (double C1 : {-1.0, 0.0, 1.0, 2.0}) {
    for (double mult : {1.05, 1.5, 10.0}) {
      ProfileParams p{1.3, 2.2, C1, 0.0};
      p.C2 = mult * c2_min(p.k1, p.k2, C1).c2min;
      const IdentityReport rep = identity_suite(p, identity_grid(p, 200));
      for (const auto& [name, res] : rep.residuals)
        EXPECT_LT(res, 1e-8) << name << " C1=" << C1 << " mult=" << mult;
    }
  }
}

TEST(IdentitySuite, RePartHitsTheCoefficientSum) {
  ProfileParams p{1, 1, 1, 32};
  const IdentityReport rep = identity_suite(p, identity_grid(p, 100));
  for (const auto& t : rep.samples) EXPECT_NEAR(t.re_part, -3.0, 1e-9);
}

TEST(IdentitySuite, RejectsPointsOutsideJ) {
  ProfileParams p{1, 1, 1, 32};
  EXPECT_THROW(identity_suite(p, {0.1}), OutsideDomain);
}

TEST(SteadyCheck, SymmetricCase) {
  const SteadyReport rep = steady_check(1, 1, -1);
  EXPECT_NEAR(rep.s, M_PI / 4, 1e-10);
  EXPECT_NEAR(rep.C2, 16.0, 1e-9);
  EXPECT_NEAR(rep.s1p_sq, 1.0, 1e-9);
  EXPECT_TRUE(rep.pass);
}

TEST(SteadyCheck, GenericAngle) {
  const SteadyReport rep = steady_check_at_angle(1, 1, 0.8);
  EXPECT_NEAR(rep.C1, 1.1241548312048066, 1e-10);  // frozen direct evaluation
  EXPECT_NEAR(rep.s1p_sq, -std::tan(0.8) * std::tan(0.8) + 2.0, 1e-9);
  EXPECT_NEAR(rep.re_part, -3.0, 1e-9);
  EXPECT_TRUE(rep.pass);

  // and the forward direction recovers the same angle from that C1
  const SteadyReport fwd = steady_check(1, 1, rep.C1);
  EXPECT_NEAR(fwd.s, 0.8, 1e-9);
}

TEST(SteadyCheck, UnrealizableAngle) {
  EXPECT_THROW(steady_check_at_angle(1, 1, M_PI / 3), NoSteadyAngle);
}

TEST(EigenEstimate, MatchesDimensionPlusOneAcrossC1) {
  for (double C1 : {-1.0, 1.0}) {
    const SpiralProduct prod = circle_product(C1, 1.5);
    const VerificationReport rep =
        takahashi_residual(prod, "m", 3.0, {.per_dim = 5}, {}, 1e-3);
    EXPECT_NEAR(rep.eigen_estimate, 3.0, 1e-3) << "C1=" << C1;
  }
}
