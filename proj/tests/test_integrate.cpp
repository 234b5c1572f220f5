#include "spiralmin/integrate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"

using namespace spiralmin;

namespace {

ProfileCurve standard_curve(int joints = 2) {
  const C2Min cm = c2_min(1, 1, -1);
  const ProfileParams p{1, 1, -1, 1.5 * cm.c2min};
  return integrate_profile(p, cm.s_star, 0.0, 0.0, joints);
}

}  // namespace

TEST(IntegrateProfile, SamplesStayInsideDomainAndIncrease) {
  const ProfileCurve c = integrate_profile(ProfileParams{1, 1, 1, 32},
                                           M_PI / 4, 0.0, 0.0, 3);
  double prev = -1.0;
  for (const auto& ps : c.samples) {
    EXPECT_GT(ps.t_arc, prev);
    prev = ps.t_arc;
    const double clamped = std::clamp(ps.s, c.domain.s_lo, c.domain.s_hi);
    EXPECT_EQ(ps.s, clamped);  // max |s - clamp| = 0
  }
  EXPECT_EQ(c.joints.size(), 3u);
}

TEST(IntegrateProfile, BranchSignFlipsExactlyAtJoints) {
  const ProfileCurve c = standard_curve(4);
  std::size_t flips = 0;
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    if (c.samples[i].branch_sign != c.samples[i + 1].branch_sign) ++flips;
  }
  EXPECT_EQ(flips, 4u);
  for (double tj : c.joints) {
    // the joint is a stored sample and the flip happens there
    bool found = false;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
      if (c.samples[i].t_arc == tj) {
        found = true;
        EXPECT_EQ(c.samples[i].branch_sign, -c.samples[i - 1].branch_sign);
      }
    EXPECT_TRUE(found);
  }
}

TEST(IntegrateProfile, FirstIntegralConservedAlongCurve) {
  const ProfileCurve c = standard_curve(2);
  const ProfileParams& p = c.params;
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = c.t_end() * i / 400.0;
    const ArcState st = arc_state(c.eval_state(t).s, p, 1);
    worst = std::max(worst, std::abs(st.b * st.b * st.s2_prime -
                                     p.C1 * st.a * st.a * st.s1_prime));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(IntegrateProfile, ArcLengthMatchesQuadratureOracle) {
  // independent adaptive-Simpson quadrature of sqrt(1+Theta) ds on the
  // joint-free first branch, compared against the integrator's t_arc
  const ProfileCurve c = standard_curve(1);
  const ProfileParams p = c.params;
  const double s0 = c.samples.front().s;
  double worst_t = 0.0, worst_s1 = 0.0, worst_s2 = 0.0;
  for (const auto& ps : c.samples) {
    if (ps.t_arc >= c.joints.front()) break;
    if (ps.s <= s0) continue;
    const double t_oracle = oracles::integrate(
        [&](double s) { return std::sqrt(1.0 + theta(s, p)); }, s0, ps.s);
    worst_t = std::max(worst_t, std::abs(t_oracle - ps.t_arc));
    const double s1_oracle = oracles::integrate(
        [&](double s) { return std::tan(s) / std::sqrt(denom(s, p)); }, s0, ps.s);
    worst_s1 = std::max(worst_s1, std::abs(s1_oracle - ps.s1));
    const double s2_oracle = oracles::integrate(
        [&](double s) { return p.C1 / std::tan(s) / std::sqrt(denom(s, p)); },
        s0, ps.s);
    worst_s2 = std::max(worst_s2, std::abs(s2_oracle - ps.s2));
  }
  EXPECT_LT(worst_t, 1e-8);
  EXPECT_LT(worst_s1, 1e-8);
  EXPECT_LT(worst_s2, 1e-8);
}

TEST(GammaEval, SphereAndUnitSpeed) {
  const ProfileCurve c = standard_curve(2);
  for (int i = 0; i <= 100; ++i) {
    const double t = c.t_end() * (0.005 + 0.99 * i / 100.0);
    const GammaJet j = gamma_eval(c, t);
    EXPECT_NEAR(std::norm(j.g1) + std::norm(j.g2), 1.0, 1e-12);
    EXPECT_NEAR(std::norm(j.g1p) + std::norm(j.g2p), 1.0, 1e-9);
  }
}

TEST(GammaEval, DenseOutputMatchesFiniteDifferences) {
  const ProfileCurve c = standard_curve(2);
  // the dense output carries a ~1e-14 quadrature wobble, so the second
  // difference needs a larger step than the first to stay above that floor
  const double dt = 1e-5, dt2 = 1e-4;
  double worst_p = 0.0, worst_pp = 0.0;
  for (int i = 1; i < 40; ++i) {
    const double t = c.t_end() * i / 40.0;
    if (t < 2 * dt2 || t > c.t_end() - 2 * dt2) continue;
    const GammaJet j0 = gamma_eval(c, t);
    {
      const GammaJet jm = gamma_eval(c, t - dt);
      const GammaJet jp = gamma_eval(c, t + dt);
      const auto fd1 = (jp.g1 - jm.g1) / (2.0 * dt);
      const auto fd2 = (jp.g2 - jm.g2) / (2.0 * dt);
      worst_p = std::max({worst_p, std::abs(fd1 - j0.g1p), std::abs(fd2 - j0.g2p)});
    }
    {
      const GammaJet jm = gamma_eval(c, t - dt2);
      const GammaJet jp = gamma_eval(c, t + dt2);
      const auto sd1 = (jp.g1 - 2.0 * j0.g1 + jm.g1) / (dt2 * dt2);
      const auto sd2 = (jp.g2 - 2.0 * j0.g2 + jm.g2) / (dt2 * dt2);
      worst_pp =
          std::max({worst_pp, std::abs(sd1 - j0.g1pp), std::abs(sd2 - j0.g2pp)});
    }
  }
  EXPECT_LT(worst_p, 1e-7);
  EXPECT_LT(worst_pp, 1e-4);
}

TEST(GammaEval, ArcRelationsForAandB) {
  // a' = -b/sqrt(1+Theta), b' = a/sqrt(1+Theta) on the + branch
  const ProfileCurve c = standard_curve(0);
  for (int i = 1; i < 30; ++i) {
    const double t = c.t_end() * i / 31.0;
    const GammaJet j = gamma_eval(c, t);
    const double sq = std::sqrt(1.0 + theta(j.s, c.params));
    const double ap = std::real(j.g1p * std::polar(1.0, -j.s1));
    const double bp = std::real(j.g2p * std::polar(1.0, -j.s2));
    EXPECT_NEAR(ap, -j.b / sq, 1e-9);
    EXPECT_NEAR(bp, j.a / sq, 1e-9);
  }
}

TEST(GammaEval, JointsAreC1) {
  const ProfileCurve c = standard_curve(4);
  EXPECT_EQ(c.joints.size(), 4u);
  const double eps = 1e-8;
  for (double tj : c.joints) {
    const GammaJet at = gamma_eval(c, tj);
    const ArcState sat = arc_state(at.s, c.params, 1);
    // |denom| <= 1e-12 at the located root bounds |s'| by 1e-6/sqrt(N)
    EXPECT_LT(std::abs(sat.s_prime), 1e-6);

    const GammaJet before = gamma_eval(c, tj - eps);
    const GammaJet after = gamma_eval(c, tj + eps);
    const ArcState sb = arc_state(before.s, c.params, before.branch_sign);
    const ArcState sa = arc_state(after.s, c.params, after.branch_sign);
    EXPECT_LT(std::abs(sb.s_prime - sa.s_prime), 1e-6);
    EXPECT_LT(std::abs(sb.s1_prime - sa.s1_prime), 1e-6);
    EXPECT_LT(std::abs(sb.s2_prime - sa.s2_prime), 1e-6);
    // gamma' itself is continuous through the turn
    EXPECT_LT(std::abs(before.g1p - after.g1p), 1e-6);
    EXPECT_LT(std::abs(before.g2p - after.g2p), 1e-6);
  }
}

TEST(IntegrateProfile, ShortSpanWithoutJoints) {
  const ProfileCurve c = standard_curve(0);
  EXPECT_TRUE(c.joints.empty());
  // ends exactly at the first turning point
  EXPECT_EQ(c.samples.back().s, c.domain.s_hi);
  const GammaJet j = gamma_eval(c, c.t_end());
  EXPECT_NEAR(std::norm(j.g1) + std::norm(j.g2), 1.0, 1e-12);
}

TEST(IntegrateProfile, DenseOutputPinsSamples) {
  const ProfileCurve c = standard_curve(3);
  for (const auto& ps : c.samples) {
    const ProfileCurve::State st = c.eval_state(ps.t_arc);
    EXPECT_NEAR(st.s, ps.s, 1e-13);
    EXPECT_NEAR(st.s1, ps.s1, 1e-13);
    EXPECT_NEAR(st.s2, ps.s2, 1e-13);
  }
}

TEST(IntegrateProfile, SteadyLimitShrinksToTheCriticalAngle) {
  const C2Min cm = c2_min(1, 1, -1);
  double prev_width = 1e9;
  for (int j = 1; j <= 6; ++j) {
    const double C2 = cm.c2min * (1.0 + std::pow(0.25, j));
    const DomainJ dom = find_domain(ProfileParams{1, 1, -1, C2});
    EXPECT_LT(dom.width(), prev_width);
    prev_width = dom.width();
    EXPECT_LE(std::abs(dom.mid() - cm.s_star), 0.5 * dom.width());
  }
}

TEST(IntegrateProfile, ErrorPaths) {
  EXPECT_THROW(integrate_profile(ProfileParams{1, 1, 1, 8}, 0.7, 0, 0, 1),
               EmptyDomain);
  EXPECT_THROW(integrate_profile(ProfileParams{1, 1, 1, 32}, 0.2, 0, 0, 1),
               OutsideDomain);
  const ProfileCurve c = standard_curve(1);
  EXPECT_THROW(gamma_eval(c, c.t_end() + 1.0), OutOfSpan);
  EXPECT_THROW(gamma_eval(c, -0.5), OutOfSpan);
}
