#pragma once

// Closed forms for the profile curve gamma = (a e^{i s1}, b e^{i s2}) in S^3
// with a = cos s, b = sin s on the domain J where the denominator
//
//   D(s) = C2 cos^{2k1+2}s sin^{2k2+2}s - (1 + (C1^2 - 1) cos^2 s)
//
// is positive, and
//
//   Theta(s) = N(s)/D(s),   N(s) = sin^2 s + C1^2 cos^2 s,
//   1 + Theta = C2 cos^{2k1+2}s sin^{2k2+2}s / D.
//
// Overdots are d/ds, primes are d/dt_arc throughout. N is evaluated in the
// cancellation-free form sin^2 s + C1^2 cos^2 s.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "spiralmin/core.hpp"

namespace spiralmin {

struct ProfileParams {
  double k1 = 1.0;  // positive reals; geometric use needs integers
  double k2 = 1.0;
  double C1 = -1.0;
  double C2 = 0.0;

  void require_valid() const {
    if (!(k1 > 0.0) || !(k2 > 0.0)) throw Error("profile: k1, k2 must be positive");
    if (!(C2 > 0.0)) throw Error("profile: C2 must be positive");
  }
};

// a^{2k1+2} b^{2k2+2}
inline double trig_weight(double s, const ProfileParams& p) {
  return std::pow(std::cos(s), 2.0 * p.k1 + 2.0) *
         std::pow(std::sin(s), 2.0 * p.k2 + 2.0);
}

// N = b^2 + C1^2 a^2
inline double theta_numerator(double s, const ProfileParams& p) {
  const double a = std::cos(s), b = std::sin(s);
  return b * b + p.C1 * p.C1 * a * a;
}

inline double denom(double s, const ProfileParams& p) {
  return p.C2 * trig_weight(s, p) - theta_numerator(s, p);
}

inline double theta(double s, const ProfileParams& p) {
  const double d = denom(s, p);
  if (!(d > 0.0)) throw OutsideDomain("theta: denominator not positive");
  return theta_numerator(s, p) / d;
}

// d/ds of N, weight and D
inline double dtheta_numerator(double s, const ProfileParams& p) {
  return -(p.C1 * p.C1 - 1.0) * std::sin(2.0 * s);
}

inline double dlog_trig_weight(double s, const ProfileParams& p) {
  return -(2.0 * p.k1 + 2.0) * std::tan(s) + (2.0 * p.k2 + 2.0) / std::tan(s);
}

inline double ddenom(double s, const ProfileParams& p) {
  return p.C2 * trig_weight(s, p) * dlog_trig_weight(s, p) -
         dtheta_numerator(s, p);
}

inline double ddenom2(double s, const ProfileParams& p) {
  const double m = dlog_trig_weight(s, p);
  const double a = std::cos(s), b = std::sin(s);
  const double dm = -(2.0 * p.k1 + 2.0) / (a * a) - (2.0 * p.k2 + 2.0) / (b * b);
  const double n2 = -2.0 * (p.C1 * p.C1 - 1.0) * std::cos(2.0 * s);
  return p.C2 * trig_weight(s, p) * (m * m + dm) - n2;
}

// ---------------------------------------------------------------------------
// C2 threshold: minimum of N/weight over (0, pi/2)
// ---------------------------------------------------------------------------

struct C2Min {
  double c2min = 0.0;
  double s_star = 0.0;
};

namespace detail {

inline double c2_objective(double s, const ProfileParams& p) {
  return theta_numerator(s, p) / trig_weight(s, p);
}

// d/ds log(N/weight); its zero at the bracketed minimum is refined by bisection
inline double c2_objective_dlog(double s, const ProfileParams& p) {
  return dtheta_numerator(s, p) / theta_numerator(s, p) - dlog_trig_weight(s, p);
}

}  // namespace detail

// Minimizes N/weight by grid bracketing + golden-section, then bisection on
// the log-derivative to 1e-12 in s.
inline C2Min c2_min(double k1, double k2, double C1) {
  ProfileParams p{k1, k2, C1, 1.0};
  p.require_valid();

  constexpr int kGrid = 4096;
  double best = 0.0, best_val = 0.0;
  for (int i = 1; i < kGrid; ++i) {
    const double s = (M_PI / 2.0) * i / kGrid;
    const double v = detail::c2_objective(s, p);
    if (i == 1 || v < best_val) {
      best_val = v;
      best = s;
    }
  }
  double lo = std::max(best - M_PI / 2.0 / kGrid, 1e-9);
  double hi = std::min(best + M_PI / 2.0 / kGrid, M_PI / 2.0 - 1e-9);

  // golden-section
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = detail::c2_objective(c, p), fd = detail::c2_objective(d, p);
  while (hi - lo > 1e-10) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = detail::c2_objective(c, p);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = detail::c2_objective(d, p);
    }
  }

  // derivative bisection refinement
  double a = std::max(0.5 * (lo + hi) - 1e-6, 1e-9);
  double b = std::min(0.5 * (lo + hi) + 1e-6, M_PI / 2.0 - 1e-9);
  if (detail::c2_objective_dlog(a, p) < 0.0 && detail::c2_objective_dlog(b, p) > 0.0) {
    while (b - a > 1e-13) {
      const double m = 0.5 * (a + b);
      (detail::c2_objective_dlog(m, p) < 0.0 ? a : b) = m;
    }
  } else {
    a = b = 0.5 * (lo + hi);
  }
  const double s_star = 0.5 * (a + b);
  return {detail::c2_objective(s_star, p), s_star};
}

// ---------------------------------------------------------------------------
// domain J
// ---------------------------------------------------------------------------

enum class EndpointKind { denominator_root, open_boundary };

struct DomainJ {
  double s_lo = 0.0;
  double s_hi = 0.0;
  EndpointKind lo_kind = EndpointKind::denominator_root;
  EndpointKind hi_kind = EndpointKind::denominator_root;
  // additional sign-change pairs detected outside the returned component;
  // reported rather than silently discarded
  std::vector<std::pair<double, double>> extra_components;

  double width() const { return s_hi - s_lo; }
  double mid() const { return 0.5 * (s_lo + s_hi); }
  bool contains(double s) const { return s > s_lo && s < s_hi; }
};

// Largest connected open interval with denom > 0 containing the best of the
// grid maximizer of denom and c2_min's s_star (the latter catches slivers a
// grid cannot see). Endpoints located by bisection until |denom| <= 1e-12
// and the bracket is below 1e-12.
inline DomainJ find_domain(const ProfileParams& p) {
  p.require_valid();
  constexpr int kGrid = 4096;
  const double step = (M_PI / 2.0) / kGrid;

  double seed = 0.0, seed_val = -1.0;
  for (int i = 1; i < kGrid; ++i) {
    const double s = step * i;
    const double v = denom(s, p);
    if (v > seed_val) {
      seed_val = v;
      seed = s;
    }
  }
  const C2Min cm = c2_min(p.k1, p.k2, p.C1);
  if (denom(cm.s_star, p) > seed_val) {
    seed_val = denom(cm.s_star, p);
    seed = cm.s_star;
  }
  if (!(seed_val > 0.0))
    throw EmptyDomain("find_domain: denominator not positive anywhere (C2 <= C2_min)");

  auto bisect_root = [&](double inside, double outside) {
    // denom(inside) > 0 >= denom(outside); bisects to full double precision
    // and returns the positive-side bound, so |denom| at a stored endpoint is
    // down at the evaluation-noise floor and rates stay finite there
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (inside + outside);
      if (m == inside || m == outside) break;
      if (denom(m, p) > 0.0)
        inside = m;
      else
        outside = m;
    }
    return inside;
  };

  // expand from the seed to the nearest non-positive points
  double out_lo = seed, out_hi = seed;
  double w = std::max(step, 1e-7);
  while (out_lo > 0.0 && denom(out_lo, p) > 0.0) out_lo = std::max(out_lo - w, 1e-15);
  while (out_hi < M_PI / 2.0 && denom(out_hi, p) > 0.0)
    out_hi = std::min(out_hi + w, M_PI / 2.0 - 1e-15);

  DomainJ dom;
  if (denom(out_lo, p) > 0.0) {
    dom.s_lo = out_lo;  // positive all the way to the chart edge (defensive)
    dom.lo_kind = EndpointKind::open_boundary;
  } else {
    dom.s_lo = bisect_root(seed, out_lo);
  }
  if (denom(out_hi, p) > 0.0) {
    dom.s_hi = out_hi;
    dom.hi_kind = EndpointKind::open_boundary;
  } else {
    dom.s_hi = bisect_root(seed, out_hi);
  }

  // report any other positive components visible on the grid
  bool in_comp = false;
  double comp_start = 0.0;
  for (int i = 1; i <= kGrid; ++i) {
    const double s = step * i;
    const bool pos = s < M_PI / 2.0 && denom(s, p) > 0.0;
    if (pos && !in_comp) {
      in_comp = true;
      comp_start = s;
    } else if (!pos && in_comp) {
      in_comp = false;
      if (comp_start > dom.s_hi || s - step < dom.s_lo)
        dom.extra_components.emplace_back(comp_start, s - step);
    }
  }
  return dom;
}

// ---------------------------------------------------------------------------
// steady magnitudes
// ---------------------------------------------------------------------------

// C1^2 - 1 as a function of the steady angle:
//   [-(2k1+2) tan s + (2k2+2) cot s] / [2k1 tan s - (2k2+2) cot s] / cos^2 s
inline double steady_c1sq_minus_1(double s, double k1, double k2) {
  if (!(s > 0.0 && s < M_PI / 2.0))
    throw OutsideDomain("steady_c1sq_minus_1: s outside (0, pi/2)");
  const double t = std::tan(s), c = 1.0 / t;
  const double den = 2.0 * k1 * t - (2.0 * k2 + 2.0) * c;
  if (std::abs(den) < 1e-12)
    throw SingularDenominator("steady_c1sq_minus_1: tan^2 s = (k2+1)/k1");
  const double num = -(2.0 * k1 + 2.0) * t + (2.0 * k2 + 2.0) * c;
  const double a = std::cos(s);
  return num / den / (a * a);
}

// ---------------------------------------------------------------------------
// branch derivatives and the full arc-length jet
// ---------------------------------------------------------------------------

struct BranchDerivs {
  double ds1_ds = 0.0;
  double ds2_ds = 0.0;
  double dt_ds = 0.0;  // sqrt(1 + Theta), always positive
};

// (ds1/ds, ds2/ds) = sign (tan s, C1 cot s)/sqrt(D); dt/ds = sqrt(1+Theta).
inline BranchDerivs branch_derivatives(double s, const ProfileParams& p, int sign) {
  const double d = denom(s, p);
  if (!(d > 0.0)) throw OutsideDomain("branch_derivatives: denominator not positive");
  const double inv_sq = static_cast<double>(sign) / std::sqrt(d);
  BranchDerivs out;
  out.ds1_ds = std::tan(s) * inv_sq;
  out.ds2_ds = p.C1 / std::tan(s) * inv_sq;
  out.dt_ds = std::sqrt(p.C2 * trig_weight(s, p) / d);
  return out;
}

// Everything the identity suite and gamma jets need at one (s, sign), all
// from closed forms (no finite differences). Primes are d/dt_arc.
struct ArcState {
  double s = 0.0;
  int sign = 1;
  double a = 0.0, b = 0.0;
  double weight = 0.0, num = 0.0, den = 0.0;  // p, N, D
  double theta = 0.0;
  double s_prime = 0.0;                 // ds/dt = sign sqrt(D/(C2 p))
  double s1_prime = 0.0, s2_prime = 0.0;
  double a_prime = 0.0, b_prime = 0.0;
  double s1_pprime = 0.0, s2_pprime = 0.0;
  double a_pprime = 0.0, b_pprime = 0.0;
};

// Tolerates d = 0 (turning points): s' and a', b' vanish there and theta is
// reported as +inf; genuinely negative denominators still throw.
inline ArcState arc_state(double s, const ProfileParams& p, int sign = 1) {
  double d = denom(s, p);
  ArcState st;
  st.s = s;
  st.sign = sign;
  st.a = std::cos(s);
  st.b = std::sin(s);
  st.weight = trig_weight(s, p);
  st.num = theta_numerator(s, p);
  const double c2w = p.C2 * st.weight;  // C2 p = (1+Theta) D
  if (d <= 0.0) {
    if (d > -1e-10 * std::max(1.0, c2w))
      d = 0.0;
    else
      throw OutsideDomain("arc_state: denominator negative");
  }
  st.den = d;
  st.theta = (d > 0.0) ? st.num / d : std::numeric_limits<double>::infinity();

  const double sqc2 = std::sqrt(p.C2);
  st.s_prime = sign * std::sqrt(d / c2w);
  st.s1_prime = 1.0 / (sqc2 * std::pow(st.a, p.k1 + 2.0) * std::pow(st.b, p.k2));
  st.s2_prime = p.C1 / (sqc2 * std::pow(st.a, p.k1) * std::pow(st.b, p.k2 + 2.0));
  st.a_prime = -st.b * st.s_prime;
  st.b_prime = st.a * st.s_prime;

  // s1'' = -s1' [(k1+2) a'/a + k2 b'/b], likewise for s2''
  st.s1_pprime = -st.s1_prime *
                 ((p.k1 + 2.0) * st.a_prime / st.a + p.k2 * st.b_prime / st.b);
  st.s2_pprime = -st.s2_prime *
                 (p.k1 * st.a_prime / st.a + (p.k2 + 2.0) * st.b_prime / st.b);

  // a''/a = -1/(1+Theta) + b ThetaDot / (2 a (1+Theta)^2) with the D^2
  // factors cancelled analytically: ThetaDot/(1+Theta)^2 = (N'D - ND')/(C2 p)^2
  const double nd = dtheta_numerator(s, p);
  const double dd = ddenom(s, p);
  const double cancel = (nd * d - st.num * dd) / (c2w * c2w);
  const double inv1pT = d / c2w;
  st.a_pprime = st.a * (-inv1pT) + 0.5 * st.b * cancel;
  st.b_pprime = st.b * (-inv1pT) - 0.5 * st.a * cancel;
  return st;
}

}  // namespace spiralmin
