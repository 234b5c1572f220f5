#pragma once

// Global assembly of the profile curve: adaptive Dormand-Prince 5(4)
// integration of the autonomous system in arc length,
//
//   ds/dt  = sign * sqrt(D / (C2 p)),
//   ds1/dt = 1 / (sqrt(C2) a^{k1+2} b^{k2}),
//   ds2/dt = C1 / (sqrt(C2) a^{k1} b^{k2+2}),
//
// with branch turns at the roots of D. The vector field is non-Lipschitz in
// s at a root but the flow is smooth in t_arc and symmetric about the
// turning time, so each joint is crossed by reflection: the time and phase
// increments from the switch point to the root come from sqrt-substituted
// Gauss-Legendre quadrature (v = sqrt|s - s*| makes the integrands smooth)
// and the outgoing state is the mirror of the incoming one with the branch
// sign flipped.
//
// Dense output between stored samples re-solves s(t) from the arc-length
// quadrature (safeguarded Newton, v-substituted near roots) with a linear
// endpoint blend that pins both anchors exactly; s1, s2 come from the
// companion quadratures. ProfileCurve is immutable after integrate_profile
// returns and evaluation is pure.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "spiralmin/core.hpp"
#include "spiralmin/profile.hpp"

namespace spiralmin {

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int samples_per_arc = 64;   // stored samples per root-to-root arc
  double switch_frac = 0.05;  // joint-quadrature handoff radius / domain width
};

struct ProfileSample {
  double t_arc = 0.0;
  double s = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  int branch_sign = 1;  // joint samples carry the outgoing sign
};

namespace detail {

// (dt/ds, ds1/ds, ds2/ds) on the + branch
struct Rates {
  double dtds, sd1, sd2;
};

// Probes just past a root (d <= 0) return +inf rates rather than NaN so the
// safeguarded inversions can still bracket.
inline Rates rates(double s, const ProfileParams& p) {
  const double d = std::max(denom(s, p), 0.0);
  const double c2w = p.C2 * trig_weight(s, p);
  const double inv_sq = 1.0 / std::sqrt(d);
  const double t = std::tan(s);
  return {std::sqrt(c2w / d), t * inv_sq, p.C1 / t * inv_sq};
}

struct Inc {
  double t = 0.0, s1 = 0.0, s2 = 0.0;
};

// increments over s in [s_a, s_b] strictly inside J (two Gauss panels)
inline Inc seg_increment(double s_a, double s_b, const ProfileParams& p) {
  Inc inc;
  if (!(s_b > s_a)) return inc;
  const auto& g = gauss32();
  for (int panel = 0; panel < 2; ++panel) {
    const double a = s_a + 0.5 * panel * (s_b - s_a);
    const double b = a + 0.5 * (s_b - s_a);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const Rates r = rates(c + h * g.x[i], p);
      const double w = g.w[i] * h;
      inc.t += w * r.dtds;
      inc.s1 += w * r.sd1;
      inc.s2 += w * r.sd2;
    }
  }
  return inc;
}

// increments between v = v_a and v = v_b where s = root - dir v^2
// (dir = +1 at the upper root, -1 at the lower); smooth through v = 0
inline Inc root_increment(double root, double dir, double v_a, double v_b,
                          const ProfileParams& p) {
  Inc inc;
  if (!(v_b > v_a)) return inc;
  const auto& g = gauss32();
  const double c = 0.5 * (v_a + v_b), h = 0.5 * (v_b - v_a);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double v = c + h * g.x[i];
    const Rates r = rates(root - dir * v * v, p);
    const double w = g.w[i] * h * 2.0 * v;
    inc.t += w * r.dtds;
    inc.s1 += w * r.sd1;
    inc.s2 += w * r.sd2;
  }
  return inc;
}

// d/ds of the squared speed V(s) = D/(C2 p). Evaluating it never divides by
// D, so it stays smooth and noise-free through the roots of D.
inline double potential_slope(double s, const ProfileParams& p) {
  return (ddenom(s, p) - denom(s, p) * dlog_trig_weight(s, p)) /
         (p.C2 * trig_weight(s, p));
}

// Local flow about a turning point: the trajectory satisfies the smooth
// second-order system s'' = V'(s)/2 with s(0) = root, s'(0) = 0, plus the
// phase quadratures. Fixed-step RK4 in the signed time offset tau; the map
// tau -> state is C-infinity, immune to the +-1e-15 residue of the root
// placement that degrades the sqrt-substituted quadrature at small tau.
struct FlowState {
  double s, sdot, s1, s2;
};

inline FlowState flow_from(FlowState y, double tau, const ProfileParams& p) {
  if (tau == 0.0) return y;
  const int n = std::min(512, std::max(8, static_cast<int>(
                                              std::ceil(std::abs(tau) / 3e-4))));
  const double h = tau / n;
  auto deriv = [&p](const FlowState& w) {
    const double a = std::cos(w.s), b = std::sin(w.s);
    const double sqc2 = std::sqrt(p.C2);
    return FlowState{w.sdot, 0.5 * potential_slope(w.s, p),
                     1.0 / (sqc2 * std::pow(a, p.k1 + 2.0) * std::pow(b, p.k2)),
                     p.C1 / (sqc2 * std::pow(a, p.k1) * std::pow(b, p.k2 + 2.0))};
  };
  auto axpy = [](const FlowState& w, double c, const FlowState& d) {
    return FlowState{w.s + c * d.s, w.sdot + c * d.sdot, w.s1 + c * d.s1,
                     w.s2 + c * d.s2};
  };
  for (int i = 0; i < n; ++i) {
    const FlowState k1 = deriv(y);
    const FlowState k2 = deriv(axpy(y, 0.5 * h, k1));
    const FlowState k3 = deriv(axpy(y, 0.5 * h, k2));
    const FlowState k4 = deriv(axpy(y, h, k3));
    y.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    y.sdot += h / 6.0 * (k1.sdot + 2.0 * k2.sdot + 2.0 * k3.sdot + k4.sdot);
    y.s1 += h / 6.0 * (k1.s1 + 2.0 * k2.s1 + 2.0 * k3.s1 + k4.s1);
    y.s2 += h / 6.0 * (k1.s2 + 2.0 * k2.s2 + 2.0 * k3.s2 + k4.s2);
  }
  return y;
}

inline FlowState root_flow(double root, double s1_j, double s2_j, double tau,
                           const ProfileParams& p) {
  return flow_from(FlowState{root, 0.0, s1_j, s2_j}, tau, p);
}

// f smooth and strictly increasing on [lo, hi]; safeguarded Newton with a
// maintained bracket.
template <typename F, typename Fd>
double invert_increasing(F&& f, Fd&& fd, double target, double lo, double hi,
                         double f_lo, double f_hi) {
  if (target <= f_lo) return lo;
  if (target >= f_hi) return hi;
  double u = lo + (hi - lo) * (target - f_lo) / (f_hi - f_lo);
  for (int it = 0; it < 100; ++it) {
    const double fu = f(u);
    const double err = fu - target;
    if (std::abs(err) < 1e-14 * (1.0 + std::abs(target))) return u;
    if (err > 0.0)
      hi = u;
    else
      lo = u;
    // the quadrature evaluating f wobbles by ~1e-14 and f' >= 1 here, so the
    // bracket cannot resolve u below that scale; exit just above it
    if (hi - lo < 5e-14 * (1.0 + std::abs(hi))) return 0.5 * (lo + hi);
    const double d = fd(u);
    double next = (d > 0.0) ? u - err / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  throw EventLocalizationFailure("dense-output inversion did not converge");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ProfileCurve with quadrature dense output
// ---------------------------------------------------------------------------

struct ProfileCurve {
  ProfileParams params;
  DomainJ domain;
  std::vector<ProfileSample> samples;  // uniform t spacing plus exact joints
  std::vector<double> joints;          // t_arc of each crossed joint
  // raw Runge-Kutta states at the sample times, before the quadrature
  // refinement pass; kept for solver diagnostics and oracle comparison
  std::vector<ProfileSample> integrator_samples;
  std::string interpolation =
      "arc-length quadrature inversion, per-interval anchors with linear "
      "endpoint blend";

  struct State {
    double s = 0.0, s1 = 0.0, s2 = 0.0;
    int branch_sign = 1;
  };

  struct Interval {
    enum Kind { regular, left_root, right_root } kind = regular;
    double root = 0.0;                         // the adjoining turning angle
    double e_s = 0.0, e_s1 = 0.0, e_s2 = 0.0;  // far-anchor mismatch (blended out)
  };
  std::vector<Interval> intervals;

  double t_end() const { return samples.back().t_arc; }

  State eval_state(double t) const {
    if (samples.size() < 2 || intervals.size() + 1 != samples.size())
      throw OutOfSpan("curve has no span");
    const double slack = 1e-12 * (1.0 + t_end());
    if (t < -slack || t > t_end() + slack)
      throw OutOfSpan("t_arc outside the curve span");
    t = std::min(std::max(t, 0.0), t_end());

    std::size_t lo = 0, hi = samples.size() - 1;
    while (hi - lo > 1) {
      const std::size_t m = (lo + hi) / 2;
      (samples[m].t_arc <= t ? lo : hi) = m;
    }
    const std::size_t i = lo;
    const Interval& iv = intervals[i];
    const double dt = samples[i + 1].t_arc - samples[i].t_arc;
    const double w = (dt > 0.0) ? (t - samples[i].t_arc) / dt : 0.0;

    State st = raw_state(i, t);
    const double bw = (iv.kind == Interval::right_root) ? (1.0 - w) : w;
    st.s -= bw * iv.e_s;
    st.s1 -= bw * iv.e_s1;
    st.s2 -= bw * iv.e_s2;
    st.branch_sign = samples[i].branch_sign;
    return st;
  }

  // quadrature state without the blend, anchored per interval kind
  State raw_state(std::size_t i, double t) const {
    const ProfileSample& a = samples[i];
    const ProfileSample& b = samples[i + 1];
    const Interval& iv = intervals[i];
    const int sign = a.branch_sign;
    State st;
    st.branch_sign = sign;

    if (iv.kind == Interval::regular) {
      const double tau = t - a.t_arc;
      const double u_max = std::abs(b.s - a.s) * (1.0 + 1e-9) + 1e-13;
      auto T = [&](double u) { return seg_mag(a.s, sign, u).t; };
      auto Td = [&](double u) { return detail::rates(a.s + sign * u, params).dtds; };
      const double u =
          detail::invert_increasing(T, Td, tau, 0.0, u_max, 0.0, T(u_max));
      const detail::Inc inc = seg_mag(a.s, sign, u);
      st.s = a.s + sign * u;
      st.s1 = a.s1 + inc.s1;
      st.s2 = a.s2 + inc.s2;
      return st;
    }

    const bool right = (iv.kind == Interval::right_root);
    const ProfileSample& anchor = right ? b : a;
    const double tau = t - anchor.t_arc;  // negative when approaching the joint
    const detail::FlowState fl =
        detail::root_flow(iv.root, anchor.s1, anchor.s2, tau, params);
    st.s = fl.s;
    st.s1 = fl.s1;
    st.s2 = fl.s2;
    return st;
  }

  // |increments| for s moving distance u from s_from in direction sign;
  // uses the v-substituted form near the approached root
  detail::Inc seg_mag(double s_from, int sign, double u) const {
    const double s_to = s_from + sign * u;
    const double s_a = std::min(s_from, s_to), s_b = std::max(s_from, s_to);
    const double root = (sign > 0) ? domain.s_hi : domain.s_lo;
    const double gap = std::min(std::abs(root - s_a), std::abs(root - s_b));
    if (gap < 0.05 * domain.width()) {
      const double dir = (sign > 0) ? 1.0 : -1.0;
      const double v_near = std::sqrt(std::abs(root - (sign > 0 ? s_b : s_a)));
      const double v_far = std::sqrt(std::abs(root - (sign > 0 ? s_a : s_b)));
      return detail::root_increment(root, dir, v_near, v_far, params);
    }
    return detail::seg_increment(s_a, s_b, params);
  }
};

// ---------------------------------------------------------------------------
// gamma jets: dense output + closed forms (no numerical differentiation)
// ---------------------------------------------------------------------------

struct GammaJet {
  double t = 0.0, s = 0.0, s1 = 0.0, s2 = 0.0, a = 0.0, b = 0.0;
  int branch_sign = 1;
  std::complex<double> g1, g2;      // gamma_1 = a e^{i s1}, gamma_2 = b e^{i s2}
  std::complex<double> g1p, g2p;    // d/dt_arc
  std::complex<double> g1pp, g2pp;  // d^2/dt_arc^2
};

inline GammaJet gamma_eval(const ProfileCurve& c, double t) {
  const ProfileCurve::State st = c.eval_state(t);
  const ArcState as = arc_state(st.s, c.params, st.branch_sign);
  GammaJet j;
  j.t = t;
  j.s = st.s;
  j.s1 = st.s1;
  j.s2 = st.s2;
  j.a = as.a;
  j.b = as.b;
  j.branch_sign = st.branch_sign;
  const std::complex<double> e1 = std::polar(1.0, st.s1);
  const std::complex<double> e2 = std::polar(1.0, st.s2);
  j.g1 = as.a * e1;
  j.g2 = as.b * e2;
  j.g1p = std::complex<double>(as.a_prime, as.a * as.s1_prime) * e1;
  j.g2p = std::complex<double>(as.b_prime, as.b * as.s2_prime) * e2;
  j.g1pp = std::complex<double>(
               as.a_pprime - as.a * as.s1_prime * as.s1_prime,
               2.0 * as.a_prime * as.s1_prime + as.a * as.s1_pprime) *
           e1;
  j.g2pp = std::complex<double>(
               as.b_pprime - as.b * as.s2_prime * as.s2_prime,
               2.0 * as.b_prime * as.s2_prime + as.b * as.s2_pprime) *
           e2;
  return j;
}

// ---------------------------------------------------------------------------
// the integrator
// ---------------------------------------------------------------------------

namespace detail {

// Dormand-Prince 5(4) with FSAL; stages that leave the domain reject the step.
struct Dopri5 {
  ProfileParams p;
  int sign = 1;

  bool rhs(const std::array<double, 3>& y, std::array<double, 3>& dy) const {
    const double s = y[0];
    if (!(s > 0.0 && s < M_PI / 2.0)) return false;
    const double d = denom(s, p);
    if (!(d > 0.0)) return false;
    const double a = std::cos(s), b = std::sin(s);
    const double sqc2 = std::sqrt(p.C2);
    dy[0] = sign * std::sqrt(d / (p.C2 * trig_weight(s, p)));
    dy[1] = 1.0 / (sqc2 * std::pow(a, p.k1 + 2.0) * std::pow(b, p.k2));
    dy[2] = p.C1 / (sqc2 * std::pow(a, p.k1) * std::pow(b, p.k2 + 2.0));
    return true;
  }

  struct Attempt {
    bool ok = false;        // all stages inside the domain
    bool accepted = false;  // error test passed
    double err = 0.0;
    std::array<double, 3> y_new{};
    std::array<double, 3> k_last{};  // FSAL slope at y_new
  };

  Attempt step(const std::array<double, 3>& y, const std::array<double, 3>& k1,
               double h, double rel, double abs) const {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    Attempt at;
    std::array<double, 3> k2{}, k3{}, k4{}, k5{}, k6{}, yt{};
    for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * a21 * k1[i];
    if (!rhs(yt, k2)) return at;
    for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    if (!rhs(yt, k3)) return at;
    for (int i = 0; i < 3; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    if (!rhs(yt, k4)) return at;
    for (int i = 0; i < 3; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    if (!rhs(yt, k5)) return at;
    for (int i = 0; i < 3; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    if (!rhs(yt, k6)) return at;
    for (int i = 0; i < 3; ++i)
      at.y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
    if (!rhs(at.y_new, at.k_last)) return at;
    at.ok = true;

    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * at.k_last[i]);
      const double sc =
          abs + rel * std::max(std::abs(y[i]), std::abs(at.y_new[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    at.err = err;
    at.accepted = err <= 1.0;
    return at;
  }
};

}  // namespace detail

// Integrates from s_start (strictly inside find_domain) at t_arc = 0 with
// branch sign +1, crossing n_joints turning points and ending exactly at the
// next one. Samples land on a uniform t_arc grid plus the exact joint times.
inline ProfileCurve integrate_profile(const ProfileParams& params, double s_start,
                                      double s1_0 = 0.0, double s2_0 = 0.0,
                                      int n_joints = 0, StepControl ctl = {}) {
  params.require_valid();
  if (n_joints < 0) throw Error("integrate_profile: n_joints must be >= 0");

  ProfileCurve curve;
  curve.params = params;
  curve.domain = find_domain(params);
  const DomainJ& dom = curve.domain;
  if (!dom.contains(s_start))
    throw OutsideDomain("integrate_profile: s_start not strictly inside J");
  if (dom.lo_kind != EndpointKind::denominator_root ||
      dom.hi_kind != EndpointKind::denominator_root)
    throw Error("integrate_profile: open-boundary domains are not integrable");

  const double width = dom.width();
  const double mid = dom.mid();

  // half-oscillation time (root to root) sets the sample spacing
  const double t_half =
      detail::root_increment(dom.s_lo, -1.0, 0.0, std::sqrt(mid - dom.s_lo), params).t +
      detail::root_increment(dom.s_hi, 1.0, 0.0, std::sqrt(dom.s_hi - mid), params).t;
  const double sample_dt = t_half / std::max(ctl.samples_per_arc, 4);
  const double r_switch = std::max(ctl.switch_frac * width, 1e-9);

  double t = 0.0;
  std::array<double, 3> y{s_start, s1_0, s2_0};
  int sign = 1;
  int joints_done = 0;
  std::size_t next_sample = 1;  // uniform sample times are k * sample_dt

  curve.samples.push_back({0.0, y[0], y[1], y[2], sign});

  detail::Dopri5 stepper{params, sign};
  std::array<double, 3> k1{};
  if (!stepper.rhs(y, k1))
    throw OutsideDomain("integrate_profile: s_start not strictly inside J");
  double h = std::min(sample_dt * 0.25, t_half * 0.01);

  // fill uniform samples in (t, t_limit] from the root-anchored quadrature
  // around the joint at (t_root, root) with incoming sign `sign`
  auto emit_uniform_until = [&](double t_limit, double root, double t_root,
                                double s1_root, double s2_root) {
    while (static_cast<double>(next_sample) * sample_dt <=
           t_limit + 1e-15 * (1.0 + t_limit)) {
      const double tu = static_cast<double>(next_sample) * sample_dt;
      if (std::abs(tu - t_root) < 1e-9 * (1.0 + t_root)) {
        ++next_sample;  // collides with the joint sample itself
        continue;
      }
      const detail::FlowState fl =
          detail::root_flow(root, s1_root, s2_root, tu - t_root, params);
      ProfileSample ps;
      ps.t_arc = tu;
      ps.s = fl.s;
      ps.s1 = fl.s1;
      ps.s2 = fl.s2;
      ps.branch_sign = (tu <= t_root) ? sign : -sign;
      curve.samples.push_back(ps);
      ++next_sample;
    }
  };

  int guard = 0;
  while (true) {
    if (++guard > 2000000)
      throw EventLocalizationFailure("integrate_profile: step guard tripped");

    const double root = (sign > 0) ? dom.s_hi : dom.s_lo;
    const double dir = (sign > 0) ? 1.0 : -1.0;  // interior is root - dir v^2

    if (std::abs(root - y[0]) <= r_switch) {
      // quadrature handoff and reflection about the turning point
      const double v_in = std::sqrt(std::abs(root - y[0]));
      const detail::Inc in = detail::root_increment(root, dir, 0.0, v_in, params);
      const double t_joint = t + in.t;
      const double s1_j = y[1] + in.s1;
      const double s2_j = y[2] + in.s2;

      emit_uniform_until(t_joint, root, t_joint, s1_j, s2_j);

      if (joints_done == n_joints) {
        curve.samples.push_back({t_joint, root, s1_j, s2_j, sign});
        break;  // the curve ends exactly at this turning point
      }
      curve.joints.push_back(t_joint);
      ++joints_done;
      curve.samples.push_back({t_joint, root, s1_j, s2_j, -sign});

      const double t_resume = t_joint + in.t;
      emit_uniform_until(t_resume, root, t_joint, s1_j, s2_j);

      sign = -sign;
      stepper.sign = sign;
      t = t_resume;
      y[1] = s1_j + in.s1;
      y[2] = s2_j + in.s2;
      if (!stepper.rhs(y, k1))
        throw EventLocalizationFailure("integrate_profile: restart left the domain");
      h = std::min(sample_dt * 0.25, t_half * 0.01);
      continue;
    }

    double h_try = std::min(h, t_half);
    bool hit_sample = false;
    const double t_next_sample = static_cast<double>(next_sample) * sample_dt;
    if (t + h_try >= t_next_sample - 1e-15 * (1.0 + t_next_sample)) {
      h_try = t_next_sample - t;
      hit_sample = true;
    }
    if (hit_sample && h_try < 1e-16 * (1.0 + t)) {
      curve.samples.push_back({t_next_sample, y[0], y[1], y[2], sign});
      ++next_sample;
      continue;
    }

    const auto at = stepper.step(y, k1, h_try, ctl.rel_tol, ctl.abs_tol);
    if (!at.ok) {
      h = 0.5 * h_try;
      if (h < 1e-15 * (1.0 + t))
        throw EventLocalizationFailure(
            "integrate_profile: step collapsed outside the switch radius");
      continue;
    }
    if (!at.accepted) {
      h = h_try * std::max(0.2, 0.9 * std::pow(at.err, -0.2));
      continue;
    }
    t += h_try;
    y = at.y_new;
    k1 = at.k_last;
    if (hit_sample) {
      curve.samples.push_back({t, y[0], y[1], y[2], sign});
      ++next_sample;
    }
    h = (hit_sample ? h : h_try) *
        std::min(5.0, 0.9 * std::pow(std::max(at.err, 1e-10), -0.2));
  }

  // interval metadata, then endpoint blends
  curve.intervals.assign(curve.samples.size() - 1, {});
  auto root_of = [&](const ProfileSample& ps) -> double {
    if (ps.s == dom.s_hi) return dom.s_hi;
    if (ps.s == dom.s_lo) return dom.s_lo;
    return -1.0;
  };
  for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
    auto& iv = curve.intervals[i];
    const double rb = root_of(curve.samples[i + 1]);
    const double ra = root_of(curve.samples[i]);
    if (rb >= 0.0) {
      iv.kind = ProfileCurve::Interval::right_root;
      iv.root = rb;
    } else if (ra >= 0.0) {
      iv.kind = ProfileCurve::Interval::left_root;
      iv.root = ra;
    }
  }
  // Refine the sample states through the quadrature chain. The RK states
  // carry the solver's local error, whose per-interval drift the endpoint
  // blend would otherwise smear into a derivative bias of order 1e-8; the
  // chained quadrature keeps anchors consistent to roughly 1e-13.
  curve.integrator_samples = curve.samples;
  for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
    const auto& iv = curve.intervals[i];
    const ProfileSample& a = curve.samples[i];
    ProfileSample& b = curve.samples[i + 1];
    const int sgn = a.branch_sign;
    if (iv.kind == ProfileCurve::Interval::right_root) {
      // approach the joint on the smooth second-order flow from the left
      // anchor; the phase increments land the joint state, b.s stays at root
      const double d_a = std::max(denom(a.s, params), 0.0);
      const double sdot_a =
          sgn * std::sqrt(d_a / (params.C2 * trig_weight(a.s, params)));
      const detail::FlowState fl = detail::flow_from(
          {a.s, sdot_a, a.s1, a.s2}, b.t_arc - a.t_arc, params);
      b.s1 = fl.s1;
      b.s2 = fl.s2;
    } else if (iv.kind == ProfileCurve::Interval::left_root) {
      const detail::FlowState fl = detail::root_flow(
          iv.root, a.s1, a.s2, b.t_arc - a.t_arc, params);
      b.s = fl.s;
      b.s1 = fl.s1;
      b.s2 = fl.s2;
    } else {
      const double tau = b.t_arc - a.t_arc;
      const double root_ahead = (sgn > 0) ? dom.s_hi : dom.s_lo;
      const double u_max = std::abs(root_ahead - a.s) * (1.0 - 1e-12);
      auto T = [&](double u) { return curve.seg_mag(a.s, sgn, u).t; };
      auto Td = [&](double u) { return detail::rates(a.s + sgn * u, params).dtds; };
      const double u =
          detail::invert_increasing(T, Td, tau, 0.0, u_max, 0.0, T(u_max));
      const detail::Inc inc = curve.seg_mag(a.s, sgn, u);
      b.s = a.s + sgn * u;
      b.s1 = a.s1 + inc.s1;
      b.s2 = a.s2 + inc.s2;
    }
  }

  for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
    auto& iv = curve.intervals[i];
    const bool right = (iv.kind == ProfileCurve::Interval::right_root);
    const ProfileSample& far = right ? curve.samples[i] : curve.samples[i + 1];
    const ProfileCurve::State raw = curve.raw_state(i, far.t_arc);
    iv.e_s = raw.s - far.s;
    iv.e_s1 = raw.s1 - far.s1;
    iv.e_s2 = raw.s2 - far.s2;
  }
  return curve;
}

}  // namespace spiralmin
