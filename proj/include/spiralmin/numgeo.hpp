#pragma once

// Chart-based numerical differential geometry: central-difference jets,
// pullback metrics and the coordinate Laplace-Beltrami operator
//
//   Delta_g f = (1/sqrt(g)) d_i ( sqrt(g) g^{ij} d_j f )
//
// applied to vector-valued maps from an open chart box into R^{2(n+1)}.
// The metric coefficients are differentiated numerically, which keeps the
// kernel generic over arbitrary maps; analytic metrics appear only in tests.
//
// All operations are pure given an immutable map and safe to evaluate in
// parallel across chart points.

#include <concepts>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "spiralmin/core.hpp"

namespace spiralmin {

template <typename M>
concept ChartMapLike = requires(const M& m, std::span<const double> x,
                                std::span<double> out) {
  { m.dim() } -> std::convertible_to<int>;
  { m.ambient_len() } -> std::convertible_to<int>;
  { m.box() } -> std::convertible_to<const Box&>;
  m.eval(x, out);
};

struct JetSample {
  Vec value;
  std::vector<Vec> jacobian;               // k columns
  std::vector<std::vector<Vec>> hessian;   // k x k, symmetric
  double step = 0.0;
  int order = 2;
};

struct MetricSample {
  int dim = 0;
  std::vector<double> entries;  // row-major k x k, constructed symmetric
  std::vector<double> inverse;
  double det = 0.0;

  double entry(int i, int j) const { return entries[i * dim + j]; }
  double inv(int i, int j) const { return inverse[i * dim + j]; }
};

struct FdOptions {
  double step = 1e-3;         // first/second derivatives
  double outer_factor = 1.5;  // outer step of the divergence = factor * step
  int order = 2;
};

namespace detail {

template <ChartMapLike M>
Vec eval_checked(const M& m, std::span<const double> x) {
  Vec out(static_cast<std::size_t>(m.ambient_len()));
  m.eval(x, out);
  if (!all_finite(out)) throw NonFiniteValue("map returned non-finite values");
  return out;
}

inline void require_stencil(const ChartMapLike auto& m, std::span<const double> p,
                            double excursion) {
  if (!box_contains(m.box(), p, excursion))
    throw StencilOutOfChart("finite-difference stencil leaves the chart box");
}

template <ChartMapLike M>
std::vector<Vec> jacobian_columns(const M& m, std::span<const double> p,
                                  double h, int order) {
  const int k = m.dim();
  const int n = m.ambient_len();
  Vec q(p.begin(), p.end());
  std::vector<Vec> cols(k, Vec(n));
  for (int j = 0; j < k; ++j) {
    const double pj = q[j];
    if (order == 2) {
      q[j] = pj + h;
      Vec fp = eval_checked(m, q);
      q[j] = pj - h;
      Vec fm = eval_checked(m, q);
      for (int c = 0; c < n; ++c) cols[j][c] = (fp[c] - fm[c]) / (2.0 * h);
    } else {
      q[j] = pj + 2 * h;
      Vec fp2 = eval_checked(m, q);
      q[j] = pj + h;
      Vec fp1 = eval_checked(m, q);
      q[j] = pj - h;
      Vec fm1 = eval_checked(m, q);
      q[j] = pj - 2 * h;
      Vec fm2 = eval_checked(m, q);
      for (int c = 0; c < n; ++c)
        cols[j][c] = (-fp2[c] + 8.0 * fp1[c] - 8.0 * fm1[c] + fm2[c]) / (12.0 * h);
    }
    q[j] = pj;
  }
  return cols;
}

inline MetricSample metric_from_jacobian(const std::vector<Vec>& cols) {
  MetricSample g;
  g.dim = static_cast<int>(cols.size());
  const int k = g.dim;
  g.entries.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = dot(cols[i], cols[j]);
      g.entries[i * k + j] = v;
      g.entries[j * k + i] = v;  // bitwise symmetric
    }
  std::vector<double> L;
  if (!cholesky(k, g.entries.data(), L))
    throw DegenerateMetric("pullback metric is not positive definite");
  g.det = cholesky_det(k, L);
  if (g.det <= 1e-14)
    throw DegenerateMetric("pullback metric determinant below 1e-14");
  cholesky_inverse(k, L, g.inverse);
  return g;
}

}  // namespace detail

// Central-difference value / first / second derivatives of the stated order.
template <ChartMapLike M>
JetSample fd_jet(const M& m, std::span<const double> p, double step,
                 int order = 2) {
  if (!(step > 0.0)) throw Error("fd_jet: step must be positive");
  if (order != 2 && order != 4) throw Error("fd_jet: order must be 2 or 4");
  const int k = m.dim();
  const int n = m.ambient_len();
  detail::require_stencil(m, p, (order / 2) * step);

  JetSample jet;
  jet.step = step;
  jet.order = order;
  jet.value = detail::eval_checked(m, p);
  jet.jacobian = detail::jacobian_columns(m, p, step, order);
  jet.hessian.assign(k, std::vector<Vec>(k, Vec(n)));

  Vec q(p.begin(), p.end());
  const double h = step;
  auto f = [&](Vec& x) { return detail::eval_checked(m, x); };

  for (int i = 0; i < k; ++i) {
    const double pi = q[i];
    if (order == 2) {
      q[i] = pi + h;
      Vec fp = f(q);
      q[i] = pi - h;
      Vec fm = f(q);
      for (int c = 0; c < n; ++c)
        jet.hessian[i][i][c] = (fp[c] - 2.0 * jet.value[c] + fm[c]) / (h * h);
    } else {
      q[i] = pi + 2 * h;
      Vec fp2 = f(q);
      q[i] = pi + h;
      Vec fp1 = f(q);
      q[i] = pi - h;
      Vec fm1 = f(q);
      q[i] = pi - 2 * h;
      Vec fm2 = f(q);
      for (int c = 0; c < n; ++c)
        jet.hessian[i][i][c] = (-fp2[c] + 16.0 * fp1[c] - 30.0 * jet.value[c] +
                                16.0 * fm1[c] - fm2[c]) /
                               (12.0 * h * h);
    }
    q[i] = pi;
  }

  // mixed partials: tensor product of the first-derivative stencils
  std::vector<std::pair<int, double>> st;
  if (order == 2)
    st = {{1, 0.5}, {-1, -0.5}};
  else
    st = {{2, -1.0 / 12.0}, {1, 8.0 / 12.0}, {-1, -8.0 / 12.0}, {-2, 1.0 / 12.0}};
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      Vec acc(n, 0.0);
      for (auto [oi, ci] : st)
        for (auto [oj, cj] : st) {
          q[i] = p[i] + oi * h;
          q[j] = p[j] + oj * h;
          Vec v = f(q);
          const double w = ci * cj / (h * h);
          for (int c = 0; c < n; ++c) acc[c] += w * v[c];
        }
      q[i] = p[i];
      q[j] = p[j];
      jet.hessian[i][j] = acc;
      jet.hessian[j][i] = std::move(acc);
    }
  return jet;
}

// entries[i][j] = real inner product of jacobian columns i, j. The default
// 4th-order stencil keeps the truncation near 1e-13 at the default step;
// the Laplacian uses its own 2nd-order metric path internally.
template <ChartMapLike M>
MetricSample pullback_metric(const M& m, std::span<const double> p,
                             double step = 1e-3, int order = 4) {
  if (!(step > 0.0)) throw Error("pullback_metric: step must be positive");
  detail::require_stencil(m, p, (order / 2) * step);
  return detail::metric_from_jacobian(detail::jacobian_columns(m, p, step, order));
}

struct LaplaceResult {
  Vec value;
  bool refined = false;
  double error_estimate = 0.0;  // max-norm, populated when refined

  operator const Vec&() const { return value; }
};

// Delta_g f by nested central differences: the flux sqrt(g) g^{ij} d_j f is
// itself evaluated from first-derivative jets, then differentiated with the
// outer step. With `refine`, one Richardson extrapolation step (step, step/2)
// is applied and an error estimate is attached.
template <ChartMapLike M>
LaplaceResult laplace_beltrami(const M& m, std::span<const double> p,
                               FdOptions opts = {}, bool refine = false) {
  if (!(opts.step > 0.0)) throw Error("laplace_beltrami: step must be positive");
  const int k = m.dim();
  const int n = m.ambient_len();

  auto single = [&](double h_in) {
    const double h_out = opts.outer_factor * h_in;
    detail::require_stencil(m, p, h_out + h_in);
    Vec q(p.begin(), p.end());

    // flux_i(q) = sqrt(g) sum_j g^{ij} d_j f at q
    auto flux = [&](const Vec& at, int i) {
      auto cols = detail::jacobian_columns(m, at, h_in, 2);
      MetricSample g = detail::metric_from_jacobian(cols);
      Vec out(n, 0.0);
      const double sg = std::sqrt(g.det);
      for (int j = 0; j < k; ++j) {
        const double w = sg * g.inv(i, j);
        for (int c = 0; c < n; ++c) out[c] += w * cols[j][c];
      }
      return out;
    };

    MetricSample g0 = detail::metric_from_jacobian(
        detail::jacobian_columns(m, p, h_in, 2));
    const double inv_sg = 1.0 / std::sqrt(g0.det);

    Vec acc(n, 0.0);
    for (int i = 0; i < k; ++i) {
      const double pi = q[i];
      q[i] = pi + h_out;
      Vec fp = flux(q, i);
      q[i] = pi - h_out;
      Vec fm = flux(q, i);
      q[i] = pi;
      for (int c = 0; c < n; ++c) acc[c] += (fp[c] - fm[c]) / (2.0 * h_out);
    }
    for (int c = 0; c < n; ++c) acc[c] *= inv_sg;
    return acc;
  };

  LaplaceResult res;
  if (!refine) {
    res.value = single(opts.step);
    return res;
  }
  Vec coarse = single(opts.step);
  Vec fine = single(0.5 * opts.step);
  res.value.resize(n);
  res.refined = true;
  double err = 0.0;
  for (int c = 0; c < n; ++c) {
    res.value[c] = (4.0 * fine[c] - coarse[c]) / 3.0;
    err = std::max(err, std::abs(fine[c] - coarse[c]) / 3.0);
  }
  res.error_estimate = err;
  return res;
}

}  // namespace spiralmin
