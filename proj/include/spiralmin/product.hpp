#pragma once

// Spiral products G(t, x, y) = (gamma_1(t) f_1(x), gamma_2(t) f_2(y)) over the
// product chart (t_arc interval) x (left chart) x (right chart), their warped
// metric dt^2 + a^2 g_1 + b^2 g_2, the C-totally real predicate, and the
// left-associated iterated construction.

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spiralmin/core.hpp"
#include "spiralmin/immersions.hpp"
#include "spiralmin/integrate.hpp"
#include "spiralmin/numgeo.hpp"

namespace spiralmin {

struct BuildOptions {
  bool validate_inputs = true;
  int validation_grid = 4;       // validate_entry grid density per input
  double validation_tol = 1e-4;  // finite-difference Takahashi tolerance
  double chart_inset_frac = 0.02;
};

struct SpiralProduct {
  ImmersionSpec left;
  ImmersionSpec right;
  std::shared_ptr<const ProfileCurve> curve;
  Box chart_box_;

  int dim() const { return 1 + left.k + right.k; }
  int ambient_len() const { return left.ambient_len() + right.ambient_len(); }
  int ambient_complex_dim() const {
    return left.ambient_complex_dim + right.ambient_complex_dim;
  }
  const Box& box() const { return chart_box_; }

  void eval(std::span<const double> x, std::span<double> out) const {
    const GammaJet g = gamma_eval(*curve, x[0]);
    auto lo = out.subspan(0, static_cast<std::size_t>(left.ambient_len()));
    auto ro = out.subspan(static_cast<std::size_t>(left.ambient_len()));
    left.eval(x.subspan(1, static_cast<std::size_t>(left.k)), lo);
    right.eval(x.subspan(1 + static_cast<std::size_t>(left.k)), ro);
    for (int j = 0; j < left.ambient_complex_dim; ++j)
      set_complex(lo, j, g.g1 * complex_at(lo, j));
    for (int j = 0; j < right.ambient_complex_dim; ++j)
      set_complex(ro, j, g.g2 * complex_at(ro, j));
  }

  // Type-erased view for reuse as an input of the next iteration stage.
  ImmersionSpec as_immersion_spec(std::string name) const {
    auto self = std::make_shared<const SpiralProduct>(*this);
    ImmersionSpec s;
    s.name = std::move(name);
    s.k = dim();
    s.ambient_complex_dim = ambient_complex_dim();
    s.chart_box = chart_box_;
    s.evaluate = [self](std::span<const double> x, std::span<double> out) {
      self->eval(x, out);
    };
    s.claims.minimal = true;
    s.claims.c_totally_real = (curve->params.C1 == -1.0);
    s.claims.real_valued = false;
    s.claimed_eigenvalue = dim();
    return s;
  }
};

static_assert(ChartMapLike<SpiralProduct>);

inline SpiralProduct build(const ImmersionSpec& left, const ImmersionSpec& right,
                           ProfileCurve curve, const BuildOptions& opts = {}) {
  if (left.k != static_cast<int>(curve.params.k1) ||
      right.k != static_cast<int>(curve.params.k2) ||
      left.k != curve.params.k1 || right.k != curve.params.k2)
    throw DimensionMismatch("build: curve (k1, k2) must match input dimensions");
  if (!left.claims.c_totally_real || !right.claims.c_totally_real)
    throw InputNotValidated("build: inputs must claim c_totally_real");
  if (opts.validate_inputs) {
    for (const ImmersionSpec* in : {&left, &right}) {
      const CatalogReport rep =
          validate_entry(*in, opts.validation_grid, opts.validation_tol);
      if (!rep.pass)
        throw InputNotValidated("build: input " + in->name +
                                " failed validate_entry");
    }
  }

  SpiralProduct prod;
  prod.left = left;
  prod.right = right;
  prod.curve = std::make_shared<const ProfileCurve>(std::move(curve));
  const double span = prod.curve->t_end();
  const double inset = opts.chart_inset_frac * span;
  prod.chart_box_.push_back({inset, span - inset});
  prod.chart_box_.insert(prod.chart_box_.end(), left.chart_box.begin(),
                         left.chart_box.end());
  prod.chart_box_.insert(prod.chart_box_.end(), right.chart_box.begin(),
                         right.chart_box.end());
  return prod;
}

// Block-diagonal warped metric dt^2 + a^2(t) g_1(x) + b^2(t) g_2(y) assembled
// from the inputs' pullback metrics (not from differentiating G itself).
inline MetricSample warped_metric(const SpiralProduct& prod,
                                  std::span<const double> point,
                                  double step = 1e-3) {
  const GammaJet g = gamma_eval(*prod.curve, point[0]);
  const MetricSample g1 = pullback_metric(
      prod.left, point.subspan(1, static_cast<std::size_t>(prod.left.k)), step);
  const MetricSample g2 = pullback_metric(
      prod.right, point.subspan(1 + static_cast<std::size_t>(prod.left.k)), step);

  MetricSample out;
  const int k = prod.dim();
  out.dim = k;
  out.entries.assign(static_cast<std::size_t>(k) * k, 0.0);
  out.inverse.assign(static_cast<std::size_t>(k) * k, 0.0);
  out.entries[0] = 1.0;
  out.inverse[0] = 1.0;
  const double a2 = g.a * g.a, b2 = g.b * g.b;
  for (int i = 0; i < g1.dim; ++i)
    for (int j = 0; j < g1.dim; ++j) {
      out.entries[(1 + i) * k + (1 + j)] = a2 * g1.entry(i, j);
      out.inverse[(1 + i) * k + (1 + j)] = g1.inv(i, j) / a2;
    }
  const int off = 1 + g1.dim;
  for (int i = 0; i < g2.dim; ++i)
    for (int j = 0; j < g2.dim; ++j) {
      out.entries[(off + i) * k + (off + j)] = b2 * g2.entry(i, j);
      out.inverse[(off + i) * k + (off + j)] = g2.inv(i, j) / b2;
    }
  out.det = std::pow(a2, g1.dim) * std::pow(b2, g2.dim) * g1.det * g2.det;
  return out;
}

struct CtrReport {
  double max_residual = 0.0;
  bool pass = false;
  double tol = 0.0;
};

// max over the grid and all chart directions of |<J f, d_i f>| (real inner
// product), with 4th-order jets so the test sharpness is not FD-limited.
template <ChartMapLike M>
CtrReport c_totally_real_test(const M& m, std::size_t grid_count = 128,
                              double tol = 1e-6, double step = 1e-3) {
  CtrReport rep;
  rep.tol = tol;
  const auto pts = halton_points(m.box(), grid_count, 0.05);
  Vec jf(static_cast<std::size_t>(m.ambient_len()));
  for (const auto& p : pts) {
    const JetSample jet = fd_jet(m, p, step, 4);
    apply_complex_structure(jet.value, jf);
    for (int i = 0; i < m.dim(); ++i)
      rep.max_residual =
          std::max(rep.max_residual, std::abs(dot(jf, jet.jacobian[i])));
  }
  rep.pass = rep.max_residual <= tol;
  return rep;
}

struct IterateOptions {
  BuildOptions build;
  std::size_t ctr_grid = 128;
  double ctr_tol = 1e-6;
};

// Left-associated fold ((L1 x L2) x L3) ... with every curve required to
// have C1 = -1; each intermediate must pass c_totally_real_test and
// validate_entry before being consumed by the next stage.
inline SpiralProduct iterate_products(const std::vector<ImmersionSpec>& inputs,
                                      const std::vector<ProfileCurve>& curves,
                                      const IterateOptions& opts = {}) {
  if (inputs.size() < 2) throw EmptyInput("iterate_products: need >= 2 inputs");
  if (curves.size() != inputs.size() - 1)
    throw DimensionMismatch("iterate_products: need |inputs| - 1 curves");
  for (const auto& c : curves)
    if (c.params.C1 != -1.0)
      throw C1NotMinusOne("iterate_products: every curve must have C1 = -1");

  SpiralProduct prod = build(inputs[0], inputs[1], curves[0], opts.build);
  for (std::size_t i = 2; i < inputs.size(); ++i) {
    const CtrReport ctr = c_totally_real_test(prod, opts.ctr_grid, opts.ctr_tol);
    if (!ctr.pass)
      throw IntermediateNotCTR(
          "iterate_products: intermediate failed the C-totally real test");
    ImmersionSpec mid = prod.as_immersion_spec("stage" + std::to_string(i - 1));
    const CatalogReport rep = validate_entry(mid, opts.build.validation_grid,
                                             opts.build.validation_tol, {}, 1e-9);
    if (!rep.pass)
      throw InputNotValidated("iterate_products: intermediate failed validate_entry");
    BuildOptions stage = opts.build;
    stage.validate_inputs = false;  // just validated above
    prod = build(mid, inputs[i], curves[i - 1], stage);
  }
  return prod;
}

}  // namespace spiralmin
