#pragma once

// Shared basics: error taxonomy, chart boxes, interleaved complex ambient
// vectors, small symmetric linear algebra, low-discrepancy sampling and
// Gauss-Legendre nodes.
//
// Ambient convention: a point of C^{n+1} is stored as 2(n+1) doubles in
// interleaved order (Re z0, Im z0, Re z1, Im z1, ...). The complex structure
// J acts as (x, y) -> (-y, x) on each pair.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spiralmin {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StencilOutOfChart final : Error { using Error::Error; };
struct NonFiniteValue final : Error { using Error::Error; };
struct DegenerateMetric final : Error { using Error::Error; };
struct OutsideDomain final : Error { using Error::Error; };
struct EmptyDomain final : Error { using Error::Error; };
struct EventLocalizationFailure final : Error { using Error::Error; };
struct OutOfSpan final : Error { using Error::Error; };
struct NotRealValued final : Error { using Error::Error; };
struct EmptyInput final : Error { using Error::Error; };
struct ZeroDimensionalPart final : Error { using Error::Error; };
struct DimensionMismatch final : Error { using Error::Error; };
struct InputNotValidated final : Error { using Error::Error; };
struct C1NotMinusOne final : Error { using Error::Error; };
struct IntermediateNotCTR final : Error { using Error::Error; };
struct SingularDenominator final : Error { using Error::Error; };
struct NoSteadyAngle final : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// chart boxes
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x, double margin = 0.0) const {
    return x > lo + margin && x < hi - margin;
  }
};

using Box = std::vector<Interval>;

inline bool box_contains(const Box& box, std::span<const double> x,
                         double margin = 0.0) {
  if (x.size() != box.size()) return false;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (!box[i].contains(x[i], margin)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// interleaved complex vectors
// ---------------------------------------------------------------------------

inline std::complex<double> complex_at(std::span<const double> v, std::size_t j) {
  return {v[2 * j], v[2 * j + 1]};
}

inline void set_complex(std::span<double> v, std::size_t j, std::complex<double> z) {
  v[2 * j] = z.real();
  v[2 * j + 1] = z.imag();
}

// J(x, y) = (-y, x) per complex pair.
inline void apply_complex_structure(std::span<const double> in, std::span<double> out) {
  for (std::size_t j = 0; j + 1 < in.size(); j += 2) {
    out[j] = -in[j + 1];
    out[j + 1] = in[j];
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

// out[block] = z * in[block] acting on complex pairs [j0, j0+n).
inline void scale_complex_block(std::span<const double> in, std::span<double> out,
                                std::size_t j0, std::size_t n,
                                std::complex<double> z) {
  for (std::size_t j = j0; j < j0 + n; ++j)
    set_complex(out, j, z * complex_at(in, j));
}

// ---------------------------------------------------------------------------
// small symmetric positive-definite systems (k <= ~8)
// ---------------------------------------------------------------------------

// Cholesky factor of the row-major n x n matrix A. Returns false when a
// pivot is non-positive (A not positive definite).
inline bool cholesky(int n, const double* A, std::vector<double>& L) {
  L.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A[i * n + j];
      for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        L[i * n + i] = std::sqrt(s);
      } else {
        L[i * n + j] = s / L[j * n + j];
      }
    }
  }
  return true;
}

inline double cholesky_det(int n, const std::vector<double>& L) {
  double d = 1.0;
  for (int i = 0; i < n; ++i) d *= L[i * n + i];
  return d * d;
}

// Inverse from the Cholesky factor, symmetrized exactly.
inline void cholesky_inverse(int n, const std::vector<double>& L,
                             std::vector<double>& inv) {
  inv.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> col(n);
  for (int c = 0; c < n; ++c) {
    // forward solve L y = e_c
    for (int i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L[i * n + k] * col[k];
      col[i] = s / L[i * n + i];
    }
    // back solve L^T x = y
    for (int i = n - 1; i >= 0; --i) {
      double s = col[i];
      for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * col[k];
      col[i] = s / L[i * n + i];
    }
    for (int r = 0; r < n; ++r) inv[r * n + c] = col[r];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (inv[i * n + j] + inv[j * n + i]);
      inv[i * n + j] = inv[j * n + i] = v;
    }
}

// ---------------------------------------------------------------------------
// Halton low-discrepancy sampling
// ---------------------------------------------------------------------------

inline double radical_inverse(unsigned base, unsigned long long i) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline unsigned halton_base(std::size_t dim) {
  static constexpr unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                        23, 29, 31, 37, 41, 43, 47, 53};
  return primes[dim % (sizeof(primes) / sizeof(primes[0]))];
}

// `count` Halton points in the box interior, inset by margin_frac per side.
inline std::vector<Vec> halton_points(const Box& box, std::size_t count,
                                      double margin_frac = 0.05) {
  std::vector<Vec> pts;
  pts.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    Vec p(box.size());
    for (std::size_t d = 0; d < box.size(); ++d) {
      const double u = radical_inverse(halton_base(d), i);
      const double w = box[d].width();
      p[d] = box[d].lo + (margin_frac + (1.0 - 2.0 * margin_frac) * u) * w;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes (computed once, machine accurate)
// ---------------------------------------------------------------------------

struct GaussLegendre {
  std::vector<double> x;  // nodes on (-1, 1)
  std::vector<double> w;

  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }

  // integral of f over (a, b)
  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
  }
};

inline const GaussLegendre& gauss32() {
  static const GaussLegendre g(32);
  return g;
}

// ---------------------------------------------------------------------------
// misc
// ---------------------------------------------------------------------------

// fixed float formatting used by every exported report (17 significant digits)
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace spiralmin
