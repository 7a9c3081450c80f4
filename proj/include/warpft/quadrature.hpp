#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "warpft/errors.hpp"

namespace warpft {

struct QuadratureSpec {
  double panel_tol = 1e-10;
  int max_depth = 40;
  std::size_t max_panels = 1u << 18;
  double tail_ratio = 1e-16;  // truncate infinite ranges once |f| falls below this fraction of its peak
  int max_extensions = 60;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  bool converged = true;
  std::size_t panels = 0;
  double lo = 0.0, hi = 0.0;  // integration range actually used
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
  static const GaussLegendre& order15();
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T, class Fn>
T gl_panel(const Fn& f, double a, double b, const GaussLegendre& gl) {
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  T acc{};
  for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * f(m + h * gl.x[i]);
  return acc * h;
}

template <class T, class Fn>
void adapt(const Fn& f, double a, double b, T whole, double tol_density, int depth, const QuadratureSpec& spec,
           const GaussLegendre& gl, QuadResult<T>& res) {
  const double m = 0.5 * (a + b);
  const T left = gl_panel<T>(f, a, m, gl);
  const T right = gl_panel<T>(f, m, b, gl);
  const T sum = left + right;
  const double err = magnitude(sum - whole);
  if (err <= tol_density * (b - a) || depth >= spec.max_depth || res.panels >= spec.max_panels || m <= a || m >= b) {
    if (err > tol_density * (b - a)) res.converged = false;
    res.value += sum;
    res.error += err;
    res.panels += 2;
    return;
  }
  adapt<T>(f, a, m, left, tol_density, depth + 1, spec, gl, res);
  adapt<T>(f, m, b, right, tol_density, depth + 1, spec, gl, res);
}

}  // namespace detail

/// Adaptive composite 15-point Gauss-Legendre on [a, b].  Breakpoints (kinks or
/// support edges) split the range before adaptation starts.
template <class T, class Fn>
QuadResult<T> integrate(const Fn& f, double a, double b, const QuadratureSpec& spec = {},
                        std::vector<double> breakpoints = {}) {
  QuadResult<T> res;
  res.lo = a;
  res.hi = b;
  if (!(b > a)) return res;
  const GaussLegendre& gl = GaussLegendre::order15();
  std::vector<double> cuts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);

  // reference scale from a uniform pre-pass of |f|
  const int pre = 16;
  std::vector<double> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    for (int k = 0; k < pre; ++k) pieces.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * k / pre);
  pieces.push_back(b);
  double scale = 0.0;
  std::vector<T> coarse(pieces.size() - 1);
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    auto absf = [&](double s) { return detail::magnitude(f(s)); };
    scale += detail::gl_panel<double>(absf, pieces[i], pieces[i + 1], gl);
    coarse[i] = detail::gl_panel<T>(f, pieces[i], pieces[i + 1], gl);
  }
  if (!std::isfinite(scale)) {
    res.converged = false;
    res.value = T(std::numeric_limits<double>::quiet_NaN());
    return res;
  }
  const double tol_density = spec.panel_tol * std::max(scale, 1e-300) / (b - a);
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    detail::adapt<T>(f, pieces[i], pieces[i + 1], coarse[i], tol_density, 0, spec, gl, res);
  return res;
}

/// Integral over the whole line.  [a, b] is a hint for where the mass sits;
/// the range is widened until |f| at both ends drops below tail_ratio times the
/// sampled peak.  converged = false signals a growing (divergent) integrand.
template <class T, class Fn>
QuadResult<T> integrate_line(const Fn& f, double a, double b, const QuadratureSpec& spec = {},
                             std::vector<double> breakpoints = {}) {
  auto mag = [&](double s) {
    const double v = detail::magnitude(f(s));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  double peak = 0.0;
  for (int i = 0; i <= 64; ++i) peak = std::max(peak, mag(a + (b - a) * i / 64.0));
  double lo = a, hi = b;
  const double step0 = std::max(b - a, 1.0);
  double step = step0;
  int ext = 0;
  bool ok = false;
  while (ext < spec.max_extensions) {
    double mlo = mag(lo), mhi = mag(hi);
    if (!std::isfinite(mlo) || !std::isfinite(mhi) || !std::isfinite(peak)) break;
    // sample the newly covered strips to keep the peak honest
    const bool lo_ok = mlo <= spec.tail_ratio * peak;
    const bool hi_ok = mhi <= spec.tail_ratio * peak;
    if (lo_ok && hi_ok) {
      ok = true;
      break;
    }
    if (!lo_ok) {
      for (int i = 1; i <= 16; ++i) peak = std::max(peak, mag(lo - step * i / 16.0));
      lo -= step;
    }
    if (!hi_ok) {
      for (int i = 1; i <= 16; ++i) peak = std::max(peak, mag(hi + step * i / 16.0));
      hi += step;
    }
    step *= 1.5;
    ++ext;
  }
  QuadResult<T> res = integrate<T>(f, lo, hi, spec, std::move(breakpoints));
  if (!ok) res.converged = false;
  return res;
}

}  // namespace warpft
