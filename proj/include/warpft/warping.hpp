#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "warpft/errors.hpp"

namespace warpft {

enum class Domain { RealLine, PositiveHalfLine };

enum class WarpKind { Linear, Log, PowerLaw, Erb, AlphaLike };

/// A warping map F : D -> R together with its closed-form inverse.
///
/// Parameters by kind:
///   linear(c):          F(t) = c t
///   log:                F(t) = ln t,                      D = (0, inf)
///   power_law(c, d, l): F(t) = c ((t/d)^l - (t/d)^-l),    D = (0, inf)
///   erb(c1, c2):        F(t) = sgn(t) c1 ln(1 + |t|/c2)
///   alpha_like(l):      F(t) = sgn(t) ((1 + |t|)^l - 1) / l
struct WarpingFunction {
  WarpKind kind = WarpKind::Linear;
  double c = 1.0;
  double d = 1.0;
  double l = 1.0;
  double c1 = 9.265;
  double c2 = 228.8;

  static WarpingFunction linear(double c = 1.0);
  static WarpingFunction log();
  static WarpingFunction power_law(double c, double d, double l);
  static WarpingFunction erb(double c1 = 9.265, double c2 = 228.8);
  static WarpingFunction alpha_like(double l);

  Domain domain() const {
    return (kind == WarpKind::Log || kind == WarpKind::PowerLaw) ? Domain::PositiveHalfLine
                                                                  : Domain::RealLine;
  }
  bool in_domain(double t) const { return domain() == Domain::RealLine ? std::isfinite(t) : t > 0.0; }
  /// power_law violates the quasi-submultiplicativity needed by the kernel module.
  bool kernel_eligible() const { return kind != WarpKind::PowerLaw; }
  /// erb and alpha_like have a kink of w' at s = 0.
  bool weight_smooth() const { return kind != WarpKind::Erb && kind != WarpKind::AlphaLike; }
  /// F' constant, so the derivative-decrease axiom is only non-strict.
  bool constant_derivative() const {
    return kind == WarpKind::Linear || (kind == WarpKind::AlphaLike && l == 1.0);
  }
  std::string name() const;
};

namespace detail {

template <class S>
S sgn(S v) {
  return v > S(0) ? S(1) : (v < S(0) ? S(-1) : S(0));
}

inline void check_domain(const WarpingFunction& F, double t) {
  if (!F.in_domain(t))
    fail(ErrorKind::Domain, F.name() + ": argument " + std::to_string(t) + " outside the domain");
}

}  // namespace detail

/// F(t).  Throws ErrorKind::Domain for t <= 0 on half-line warps.
template <class S>
S eval(const WarpingFunction& F, S t) {
  using std::expm1;
  using std::log;
  using std::log1p;
  using std::pow;
  detail::check_domain(F, static_cast<double>(t));
  const S a = t < S(0) ? -t : t;
  switch (F.kind) {
    case WarpKind::Linear:
      return S(F.c) * t;
    case WarpKind::Log:
      return log(t);
    case WarpKind::PowerLaw: {
      const S r = pow(t / S(F.d), S(F.l));
      return S(F.c) * (r - S(1) / r);
    }
    case WarpKind::Erb:
      return detail::sgn(t) * S(F.c1) * log1p(a / S(F.c2));
    case WarpKind::AlphaLike:
      return detail::sgn(t) * expm1(S(F.l) * log1p(a)) / S(F.l);
  }
  return S(0);
}

/// F^{-1}(s), closed form for every built-in kind.
template <class S>
S eval_inverse(const WarpingFunction& F, S s) {
  using std::exp;
  using std::expm1;
  using std::log1p;
  using std::pow;
  using std::sqrt;
  if (!std::isfinite(static_cast<double>(s))) fail(ErrorKind::Domain, "eval_inverse: non-finite argument");
  const S a = s < S(0) ? -s : s;
  switch (F.kind) {
    case WarpKind::Linear:
      return s / S(F.c);
    case WarpKind::Log:
      return exp(s);
    case WarpKind::PowerLaw: {
      const S u = s / S(F.c);
      const S q = sqrt(u * u + S(4));
      const S r = u >= S(0) ? (u + q) / S(2) : S(2) / (q - u);
      return S(F.d) * pow(r, S(1) / S(F.l));
    }
    case WarpKind::Erb:
      return detail::sgn(s) * S(F.c2) * expm1(a / S(F.c1));
    case WarpKind::AlphaLike:
      return detail::sgn(s) * expm1(log1p(S(F.l) * a) / S(F.l));
  }
  return S(0);
}

/// F'(t).
template <class S>
S derivative(const WarpingFunction& F, S t) {
  using std::pow;
  detail::check_domain(F, static_cast<double>(t));
  const S a = t < S(0) ? -t : t;
  switch (F.kind) {
    case WarpKind::Linear:
      return S(F.c);
    case WarpKind::Log:
      return S(1) / t;
    case WarpKind::PowerLaw: {
      const S r = t / S(F.d);
      return S(F.l * F.c / F.d) * (pow(r, S(F.l - 1)) + pow(r, S(-F.l - 1)));
    }
    case WarpKind::Erb:
      return S(F.c1) / (S(F.c2) + a);
    case WarpKind::AlphaLike:
      return pow(S(1) + a, S(F.l - 1));
  }
  return S(0);
}

/// w^{(order)}(s) with w = (F^{-1})'.  At the kink s = 0 of erb / alpha_like
/// the first derivative is the right-sided one.
template <class S>
S weight_w(const WarpingFunction& F, S s, int order = 0) {
  using std::exp;
  using std::pow;
  using std::sqrt;
  if (order < 0 || order > 2) fail(ErrorKind::Capability, "weight_w: order must be 0, 1 or 2");
  const S a = s < S(0) ? -s : s;
  const S sg = s < S(0) ? S(-1) : S(1);
  switch (F.kind) {
    case WarpKind::Linear:
      return order == 0 ? S(1) / S(F.c) : S(0);
    case WarpKind::Log:
      return exp(s);
    case WarpKind::PowerLaw: {
      const S c = S(F.c);
      const S lv = S(F.l);
      const S u = s / c;
      const S q = sqrt(u * u + S(4));
      const S r = u >= S(0) ? (u + q) / S(2) : S(2) / (q - u);
      const S w = S(F.d) / (lv * c) * pow(r, S(1) / lv) / q;
      const S g = (S(1) / (lv * q) - u / (q * q)) / c;  // w'/w
      if (order == 0) return w;
      if (order == 1) return w * g;
      const S dg = (-u / (lv * q * q * q) - (S(4) - u * u) / (q * q * q * q)) / (c * c);
      return w * (g * g + dg);
    }
    case WarpKind::Erb: {
      const S w = S(F.c2 / F.c1) * exp(a / S(F.c1));
      if (order == 0) return w;
      if (order == 1) return sg * w / S(F.c1);
      return w / S(F.c1 * F.c1);
    }
    case WarpKind::AlphaLike: {
      const S lv = S(F.l);
      const S b = S(1) + lv * a;
      if (order == 0) return pow(b, S(1) / lv - S(1));
      if (order == 1) return sg * (S(1) - lv) * pow(b, S(1) / lv - S(2));
      return (S(1) - lv) * (S(1) - S(2) * lv) * pow(b, S(1) / lv - S(3));
    }
  }
  return S(0);
}

/// Generic warp given only by F and F' (used for custom probes such as t^3).
struct WarpProbe {
  std::function<double(double)> F;
  std::function<double(double)> dF;
  Domain domain = Domain::RealLine;
  bool strict_decrease = true;
};

WarpProbe as_probe(const WarpingFunction& F);

/// Guarded Newton iteration (60 steps) with bisection fallback.
double numeric_inverse(const WarpProbe& probe, double s);

struct AxiomReport {
  bool monotone_increasing = false;
  bool positive_derivative = false;
  bool derivative_nonincreasing = false;
  bool odd_applicable = false;
  bool odd = false;
  std::size_t points = 0;
  bool all() const {
    return monotone_increasing && positive_derivative && derivative_nonincreasing && (!odd_applicable || odd);
  }
};

AxiomReport check_warping_axioms(const WarpProbe& probe, const std::vector<double>& grid);
AxiomReport check_warping_axioms(const WarpingFunction& F, const std::vector<double>& grid);
AxiomReport check_warping_axioms(const WarpingFunction& F);

struct ConstantEstimate {
  double C = 0.0;
  bool truncated = false;  // some grid points overflowed and were skipped
  std::size_t skipped = 0;
  std::string warning;
};

/// max over the grid of w(x+y) / (w(x) w(y)).
ConstantEstimate check_quasi_submultiplicative(const WarpingFunction& F, const std::vector<double>& grid);
ConstantEstimate check_quasi_submultiplicative(const WarpingFunction& F);

struct WeightSpec {
  enum class Kind { ConstantOne, Polynomial, Exponential, ComposedWithInverseWarp };
  Kind kind = Kind::ConstantOne;
  double param = 0.0;  // exponent p or rate a
  std::shared_ptr<const WeightSpec> base;
  std::optional<WarpingFunction> warp;

  static WeightSpec constant_one();
  static WeightSpec polynomial(double p);
  static WeightSpec exponential(double a);
  /// x -> base(F^{-1}(x))
  static WeightSpec composed_with_inverse_warp(const WeightSpec& base, const WarpingFunction& F);

  double operator()(double x) const;
  bool symmetric() const;
  bool is_constant() const { return kind == Kind::ConstantOne; }
  std::string name() const;
};

/// max over the grid of target(x+y) / (v(x) target(y)).
ConstantEstimate check_moderateness(const WeightSpec& target, const WeightSpec& v, const std::vector<double>& grid);

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);
/// Symmetric linear grid on [-L, L] with an odd point count so that 0 is included.
std::vector<double> symmetric_grid(double L, std::size_t n = 513);
/// 512 log-spaced points on the half-line, 513 symmetric points otherwise.
std::vector<double> default_axiom_grid(const WarpingFunction& F);
/// Halton-type low-discrepancy sequence in [a, b].
std::vector<double> quasi_random(double a, double b, std::size_t n, unsigned base = 2);

}  // namespace warpft
