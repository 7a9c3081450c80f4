#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "warpft/errors.hpp"
#include "warpft/quadrature.hpp"
#include "warpft/warping.hpp"

namespace warpft {

enum class PrototypeKind { Gaussian, HannBump, SmoothBump };

/// Window theta(s) = amplitude * base(s - center), where base is one of
///   gaussian(sigma):    exp(-s^2 / (2 sigma^2))
///   hann_bump(r):       cos^2(pi s / (2 r)) on |s| < r
///   smooth_bump(r):     exp(-1 / (1 - (s/r)^2)) on |s| < r
struct Prototype {
  PrototypeKind kind = PrototypeKind::Gaussian;
  double sigma = 1.0;
  double radius = 1.0;
  double amplitude = 1.0;
  double center = 0.0;

  static Prototype gaussian(double sigma = 1.0);
  static Prototype hann_bump(double radius = 1.0);
  static Prototype smooth_bump(double radius = 1.0);

  int max_derivative_order() const { return 4; }
  bool compact() const { return kind != PrototypeKind::Gaussian; }
  /// Exact support for compact kinds.
  std::optional<std::pair<double, double>> support() const;
  /// Interval outside of which |theta| < ratio * max|theta|.
  std::pair<double, double> effective_support(double ratio = 1e-16) const;
  Prototype shifted(double by) const;
  Prototype scaled(double factor) const;
  std::string name() const;
};

template <class S>
S eval_prototype(const Prototype& th, S s, int order = 0) {
  using std::cos;
  using std::exp;
  using std::sin;
  if (order < 0 || order > th.max_derivative_order())
    fail(ErrorKind::Capability, "eval_prototype: derivative order " + std::to_string(order) + " unsupported");
  const S x = s - S(th.center);
  const S A = S(th.amplitude);
  switch (th.kind) {
    case PrototypeKind::Gaussian: {
      const S sg2 = S(th.sigma) * S(th.sigma);
      const S g = exp(-x * x / (S(2) * sg2));
      const S t = x / sg2;
      const S is2 = S(1) / sg2;
      switch (order) {
        case 0: return A * g;
        case 1: return A * (-t) * g;
        case 2: return A * (t * t - is2) * g;
        case 3: return A * (-t * t * t + S(3) * t * is2) * g;
        default: return A * (t * t * t * t - S(6) * t * t * is2 + S(3) * is2 * is2) * g;
      }
    }
    case PrototypeKind::HannBump: {
      const S r = S(th.radius);
      if (!(x > -r && x < r)) return S(0);
      const S k = S(3.14159265358979323846264338327950288L) / r;
      const S half = S(0.5);
      switch (order) {
        case 0: return A * half * (S(1) + cos(k * x));
        case 1: return -A * half * k * sin(k * x);
        case 2: return -A * half * k * k * cos(k * x);
        case 3: return A * half * k * k * k * sin(k * x);
        default: return A * half * k * k * k * k * cos(k * x);
      }
    }
    case PrototypeKind::SmoothBump: {
      const S r = S(th.radius);
      if (!(x > -r && x < r)) return S(0);
      const S y = x / r;
      const S u = S(1) - y * y;
      const S g = exp(-S(1) / u);
      if (g == S(0)) return S(0);
      if (order == 0) return A * g;
      const S iu = S(1) / u;
      const S q1 = -S(2) * y * iu * iu;
      const S q2 = -S(2) * (S(3) * y * y + S(1)) * iu * iu * iu;
      const S q3 = -S(24) * y * (y * y + S(1)) * iu * iu * iu * iu;
      const S q4 = -S(24) * (S(5) * y * y * y * y + S(10) * y * y + S(1)) * iu * iu * iu * iu * iu;
      S p;
      switch (order) {
        case 1: p = q1; break;
        case 2: p = q2 + q1 * q1; break;
        case 3: p = q3 + S(3) * q1 * q2 + q1 * q1 * q1; break;
        default: p = q4 + S(4) * q1 * q3 + S(3) * q2 * q2 + S(6) * q1 * q1 * q2 + q1 * q1 * q1 * q1; break;
      }
      S scale = S(1);
      for (int i = 0; i < order; ++i) scale /= r;
      return A * p * scale * g;
    }
  }
  return S(0);
}

struct NormResult {
  double value = 0.0;
  bool finite = true;
  double lo = 0.0, hi = 0.0;
  std::string note;
};

/// (int |theta^{(order)}(s)|^2 weight(s)^2 ds)^{1/2}.  A nonconverging truncation
/// (growing integrand) or an overflow is reported as finite = false.
NormResult weighted_l2_norm(const Prototype& th, const std::function<double(double)>& weight,
                            const QuadratureSpec& quad = {}, int order = 0);
NormResult weighted_l2_norm(const Prototype& th, const WeightSpec& weight, const QuadratureSpec& quad = {},
                            int order = 0);
double l2_norm(const Prototype& th, const QuadratureSpec& quad = {});
/// Copy with amplitude chosen so that the L2 norm is 1.
Prototype normalized(const Prototype& th, const QuadratureSpec& quad = {});

/// <theta1, theta2> = int theta1 conj(theta2).
std::complex<double> admissibility_inner_product(const Prototype& t1, const Prototype& t2,
                                                 const QuadratureSpec& quad = {});

struct ConditionEntry {
  std::string name;
  double value = 0.0;
  bool finite = true;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  bool all_finite() const;
};

/// Weighted-norm conditions on theta with
///   w1(s) = v1(s) (1+|s|)^{1+eps} w(-s)^{1/2},  w2(s) = w1(-s) w(s),  w3(s) = w1(-s) w(-s)^{p+1}
/// plus the decay of w(-s)^j theta^{(k+1)} at the ends of the truncation range.
ConditionReport check_theta_conditions(const Prototype& th, const WarpingFunction& F, const WeightSpec& v1, int p,
                                       double eps, const QuadratureSpec& quad = {});

}  // namespace warpft
