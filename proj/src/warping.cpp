#include "warpft/warping.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace warpft {

WarpingFunction WarpingFunction::linear(double c) {
  require(c > 0.0 && std::isfinite(c), ErrorKind::Config, "linear warp: c must be positive");
  WarpingFunction F;
  F.kind = WarpKind::Linear;
  F.c = c;
  return F;
}

WarpingFunction WarpingFunction::log() {
  WarpingFunction F;
  F.kind = WarpKind::Log;
  return F;
}

WarpingFunction WarpingFunction::power_law(double c, double d, double l) {
  require(c > 0.0 && d > 0.0, ErrorKind::Config, "power_law warp: c and d must be positive");
  require(l > 0.0 && l <= 1.0, ErrorKind::Config, "power_law warp: l must lie in (0, 1]");
  WarpingFunction F;
  F.kind = WarpKind::PowerLaw;
  F.c = c;
  F.d = d;
  F.l = l;
  return F;
}

WarpingFunction WarpingFunction::erb(double c1, double c2) {
  require(c1 > 0.0 && c2 > 0.0, ErrorKind::Config, "erb warp: c1 and c2 must be positive");
  WarpingFunction F;
  F.kind = WarpKind::Erb;
  F.c1 = c1;
  F.c2 = c2;
  return F;
}

WarpingFunction WarpingFunction::alpha_like(double l) {
  require(l > 0.0 && l <= 1.0, ErrorKind::Config, "alpha_like warp: l must lie in (0, 1]");
  WarpingFunction F;
  F.kind = WarpKind::AlphaLike;
  F.l = l;
  return F;
}

std::string WarpingFunction::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case WarpKind::Linear: os << "linear(" << c << ")"; break;
    case WarpKind::Log: os << "log"; break;
    case WarpKind::PowerLaw: os << "power_law(" << c << "," << d << "," << l << ")"; break;
    case WarpKind::Erb: os << "erb(" << c1 << "," << c2 << ")"; break;
    case WarpKind::AlphaLike: os << "alpha_like(" << l << ")"; break;
  }
  return os.str();
}

WarpProbe as_probe(const WarpingFunction& F) {
  WarpProbe p;
  p.F = [F](double t) { return eval(F, t); };
  p.dF = [F](double t) { return derivative(F, t); };
  p.domain = F.domain();
  p.strict_decrease = !F.constant_derivative();
  return p;
}

double numeric_inverse(const WarpProbe& probe, double s) {
  const bool half = probe.domain == Domain::PositiveHalfLine;
  double lo = half ? 0.5 : -1.0;
  double hi = 1.0;
  for (int i = 0; i < 2100 && probe.F(lo) > s; ++i) lo = half ? lo * 0.5 : lo * 2.0;
  for (int i = 0; i < 2100 && probe.F(hi) < s; ++i) hi *= 2.0;
  if (!(probe.F(lo) <= s && probe.F(hi) >= s)) fail(ErrorKind::Numeric, "numeric_inverse: cannot bracket target");

  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double r = probe.F(t) - s;
    if (r == 0.0) return t;
    if (r > 0.0) hi = t; else lo = t;
    const double dt = probe.dF(t);
    double next = (dt > 0.0 && std::isfinite(dt)) ? t - r / dt : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  for (int it = 0; it < 2200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (probe.F(mid) > s) hi = mid; else lo = mid;
  }
  fail(ErrorKind::Numeric, "numeric_inverse: no convergence within the iteration budget");
}

AxiomReport check_warping_axioms(const WarpProbe& probe, const std::vector<double>& grid_in) {
  std::vector<double> grid;
  for (double t : grid_in)
    if (probe.domain == Domain::RealLine || t > 0.0) grid.push_back(t);
  require(grid.size() >= 3, ErrorKind::Config, "check_warping_axioms: need at least 3 grid points inside D");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  AxiomReport rep;
  rep.points = grid.size();
  rep.monotone_increasing = true;
  rep.positive_derivative = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(probe.dF(grid[i]) > 0.0)) rep.positive_derivative = false;
    if (i > 0 && !(probe.F(grid[i]) > probe.F(grid[i - 1]))) rep.monotone_increasing = false;
  }

  // group by |t|; every group must lie (strictly) below all previous ones
  std::vector<std::pair<double, double>> byabs;
  for (double t : grid) byabs.emplace_back(std::abs(t), probe.dF(t));
  std::sort(byabs.begin(), byabs.end());
  rep.derivative_nonincreasing = true;
  double prev_min = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < byabs.size()) {
    std::size_t j = i;
    double gmin = byabs[i].second, gmax = byabs[i].second;
    while (j < byabs.size() && byabs[j].first == byabs[i].first) {
      gmin = std::min(gmin, byabs[j].second);
      gmax = std::max(gmax, byabs[j].second);
      ++j;
    }
    const bool ok = probe.strict_decrease ? gmax < prev_min : gmax <= prev_min;
    if (!ok) rep.derivative_nonincreasing = false;
    prev_min = std::min(prev_min, gmin);
    i = j;
  }

  rep.odd_applicable = probe.domain == Domain::RealLine;
  if (rep.odd_applicable) {
    rep.odd = true;
    for (double t : grid)
      if (probe.F(-t) + probe.F(t) != 0.0) rep.odd = false;
  }
  return rep;
}

AxiomReport check_warping_axioms(const WarpingFunction& F, const std::vector<double>& grid) {
  return check_warping_axioms(as_probe(F), grid);
}

AxiomReport check_warping_axioms(const WarpingFunction& F) { return check_warping_axioms(F, default_axiom_grid(F)); }

namespace {

template <class Fn>
ConstantEstimate grid_ratio_max(const std::vector<double>& grid, Fn ratio) {
  ConstantEstimate est;
  est.C = 0.0;
  for (double x : grid) {
    for (double y : grid) {
      const double r = ratio(x, y);
      if (!std::isfinite(r)) {
        ++est.skipped;
        continue;
      }
      est.C = std::max(est.C, r);
    }
  }
  if (est.skipped > 0) {
    est.truncated = true;
    est.warning = "weight evaluation overflowed at " + std::to_string(est.skipped) +
                  " grid points; estimate uses the remaining points";
  }
  return est;
}

}  // namespace

ConstantEstimate check_quasi_submultiplicative(const WarpingFunction& F, const std::vector<double>& grid) {
  return grid_ratio_max(grid, [&](double x, double y) {
    const double wx = weight_w(F, x), wy = weight_w(F, y), wxy = weight_w(F, x + y);
    if (!std::isfinite(wx) || !std::isfinite(wy) || !std::isfinite(wxy) || wx * wy == 0.0)
      return std::numeric_limits<double>::quiet_NaN();
    return wxy / (wx * wy);
  });
}

ConstantEstimate check_quasi_submultiplicative(const WarpingFunction& F) {
  return check_quasi_submultiplicative(F, symmetric_grid(20.0));
}

WeightSpec WeightSpec::constant_one() { return WeightSpec{}; }

WeightSpec WeightSpec::polynomial(double p) {
  require(p >= 0.0, ErrorKind::Config, "polynomial weight: exponent must be nonnegative");
  WeightSpec v;
  v.kind = Kind::Polynomial;
  v.param = p;
  return v;
}

WeightSpec WeightSpec::exponential(double a) {
  require(a >= 0.0, ErrorKind::Config, "exponential weight: rate must be nonnegative");
  WeightSpec v;
  v.kind = Kind::Exponential;
  v.param = a;
  return v;
}

WeightSpec WeightSpec::composed_with_inverse_warp(const WeightSpec& base, const WarpingFunction& F) {
  WeightSpec v;
  v.kind = Kind::ComposedWithInverseWarp;
  v.base = std::make_shared<WeightSpec>(base);
  v.warp = F;
  return v;
}

double WeightSpec::operator()(double x) const {
  switch (kind) {
    case Kind::ConstantOne: return 1.0;
    case Kind::Polynomial: return std::pow(1.0 + std::abs(x), param);
    case Kind::Exponential: return std::exp(param * std::abs(x));
    case Kind::ComposedWithInverseWarp: return (*base)(eval_inverse(*warp, x));
  }
  return 1.0;
}

bool WeightSpec::symmetric() const {
  if (kind != Kind::ComposedWithInverseWarp) return true;
  return warp->domain() == Domain::RealLine && base->symmetric();
}

std::string WeightSpec::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::ConstantOne: os << "constant_one"; break;
    case Kind::Polynomial: os << "polynomial(" << param << ")"; break;
    case Kind::Exponential: os << "exponential(" << param << ")"; break;
    case Kind::ComposedWithInverseWarp: os << base->name() << "o" << warp->name() << "^-1"; break;
  }
  return os.str();
}

ConstantEstimate check_moderateness(const WeightSpec& target, const WeightSpec& v, const std::vector<double>& grid) {
  return grid_ratio_max(grid, [&](double x, double y) {
    const double num = target(x + y), den = v(x) * target(y);
    if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return num / den;
  });
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  require(a > 0.0 && b > a, ErrorKind::Config, "logspace: need 0 < a < b");
  std::vector<double> out = linspace(std::log(a), std::log(b), n);
  for (double& v : out) v = std::exp(v);
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<double> symmetric_grid(double L, std::size_t n) {
  if (n % 2 == 0) ++n;
  std::vector<double> out(n);
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i <= h; ++i) {
    const double v = L * static_cast<double>(i) / static_cast<double>(h);
    out[h + i] = v;
    out[h - i] = -v;
  }
  return out;
}

std::vector<double> default_axiom_grid(const WarpingFunction& F) {
  if (F.domain() == Domain::PositiveHalfLine) return logspace(1e-3, 1e5, 512);
  return symmetric_grid(2e4, 513);
}

std::vector<double> quasi_random(double a, double b, std::size_t n, unsigned base) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = 1.0, r = 0.0;
    std::size_t k = i + 1;
    while (k > 0) {
      f /= base;
      r += f * static_cast<double>(k % base);
      k /= base;
    }
    out[i] = a + (b - a) * r;
  }
  return out;
}

}  // namespace warpft
