#include "warpft/prototype.hpp"

#include <algorithm>
#include <sstream>

namespace warpft {

Prototype Prototype::gaussian(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::Config, "gaussian prototype: sigma must be positive");
  Prototype p;
  p.kind = PrototypeKind::Gaussian;
  p.sigma = sigma;
  return p;
}

Prototype Prototype::hann_bump(double radius) {
  require(radius > 0.0 && std::isfinite(radius), ErrorKind::Config, "hann_bump prototype: radius must be positive");
  Prototype p;
  p.kind = PrototypeKind::HannBump;
  p.radius = radius;
  return p;
}

Prototype Prototype::smooth_bump(double radius) {
  require(radius > 0.0 && std::isfinite(radius), ErrorKind::Config, "smooth_bump prototype: radius must be positive");
  Prototype p;
  p.kind = PrototypeKind::SmoothBump;
  p.radius = radius;
  return p;
}

std::optional<std::pair<double, double>> Prototype::support() const {
  if (!compact()) return std::nullopt;
  return std::make_pair(center - radius, center + radius);
}

std::pair<double, double> Prototype::effective_support(double ratio) const {
  if (compact()) return {center - radius, center + radius};
  const double h = sigma * std::sqrt(2.0 * std::log(1.0 / ratio));
  return {center - h, center + h};
}

Prototype Prototype::shifted(double by) const {
  Prototype p = *this;
  p.center += by;
  return p;
}

Prototype Prototype::scaled(double factor) const {
  Prototype p = *this;
  p.amplitude *= factor;
  return p;
}

std::string Prototype::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case PrototypeKind::Gaussian: os << "gaussian(" << sigma << ")"; break;
    case PrototypeKind::HannBump: os << "hann_bump(" << radius << ")"; break;
    case PrototypeKind::SmoothBump: os << "smooth_bump(" << radius << ")"; break;
  }
  return os.str();
}

NormResult weighted_l2_norm(const Prototype& th, const std::function<double(double)>& weight,
                            const QuadratureSpec& quad, int order) {
  auto integrand = [&](double s) {
    const double v = eval_prototype(th, s, order);
    if (v == 0.0) return 0.0;
    const double W = weight(s);
    return v * v * W * W;
  };
  NormResult out;
  QuadResult<double> q;
  std::vector<double> br{0.0, th.center};
  if (th.compact()) {
    const auto [a, b] = *th.support();
    q = integrate<double>(integrand, a, b, quad, br);
  } else {
    auto [a, b] = th.effective_support(1e-3);
    QuadratureSpec qs = quad;
    qs.max_extensions = std::max(qs.max_extensions, 60);
    q = integrate_line<double>(integrand, a, b, qs, br);
    if (q.converged && (q.hi - q.lo) > 2048.0 * th.sigma) q.converged = false;
  }
  out.lo = q.lo;
  out.hi = q.hi;
  if (!std::isfinite(q.value) || !q.converged) {
    out.finite = false;
    out.value = std::numeric_limits<double>::infinity();
    out.note = "truncation-growth test failed: integrand does not decay within the search range";
    return out;
  }
  out.value = std::sqrt(std::max(0.0, q.value));
  return out;
}

NormResult weighted_l2_norm(const Prototype& th, const WeightSpec& weight, const QuadratureSpec& quad, int order) {
  return weighted_l2_norm(th, [&](double s) { return weight(s); }, quad, order);
}

double l2_norm(const Prototype& th, const QuadratureSpec& quad) {
  return weighted_l2_norm(th, [](double) { return 1.0; }, quad).value;
}

Prototype normalized(const Prototype& th, const QuadratureSpec& quad) {
  Prototype base = th;
  base.amplitude = 1.0;
  const double n = l2_norm(base, quad);
  require(n > 0.0 && std::isfinite(n), ErrorKind::Degenerate, "normalized: prototype has zero norm");
  base.amplitude = 1.0 / n;
  return base;
}

std::complex<double> admissibility_inner_product(const Prototype& t1, const Prototype& t2, const QuadratureSpec& quad) {
  const auto [a1, b1] = t1.effective_support();
  const auto [a2, b2] = t2.effective_support();
  const double a = std::max(a1, a2), b = std::min(b1, b2);
  if (!(b > a)) return {0.0, 0.0};
  auto f = [&](double s) { return eval_prototype(t1, s) * eval_prototype(t2, s); };
  const auto q = integrate<double>(f, a, b, quad, {t1.center, t2.center});
  return {q.value, 0.0};
}

bool ConditionReport::all_finite() const {
  return std::all_of(entries.begin(), entries.end(), [](const ConditionEntry& e) { return e.finite; });
}

ConditionReport check_theta_conditions(const Prototype& th, const WarpingFunction& F, const WeightSpec& v1, int p,
                                       double eps, const QuadratureSpec& quad) {
  require(eps > 0.0, ErrorKind::Config, "check_theta_conditions: eps must be positive");
  if (F.domain() == Domain::PositiveHalfLine) p = 0;
  require(p >= 0 && p + 2 <= th.max_derivative_order(), ErrorKind::Capability,
          "check_theta_conditions: p + 2 exceeds the available derivative order");
  auto w = [&](double s) { return weight_w(F, s); };
  auto w1 = [&](double s) { return v1(s) * std::pow(1.0 + std::abs(s), 1.0 + eps) * std::sqrt(w(-s)); };
  auto w2 = [&](double s) { return w1(-s) * w(s); };
  auto w3 = [&](double s) { return w1(-s) * std::pow(w(-s), p + 1); };

  ConditionReport rep;
  auto add = [&](const std::string& name, const NormResult& r) { rep.entries.push_back({name, r.value, r.finite}); };
  add("theta in L2_w1", weighted_l2_norm(th, w1, quad, 0));
  add("theta in L2_w2", weighted_l2_norm(th, w2, quad, 0));
  for (int k = 0; k <= p + 2; ++k) {
    add("theta^(" + std::to_string(k) + ") in L2_w1", weighted_l2_norm(th, w1, quad, k));
    add("theta^(" + std::to_string(k) + ") in L2_w3", weighted_l2_norm(th, w3, quad, k));
  }

  // C0 decay of w(-s)^j theta^{(k+1)}, 0 <= k <= j <= p+1, sampled at the truncation ends
  const auto [a, b] = th.compact() ? *th.support() : th.effective_support(1e-300);
  for (int j = 0; j <= p + 1; ++j) {
    for (int k = 0; k <= j && k + 1 <= th.max_derivative_order(); ++k) {
      double tail = 0.0;
      for (double s : {a, b}) {
        const double v = eval_prototype(th, s, k + 1);
        tail = std::max(tail, v == 0.0 ? 0.0 : std::abs(std::pow(w(-s), j) * v));
      }
      rep.entries.push_back({"w(-s)^" + std::to_string(j) + " theta^(" + std::to_string(k + 1) + ") -> 0", tail,
                             std::isfinite(tail) && tail < 1e-8});
    }
  }
  return rep;
}

}  // namespace warpft
