#include "warpft/kernels.hpp"

#include <algorithm>
#include <numeric>

#include "warpft/format.hpp"
#include "warpft/parallel.hpp"

namespace warpft {

namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846264338327950288;

const GaussLegendre& gl16() {
  static const GaussLegendre g(16);
  return g;
}

std::pair<double, double> product_support(const Prototype& th, double z) {
  const auto [a, b] = th.effective_support(1e-16);
  return {std::max(a, a + z), std::min(b, b + z)};
}

// composite Gauss-Legendre nodes and weights on [-h, h]
void composite_rule(double h, int panels, int nodes, std::vector<double>& x, std::vector<double>& w) {
  const GaussLegendre g(nodes);
  x.clear();
  w.clear();
  const double width = 2.0 * h / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -h + width * p, m = a + 0.5 * width;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      x.push_back(m + 0.5 * width * g.x[i]);
      w.push_back(0.5 * width * g.w[i]);
    }
  }
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// m-th derivative of theta(s) theta(s - z)
double product_derivative(const Prototype& th, double z, double s, int m) {
  double acc = 0.0;
  for (int j = 0; j <= m; ++j) acc += binom(m, j) * eval_prototype(th, s, j) * eval_prototype(th, s - z, m - j);
  return acc;
}

double abs_integral(const Prototype& th, double z, const std::function<double(double)>& fn) {
  const auto [lo, hi] = product_support(th, z);
  if (!(hi > lo)) return 0.0;
  QuadratureSpec qs;
  qs.panel_tol = 1e-9;
  return integrate<double>(fn, lo, hi, qs, {th.center, th.center + z}).value;
}

struct TailParts {
  double eta_tail = 0.0;
  double z_tail = 0.0;
};

// c_1(z) and the L1_w bound entering the truncation-tail estimate
struct DecayConstants {
  double C = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
};

double cn_of(const WarpingFunction& F, const Prototype& th, int n, double Cn, double C, double z) {
  double best = 0.0;
  for (int k = 0; k <= n; ++k)
    best = std::max(best, abs_integral(th, z, [&](double s) {
                      return std::pow(weight_w(F, -s), n) * std::abs(product_derivative(th, z, s, k + 1));
                    }));
  return Cn * std::pow(C, n) * best;
}

double c1_of(const WarpingFunction& F, const Prototype& th, const DecayConstants& dc, double z) {
  return cn_of(F, th, 1, dc.C1, dc.C, z);
}

double l1w_of(const WarpingFunction& F, const Prototype& th, double z) {
  return abs_integral(th, z, [&](double s) { return weight_w(F, s) * std::abs(product_derivative(th, z, s, 0)); });
}

TailParts tail_estimate(const WarpingFunction& F, const Prototype& th, const KernelEvalSpec& spec, double u, double xi,
                        const std::vector<double>& zx, const std::vector<double>& zw, double A) {
  DecayConstants dc;
  dc.C = check_quasi_submultiplicative(F).C;
  dc.C1 = stationary_phase_Cn(F, 1);
  dc.C2 = stationary_phase_Cn(F, 2);
  const double wu = weight_w(F, u);
  const double x = eval_inverse(F, u);
  const double H = spec.eta_half;
  auto m_at = [&](double z, double eta) {
    return weight_m(spec.m1, spec.m2, x, eval_inverse(F, u + z), xi, xi - eta / wu);
  };
  std::vector<double> part(zx.size(), 0.0);
  parallel_for(zx.size(), [&](std::size_t i) {
    const double z = zx[i];
    const double cx = std::sqrt(weight_w(F, u + z) / wu);
    const double medge = std::max(m_at(z, H), m_at(z, -H));
    double bound = c1_of(F, th, dc, z) / (kPi * kPi * H);
    const auto [lo, hi] = product_support(th, z);
    if (F.weight_smooth() || !(lo + u < 0.0 && hi + u > 0.0))
      bound = std::min(bound, 3.0 * cn_of(F, th, 2, dc.C2, dc.C, z) / (8.0 * kPi * kPi * kPi * H * H));
    part[i] = zw[i] * cx * medge * bound;
  });
  TailParts t;
  for (double v : part) t.eta_tail += v;
  t.eta_tail /= A;

  const auto [a, b] = th.effective_support(1e-16);
  const double width = b - a;
  const double Z = spec.z_half;
  if (Z < width) {
    std::vector<double> gx, gw;
    composite_rule(0.5 * (width - Z), 8, 16, gx, gw);
    double acc = 0.0;
    for (int side : {-1, 1})
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double z = side * (0.5 * (Z + width) + gx[i]);
        const double Az = dc.C * l1w_of(F, th, z);
        const double Bz = 2.0 * c1_of(F, th, dc, z) / (4.0 * kPi * kPi);
        acc += gw[i] * std::sqrt(weight_w(F, u + z) / wu) * m_at(z, 0.0) * 4.0 * std::sqrt(Az * Bz);
      }
    t.z_tail = acc / A;
  }
  return t;
}

double theta_energy(const Prototype& th) {
  const double n = l2_norm(th);
  return n * n;
}

// A^{-1} K(x, xi; y, omega) on the uniform inner rule
cd kernel_fast(const WarpingFunction& F, const Prototype& th, double A, double x, double xi, double y, double omega) {
  const double u = eval(F, x);
  const double z = eval(F, y) - u;
  return std::sqrt(weight_w(F, u) / weight_w(F, u + z)) * warped_inner(F, th, u, z, omega - xi) / A;
}

}  // namespace

void KernelEvalSpec::validate() const {
  require(z_half > 0.0 && eta_half > 0.0, ErrorKind::Config, "kernel spec: half-widths must be positive");
  require(z_panels >= 1 && eta_panels >= 1 && nodes >= 1, ErrorKind::Config, "kernel spec: empty rule");
  require(z_panels * nodes >= 16 && eta_panels * nodes >= 16, ErrorKind::Config,
          "kernel spec: at least 16 nodes per axis are required");
  require(inner_oversample >= 8, ErrorKind::Config, "kernel spec: inner oversampling must be at least 8");
  require(p >= 0, ErrorKind::Config, "kernel spec: p must be nonnegative");
}

double weight_m(const WeightSpec& m1, const WeightSpec& m2, double x, double y, double xi, double omega) {
  const double a = m1(x) * m2(xi);
  const double b = m1(y) * m2(omega);
  return std::max(a / b, b / a);
}

std::complex<double> gramian(const WarpingFunction& F, const Prototype& theta, double x, double xi, double y,
                             double omega, const QuadratureSpec& quad) {
  require(F.in_domain(x) && F.in_domain(y), ErrorKind::Domain, "gramian: frequency outside the warp domain");
  const double u = eval(F, x);
  const double z = eval(F, y) - u;
  const double nu = omega - xi;
  const auto [lo, hi] = product_support(theta, z);
  if (!(hi > lo)) return {0.0, 0.0};
  const double wu = weight_w(F, u);
  const double x0 = eval_inverse(F, u);
  const double ph0 = -2.0 * kPi * std::fmod(nu * x0, 1.0);
  auto f = [&](double s) -> cd {
    const double t = eval_prototype(theta, s) * eval_prototype(theta, s - z);
    if (t == 0.0) return {0.0, 0.0};
    const double ph = -2.0 * kPi * nu * (eval_inverse(F, s + u) - x0);
    return (weight_w(F, s + u) / wu) * t * std::polar(1.0, ph);
  };
  std::vector<double> br{theta.center, theta.center + z};
  if (!F.weight_smooth()) br.push_back(-u);
  const auto q = integrate<cd>(f, lo, hi, quad, br);
  if (!q.converged)
    fail(ErrorKind::Numeric, "gramian: quadrature did not converge (estimate " + fmt(q.value) + ", error " +
                                 fmt(q.error) + ", " + std::to_string(q.panels) + " panels)");
  return std::sqrt(wu / weight_w(F, u + z)) * q.value * std::polar(1.0, ph0) / theta_energy(theta);
}

std::complex<double> warped_inner(const WarpingFunction& F, const Prototype& theta, double u, double z, double nu,
                                  int oversample, int min_panels) {
  const auto [lo, hi] = product_support(theta, z);
  if (!(hi > lo)) return {0.0, 0.0};
  const double wu = weight_w(F, u);
  const double x0 = eval_inverse(F, u);
  const double cycles = std::abs(nu) * std::abs(eval_inverse(F, hi + u) - eval_inverse(F, lo + u));
  const GaussLegendre& g = gl16();
  const double want = std::ceil(cycles * oversample / static_cast<double>(g.x.size()));
  const int panels = static_cast<int>(std::min(65536.0, std::max(static_cast<double>(min_panels), want)));
  const double width = (hi - lo) / panels;
  cd acc(0.0, 0.0);
  for (int p = 0; p < panels; ++p) {
    const double m = lo + width * (p + 0.5);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double s = m + 0.5 * width * g.x[i];
      const double t = eval_prototype(theta, s) * eval_prototype(theta, s - z);
      if (t == 0.0) continue;
      const double ph = -2.0 * kPi * nu * (eval_inverse(F, s + u) - x0);
      acc += g.w[i] * (weight_w(F, s + u) / wu) * t * std::polar(1.0, ph);
    }
  }
  return acc * (0.5 * width) * std::polar(1.0, -2.0 * kPi * std::fmod(nu * x0, 1.0));
}

KernelNormResult kernel_norm_I(const WarpingFunction& F, const Prototype& theta, const KernelEvalSpec& spec, double u,
                               double xi) {
  spec.validate();
  require(F.kernel_eligible(), ErrorKind::Capability, "kernel_norm_I: " + F.name() + " is kernel-ineligible");
  const double A = theta_energy(theta);
  const double wu = weight_w(F, u);
  const double x = eval_inverse(F, u);
  std::vector<double> zx, zw, ex, ew;
  composite_rule(spec.z_half, spec.z_panels, spec.nodes, zx, zw);
  composite_rule(spec.eta_half, spec.eta_panels, spec.nodes, ex, ew);
  std::vector<double> row(zx.size(), 0.0);
  parallel_for(zx.size(), [&](std::size_t i) {
    const double z = zx[i];
    const double cx = std::sqrt(weight_w(F, u + z) / wu);
    const double y = eval_inverse(F, u + z);
    double acc = 0.0;
    for (std::size_t j = 0; j < ex.size(); ++j) {
      const double eta = ex[j];
      const double mt = weight_m(spec.m1, spec.m2, x, y, xi, xi - eta / wu);
      acc += ew[j] * mt * std::abs(warped_inner(F, theta, u, z, eta / wu, spec.inner_oversample, spec.inner_min_panels));
    }
    row[i] = zw[i] * cx * acc;
  });
  KernelNormResult r;
  for (double v : row) r.value += v;
  r.value /= A;
  r.nodes = zx.size() * ex.size();
  const TailParts t = tail_estimate(F, theta, spec, u, xi, zx, zw, A);
  r.tail_estimate = t.eta_tail + t.z_tail;
  r.inconclusive = r.tail_estimate > 0.1 * r.value;
  if (r.inconclusive) r.note = "truncation tail estimate exceeds 10% of the computed value";
  return r;
}

double stationary_phase_Cn(const WarpingFunction& F, int n) {
  require(n >= 0 && n <= 2, ErrorKind::Capability, "stationary_phase_Cn: only n <= 2 is available");
  if (n == 0) return 1.0;
  double best = 1.0;
  for (double s : symmetric_grid(20.0, 4001)) {
    const double w = weight_w(F, s);
    const double g1 = weight_w(F, s, 1) / w;
    if (n == 1) {
      best = std::max(best, std::abs(g1));
    } else {
      const double g2 = weight_w(F, s, 2) / w;
      best = std::max({best, 3.0 * std::abs(g1), std::abs(3.0 * g1 * g1 - g2)});
    }
  }
  return best;
}

bool StatPhaseReport::all_pass() const {
  if (!eligible) return false;
  for (const auto& p : points)
    if (!p.pass || !p.l1_pass) return false;
  return slope_pass;
}

StatPhaseReport stationary_phase_check(const WarpingFunction& F, const Prototype& theta, int n, double u, double z,
                                       const std::vector<double>& eta_grid) {
  require(n >= 0 && n <= 2, ErrorKind::Capability, "stationary_phase_check: n must be 0, 1 or 2");
  require(n + 1 <= theta.max_derivative_order(), ErrorKind::Capability,
          "stationary_phase_check: prototype derivatives of order n+1 unavailable");
  StatPhaseReport rep;
  rep.n = n;
  if (!F.kernel_eligible()) {
    rep.eligible = false;
    rep.reason = F.name() + " is kernel-ineligible";
  }
  const auto [lo, hi] = product_support(theta, z);
  if (n == 2 && !F.weight_smooth() && lo + u < 0.0 && hi + u > 0.0) {
    rep.eligible = false;
    rep.reason = "w' has a kink inside the shifted support";
  }
  rep.C = check_quasi_submultiplicative(F).C;
  rep.Cn = stationary_phase_Cn(F, n);
  rep.cn = cn_of(F, theta, n, rep.Cn, rep.C, z);
  rep.l1w = l1w_of(F, theta, z);
  const double wu = weight_w(F, u);
  std::vector<double> lx, ly;
  for (double eta : eta_grid) {
    StatPhasePoint p;
    p.eta = eta;
    p.lhs = std::abs(warped_inner(F, theta, u, z, eta / wu, 32, 64));
    p.rhs = eta == 0.0 ? std::numeric_limits<double>::infinity()
                       : (n + 1) * rep.cn / std::pow(2.0 * kPi * std::abs(eta), n + 1);
    p.pass = std::abs(eta) < 1.0 || p.lhs <= p.rhs;
    p.l1_pass = p.lhs <= rep.C * rep.l1w * (1.0 + 1e-12);
    rep.points.push_back(p);
    if (std::abs(eta) >= 4.0 && std::abs(eta) <= 64.0 && p.lhs > 0.0) {
      lx.push_back(std::log(std::abs(eta)));
      ly.push_back(std::log(p.lhs));
    }
  }
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    rep.slope_pass = rep.slope <= -(n + 1) + 0.1;
  }
  return rep;
}

double oscillation(const WarpingFunction& F, const Prototype& theta, double delta, bool gamma_on, double x, double xi,
                   double y, double omega, int q, double time_scale) {
  require(F.kernel_eligible(), ErrorKind::Capability, "oscillation: " + F.name() + " is kernel-ineligible");
  if (q <= 1) return 0.0;
  const double A = theta_energy(theta);
  const cd K0 = kernel_fast(F, theta, A, x, xi, y, omega);
  double sup = 0.0;
  for (const CoverElement& e : q_set_elements(F, y, omega, delta, time_scale)) {
    const auto fz = linspace(e.f_lo, e.f_hi, static_cast<std::size_t>(q));
    const auto te = linspace(e.t_lo, e.t_hi, static_cast<std::size_t>(q));
    for (double zf : fz)
      for (double eta : te) {
        const cd G = gamma_on ? std::polar(1.0, 2.0 * kPi * (eta - omega) * y) : cd(1.0, 0.0);
        sup = std::max(sup, std::abs(K0 - G * kernel_fast(F, theta, A, x, xi, zf, eta)));
      }
  }
  return sup;
}

OscNormResult osc_norm_estimate(const WarpingFunction& F, const Prototype& theta, double delta,
                                const KernelEvalSpec& spec, bool gamma_on,
                                const std::vector<std::pair<double, double>>& probes, int q, double time_scale) {
  spec.validate();
  require(F.kernel_eligible(), ErrorKind::Capability, "osc_norm_estimate: " + F.name() + " is kernel-ineligible");
  require(!probes.empty(), ErrorKind::Config, "osc_norm_estimate: empty probe set");
  const double A = theta_energy(theta);
  std::vector<double> zx, zw, ex, ew;
  composite_rule(spec.z_half, spec.z_panels, spec.nodes, zx, zw);
  composite_rule(spec.eta_half, spec.eta_panels, spec.nodes, ex, ew);
  OscNormResult res;
  for (const auto& [u, xi] : probes) {
    const double wu = weight_w(F, u);
    const double x = eval_inverse(F, u);
    std::vector<double> row(zx.size(), 0.0);
    parallel_for(zx.size(), [&](std::size_t i) {
      const double z = zx[i];
      const double y = eval_inverse(F, u + z);
      if (!F.in_domain(y)) return;
      const double jac = weight_w(F, u + z) / wu;
      double acc = 0.0;
      for (std::size_t j = 0; j < ex.size(); ++j) {
        const double omega = xi - ex[j] / wu;
        const double mt = weight_m(spec.m1, spec.m2, x, y, xi, omega);
        acc += ew[j] * mt * oscillation(F, theta, delta, gamma_on, x, xi, y, omega, q, time_scale);
      }
      row[i] = zw[i] * jac * acc;
    });
    double v = 0.0;
    for (double r : row) v += r;
    res.per_probe.push_back(v);
    res.value = std::max(res.value, v);
    const TailParts t = tail_estimate(F, theta, spec, u, xi, zx, zw, A);
    res.tail_estimate = std::max(res.tail_estimate, 2.0 * (t.eta_tail + t.z_tail));
  }
  res.inconclusive = res.tail_estimate > 0.1 * res.value;
  return res;
}

}  // namespace warpft
