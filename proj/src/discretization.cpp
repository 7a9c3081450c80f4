#include "warpft/discretization.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>

#include "warpft/format.hpp"

namespace warpft {

namespace {

constexpr double kIndexTol = 1e-9;

struct RowIndex {
  long l = 0;
  long k_min = 0;
  std::size_t start = 0;
  std::size_t count = 0;
  double tau = 0.0;
};

bool intervals_touch(double a_lo, double a_hi, double b_lo, double b_hi, double tol) {
  return b_lo <= a_hi + tol && a_lo <= b_hi + tol;
}

}  // namespace

double cover_tau(const WarpingFunction& F, double delta, long l, double time_scale) {
  const double w = eval_inverse(F, delta * static_cast<double>(l + 1)) - eval_inverse(F, delta * static_cast<double>(l));
  require(w > 0.0, ErrorKind::Numeric, "cover_tau: interval width underflowed");
  return time_scale * delta * delta / w;
}

CoverElement cover_element(const WarpingFunction& F, double delta, long l, long k, double time_scale) {
  CoverElement e;
  e.l = l;
  e.k = k;
  e.f_lo = eval_inverse(F, delta * static_cast<double>(l));
  e.f_hi = eval_inverse(F, delta * static_cast<double>(l + 1));
  e.tau = time_scale * delta * delta / (e.f_hi - e.f_lo);
  e.t_lo = static_cast<double>(k) * e.tau;
  e.t_hi = static_cast<double>(k + 1) * e.tau;
  return e;
}

Cover induced_cover(const WarpingFunction& F, double delta, double f_lo, double f_hi, double t_lo, double t_hi,
                    double time_scale) {
  require(delta > 0.0 && std::isfinite(delta), ErrorKind::Config, "induced_cover: delta must be positive");
  require(time_scale > 0.0, ErrorKind::Config, "induced_cover: time_scale must be positive");
  require(f_hi > f_lo && t_hi > t_lo, ErrorKind::Config, "induced_cover: empty window");
  if (!F.in_domain(f_lo) || !F.in_domain(f_hi))
    fail(ErrorKind::Domain, "induced_cover: frequency window [" + fmt(f_lo) + ", " + fmt(f_hi) + "] leaves the domain of " +
                                F.name());
  Cover c;
  c.warp = F;
  c.delta = delta;
  c.time_scale = time_scale;
  c.f_window[0] = f_lo;
  c.f_window[1] = f_hi;
  c.t_window[0] = t_lo;
  c.t_window[1] = t_hi;

  const long l0 = static_cast<long>(std::floor(eval(F, f_lo) / delta));
  const long l1 = static_cast<long>(std::ceil(eval(F, f_hi) / delta)) - 1;
  std::vector<RowIndex> rows;
  for (long l = l0; l <= l1; ++l) {
    const double tau = cover_tau(F, delta, l, time_scale);
    const long k0 = static_cast<long>(std::floor(t_lo / tau));
    const long k1 = static_cast<long>(std::ceil(t_hi / tau)) - 1;
    RowIndex r{l, k0, c.elements.size(), static_cast<std::size_t>(std::max(0L, k1 - k0 + 1)), tau};
    if (c.elements.size() + r.count > 5000000)
      fail(ErrorKind::Config, "induced_cover: window too large (more than 5e6 elements)");
    for (long k = k0; k <= k1; ++k) c.elements.push_back(cover_element(F, delta, l, k, time_scale));
    rows.push_back(r);
  }

  c.adjacency.resize(c.elements.size());
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const RowIndex& row = rows[ri];
    for (std::size_t i = 0; i < row.count; ++i) {
      const long k = row.k_min + static_cast<long>(i);
      auto& adj = c.adjacency[row.start + i];
      for (long dr = -1; dr <= 1; ++dr) {
        const long rj = static_cast<long>(ri) + dr;
        if (rj < 0 || rj >= static_cast<long>(rows.size())) continue;
        const RowIndex& other = rows[static_cast<std::size_t>(rj)];
        const double tol = kIndexTol * std::min(row.tau, other.tau) / other.tau;
        long klo = static_cast<long>(std::ceil(static_cast<double>(k) * row.tau / other.tau - 1.0 - tol));
        long khi = static_cast<long>(std::floor(static_cast<double>(k + 1) * row.tau / other.tau + tol));
        klo = std::max(klo, other.k_min);
        khi = std::min(khi, other.k_min + static_cast<long>(other.count) - 1);
        for (long kk = klo; kk <= khi; ++kk) adj.push_back(other.start + static_cast<std::size_t>(kk - other.k_min));
      }
    }
  }
  return c;
}

std::vector<std::size_t> brute_force_neighbor_counts(const Cover& cover) {
  const auto& E = cover.elements;
  std::vector<std::size_t> n(E.size(), 1);
  for (std::size_t i = 0; i < E.size(); ++i)
    for (std::size_t j = i + 1; j < E.size(); ++j) {
      const double ftol = 1e-14 * std::max({std::abs(E[i].f_hi), std::abs(E[j].f_hi), std::abs(E[i].f_lo), 1.0});
      const double ttol = kIndexTol * std::min(E[i].tau, E[j].tau);
      if (intervals_touch(E[i].f_lo, E[i].f_hi, E[j].f_lo, E[j].f_hi, ftol) &&
          intervals_touch(E[i].t_lo, E[i].t_hi, E[j].t_lo, E[j].t_hi, ttol)) {
        ++n[i];
        ++n[j];
      }
    }
  return n;
}

CoverReport check_cover_admissible(const Cover& cover, bool brute_force) {
  CoverReport r;
  const auto& E = cover.elements;
  r.elements = E.size();
  r.min_measure = cover.analytic_measure();
  if (E.empty()) return r;
  const double mu = cover.analytic_measure();
  r.nonvoid_interiors = true;
  for (std::size_t i = 0; i < E.size(); ++i) {
    r.max_neighbors = std::max(r.max_neighbors, cover.adjacency[i].size());
    r.max_measure_deviation = std::max(r.max_measure_deviation, std::abs(E[i].measure() - mu) / mu);
    if (!(E[i].f_hi > E[i].f_lo && E[i].t_hi > E[i].t_lo)) r.nonvoid_interiors = false;
    for (std::size_t j : cover.adjacency[i])
      r.numeric_measure_ratio = std::max(r.numeric_measure_ratio, E[i].measure() / E[j].measure());
  }
  // every element carries the analytic measure time_scale * delta^2
  r.moderateness = mu / mu;
  if (brute_force) {
    const auto n = brute_force_neighbor_counts(cover);
    r.brute_force_max_neighbors = *std::max_element(n.begin(), n.end());
  }

  bool ok = E.front().f_lo <= cover.f_window[0] && E.back().f_hi >= cover.f_window[1];
  std::size_t i = 0;
  long prev_l = E.front().l - 1;
  while (ok && i < E.size()) {
    const long l = E[i].l;
    if (l != prev_l + 1) ok = false;
    std::size_t j = i;
    while (j + 1 < E.size() && E[j + 1].l == l) {
      if (E[j + 1].k != E[j].k + 1) ok = false;
      ++j;
    }
    if (E[i].t_lo > cover.t_window[0] || E[j].t_hi < cover.t_window[1]) ok = false;
    prev_l = l;
    i = j + 1;
  }
  r.covers_window = ok;
  return r;
}

bool Rect::contains(const Rect& r, double rel_slack) const {
  const double sf = rel_slack * std::max({std::abs(f_lo), std::abs(f_hi), f_hi - f_lo});
  const double st = rel_slack * std::max({std::abs(t_lo), std::abs(t_hi), t_hi - t_lo});
  return r.f_lo >= f_lo - sf && r.f_hi <= f_hi + sf && r.t_lo >= t_lo - st && r.t_hi <= t_hi + st;
}

double q_set_constant(const WarpingFunction& F) { return check_quasi_submultiplicative(F, symmetric_grid(20.0)).C; }

Rect q_set_bounds(const WarpingFunction& F, double y, double omega, double delta, double C, double time_scale) {
  const double u = eval(F, y);
  Rect r;
  r.f_lo = eval_inverse(F, u - delta);
  r.f_hi = eval_inverse(F, u + delta);
  const double half = time_scale * C * delta * weight_w(F, delta) / weight_w(F, u);
  r.t_lo = omega - half;
  r.t_hi = omega + half;
  return r;
}

std::vector<CoverElement> q_set_elements(const WarpingFunction& F, double y, double omega, double delta,
                                         double time_scale) {
  const double q = eval(F, y) / delta;
  const long l0 = static_cast<long>(std::floor(q));
  std::vector<long> ls{l0};
  if (q == static_cast<double>(l0)) ls.insert(ls.begin(), l0 - 1);
  std::vector<CoverElement> out;
  for (long l : ls) {
    const double tau = cover_tau(F, delta, l, time_scale);
    const double p = omega / tau;
    const long k0 = static_cast<long>(std::floor(p));
    if (p == static_cast<double>(k0)) out.push_back(cover_element(F, delta, l, k0 - 1, time_scale));
    out.push_back(cover_element(F, delta, l, k0, time_scale));
  }
  return out;
}

Rect bounding_rect(const std::vector<CoverElement>& elems) {
  require(!elems.empty(), ErrorKind::Degenerate, "bounding_rect: no elements");
  Rect r{elems[0].f_lo, elems[0].f_hi, elems[0].t_lo, elems[0].t_hi};
  for (const auto& e : elems) {
    r.f_lo = std::min(r.f_lo, e.f_lo);
    r.f_hi = std::max(r.f_hi, e.f_hi);
    r.t_lo = std::min(r.t_lo, e.t_lo);
    r.t_hi = std::max(r.t_hi, e.t_hi);
  }
  return r;
}

ContainmentResult check_q_containment(const WarpingFunction& F, double delta, std::size_t n, double s_lo, double s_hi,
                                      double t_lo, double t_hi, double time_scale) {
  const double C = q_set_constant(F);
  const auto S = quasi_random(s_lo, s_hi, n, 2);
  const auto T = quasi_random(t_lo, t_hi, n, 3);
  ContainmentResult res;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = eval_inverse(F, S[i]);
    if (!F.in_domain(y)) continue;
    const Rect bound = q_set_bounds(F, y, T[i], delta, C, time_scale);
    const Rect q = bounding_rect(q_set_elements(F, y, T[i], delta, time_scale));
    ++res.tested;
    if (!bound.contains(q, 1e-12)) ++res.failures;
    res.worst_ratio = std::max({res.worst_ratio, (q.f_hi - q.f_lo) / (bound.f_hi - bound.f_lo),
                                (q.t_hi - q.t_lo) / (bound.t_hi - bound.t_lo)});
  }
  return res;
}

double element_weight_sup(const CoverElement& e, const WeightSpec& m1, const WeightSpec& m2) {
  auto extremes = [](const WeightSpec& m, double lo, double hi) {
    double mx = std::max(m(lo), m(hi)), mn = std::min(m(lo), m(hi));
    if (m.symmetric() && lo < 0.0 && hi > 0.0) {
      mx = std::max(mx, m(0.0));
      mn = std::min(mn, m(0.0));
    }
    return std::make_pair(mn, mx);
  };
  const auto [a1, b1] = extremes(m1, e.f_lo, e.f_hi);
  const auto [a2, b2] = extremes(m2, e.t_lo, e.t_hi);
  return (b1 * b2) / (a1 * a2);
}

WeightBound weight_bound_C(const Cover& cover, const WeightSpec& m1, const WeightSpec& m2, const WeightSpec& v1,
                           const WeightSpec& v2) {
  WeightBound wb;
  for (const auto& e : cover.elements) wb.sampled = std::max(wb.sampled, element_weight_sup(e, m1, m2));
  const WarpingFunction& F = cover.warp;
  const double Ls = std::max(std::abs(eval(F, cover.f_window[0])), std::abs(eval(F, cover.f_window[1]))) + cover.delta;
  wb.C1 = check_moderateness(WeightSpec::composed_with_inverse_warp(m1, F), v1, symmetric_grid(std::max(Ls, 1.0))).C;
  const double Lt = std::max(std::abs(cover.t_window[0]), std::abs(cover.t_window[1])) + 1.0;
  wb.C2 = check_moderateness(m2, v2, symmetric_grid(Lt)).C;
  wb.v1_delta = v1(cover.delta);
  wb.V2 = 1.0;
  if (F.domain() == Domain::RealLine) {
    const double w0 = weight_w(F, 0.0);
    for (double u : linspace(-1.0, 1.0, 201)) wb.V2 = std::max(wb.V2, v2(u / w0));
  }
  wb.analytic = wb.C1 * wb.v1_delta * wb.C2 * wb.V2;
  return wb;
}

FrameBounds frame_bounds_painless(const WarpedSystem& sys) {
  if (!sys.painless.painless)
    fail(ErrorKind::Capability, "frame_bounds_painless: " + sys.painless.summary());
  const Eigen::VectorXd D = frame_diagonal(sys);
  FrameBounds fb;
  fb.A = std::numeric_limits<double>::infinity();
  fb.B = 0.0;
  for (std::size_t j = 0; j < sys.grid().N; ++j) {
    if (!sys.grid().active(j, sys.warp().domain())) continue;
    fb.A = std::min(fb.A, D(static_cast<Eigen::Index>(j)));
    fb.B = std::max(fb.B, D(static_cast<Eigen::Index>(j)));
  }
  fb.trial_A = {fb.A};
  fb.trial_B = {fb.B};
  return fb;
}

namespace {

struct LanczosOut {
  double lo = 0.0, hi = 0.0;
  int iterations = 0;
  bool converged = false;
};

LanczosOut lanczos_extremes(const WarpedSystem& sys, std::uint64_t seed, double tol, int max_iter) {
  const std::size_t N = sys.grid().N;
  const Domain D = sys.warp().domain();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Signal v(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) {
    const double re = nd(rng), im = nd(rng);
    v(static_cast<Eigen::Index>(i)) = {re, im};
  }
  v = project_active(v, sys.grid(), D);
  v.normalize();

  std::vector<Signal> V{v};
  std::vector<double> alpha, beta;
  LanczosOut out;
  for (int m = 1; m <= max_iter; ++m) {
    Signal w = frame_operator(V.back(), sys);
    const double a = V.back().dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const Signal& q : V) w -= q.dot(w) * q;
    const double b = w.norm();
    out.iterations = m;

    const Eigen::Index n = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), n);
    Eigen::VectorXd sub = n > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), n - 1)) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& th = es.eigenvalues();
    const auto& Y = es.eigenvectors();
    out.lo = th(0);
    out.hi = th(n - 1);
    const double floor_abs = tol * 1e-6 * std::abs(out.hi);
    const double r_lo = b * std::abs(Y(n - 1, 0));
    const double r_hi = b * std::abs(Y(n - 1, n - 1));
    const bool breakdown = b <= 1e-14 * std::max(std::abs(out.hi), 1e-300);
    if (breakdown || (r_lo <= std::max(tol * std::abs(out.lo), floor_abs) && r_hi <= tol * std::abs(out.hi))) {
      out.converged = true;
      break;
    }
    beta.push_back(b);
    V.push_back(w / b);
  }
  return out;
}

}  // namespace

FrameBounds frame_bounds_power_iteration(const WarpedSystem& sys, int trials, double tol, int max_iter,
                                         std::uint64_t seed) {
  require(trials >= 1, ErrorKind::Config, "frame_bounds_power_iteration: trials must be >= 1");
  FrameBounds fb;
  fb.A = std::numeric_limits<double>::infinity();
  fb.B = 0.0;
  for (int t = 0; t < trials; ++t) {
    const LanczosOut r = lanczos_extremes(sys, seed + static_cast<std::uint64_t>(t) * 7919u, tol, max_iter);
    fb.trial_A.push_back(r.lo);
    fb.trial_B.push_back(r.hi);
    fb.A = std::min(fb.A, r.lo);
    fb.B = std::max(fb.B, r.hi);
    fb.iterations = std::max(fb.iterations, r.iterations);
    if (!r.converged) fb.converged = false;
  }
  if (!fb.converged)
    fb.warning = "iteration cap reached before the residual tolerance; A_est is an upper estimate of the lower bound";
  return fb;
}

double rayleigh_quotient(const WarpedSystem& sys, const Signal& f) {
  const Signal p = project_active(f, sys.grid(), sys.warp().domain());
  const double den = p.squaredNorm();
  require(den > 0.0, ErrorKind::Degenerate, "rayleigh_quotient: signal vanishes on the active band");
  return p.dot(frame_operator(p, sys)).real() / den;
}

void dump_cover(const Cover& cover, std::ostream& os) {
  os << "l,k,f_lo,f_hi,t_lo,t_hi\n";
  for (const auto& e : cover.elements)
    os << e.l << ',' << e.k << ',' << fmt(e.f_lo) << ',' << fmt(e.f_hi) << ',' << fmt(e.t_lo) << ',' << fmt(e.t_hi)
       << '\n';
}

}  // namespace warpft
