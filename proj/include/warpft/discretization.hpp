#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "warpft/system.hpp"
#include "warpft/transform.hpp"
#include "warpft/warping.hpp"

namespace warpft {

/// Closed rectangle I_{F,l} x [k tau_l, (k+1) tau_l] (Hz x s).
struct CoverElement {
  long l = 0;
  long k = 0;
  double f_lo = 0.0, f_hi = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double tau = 0.0;
  double measure() const { return (f_hi - f_lo) * (t_hi - t_lo); }
};

struct Cover {
  WarpingFunction warp = WarpingFunction::linear();
  double delta = 1.0;
  double time_scale = 1.0;
  double f_window[2] = {0.0, 0.0};
  double t_window[2] = {0.0, 0.0};
  std::vector<CoverElement> elements;  // ordered by (l, k)
  std::vector<std::vector<std::size_t>> adjacency;  // includes the element itself
  /// Analytic measure time_scale * delta^2 of every element.
  double analytic_measure() const { return time_scale * delta * delta; }
};

/// Row range and time hop of the induced cover for a given l.
double cover_tau(const WarpingFunction& F, double delta, long l, double time_scale = 1.0);
CoverElement cover_element(const WarpingFunction& F, double delta, long l, long k, double time_scale = 1.0);

/// All elements whose interior meets the window.  Windows reaching outside D are rejected.
Cover induced_cover(const WarpingFunction& F, double delta, double f_lo, double f_hi, double t_lo, double t_hi,
                    double time_scale = 1.0);

/// Pairwise closed-rectangle intersection count (self included), no index arithmetic.
std::vector<std::size_t> brute_force_neighbor_counts(const Cover& cover);

struct CoverReport {
  std::size_t elements = 0;
  std::size_t max_neighbors = 0;
  std::size_t brute_force_max_neighbors = 0;
  double moderateness = 1.0;          // max analytic measure ratio over intersecting pairs
  double numeric_measure_ratio = 1.0; // same with measures recomputed from the endpoints
  double min_measure = 0.0;
  double max_measure_deviation = 0.0; // max |mu - delta^2| / delta^2
  bool covers_window = false;
  bool nonvoid_interiors = false;
};

CoverReport check_cover_admissible(const Cover& cover, bool brute_force = true);

struct Rect {
  double f_lo = 0.0, f_hi = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  bool contains(const Rect& r, double rel_slack = 0.0) const;
};

/// Constant C of the quasi-submultiplicativity w(x+y) <= C w(x) w(y), estimated on symmetric_grid(20).
double q_set_constant(const WarpingFunction& F);
/// I_y x (omega + J_y) with J_y = [-C delta w(delta)/w(F(y)), +...] (scaled by time_scale).
Rect q_set_bounds(const WarpingFunction& F, double y, double omega, double delta, double C, double time_scale = 1.0);
/// Elements of the induced cover containing (y, omega).
std::vector<CoverElement> q_set_elements(const WarpingFunction& F, double y, double omega, double delta,
                                         double time_scale = 1.0);
Rect bounding_rect(const std::vector<CoverElement>& elems);

struct ContainmentResult {
  std::size_t tested = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;  // max over tests of (Q extent / analytic extent) along either axis
};

/// Containment of Q_{y,omega} for n quasi-random points with F(y) in [s_lo, s_hi] and omega in [t_lo, t_hi].
ContainmentResult check_q_containment(const WarpingFunction& F, double delta, std::size_t n, double s_lo, double s_hi,
                                      double t_lo, double t_hi, double time_scale = 1.0);

struct WeightBound {
  double sampled = 0.0;      // max over elements of the corner-sampled sup of m
  double analytic = 0.0;     // C1 v1(delta) C2 V2
  double C1 = 0.0, C2 = 0.0, V2 = 1.0, v1_delta = 1.0;
};

/// C_{m,U}: m1 acts on frequency (Hz), m2 on time (s); v1 is the warped-axis weight with m1 o F^{-1}
/// v1-moderate, v2 the time weight with m2 v2-moderate.
WeightBound weight_bound_C(const Cover& cover, const WeightSpec& m1, const WeightSpec& m2, const WeightSpec& v1,
                           const WeightSpec& v2);
/// Element sup of m by corner sampling (plus 0 for symmetric weights when it lies inside).
double element_weight_sup(const CoverElement& e, const WeightSpec& m1, const WeightSpec& m2);

struct FrameBounds {
  double A = 0.0, B = 0.0;
  bool converged = true;
  int iterations = 0;
  std::vector<double> trial_A, trial_B;
  std::string warning;
  double ratio() const { return A > 0.0 ? B / A : std::numeric_limits<double>::infinity(); }
};

/// min / max of the frame diagonal over the active band (painless systems only).
FrameBounds frame_bounds_painless(const WarpedSystem& sys);
/// Extreme eigenvalues of the frame operator on the active band by Lanczos iteration
/// with full reorthogonalization; residual tolerance tol relative to the Ritz value.
FrameBounds frame_bounds_power_iteration(const WarpedSystem& sys, int trials = 3, double tol = 1e-8,
                                         int max_iter = 200, std::uint64_t seed = 1);
/// <S Pf, Pf> / <Pf, Pf> with P the projection onto the active band.
double rayleigh_quotient(const WarpedSystem& sys, const Signal& f);

/// CSV with header l,k,f_lo,f_hi,t_lo,t_hi.
void dump_cover(const Cover& cover, std::ostream& os);

}  // namespace warpft
