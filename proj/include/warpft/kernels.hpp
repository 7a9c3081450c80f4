#pragma once

#include <complex>
#include <string>
#include <vector>

#include "warpft/discretization.hpp"
#include "warpft/prototype.hpp"
#include "warpft/quadrature.hpp"
#include "warpft/warping.hpp"

namespace warpft {

/// Truncation box and resolution for the (z, eta) double integrals.  z is the
/// warped offset F(y) - F(x), eta = w(F(x)) (xi - omega).
struct KernelEvalSpec {
  double z_half = 8.0;
  double eta_half = 8.0;
  int z_panels = 16;
  int eta_panels = 16;
  int nodes = 16;             // Gauss-Legendre nodes per panel
  int inner_oversample = 16;  // inner s-rule nodes per oscillation of the phase
  int inner_min_panels = 16;
  WeightSpec m1 = WeightSpec::constant_one();
  WeightSpec m2 = WeightSpec::constant_one();
  WeightSpec v1 = WeightSpec::constant_one();
  WeightSpec v2 = WeightSpec::constant_one();
  int p = 0;
  QuadratureSpec quad{};
  void validate() const;
};

/// m(x,y,xi,omega) = max{ m1(x)m2(xi) / (m1(y)m2(omega)), inverse }.
double weight_m(const WeightSpec& m1, const WeightSpec& m2, double x, double y, double xi, double omega);

/// A^{-1} <g_{y,omega}, g_{x,xi}> with A = ||theta||^2, by adaptive quadrature
/// in the warped variable.  x, y in Hz, xi, omega in s.
std::complex<double> gramian(const WarpingFunction& F, const Prototype& theta, double x, double xi, double y,
                             double omega, const QuadratureSpec& quad = {});

/// int (w(s+u)/w(u)) theta(s) theta(s - z) e^{-2 pi i nu F^{-1}(s+u)} ds on a uniform
/// Gauss-Legendre rule sized by the number of phase oscillations.  u is warped.
std::complex<double> warped_inner(const WarpingFunction& F, const Prototype& theta, double u, double z, double nu,
                                  int oversample = 16, int min_panels = 16);

struct KernelNormResult {
  double value = 0.0;
  double tail_estimate = 0.0;
  bool inconclusive = false;
  std::size_t nodes = 0;
  std::string note;
};

/// Truncated I_{theta,F,m}(x, xi); x is warped (u = F(x)), xi in s.
KernelNormResult kernel_norm_I(const WarpingFunction& F, const Prototype& theta, const KernelEvalSpec& spec, double u,
                               double xi);

struct StatPhasePoint {
  double eta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;     // lhs <= rhs (checked for |eta| >= 1)
  bool l1_pass = true;  // lhs <= C ||f||_{L1_w}
};

struct StatPhaseReport {
  int n = 0;
  bool eligible = true;
  std::string reason;
  double Cn = 0.0;      // max_k sup |P_{n,k} / w^n|
  double C = 0.0;       // quasi-submultiplicativity constant
  double cn = 0.0;      // C_n C^n max_k int w(-s)^n |f^{(k+1)}|
  double l1w = 0.0;     // ||f||_{L1_w}
  std::vector<StatPhasePoint> points;
  double slope = 0.0;   // log-log fit over 4 <= |eta| <= 64
  bool slope_pass = true;
  bool all_pass() const;
};

/// Decay bound of the inner integral for f = theta * theta(. - z) at warped position u.
StatPhaseReport stationary_phase_check(const WarpingFunction& F, const Prototype& theta, int n, double u, double z,
                                       const std::vector<double>& eta_grid);
/// C_n from the explicit n <= 2 expansions, by grid maximisation.
double stationary_phase_Cn(const WarpingFunction& F, int n);

/// sup over a q x q sample of every cover element containing (y, omega) of
/// |K(x,xi;y,omega) - Gamma K(x,xi;z,eta)|, Gamma = e^{2 pi i (eta - omega) y} when gamma_on.
/// q = 1 samples (y, omega) only.
double oscillation(const WarpingFunction& F, const Prototype& theta, double delta, bool gamma_on, double x, double xi,
                   double y, double omega, int q = 3, double time_scale = 1.0);

struct OscNormResult {
  double value = 0.0;             // max over probes
  std::vector<double> per_probe;  // row masses at each probe
  double tail_estimate = 0.0;
  bool inconclusive = false;
};

/// Truncated A_m-type row mass of the oscillation kernel, maximised over probes
/// (u = F(x) warped, xi in s).
OscNormResult osc_norm_estimate(const WarpingFunction& F, const Prototype& theta, double delta,
                                const KernelEvalSpec& spec, bool gamma_on,
                                const std::vector<std::pair<double, double>>& probes, int q = 3,
                                double time_scale = 1.0);

}  // namespace warpft
