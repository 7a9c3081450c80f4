#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "warpft/discretization.hpp"
#include "warpft/format.hpp"
#include "warpft/kernels.hpp"

using namespace warpft;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

SystemParams make_params(const WarpingFunction& F, const Prototype& th, double delta, std::size_t N, double fs) {
  SystemParams p;
  p.warp = F;
  p.prototype = th;
  p.delta = delta;
  p.grid = SignalGrid::make(N, fs);
  return p;
}

Outcome stft_equivalence_check() {
  const auto p = make_params(WarpingFunction::linear(1.0 / 64), Prototype::gaussian(0.075), 1.0, 1024, 1024.0);
  const WarpedSystem sys = build_system(p);
  const StftCheck r = stft_equivalence(sys, random_bandlimited(p.grid, -512.0, 512.0, 1));
  const bool ok = r.applicable && r.compared == sys.size() && r.max_dev <= 1e-10;
  return {ok, "max_dev " + sci(r.max_dev) + " over " + std::to_string(r.compared) + "/" +
                  std::to_string(sys.size()) + " channels (tol 1e-10)"};
}

Outcome dilation_check() {
  const auto F = WarpingFunction::log();
  const auto p = make_params(F, Prototype::hann_bump(0.5), 0.5, 256, 1000.0);
  const WarpedSystem sys = build_system(p);
  if (sys.size() < 8) return {false, "only " + std::to_string(sys.size()) + " channels"};
  double worst = 0.0;
  for (std::size_t l = 0; l < 8; ++l) {
    const double x = sys.channels[l].center_hz;
    const double peak = sys.atoms[l].peak;
    for (std::size_t j = 1; j <= p.grid.N / 2; ++j) {
      const double ref = std::pow(x, -0.5) * atom_value(F, sys.theta, 1.0, p.grid.bin_freq(j) / x);
      const double got = sys.atom_at_bin(l, j);
      const double dev = got != 0.0 ? std::abs(got - ref) : std::max(0.0, std::abs(ref) - 1e-8 * peak);
      worst = std::max(worst, dev / peak);
    }
  }
  return {worst <= 1e-12, "max relative deviation " + sci(worst) + " over 8 centers (tol 1e-12)"};
}

SystemParams erb_params(double delta) {
  return make_params(WarpingFunction::erb(9.265, 228.8), Prototype::smooth_bump(0.75), delta, 4096, 16000.0);
}

Outcome reconstruction_check() {
  const WarpedSystem sys = build_system(erb_params(0.25));
  if (!sys.painless.painless) return {false, sys.painless.summary()};
  const Signal f = random_bandlimited(sys.grid(), -8000.0, 8000.0, 3);
  const double e = relative_l2_error(synthesize(analyze(f, sys), sys), f);
  return {e <= 1e-10, "delta 0.25, relative L2 error " + sci(e) + " (tol 1e-10)"};
}

Outcome moyal_check() {
  const double deltas[] = {0.5, 0.25, 0.125};
  const WarpedSystem coarse = build_system(erb_params(0.5));
  const auto [lo, hi] = interior_band(coarse);
  const Signal f = random_bandlimited(coarse.grid(), lo, hi, 4);
  const double norm2 = signal_inner(f, f, coarse.grid().fs).real();
  std::string d;
  double prev = 1e300, last = 0.0;
  bool dec = true;
  for (double delta : deltas) {
    const WarpedSystem sys = delta == 0.5 ? coarse : build_system(erb_params(delta));
    const double r = moyal_residual(f, f, sys, sys) / norm2;
    dec = dec && r < prev;
    prev = last = r;
    d += (d.empty() ? "" : ", ") + sci(r);
  }
  return {dec && last <= 1e-2, "relative residuals " + d + (dec ? " decreasing" : " not decreasing") +
                                   ", last <= 1e-2"};
}

Outcome cover_check() {
  struct W {
    WarpingFunction F;
    double f_lo, f_hi, t_lo, t_hi;
  };
  const W ws[] = {{WarpingFunction::linear(1.0), -5.0, 5.0, 0.0, 5.0},
                  {WarpingFunction::log(), 0.5, 40.0, -1.0, 1.0},
                  {WarpingFunction::erb(), -2000.0, 2000.0, 0.0, 0.05},
                  {WarpingFunction::alpha_like(0.5), -30.0, 30.0, -2.0, 2.0}};
  bool ok = true;
  double dev = 0.0;
  std::string nb;
  for (const W& w : ws) {
    const Cover c = induced_cover(w.F, 0.25, w.f_lo, w.f_hi, w.t_lo, w.t_hi);
    const CoverReport r = check_cover_admissible(c);
    dev = std::max(dev, r.max_measure_deviation);
    ok = ok && r.max_measure_deviation <= 1e-12 && r.moderateness == 1.0 && r.max_neighbors == r.brute_force_max_neighbors &&
         r.covers_window;
    nb += (nb.empty() ? "" : ",") + std::to_string(r.max_neighbors) + "=" + std::to_string(r.brute_force_max_neighbors);
  }
  return {ok, "measure deviation " + sci(dev) + ", moderateness 1, neighbors (index=brute) " + nb};
}

Outcome containment_check() {
  std::size_t tested = 0, failures = 0;
  for (const auto& F : {WarpingFunction::linear(1.0), WarpingFunction::log(), WarpingFunction::erb(),
                        WarpingFunction::alpha_like(0.5)}) {
    const ContainmentResult r = check_q_containment(F, 0.25, 100, -3.0, 3.0, -2.0, 2.0);
    tested += r.tested;
    failures += r.failures;
  }
  return {failures == 0 && tested == 400, std::to_string(failures) + " failures in " + std::to_string(tested) + " points"};
}

Outcome stationary_phase_criterion() {
  const Prototype th = normalized(Prototype::smooth_bump(1.0));
  std::vector<double> eta;
  for (double e : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    eta.push_back(-e);
    eta.push_back(e);
  }
  bool ok = true;
  std::string d;
  for (int n = 0; n <= 2; ++n) {
    const StatPhaseReport r = stationary_phase_check(WarpingFunction::log(), th, n, 0.5, 0.3, eta);
    ok = ok && r.all_pass();
    d += (d.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " slope " + sci(r.slope) +
         (r.all_pass() ? " ok" : " failed");
  }
  return {ok, d};
}

Outcome oscillation_check() {
  KernelEvalSpec spec;
  spec.z_panels = 2;
  spec.eta_panels = 2;
  const Prototype th = normalized(Prototype::smooth_bump(0.75));
  double prev = 1e300;
  bool dec = true;
  std::string d;
  std::size_t inconclusive = 0;
  for (double delta : {0.5, 0.25, 0.125}) {
    const OscNormResult r = osc_norm_estimate(WarpingFunction::erb(), th, delta, spec, true, {{1.0, 0.0}, {-3.0, 0.01}});
    dec = dec && r.value < prev;
    prev = r.value;
    inconclusive += r.inconclusive;
    d += (d.empty() ? "" : ", ") + sci(r.value);
  }
  const auto L = WarpingFunction::linear(1.0);
  const Prototype tb = normalized(Prototype::smooth_bump(1.0));
  double first = 0.0;
  bool stuck = true;
  std::string g;
  for (double delta : {0.5, 0.25, 0.125}) {
    const double y = 1.0 / (2.0 * delta);
    const double o = oscillation(L, tb, delta, false, y, y, y, y);
    if (first == 0.0) first = o;
    stuck = stuck && o >= 0.5 * first;
    g += (g.empty() ? "" : ", ") + sci(o);
  }
  return {dec && stuck, "osc norm " + d + (dec ? " decreasing" : " not decreasing") + " (" +
                            std::to_string(inconclusive) + " with loose tail bound); gamma off " + g +
                            (stuck ? " stays above half" : " decays")};
}

Outcome frame_bound_check() {
  const SystemParams ps[] = {
      make_params(WarpingFunction::erb(), Prototype::smooth_bump(0.75), 0.25, 256, 16000.0),
      make_params(WarpingFunction::log(), Prototype::hann_bump(0.5), 0.5, 256, 1000.0),
      make_params(WarpingFunction::alpha_like(0.5), Prototype::smooth_bump(0.75), 0.25, 256, 256.0),
  };
  bool ok = true;
  double worst = 0.0;
  std::size_t systems = 0, quotients = 0, outside = 0;
  for (const auto& p : ps) {
    const WarpedSystem sys = build_system(p);
    if (!sys.painless.painless) continue;
    ++systems;
    const FrameBounds d = frame_bounds_painless(sys);
    const FrameBounds l = frame_bounds_power_iteration(sys);
    worst = std::max({worst, std::abs(l.A - d.A) / d.A, std::abs(l.B - d.B) / d.B});
    for (unsigned s = 0; s < 100; ++s) {
      const double q = rayleigh_quotient(sys, random_bandlimited(p.grid, -p.grid.fs, p.grid.fs, 1000 + s));
      ++quotients;
      outside += q < l.A - 1e-8 || q > l.B + 1e-8;
    }
  }
  ok = systems >= 2 && worst <= 1e-6 && outside == 0;
  return {ok, std::to_string(systems) + " painless systems, bound mismatch " + sci(worst) + " (tol 1e-6), " +
                  std::to_string(outside) + "/" + std::to_string(quotients) + " quotients outside"};
}

Outcome weight_bound_check() {
  const double c1 = 9.265;
  const auto m1 = WeightSpec::polynomial(2.0);
  const auto v1 = WeightSpec::exponential(2.0 / c1);
  const auto one = WeightSpec::constant_one();
  bool ok = true;
  double first = 0.0;
  std::string d;
  for (double delta : {0.5, 0.25, 0.125}) {
    const Cover c = induced_cover(WarpingFunction::erb(), delta, -4000.0, 4000.0, 0.0, 0.01);
    const WeightBound b = weight_bound_C(c, m1, one, v1, one);
    if (first == 0.0) first = b.analytic;
    ok = ok && b.sampled <= b.analytic && b.analytic <= first;
    d += (d.empty() ? "" : ", ") + sci(b.sampled) + "<=" + sci(b.analytic);
  }
  return {ok, "sampled<=analytic " + d};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"STFT equivalence", stft_equivalence_check},
      {"wavelet atom identity", dilation_check},
      {"perfect reconstruction", reconstruction_check},
      {"Moyal trend", moyal_check},
      {"cover measure and admissibility", cover_check},
      {"Q-set containment", containment_check},
      {"stationary-phase bounds", stationary_phase_criterion},
      {"oscillation decay", oscillation_check},
      {"frame-bound cross-validation", frame_bound_check},
      {"weight bound", weight_bound_check},
  };
  int failed = 0, i = 0;
  for (const auto& [name, fn] : criteria) {
    ++i;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %d %s: %s; %s [%.1fs]\n", i, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  }
  std::fflush(stdout);
  return failed ? 1 : 0;
}
