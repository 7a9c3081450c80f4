#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "warpft/prototype.hpp"
#include "warpft/warping.hpp"

namespace warpft {

/// DFT grid.  Bin j has frequency j*fs/N for j <= N/2 and (j-N)*fs/N above,
/// so frequencies lie in (-fs/2, fs/2].  Positions p = 0..N-1 enumerate the
/// bins in increasing frequency order.
struct SignalGrid {
  std::size_t N = 1024;
  double fs = 1.0;

  static SignalGrid make(std::size_t N, double fs);
  double spacing() const { return fs / static_cast<double>(N); }
  double bin_freq(std::size_t j) const;
  std::size_t bin_of_position(std::size_t p) const { return (p + N / 2 + 1) % N; }
  std::size_t position_of_bin(std::size_t j) const { return (j + N / 2 - 1) % N; }
  double position_freq(std::size_t p) const { return (static_cast<double>(p) - static_cast<double>(N / 2 - 1)) * spacing(); }
  /// Half-line warps use (0, fs/2] only: DC and negative bins are inactive.
  bool active(std::size_t j, Domain D) const;
  double lowest_active(Domain D) const;
  double highest_active() const { return static_cast<double>(N / 2) * spacing(); }
};

struct Channel {
  long l = 0;
  double center_hz = 0.0;   // x_l = F^{-1}(delta (l + 1/2))
  double warped_lo = 0.0;   // delta l
  double warped_hi = 0.0;   // delta (l + 1)
  double bandwidth_hz = 0.0;  // |I_l| = F^{-1}(delta (l+1)) - F^{-1}(delta l)
  double time_hop = 0.0;      // tau_l = time_scale * delta^2 / |I_l|   [s]
  std::size_t hop_samples = 1;  // n_l, divides N
  std::size_t frames(std::size_t N) const { return (N + hop_samples - 1) / hop_samples; }
};

/// Sampled frequency response over a contiguous run of positions.
struct Atom {
  std::size_t first = 0;  // first retained position
  std::vector<double> values;
  double peak = 0.0;
  std::size_t peak_position = 0;
  std::size_t size() const { return values.size(); }
  double support_hz(const SignalGrid& g) const { return static_cast<double>(values.size()) * g.spacing(); }
};

/// sqrt(F'(x)) theta(F(xi) - F(x)), zero for xi outside D.
double atom_value(const WarpingFunction& F, const Prototype& theta, double x, double xi);

/// Hop rounding: max(1, round(tau fs)), lowered to the nearest power of two so
/// that the frame lattice divides N.
std::size_t hop_samples_for(double tau, double fs, std::size_t N);

std::vector<Channel> design_channels(const WarpingFunction& F, double delta, const SignalGrid& grid,
                                     double time_scale = 1.0);

/// Atom over all bins, truncated below 1e-8 of its peak.
Atom build_atom(const WarpingFunction& F, const Prototype& theta, double x, const SignalGrid& grid,
                double threshold = 1e-8);

struct SystemParams {
  WarpingFunction warp = WarpingFunction::linear(1.0);
  Prototype prototype = Prototype::gaussian(1.0);
  bool normalize = true;
  double delta = 1.0;
  SignalGrid grid{};
  double time_scale = 1.0;
};

struct PainlessReport {
  bool painless = true;
  std::vector<std::size_t> violating;  // channel indices
  std::string summary() const;
};

struct WarpedSystem {
  SystemParams params;
  Prototype theta;  // normalized when params.normalize
  std::vector<Channel> channels;
  std::vector<Atom> atoms;
  std::size_t dropped_channels = 0;
  PainlessReport painless;

  const WarpingFunction& warp() const { return params.warp; }
  const SignalGrid& grid() const { return params.grid; }
  double delta() const { return params.delta; }
  std::size_t size() const { return channels.size(); }
  /// Atom sampled at bin j (0 outside the retained support).
  double atom_at_bin(std::size_t l, std::size_t j) const;
  Eigen::VectorXd atom_dense(std::size_t l) const;  // indexed by bin
  Eigen::Matrix<bool, Eigen::Dynamic, 1> active_mask() const;
};

WarpedSystem build_system(const SystemParams& params);

PainlessReport painless_check(const WarpedSystem& sys);

/// sum_j g_l1[j] conj(g_l2[j]) fs/N
std::complex<double> atom_overlap(const WarpedSystem& sys, std::size_t l1, std::size_t l2);

/// S[j] = sum_l |g_l[j]|^2 / tau_l  (tight-frame witness)
Eigen::VectorXd channel_sum(const WarpedSystem& sys);
/// D[j] = sum_l |g_l[j]|^2 / n_l, the diagonal of the frame operator in the painless case.
Eigen::VectorXd frame_diagonal(const WarpedSystem& sys);

/// max S / min S over the bins with frequency in [f_lo, f_hi].
double channel_sum_ratio(const WarpedSystem& sys, double f_lo, double f_hi);

}  // namespace warpft
