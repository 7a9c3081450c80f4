#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "warpft/system.hpp"

namespace warpft {

using Signal = Eigen::VectorXcd;

struct ChannelCoefficients {
  double center_hz = 0.0;
  double hop_seconds = 0.0;  // n_l / fs
  Eigen::VectorXcd values;   // c_l[k], k = 0..frames-1
};

/// One time series per channel, c_l[k] = <f, g_{x_l, k n_l / fs}>.
struct Coefficients {
  std::vector<ChannelCoefficients> channels;
  std::size_t size() const { return channels.size(); }
  std::size_t total_frames() const;
  double max_abs() const;
};

Coefficients zero_coefficients(const WarpedSystem& sys);
/// Channel count, frame counts and centers must agree with sys (ErrorKind::Shape otherwise).
void check_compatible(const Coefficients& c, const WarpedSystem& sys);

/// FFT-based analysis: inverse DFT of f^ g_l, subsampled by n_l.
Coefficients analyze(const Signal& f, const WarpedSystem& sys);
/// (1/N) sum_j f^[j] conj(g_l[j]) e^{2 pi i j k n_l / N}, evaluated directly.
std::complex<double> coefficient_direct(const Signal& f, const WarpedSystem& sys, std::size_t l, std::size_t k);

/// Adjoint of analyze: sum_{l,k} c_l[k] g_{l,k}.
Signal adjoint(const Coefficients& c, const WarpedSystem& sys);
/// Frame operator f -> adjoint(analyze(f)).
Signal frame_operator(const Signal& f, const WarpedSystem& sys);

/// Diagonal painless inverse.  Refuses non-painless systems (Capability) and
/// ill-conditioned diagonals, min D < 1e-12 max D on the active band (Numeric).
Signal synthesize(const Coefficients& c, const WarpedSystem& sys);

struct IterativeResult {
  Signal signal;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients on the frame operator.
IterativeResult synthesize_iterative(const Coefficients& c, const WarpedSystem& sys, double tol = 1e-10,
                                     int max_iter = 500);

/// Zeroes the bins outside the active band of the domain (DC and negative bins on the half-line).
Signal project_active(const Signal& f, const SignalGrid& grid, Domain D);
Signal analytic_projection(const Signal& f, const SignalGrid& grid);

/// <f1, f2> = sum_n f1[n] conj(f2[n]) / fs
std::complex<double> signal_inner(const Signal& f1, const Signal& f2, double fs);
double relative_l2_error(const Signal& f, const Signal& ref);

struct MoyalTerms {
  std::complex<double> pairing;       // sum_l delta w(delta(l+1/2)) sum_k (n_l/fs) c1 conj(c2)
  std::complex<double> reference;     // <f1, f2> <theta2, theta1>
  double residual = 0.0;              // |pairing - reference|
};

MoyalTerms moyal_terms(const Signal& f1, const Signal& f2, const WarpedSystem& s1, const WarpedSystem& s2);
double moyal_residual(const Signal& f1, const Signal& f2, const WarpedSystem& s1, const WarpedSystem& s2);

/// Frequencies (Hz) whose warped neighbourhood is fully covered by channels,
/// with a margin of one prototype support plus one delta step.
std::pair<double, double> interior_band(const WarpedSystem& sys);
/// Random complex spectrum with bins in [f_lo, f_hi] (Hz), unit-variance entries.
Signal random_bandlimited(const SignalGrid& grid, double f_lo, double f_hi, std::uint64_t seed);

/// Direct short-time Fourier coefficients:
///   sum_n f[n] conj(h[(n - k hop) mod N]) e^{-2 pi i shift (n - k hop) / N}.
Eigen::VectorXcd stft_reference(const Signal& f, const Eigen::VectorXcd& window, std::size_t hop, long shift);

/// Time-domain window h with stft_reference(f, h, n_l, b_l) = c_l for a linear,
/// bin-aligned system: h[m] = conj(IDFT(g_ref shifted to baseband)[-m]).
Eigen::VectorXcd stft_window(const WarpedSystem& sys, std::size_t ref_channel);

struct StftCheck {
  bool applicable = false;
  std::string reason;
  std::size_t compared = 0;
  std::size_t excluded = 0;  // channels whose atom is not a bin shift of the reference atom
  double max_dev = 0.0;
};

/// Analysis against the direct STFT with one shared window.
StftCheck stft_equivalence(const WarpedSystem& sys, const Signal& f);

/// CSV with header time_s,channel_center_hz,magnitude.
void export_spectrogram(const Coefficients& c, std::ostream& os);
void export_spectrogram(const Coefficients& c, const std::string& path);

}  // namespace warpft
