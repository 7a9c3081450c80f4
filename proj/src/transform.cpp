#include "warpft/transform.hpp"

#include <unsupported/Eigen/FFT>

#include <fstream>
#include <random>

#include "warpft/format.hpp"
#include "warpft/parallel.hpp"

namespace warpft {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<cd> fft_fwd(const std::vector<cd>& in) {
  if (in.size() <= 1) return in;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cd> out;
  fft.fwd(out, in);
  return out;
}

std::vector<cd> fft_inv(const std::vector<cd>& in) {
  if (in.size() <= 1) return in;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cd> out;
  fft.inv(out, in);
  return out;
}

std::vector<cd> to_vec(const Signal& f) { return std::vector<cd>(f.data(), f.data() + f.size()); }

Signal to_signal(const std::vector<cd>& v, double scale) {
  Signal s(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) s(static_cast<Eigen::Index>(i)) = v[i] * scale;
  return s;
}

void check_length(const Signal& f, const WarpedSystem& sys) {
  require(static_cast<std::size_t>(f.size()) == sys.grid().N, ErrorKind::Shape,
          "signal length " + std::to_string(f.size()) + " does not match system length " +
              std::to_string(sys.grid().N));
}

// sum_l g_l[j] FFT_M(c_l)[j mod M], in the frequency domain.
std::vector<cd> adjoint_hat(const Coefficients& c, const WarpedSystem& sys) {
  check_compatible(c, sys);
  const SignalGrid& g = sys.grid();
  std::vector<std::vector<cd>> part(sys.size());
  parallel_for(sys.size(), [&](std::size_t l) {
    const Atom& a = sys.atoms[l];
    const std::size_t M = g.N / sys.channels[l].hop_samples;
    const auto C = fft_fwd(to_vec(c.channels[l].values));
    part[l].resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t j = g.bin_of_position(a.first + i);
      part[l][i] = a.values[i] * C[j % M];
    }
  });
  std::vector<cd> acc(g.N, cd(0.0, 0.0));
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const Atom& a = sys.atoms[l];
    for (std::size_t i = 0; i < a.size(); ++i) acc[g.bin_of_position(a.first + i)] += part[l][i];
  }
  return acc;
}

}  // namespace

std::size_t Coefficients::total_frames() const {
  std::size_t n = 0;
  for (const auto& ch : channels) n += static_cast<std::size_t>(ch.values.size());
  return n;
}

double Coefficients::max_abs() const {
  double m = 0.0;
  for (const auto& ch : channels)
    if (ch.values.size() > 0) m = std::max(m, ch.values.cwiseAbs().maxCoeff());
  return m;
}

Coefficients zero_coefficients(const WarpedSystem& sys) {
  Coefficients c;
  for (const auto& ch : sys.channels) {
    ChannelCoefficients cc;
    cc.center_hz = ch.center_hz;
    cc.hop_seconds = static_cast<double>(ch.hop_samples) / sys.grid().fs;
    cc.values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.grid().N / ch.hop_samples));
    c.channels.push_back(std::move(cc));
  }
  return c;
}

void check_compatible(const Coefficients& c, const WarpedSystem& sys) {
  require(c.size() == sys.size(), ErrorKind::Shape,
          "coefficient channel count " + std::to_string(c.size()) + " does not match system (" +
              std::to_string(sys.size()) + ")");
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const std::size_t frames = sys.grid().N / sys.channels[l].hop_samples;
    require(static_cast<std::size_t>(c.channels[l].values.size()) == frames, ErrorKind::Shape,
            "channel " + std::to_string(l) + ": frame count mismatch");
  }
}

Coefficients analyze(const Signal& f, const WarpedSystem& sys) {
  check_length(f, sys);
  const SignalGrid& g = sys.grid();
  const auto fhat = fft_fwd(to_vec(f));
  Coefficients out = zero_coefficients(sys);
  const double inv_n = 1.0 / static_cast<double>(g.N);
  parallel_for(sys.size(), [&](std::size_t l) {
    const Atom& a = sys.atoms[l];
    const std::size_t M = g.N / sys.channels[l].hop_samples;
    std::vector<cd> buf(M, cd(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t j = g.bin_of_position(a.first + i);
      buf[j % M] += fhat[j] * a.values[i];
    }
    out.channels[l].values = to_signal(fft_inv(buf), inv_n);
  });
  return out;
}

std::complex<double> coefficient_direct(const Signal& f, const WarpedSystem& sys, std::size_t l, std::size_t k) {
  check_length(f, sys);
  require(l < sys.size(), ErrorKind::Shape, "coefficient_direct: channel out of range");
  const SignalGrid& g = sys.grid();
  const std::size_t n = sys.channels[l].hop_samples;
  require(k < g.N / n, ErrorKind::Shape, "coefficient_direct: frame out of range");
  const Atom& a = sys.atoms[l];
  cd acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t j = g.bin_of_position(a.first + i);
    cd fj(0.0, 0.0);
    for (std::size_t m = 0; m < g.N; ++m) {
      const std::size_t ph = (j * m) % g.N;
      fj += f(static_cast<Eigen::Index>(m)) * std::polar(1.0, -kTwoPi * static_cast<double>(ph) / static_cast<double>(g.N));
    }
    const std::size_t ph = (j * ((k * n) % g.N)) % g.N;
    acc += fj * a.values[i] * std::polar(1.0, kTwoPi * static_cast<double>(ph) / static_cast<double>(g.N));
  }
  return acc / static_cast<double>(g.N);
}

Signal adjoint(const Coefficients& c, const WarpedSystem& sys) {
  return to_signal(fft_inv(adjoint_hat(c, sys)), 1.0 / static_cast<double>(sys.grid().N));
}

Signal frame_operator(const Signal& f, const WarpedSystem& sys) { return adjoint(analyze(f, sys), sys); }

Signal synthesize(const Coefficients& c, const WarpedSystem& sys) {
  if (!sys.painless.painless)
    fail(ErrorKind::Capability, "synthesize: system is not painless (" + sys.painless.summary() +
                                    "); use a smaller delta or the iterative solver");
  const SignalGrid& g = sys.grid();
  const Eigen::VectorXd D = frame_diagonal(sys);
  const Domain dom = sys.warp().domain();
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    if (!g.active(j, dom)) continue;
    dmin = std::min(dmin, D(static_cast<Eigen::Index>(j)));
    dmax = std::max(dmax, D(static_cast<Eigen::Index>(j)));
  }
  if (!(dmin >= 1e-12 * dmax) || !(dmax > 0.0))
    fail(ErrorKind::Numeric, "synthesize: ill-conditioned frame diagonal (min " + fmt(dmin) + ", max " + fmt(dmax) + ")");
  auto ahat = adjoint_hat(c, sys);
  for (std::size_t j = 0; j < g.N; ++j)
    ahat[j] = g.active(j, dom) ? ahat[j] / D(static_cast<Eigen::Index>(j)) : cd(0.0, 0.0);
  return to_signal(fft_inv(ahat), 1.0 / static_cast<double>(g.N));
}

IterativeResult synthesize_iterative(const Coefficients& c, const WarpedSystem& sys, double tol, int max_iter) {
  const Signal b = adjoint(c, sys);
  IterativeResult res;
  res.signal = Signal::Zero(b.size());
  const double bn = b.norm();
  if (bn == 0.0) {
    res.converged = true;
    return res;
  }
  Signal r = b, p = b;
  double rr = r.squaredNorm();
  for (int it = 1; it <= max_iter; ++it) {
    const Signal Ap = frame_operator(p, sys);
    const double pAp = p.dot(Ap).real();
    if (!(pAp > 0.0)) break;
    const double alpha = rr / pAp;
    res.signal += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    res.iterations = it;
    res.relative_residual = std::sqrt(rr_new) / bn;
    if (res.relative_residual <= tol) {
      res.converged = true;
      break;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return res;
}

Signal project_active(const Signal& f, const SignalGrid& grid, Domain D) {
  require(static_cast<std::size_t>(f.size()) == grid.N, ErrorKind::Shape, "project_active: length mismatch");
  if (D == Domain::RealLine) return f;
  auto fh = fft_fwd(to_vec(f));
  for (std::size_t j = 0; j < grid.N; ++j)
    if (!grid.active(j, D)) fh[j] = cd(0.0, 0.0);
  return to_signal(fft_inv(fh), 1.0 / static_cast<double>(grid.N));
}

Signal analytic_projection(const Signal& f, const SignalGrid& grid) {
  return project_active(f, grid, Domain::PositiveHalfLine);
}

std::complex<double> signal_inner(const Signal& f1, const Signal& f2, double fs) {
  require(f1.size() == f2.size(), ErrorKind::Shape, "signal_inner: length mismatch");
  // Eigen's dot conjugates the first argument
  return f2.dot(f1) / fs;
}

double relative_l2_error(const Signal& f, const Signal& ref) {
  require(f.size() == ref.size(), ErrorKind::Shape, "relative_l2_error: length mismatch");
  const double n = ref.norm();
  return n > 0.0 ? (f - ref).norm() / n : (f - ref).norm();
}

MoyalTerms moyal_terms(const Signal& f1, const Signal& f2, const WarpedSystem& s1, const WarpedSystem& s2) {
  const auto& F1 = s1.warp();
  const auto& F2 = s2.warp();
  const bool same = F1.kind == F2.kind && F1.c == F2.c && F1.d == F2.d && F1.l == F2.l && F1.c1 == F2.c1 &&
                    F1.c2 == F2.c2 && s1.delta() == s2.delta() && s1.grid().N == s2.grid().N &&
                    s1.grid().fs == s2.grid().fs && s1.size() == s2.size();
  require(same, ErrorKind::Shape, "moyal: systems differ in warp, delta, grid or channel layout");
  for (std::size_t l = 0; l < s1.size(); ++l)
    require(s1.channels[l].l == s2.channels[l].l && s1.channels[l].hop_samples == s2.channels[l].hop_samples,
            ErrorKind::Shape, "moyal: channel layouts differ");

  const Coefficients c1 = analyze(f1, s1);
  const Coefficients c2 = analyze(f2, s2);
  const double fs = s1.grid().fs;
  const double delta = s1.delta();
  MoyalTerms t;
  t.pairing = cd(0.0, 0.0);
  for (std::size_t l = 0; l < s1.size(); ++l) {
    const double u = delta * (static_cast<double>(s1.channels[l].l) + 0.5);
    const double wx = delta * weight_w(F1, u);
    const double wt = static_cast<double>(s1.channels[l].hop_samples) / fs;
    t.pairing += wx * wt * c2.channels[l].values.dot(c1.channels[l].values);
  }
  const Domain D = F1.domain();
  const Signal p1 = project_active(f1, s1.grid(), D);
  const Signal p2 = project_active(f2, s1.grid(), D);
  t.reference = signal_inner(p1, p2, fs) * admissibility_inner_product(s2.theta, s1.theta);
  t.residual = std::abs(t.pairing - t.reference);
  return t;
}

double moyal_residual(const Signal& f1, const Signal& f2, const WarpedSystem& s1, const WarpedSystem& s2) {
  return moyal_terms(f1, f2, s1, s2).residual;
}

std::pair<double, double> interior_band(const WarpedSystem& sys) {
  const auto [lo, hi] = sys.theta.effective_support(1e-16);
  const double r = std::max(std::abs(lo), std::abs(hi));
  const double d = sys.delta();
  const double u_first = d * (static_cast<double>(sys.channels.front().l) + 0.5);
  const double u_last = d * (static_cast<double>(sys.channels.back().l) + 0.5);
  const double a = eval_inverse(sys.warp(), u_first + r + d);
  const double b = eval_inverse(sys.warp(), u_last - r - d);
  require(b > a, ErrorKind::Degenerate, "interior_band: channels do not cover an interior band");
  return {a, b};
}

Signal random_bandlimited(const SignalGrid& grid, double f_lo, double f_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<cd> spec(grid.N, cd(0.0, 0.0));
  for (std::size_t j = 0; j < grid.N; ++j) {
    const double f = grid.bin_freq(j);
    const double re = nd(rng), im = nd(rng);
    if (f >= f_lo && f <= f_hi) spec[j] = cd(re, im);
  }
  return to_signal(fft_inv(spec), 1.0 / std::sqrt(static_cast<double>(grid.N)));
}

Eigen::VectorXcd stft_reference(const Signal& f, const Eigen::VectorXcd& window, std::size_t hop, long shift) {
  const std::size_t N = static_cast<std::size_t>(f.size());
  require(static_cast<std::size_t>(window.size()) == N, ErrorKind::Shape, "stft_reference: window length mismatch");
  require(hop >= 1 && N % hop == 0, ErrorKind::Shape, "stft_reference: hop must divide N");
  const long Nl = static_cast<long>(N);
  const std::size_t sh = static_cast<std::size_t>(((shift % Nl) + Nl) % Nl);
  std::vector<cd> phase(N);
  for (std::size_t m = 0; m < N; ++m)
    phase[m] = std::polar(1.0, -kTwoPi * static_cast<double>((sh * m) % N) / static_cast<double>(N));
  Eigen::VectorXcd out(static_cast<Eigen::Index>(N / hop));
  parallel_for(N / hop, [&](std::size_t k) {
    cd acc(0.0, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      const std::size_t m = (n + N - (k * hop) % N) % N;
      acc += f(static_cast<Eigen::Index>(n)) * std::conj(window(static_cast<Eigen::Index>(m))) * phase[m];
    }
    out(static_cast<Eigen::Index>(k)) = acc;
  });
  return out;
}

namespace {

long bin_shift(const WarpedSystem& sys, std::size_t l) {
  return std::lround(sys.channels[l].center_hz / sys.grid().spacing());
}

bool is_bin_shift(const WarpedSystem& sys, std::size_t l, std::size_t ref) {
  const Atom& a = sys.atoms[l];
  const Atom& r = sys.atoms[ref];
  if (a.size() != r.size()) return false;
  if (static_cast<long>(a.first) - static_cast<long>(r.first) != bin_shift(sys, l) - bin_shift(sys, ref)) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.values[i] - r.values[i]) > 1e-13 * r.peak) return false;
  return true;
}

}  // namespace

Eigen::VectorXcd stft_window(const WarpedSystem& sys, std::size_t ref_channel) {
  require(ref_channel < sys.size(), ErrorKind::Shape, "stft_window: channel index out of range");
  const SignalGrid& g = sys.grid();
  const std::size_t N = g.N;
  const long b = bin_shift(sys, ref_channel);
  const Atom& a = sys.atoms[ref_channel];
  const long Nl = static_cast<long>(N);
  std::vector<std::pair<std::size_t, double>> taps;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long j = static_cast<long>(g.bin_of_position(a.first + i));
    taps.emplace_back(static_cast<std::size_t>((((j - b) % Nl) + Nl) % Nl), a.values[i]);
  }
  Eigen::VectorXcd h(static_cast<Eigen::Index>(N));
  parallel_for(N, [&](std::size_t m) {
    const std::size_t mm = (N - m) % N;
    cd acc(0.0, 0.0);
    for (const auto& [j, v] : taps)
      acc += v * std::polar(1.0, kTwoPi * static_cast<double>((j * mm) % N) / static_cast<double>(N));
    h(static_cast<Eigen::Index>(m)) = std::conj(acc / static_cast<double>(N));
  });
  return h;
}

StftCheck stft_equivalence(const WarpedSystem& sys, const Signal& f) {
  StftCheck r;
  const SignalGrid& g = sys.grid();
  if (sys.warp().kind != WarpKind::Linear) {
    r.reason = "warp is not linear";
    return r;
  }
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const double b = sys.channels[l].center_hz / g.spacing();
    if (std::abs(b - std::round(b)) > 1e-9) {
      r.reason = "channel centers are not bin-aligned";
      return r;
    }
    if (sys.channels[l].hop_samples != sys.channels[0].hop_samples) {
      r.reason = "channel hops differ";
      return r;
    }
  }
  check_length(f, sys);
  const std::size_t ref = sys.size() / 2;
  const Eigen::VectorXcd h = stft_window(sys, ref);
  const Coefficients c = analyze(f, sys);
  r.applicable = true;
  for (std::size_t l = 0; l < sys.size(); ++l) {
    if (!is_bin_shift(sys, l, ref)) {
      ++r.excluded;
      continue;
    }
    const Eigen::VectorXcd s = stft_reference(f, h, sys.channels[l].hop_samples, bin_shift(sys, l));
    r.max_dev = std::max(r.max_dev, (s - c.channels[l].values).cwiseAbs().maxCoeff());
    ++r.compared;
  }
  if (r.compared == 0) {
    r.applicable = false;
    r.reason = "no channel shares the reference atom shape";
  }
  return r;
}

void export_spectrogram(const Coefficients& c, std::ostream& os) {
  os << "time_s,channel_center_hz,magnitude\n";
  for (const auto& ch : c.channels)
    for (Eigen::Index k = 0; k < ch.values.size(); ++k)
      os << fmt(static_cast<double>(k) * ch.hop_seconds) << ',' << fmt(ch.center_hz) << ','
         << fmt(std::abs(ch.values(k))) << '\n';
}

void export_spectrogram(const Coefficients& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::Internal, "cannot open " + path + " for writing");
  export_spectrogram(c, os);
  require(static_cast<bool>(os), ErrorKind::Internal, "write failed: " + path);
}

}  // namespace warpft
