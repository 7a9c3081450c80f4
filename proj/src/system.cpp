#include "warpft/system.hpp"

#include <algorithm>
#include <sstream>

#include "warpft/parallel.hpp"

namespace warpft {

SignalGrid SignalGrid::make(std::size_t N, double fs) {
  require(N >= 16, ErrorKind::Config, "signal length must be at least 16");
  require((N & (N - 1)) == 0, ErrorKind::Config, "signal length must be a power of two");
  require(fs > 0.0 && std::isfinite(fs), ErrorKind::Config, "sample rate must be positive");
  SignalGrid g;
  g.N = N;
  g.fs = fs;
  return g;
}

double SignalGrid::bin_freq(std::size_t j) const {
  const double dj = j <= N / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(N);
  return dj * spacing();
}

bool SignalGrid::active(std::size_t j, Domain D) const {
  if (D == Domain::RealLine) return true;
  return j >= 1 && j <= N / 2;
}

double SignalGrid::lowest_active(Domain D) const {
  return D == Domain::RealLine ? position_freq(0) : spacing();
}

double atom_value(const WarpingFunction& F, const Prototype& theta, double x, double xi) {
  if (!F.in_domain(xi)) return 0.0;
  return std::sqrt(derivative(F, x)) * eval_prototype(theta, eval(F, xi) - eval(F, x));
}

std::size_t hop_samples_for(double tau, double fs, std::size_t N) {
  const double raw = std::round(tau * fs);
  std::size_t n = raw < 1.0 ? 1 : (raw > static_cast<double>(N) ? N : static_cast<std::size_t>(raw));
  std::size_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

std::vector<Channel> design_channels(const WarpingFunction& F, double delta, const SignalGrid& grid,
                                     double time_scale) {
  require(delta > 0.0 && std::isfinite(delta), ErrorKind::Config, "delta must be positive");
  require(time_scale > 0.0, ErrorKind::Config, "time_scale must be positive");
  const Domain D = F.domain();
  const double lo = grid.lowest_active(D), hi = grid.highest_active();
  require(hi > lo, ErrorKind::Config, "empty active frequency range");
  const long lmin = static_cast<long>(std::floor(eval(F, lo) / delta - 0.5)) - 1;
  const long lmax = static_cast<long>(std::ceil(eval(F, hi) / delta - 0.5)) + 1;
  std::vector<Channel> out;
  for (long l = lmin; l <= lmax; ++l) {
    const double x = eval_inverse(F, delta * (static_cast<double>(l) + 0.5));
    if (!(x >= lo && x <= hi)) continue;
    Channel ch;
    ch.l = l;
    ch.center_hz = x;
    ch.warped_lo = delta * static_cast<double>(l);
    ch.warped_hi = delta * static_cast<double>(l + 1);
    ch.bandwidth_hz = eval_inverse(F, ch.warped_hi) - eval_inverse(F, ch.warped_lo);
    require(ch.bandwidth_hz > 0.0, ErrorKind::Numeric, "channel bandwidth underflowed");
    ch.time_hop = time_scale * delta * delta / ch.bandwidth_hz;
    ch.hop_samples = hop_samples_for(ch.time_hop, grid.fs, grid.N);
    out.push_back(ch);
  }
  if (out.size() < 2)
    fail(ErrorKind::Config, "fewer than 2 channels fit the active band (delta = " + std::to_string(delta) + ")");
  return out;
}

Atom build_atom(const WarpingFunction& F, const Prototype& theta, double x, const SignalGrid& grid,
                double threshold) {
  require(F.in_domain(x), ErrorKind::Domain, "build_atom: center outside the warp domain");
  const Domain D = F.domain();
  const auto [s_lo, s_hi] = theta.effective_support(1e-300);
  const double u = eval(F, x);
  const double f_lo = eval_inverse(F, u + s_lo), f_hi = eval_inverse(F, u + s_hi);
  const double df = grid.spacing();
  const double off = static_cast<double>(grid.N / 2 - 1);
  long p0 = static_cast<long>(std::floor(f_lo / df + off)) - 1;
  long p1 = static_cast<long>(std::ceil(f_hi / df + off)) + 1;
  p0 = std::max(p0, 0L);
  p1 = std::min(p1, static_cast<long>(grid.N) - 1);

  std::vector<double> vals;
  if (p1 >= p0) vals.assign(static_cast<std::size_t>(p1 - p0 + 1), 0.0);
  const double amp = std::sqrt(derivative(F, x));
  double peak = 0.0;
  std::size_t peak_pos = 0;
  for (long p = p0; p <= p1; ++p) {
    const double xi = grid.position_freq(static_cast<std::size_t>(p));
    if (D == Domain::PositiveHalfLine && !(xi > 0.0)) continue;
    const double v = amp * eval_prototype(theta, eval(F, xi) - u);
    vals[static_cast<std::size_t>(p - p0)] = v;
    if (std::abs(v) > peak) {
      peak = std::abs(v);
      peak_pos = static_cast<std::size_t>(p);
    }
  }
  if (!(peak > 0.0)) fail(ErrorKind::Degenerate, "build_atom: atom at " + std::to_string(x) + " Hz has no support");
  const double cut = threshold * peak;
  std::size_t a = 0, b = vals.size() - 1;
  while (std::abs(vals[a]) < cut) ++a;
  while (std::abs(vals[b]) < cut) --b;
  Atom atom;
  atom.first = static_cast<std::size_t>(p0) + a;
  atom.values.assign(vals.begin() + static_cast<long>(a), vals.begin() + static_cast<long>(b) + 1);
  for (double& v : atom.values)
    if (std::abs(v) < cut) v = 0.0;
  atom.peak = peak;
  atom.peak_position = peak_pos;
  return atom;
}

std::string PainlessReport::summary() const {
  std::ostringstream os;
  if (painless) {
    os << "painless";
  } else {
    os << "not painless: " << violating.size() << " violating channel(s):";
    for (std::size_t i = 0; i < violating.size() && i < 16; ++i) os << ' ' << violating[i];
    if (violating.size() > 16) os << " ...";
  }
  return os.str();
}

double WarpedSystem::atom_at_bin(std::size_t l, std::size_t j) const {
  const Atom& a = atoms[l];
  const std::size_t p = grid().position_of_bin(j);
  if (p < a.first || p >= a.first + a.size()) return 0.0;
  return a.values[p - a.first];
}

Eigen::VectorXd WarpedSystem::atom_dense(std::size_t l) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid().N));
  const Atom& a = atoms[l];
  for (std::size_t i = 0; i < a.size(); ++i) g(static_cast<Eigen::Index>(grid().bin_of_position(a.first + i))) = a.values[i];
  return g;
}

Eigen::Matrix<bool, Eigen::Dynamic, 1> WarpedSystem::active_mask() const {
  Eigen::Matrix<bool, Eigen::Dynamic, 1> m(static_cast<Eigen::Index>(grid().N));
  for (std::size_t j = 0; j < grid().N; ++j) m(static_cast<Eigen::Index>(j)) = grid().active(j, warp().domain());
  return m;
}

PainlessReport painless_check(const WarpedSystem& sys) {
  PainlessReport rep;
  const SignalGrid& g = sys.grid();
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const Channel& ch = sys.channels[l];
    const bool hz_ok = sys.atoms[l].support_hz(g) <= (1.0 / ch.time_hop) * (1.0 + 1e-12);
    const bool alias_ok = sys.atoms[l].size() <= g.N / ch.hop_samples;
    if (!(hz_ok && alias_ok)) rep.violating.push_back(l);
  }
  rep.painless = rep.violating.empty();
  return rep;
}

WarpedSystem build_system(const SystemParams& params) {
  WarpedSystem sys;
  sys.params = params;
  sys.theta = params.normalize ? normalized(params.prototype) : params.prototype;
  std::vector<Channel> chans = design_channels(params.warp, params.delta, params.grid, params.time_scale);

  std::vector<Atom> atoms(chans.size());
  std::vector<char> ok(chans.size(), 1);
  parallel_for(chans.size(), [&](std::size_t i) {
    try {
      atoms[i] = build_atom(params.warp, sys.theta, chans[i].center_hz, params.grid);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      ok[i] = 0;
    }
  });
  for (std::size_t i = 0; i < chans.size(); ++i) {
    if (ok[i]) {
      sys.channels.push_back(chans[i]);
      sys.atoms.push_back(std::move(atoms[i]));
    } else {
      ++sys.dropped_channels;
    }
  }
  if (sys.channels.size() < 2) fail(ErrorKind::Config, "fewer than 2 channels with nonempty atoms");
  sys.painless = painless_check(sys);
  return sys;
}

std::complex<double> atom_overlap(const WarpedSystem& sys, std::size_t l1, std::size_t l2) {
  require(l1 < sys.size() && l2 < sys.size(), ErrorKind::Shape, "atom_overlap: channel index out of range");
  const Atom& a = sys.atoms[l1];
  const Atom& b = sys.atoms[l2];
  const std::size_t lo = std::max(a.first, b.first);
  const std::size_t hi = std::min(a.first + a.size(), b.first + b.size());
  double acc = 0.0;
  for (std::size_t p = lo; p < hi; ++p) acc += a.values[p - a.first] * b.values[p - b.first];
  return {acc * sys.grid().spacing(), 0.0};
}

namespace {

Eigen::VectorXd weighted_energy(const WarpedSystem& sys, const std::vector<double>& weights) {
  const SignalGrid& g = sys.grid();
  Eigen::VectorXd S = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.N));
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const Atom& a = sys.atoms[l];
    for (std::size_t i = 0; i < a.size(); ++i)
      S(static_cast<Eigen::Index>(g.bin_of_position(a.first + i))) += a.values[i] * a.values[i] * weights[l];
  }
  return S;
}

}  // namespace

Eigen::VectorXd channel_sum(const WarpedSystem& sys) {
  std::vector<double> wts;
  for (const auto& ch : sys.channels) wts.push_back(1.0 / ch.time_hop);
  return weighted_energy(sys, wts);
}

Eigen::VectorXd frame_diagonal(const WarpedSystem& sys) {
  std::vector<double> wts;
  for (const auto& ch : sys.channels) wts.push_back(1.0 / static_cast<double>(ch.hop_samples));
  return weighted_energy(sys, wts);
}

double channel_sum_ratio(const WarpedSystem& sys, double f_lo, double f_hi) {
  const Eigen::VectorXd S = channel_sum(sys);
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (std::size_t j = 0; j < sys.grid().N; ++j) {
    const double f = sys.grid().bin_freq(j);
    if (f < f_lo || f > f_hi) continue;
    mn = std::min(mn, S(static_cast<Eigen::Index>(j)));
    mx = std::max(mx, S(static_cast<Eigen::Index>(j)));
  }
  require(mx > 0.0 && mn > 0.0, ErrorKind::Degenerate, "channel_sum_ratio: band not covered");
  return mx / mn;
}

}  // namespace warpft
