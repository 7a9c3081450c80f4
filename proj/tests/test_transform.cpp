#include <doctest.h>

#include <sstream>

#include "warpft/parallel.hpp"
#include "warpft/transform.hpp"

using namespace warpft;

namespace {

SystemParams erb_params(double delta, std::size_t N = 4096, Prototype th = Prototype::smooth_bump(0.75)) {
  SystemParams p;
  p.warp = WarpingFunction::erb();
  p.prototype = th;
  p.delta = delta;
  p.grid = SignalGrid::make(N, 16000.0);
  return p;
}

std::complex<double> coeff_dot(const Coefficients& a, const Coefficients& b) {
  std::complex<double> s(0.0, 0.0);
  for (std::size_t l = 0; l < a.size(); ++l) s += b.channels[l].values.dot(a.channels[l].values);
  return s;
}

Coefficients random_coefficients(const WarpedSystem& sys, unsigned seed) {
  Coefficients c = zero_coefficients(sys);
  std::srand(seed);
  for (auto& ch : c.channels)
    for (Eigen::Index k = 0; k < ch.values.size(); ++k)
      ch.values(k) = {std::rand() / double(RAND_MAX) - 0.5, std::rand() / double(RAND_MAX) - 0.5};
  return c;
}

}  // namespace

TEST_CASE("FFT analysis agrees with the direct sum") {
  const WarpedSystem sys = build_system(erb_params(0.25, 1024));
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 3);
  const Coefficients c = analyze(f, sys);
  for (std::size_t l : {0ul, sys.size() / 3, sys.size() - 1})
    for (std::size_t k : {std::size_t(0), std::size_t(1), std::size_t(c.channels[l].values.size() - 1)}) {
      const auto d = coefficient_direct(f, sys, l, k);
      CHECK(std::abs(d - c.channels[l].values(static_cast<Eigen::Index>(k))) <= 1e-13 * (1.0 + std::abs(d)));
    }
}

TEST_CASE("adjoint identity") {
  const WarpedSystem sys = build_system(erb_params(0.5, 1024, Prototype::gaussian(0.3)));
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 5);
  const Coefficients c = random_coefficients(sys, 11);
  const auto lhs = coeff_dot(analyze(f, sys), c);
  const auto rhs = adjoint(c, sys).dot(f);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
}

TEST_CASE("zero and linearity") {
  const WarpedSystem sys = build_system(erb_params(0.25, 1024));
  CHECK(analyze(Signal::Zero(1024), sys).max_abs() == 0.0);
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 1);
  const Signal g = random_bandlimited(sys.grid(), -8000, 8000, 2);
  const std::complex<double> a(0.3, -1.2);
  const Coefficients cf = analyze(f, sys), cg = analyze(g, sys), cs = analyze(f + a * g, sys);
  for (std::size_t l = 0; l < sys.size(); ++l)
    CHECK((cs.channels[l].values - cf.channels[l].values - a * cg.channels[l].values).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("painless round trip") {
  const WarpedSystem sys = build_system(erb_params(0.25));
  REQUIRE(sys.painless.painless);
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 9);
  const Signal r = synthesize(analyze(f, sys), sys);
  CHECK(relative_l2_error(r, project_active(f, sys.grid(), sys.warp().domain())) <= 1e-10);
}

TEST_CASE("synthesis refusals") {
  const WarpedSystem np = build_system(erb_params(0.5, 4096, Prototype::gaussian(0.3)));
  REQUIRE_FALSE(np.painless.painless);
  const Coefficients c = zero_coefficients(np);
  try {
    synthesize(c, np);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capability);
  }
  const WarpedSystem other = build_system(erb_params(0.25));
  try {
    synthesize(c, other);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
  try {
    analyze(Signal::Zero(100), other);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("conjugate gradients on a non-painless system") {
  const WarpedSystem sys = build_system(erb_params(0.5, 1024, Prototype::gaussian(0.3)));
  REQUIRE_FALSE(sys.painless.painless);
  const auto [lo, hi] = interior_band(sys);
  const Signal f = random_bandlimited(sys.grid(), lo, hi, 4);
  const IterativeResult r = synthesize_iterative(analyze(f, sys), sys);
  CHECK(r.converged);
  CHECK(r.iterations <= 500);
  CHECK(r.relative_residual <= 1e-10);
  CHECK(relative_l2_error(r.signal, f) <= 1e-8);
}

TEST_CASE("covariance under time shifts") {
  const WarpedSystem sys = build_system(erb_params(0.25, 1024));
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 8);
  const Coefficients c = analyze(f, sys);
  for (std::size_t l : {5ul, sys.size() / 2}) {
    const std::size_t n = sys.channels[l].hop_samples;
    Signal g(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) g((i + static_cast<Eigen::Index>(n)) % f.size()) = f(i);
    const Eigen::VectorXcd& a = c.channels[l].values;
    const Eigen::VectorXcd b = analyze(g, sys).channels[l].values;
    for (Eigen::Index k = 0; k < a.size(); ++k) CHECK(std::abs(b((k + 1) % a.size()) - a(k)) <= 1e-12);
  }
}

TEST_CASE("Moyal residual decreases with delta") {
  double prev = 1e300;
  for (double d : {0.5, 0.25, 0.125}) {
    const WarpedSystem sys = build_system(erb_params(d));
    const auto [lo, hi] = interior_band(sys);
    REQUIRE(hi > lo);
    const Signal f = random_bandlimited(sys.grid(), lo, hi, 21);
    const MoyalTerms t = moyal_terms(f, f, sys, sys);
    const double rel = t.residual / std::abs(t.reference);
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK(prev <= 1e-2);
}

TEST_CASE("Moyal regression for a Gaussian prototype") {
  const WarpedSystem sys = build_system(erb_params(0.25, 4096, Prototype::gaussian(0.3)));
  const auto [lo, hi] = interior_band(sys);
  const Signal f = random_bandlimited(sys.grid(), lo, hi, 21);
  CHECK(moyal_residual(f, f, sys, sys) <= 2e-3 * signal_inner(f, f, sys.grid().fs).real());
}

TEST_CASE("Moyal pairing needs matching systems") {
  const WarpedSystem a = build_system(erb_params(0.25, 1024));
  const WarpedSystem b = build_system(erb_params(0.5, 1024));
  const Signal f = Signal::Zero(1024);
  CHECK_THROWS_AS(moyal_terms(f, f, a, b), Error);
}

TEST_CASE("linear warp reproduces the STFT") {
  SystemParams p;
  p.warp = WarpingFunction::linear(1.0 / 64);
  p.prototype = Prototype::gaussian(0.075);
  p.delta = 1.0;
  p.grid = SignalGrid::make(1024, 1024.0);
  const WarpedSystem sys = build_system(p);
  const StftCheck r = stft_equivalence(sys, random_bandlimited(p.grid, -512, 512, 2));
  CHECK(r.applicable);
  CHECK(r.compared == sys.size());
  CHECK(r.max_dev <= 1e-10);
  const StftCheck e = stft_equivalence(build_system(erb_params(0.5, 1024)), Signal::Zero(1024));
  CHECK_FALSE(e.applicable);
}

TEST_CASE("bandlimited probes and interior band") {
  const WarpedSystem sys = build_system(erb_params(0.25, 1024));
  const auto [lo, hi] = interior_band(sys);
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);
  CHECK(hi < sys.channels.back().center_hz);
  const Signal f = random_bandlimited(sys.grid(), 100.0, 2000.0, 7);
  Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(1024);
  for (Eigen::Index j = 0; j < 1024; ++j)
    for (Eigen::Index n = 0; n < 1024; ++n)
      spec(j) += f(n) * std::polar(1.0, -2.0 * 3.14159265358979323846 * double((j * n) % 1024) / 1024.0);
  for (std::size_t j = 0; j < 1024; ++j) {
    const double fr = sys.grid().bin_freq(j);
    if (fr < 100.0 || fr > 2000.0) CHECK(std::abs(spec(static_cast<Eigen::Index>(j))) <= 1e-9);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const WarpedSystem sys = build_system(erb_params(0.25, 1024));
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 12);
  const unsigned saved = thread_count();
  set_thread_count(1);
  const Coefficients a = analyze(f, sys);
  const Signal ra = synthesize(a, sys);
  set_thread_count(4);
  const Coefficients b = analyze(f, sys);
  const Signal rb = synthesize(b, sys);
  set_thread_count(saved);
  for (std::size_t l = 0; l < sys.size(); ++l) CHECK(a.channels[l].values == b.channels[l].values);
  CHECK(ra == rb);
}

TEST_CASE("spectrogram export") {
  const WarpedSystem sys = build_system(erb_params(0.5, 1024));
  const Coefficients c = analyze(Signal::Zero(1024), sys);
  std::ostringstream os;
  export_spectrogram(c, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "time_s,channel_center_hz,magnitude");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == c.total_frames());
}

TEST_CASE("single-frame channels") {
  const WarpedSystem sys = build_system(erb_params(0.5, 256, Prototype::gaussian(0.3)));
  std::size_t single = 0;
  for (const auto& ch : sys.channels) single += ch.hop_samples == 256;
  REQUIRE(single > 0);
  const Signal f = random_bandlimited(sys.grid(), -8000, 8000, 6);
  const Coefficients c = analyze(f, sys);
  for (std::size_t l = 0; l < sys.size(); ++l)
    if (sys.channels[l].hop_samples == 256) {
      REQUIRE(c.channels[l].values.size() == 1);
      CHECK(std::abs(c.channels[l].values(0) - coefficient_direct(f, sys, l, 0)) <= 1e-13);
    }
  const Signal back = adjoint(c, sys);
  CHECK(back.size() == 256);
}
