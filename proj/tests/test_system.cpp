#include <doctest.h>

#include "warpft/system.hpp"

using namespace warpft;

namespace {

SystemParams erb_params(double delta, std::size_t N = 4096) {
  SystemParams p;
  p.warp = WarpingFunction::erb();
  p.prototype = Prototype::smooth_bump(0.75);
  p.delta = delta;
  p.grid = SignalGrid::make(N, 16000.0);
  return p;
}

bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

}  // namespace

TEST_CASE("grid bookkeeping") {
  const SignalGrid g = SignalGrid::make(16, 16.0);
  CHECK(g.bin_freq(0) == 0.0);
  CHECK(g.bin_freq(8) == 8.0);
  CHECK(g.bin_freq(9) == -7.0);
  for (std::size_t p = 0; p < 16; ++p) {
    CHECK(g.position_of_bin(g.bin_of_position(p)) == p);
    CHECK(g.position_freq(p) == g.bin_freq(g.bin_of_position(p)));
  }
  CHECK_FALSE(g.active(0, Domain::PositiveHalfLine));
  CHECK_FALSE(g.active(9, Domain::PositiveHalfLine));
  CHECK(g.active(8, Domain::PositiveHalfLine));
  CHECK(g.active(9, Domain::RealLine));
  CHECK_THROWS_AS(SignalGrid::make(0, 1.0), Error);
}

TEST_CASE("hops are powers of two dividing N") {
  for (double tau : {1e-6, 3e-4, 0.01, 0.37, 5.0}) {
    const std::size_t n = hop_samples_for(tau, 16000.0, 4096);
    CHECK(is_power_of_two(n));
    CHECK(4096 % n == 0);
    CHECK(static_cast<double>(n) <= std::max(1.0, std::round(tau * 16000.0)));
  }
}

TEST_CASE("erb channel design") {
  const auto F = WarpingFunction::erb();
  const auto ch = design_channels(F, 1.0, SignalGrid::make(4096, 16000.0));
  REQUIRE(ch.size() == 66);
  CHECK(ch.front().l == -33);
  CHECK(ch.back().l == 32);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    CHECK(ch[i].center_hz == doctest::Approx(eval_inverse(F, ch[i].l + 0.5)).epsilon(1e-14));
    CHECK(ch[i].time_hop * ch[i].bandwidth_hz == doctest::Approx(1.0).epsilon(1e-14));
    if (i) {
      CHECK(ch[i].center_hz > ch[i - 1].center_hz);
      CHECK(ch[i].l == ch[i - 1].l + 1);
    }
  }
}

TEST_CASE("log centers form a geometric sequence") {
  const auto ch = design_channels(WarpingFunction::log(), 0.5, SignalGrid::make(256, 1000.0));
  REQUIRE(ch.size() == 9);
  CHECK(ch.front().l == 3);
  for (std::size_t i = 1; i < ch.size(); ++i)
    CHECK(ch[i].center_hz / ch[i - 1].center_hz == doctest::Approx(std::exp(0.5)).epsilon(1e-13));
}

TEST_CASE("too coarse a delta is a config error") {
  try {
    design_channels(WarpingFunction::erb(), 100.0, SignalGrid::make(4096, 16000.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("fewer than 2 channels") != std::string::npos);
  }
  CHECK_THROWS_AS(design_channels(WarpingFunction::erb(), -1.0, SignalGrid::make(64, 1.0)), Error);
}

TEST_CASE("log atoms are dilations") {
  SystemParams p;
  p.warp = WarpingFunction::log();
  p.prototype = Prototype::hann_bump(0.5);
  p.delta = 0.5;
  p.grid = SignalGrid::make(256, 1000.0);
  const WarpedSystem sys = build_system(p);
  REQUIRE(sys.size() == 9);
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const double x = sys.channels[l].center_hz;
    for (std::size_t j = 1; j <= 128; ++j) {
      const double xi = p.grid.bin_freq(j);
      const double ref = std::pow(x, -0.5) * atom_value(p.warp, sys.theta, 1.0, xi / x);
      const double got = atom_value(p.warp, sys.theta, x, xi);
      CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("atoms: truncation and half-line") {
  const WarpedSystem sys = build_system(erb_params(0.25));
  for (const Atom& a : sys.atoms) {
    REQUIRE(a.size() > 0);
    CHECK(a.values.front() >= 1e-8 * a.peak);
    CHECK(a.values.back() >= 1e-8 * a.peak);
  }
  SystemParams p;
  p.warp = WarpingFunction::log();
  p.prototype = Prototype::gaussian(0.5);
  p.delta = 0.5;
  p.grid = SignalGrid::make(256, 1000.0);
  const WarpedSystem ls = build_system(p);
  for (std::size_t l = 0; l < ls.size(); ++l) {
    const Eigen::VectorXd g = ls.atom_dense(l);
    CHECK(g(0) == 0.0);
    for (std::size_t j = 129; j < 256; ++j) CHECK(g(static_cast<Eigen::Index>(j)) == 0.0);
  }
  CHECK(ls.active_mask().count() == 128);
}

TEST_CASE("painless verdicts") {
  CHECK(build_system(erb_params(0.25)).painless.painless);
  SystemParams g = erb_params(0.5);
  g.prototype = Prototype::gaussian(0.3);
  const WarpedSystem sys = build_system(g);
  CHECK_FALSE(sys.painless.painless);
  CHECK_FALSE(sys.painless.violating.empty());
  CHECK(sys.painless.summary().find("not painless") != std::string::npos);
}

TEST_CASE("normalized prototype gives unit atom energy") {
  const WarpedSystem sys = build_system(erb_params(0.125));
  for (std::size_t l : {100u, 250u, 400u}) {
    CHECK(atom_overlap(sys, l, l).real() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("channel sum flattens as delta shrinks") {
  double prev = 1e300;
  for (double d : {0.5, 0.25, 0.125}) {
    const double r = channel_sum_ratio(build_system(erb_params(d)), -4000.0, 4000.0);
    CHECK(r >= 1.0);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1.001);
}

TEST_CASE("frame diagonal in the painless case") {
  const WarpedSystem sys = build_system(erb_params(0.25, 1024));
  const Eigen::VectorXd D = frame_diagonal(sys);
  for (std::size_t j : {3u, 100u, 600u}) {
    double acc = 0.0;
    for (std::size_t l = 0; l < sys.size(); ++l) {
      const double g = sys.atom_at_bin(l, j);
      acc += g * g / static_cast<double>(sys.channels[l].hop_samples);
    }
    CHECK(D(static_cast<Eigen::Index>(j)) == doctest::Approx(acc).epsilon(1e-14));
  }
}
