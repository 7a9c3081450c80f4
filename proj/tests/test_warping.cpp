#include <doctest.h>

#include "warpft/warping.hpp"

using namespace warpft;

namespace {

std::vector<WarpingFunction> all_warps() {
  return {WarpingFunction::linear(0.5), WarpingFunction::log(), WarpingFunction::power_law(2.0, 3.0, 0.5),
          WarpingFunction::erb(),       WarpingFunction::alpha_like(0.5)};
}

std::vector<double> points_for(const WarpingFunction& F) {
  if (F.domain() == Domain::PositiveHalfLine) return {1e-3, 0.1, 0.9, 1.0, 2.5, 40.0, 1e4};
  return {-8000.0, -100.0, -1.0, -1e-3, 0.0, 1e-3, 0.7, 33.0, 1000.0, 7999.0};
}

}  // namespace

TEST_CASE("erb values against high-precision references") {
  const auto F = WarpingFunction::erb();
  CHECK(eval(F, 1000.0) == doctest::Approx(15.573956378255141675).epsilon(1e-14));
  CHECK(eval_inverse(F, 10.0) == doctest::Approx(444.49197353699053351).epsilon(1e-14));
  CHECK(eval_inverse(F, -3.0) == doctest::Approx(-87.486201290434793079).epsilon(1e-14));
  CHECK(weight_w(F, 5.0) == doctest::Approx(42.36276562567656166).epsilon(1e-14));
  CHECK(weight_w(F, -5.0) == doctest::Approx(42.36276562567656166).epsilon(1e-14));
}

TEST_CASE("alpha_like and power_law closed forms") {
  const auto A = WarpingFunction::alpha_like(0.5);
  CHECK(eval_inverse(A, 1.0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(weight_w(A, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(eval(A, 1.25) == doctest::Approx(1.0).epsilon(1e-15));
  const auto P = WarpingFunction::power_law(2.0, 3.0, 0.5);
  CHECK(eval(P, 5.0) == doctest::Approx(1.0327955589886445027).epsilon(1e-14));
  CHECK(eval(WarpingFunction::log(), 1.0) == 0.0);
  CHECK(eval(WarpingFunction::linear(4.0), 2.0) == 8.0);
}

TEST_CASE("inverse round trip") {
  for (const auto& F : all_warps())
    for (double t : points_for(F)) {
      const double back = eval_inverse(F, eval(F, t));
      CHECK(back == doctest::Approx(t).epsilon(1e-12).scale(1e-12));
    }
}

TEST_CASE("w is the derivative of the inverse") {
  for (const auto& F : all_warps())
    for (double t : points_for(F)) {
      const double s = eval(F, t);
      CHECK(weight_w(F, s) * derivative(F, t) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("w derivatives against central differences") {
  for (const auto& F : all_warps())
    for (double s : {-2.0, -0.4, 0.3, 1.7}) {
      const double h = 1e-5;
      const double d1 = (weight_w(F, s + h) - weight_w(F, s - h)) / (2 * h);
      const double d2 = (weight_w(F, s + h) - 2 * weight_w(F, s) + weight_w(F, s - h)) / (h * h);
      const double scale = std::max(1.0, std::abs(weight_w(F, s)));
      CHECK(std::abs(weight_w(F, s, 1) - d1) <= 1e-6 * scale);
      CHECK(std::abs(weight_w(F, s, 2) - d2) <= 1e-3 * scale);
    }
}

TEST_CASE("odd warps on the real line") {
  for (const auto& F : all_warps()) {
    if (F.domain() != Domain::RealLine) continue;
    for (double t : {0.5, 7.0, 900.0}) CHECK(eval(F, -t) == -eval(F, t));
  }
}

TEST_CASE("domain errors on the half line") {
  CHECK_THROWS_AS(eval(WarpingFunction::log(), -1.0), Error);
  CHECK_THROWS_AS(eval(WarpingFunction::power_law(1, 1, 0.5), 0.0), Error);
  try {
    eval(WarpingFunction::log(), 0.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  CHECK_THROWS_AS(weight_w(WarpingFunction::erb(), 0.0, 3), Error);
}

TEST_CASE("built-in warps satisfy the axioms") {
  for (const auto& F : all_warps()) {
    const AxiomReport r = check_warping_axioms(F);
    CHECK_MESSAGE(r.all(), F.name());
  }
}

TEST_CASE("cubic probe is rejected") {
  WarpProbe p;
  p.F = [](double t) { return t * t * t; };
  p.dF = [](double t) { return 3 * t * t; };
  const AxiomReport r = check_warping_axioms(p, symmetric_grid(3.0));
  CHECK_FALSE(r.all());
  CHECK_FALSE(r.positive_derivative);
}

TEST_CASE("numeric inverse agrees with closed forms") {
  for (const auto& F : all_warps()) {
    const WarpProbe p = as_probe(F);
    for (double s : {-3.0, -0.5, 0.25, 2.0}) {
      if (F.domain() == Domain::PositiveHalfLine && F.kind == WarpKind::PowerLaw && std::abs(s) > 10) continue;
      CHECK(numeric_inverse(p, s) == doctest::Approx(eval_inverse(F, s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("quasi-submultiplicativity constants") {
  CHECK(check_quasi_submultiplicative(WarpingFunction::log()).C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_quasi_submultiplicative(WarpingFunction::linear(0.25)).C == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(check_quasi_submultiplicative(WarpingFunction::erb()).C ==
        doctest::Approx(9.265 / 228.8).epsilon(1e-12));
  CHECK(check_quasi_submultiplicative(WarpingFunction::alpha_like(0.5)).C <= 1.0 + 1e-12);
}

TEST_CASE("moderateness of polynomial weights") {
  const auto m = WeightSpec::polynomial(2.0);
  CHECK(check_moderateness(m, m, symmetric_grid(50.0)).C <= 1.0 + 1e-12);
  const auto e = WeightSpec::exponential(0.3);
  CHECK(check_moderateness(e, e, symmetric_grid(50.0)).C <= 1.0 + 1e-12);
  CHECK(m(-1.0) == 4.0);
  CHECK(e(0.0) == 1.0);
  const auto comp = WeightSpec::composed_with_inverse_warp(m, WarpingFunction::linear(0.5));
  CHECK(comp(1.0) == doctest::Approx(9.0));
}

TEST_CASE("templated scalar evaluation") {
  const auto F = WarpingFunction::erb();
  const long double v = eval<long double>(F, 1000.0L);
  CHECK(static_cast<double>(v) == doctest::Approx(15.573956378255141675).epsilon(1e-15));
  const float f = weight_w<float>(F, 5.0f);
  CHECK(f == doctest::Approx(42.3627656).epsilon(1e-6));
}

TEST_CASE("grids") {
  const auto g = symmetric_grid(2.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[2] == 0.0);
  CHECK(g.front() == -2.0);
  const auto l = logspace(1.0, 100.0, 3);
  CHECK(l[1] == doctest::Approx(10.0));
}
