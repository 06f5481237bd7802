#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "circlesum/singint.hpp"
#include "test_util.hpp"

using namespace circlesum;

namespace {

using Complex = std::complex<long double>;

// exact antiderivative of the one-dimensional linear phase
Complex linear_closed_form(long double tau) {
  if (tau == 0.0L) return {1.0L, 0.0L};
  Complex numer = unit_phase(tau) - Complex(1.0L, 0.0L);
  return numer / Complex(0.0L, 2.0L * kPi * tau);
}

// independent dense Simpson quadrature for a 1-d phase v -> e(tau * v^2)
Complex fresnel_oracle(long double tau, int panels = 1 << 16) {
  auto f = [tau](long double v) { return unit_phase(tau * v * v); };
  Complex acc = f(0.0L) + f(1.0L);
  long double h = 1.0L / panels;
  for (int k = 1; k < panels; ++k)
    acc += f(k * h) * (k % 2 == 1 ? 4.0L : 2.0L);
  return acc * (h / 3.0L);
}

BlockVector tau_single(const GradedSystem& s, int ell, long double v) {
  BlockVector t = BlockVector::zeros_like(s);
  t.blocks[ell - 1][0] = v;
  return t;
}

}  // namespace

TEST_SUITE("singint") {

TEST_CASE("zero spectral parameter integrates the unit box") {
  GradedSystem s = testutil::block_system(2, 2, {"x1^2 + x2^2"});
  auto q = singular_integral(s, BlockVector::zeros_like(s), 1e-9L);
  CHECK(std::abs(q.value - Complex(1.0L, 0.0L)) < 1e-10L);
  CHECK(q.converged);
}

TEST_CASE("one-dimensional linear phases match the antiderivative") {
  GradedSystem s = testutil::block_system(1, 1, {"x1"});
  auto half = singular_integral(s, tau_single(s, 1, 0.5L), 1e-9L);
  // (e(1/2) - 1) / (pi i) = 2i / pi
  CHECK(std::abs(half.value - Complex(0.0L, 2.0L / kPi)) < 1e-9L);
  CHECK(std::abs(half.value - linear_closed_form(0.5L)) < 1e-9L);

  auto full = singular_integral(s, tau_single(s, 1, 1.0L), 1e-9L);
  CHECK(std::abs(full.value) < 1e-9L);

  for (long double t : {0.25L, 2.0L, 17.3L}) {
    auto q = singular_integral(s, tau_single(s, 1, t), 1e-9L);
    CHECK(std::abs(q.value - linear_closed_form(t)) < 1e-8L);
  }
}

TEST_CASE("modulus never exceeds one") {
  std::mt19937_64 rng(801);
  std::uniform_real_distribution<double> unif(-6.0, 6.0);
  for (int trial = 0; trial < 25; ++trial) {
    GradedSystem s = testutil::block_system(2, 2, {"x1^2 + x1*x2"});
    BlockVector t = BlockVector::zeros_like(s);
    t.blocks[1][0] = (long double)unif(rng);
    auto q = singular_integral(s, t, 1e-8L);
    CHECK(std::abs(q.value) <= 1.0L + 1e-8L);
  }
}

TEST_CASE("conjugation under negated parameters") {
  GradedSystem s = testutil::block_system(2, 2, {"x1^2 + 3*x1*x2"});
  BlockVector t = BlockVector::zeros_like(s);
  t.blocks[1][0] = 1.7L;
  BlockVector neg = t;
  neg.blocks[1][0] = -1.7L;
  auto a = singular_integral(s, t, 1e-9L);
  auto b = singular_integral(s, neg, 1e-9L);
  CHECK(std::abs(b.value - std::conj(a.value)) <
        2.0L * (a.err_estimate + b.err_estimate) + 1e-9L);
}

TEST_CASE("disjoint variables factor the integral") {
  // two linear forms in separate variables: closed form per factor
  GradedSystem s;
  s.n = 2;
  s.blocks = {{parse_polynomial("x1", 2), parse_polynomial("x2", 2)}};
  BlockVector t = BlockVector::zeros_like(s);
  t.blocks[0] = {0.3L, 0.7L};
  auto fact = singular_integral(s, t, 1e-9L);
  Complex expected = linear_closed_form(0.3L) * linear_closed_form(0.7L);
  CHECK(std::abs(fact.value - expected) < 1e-8L);

  QuadOptions mono;
  mono.factorize = false;
  auto whole = singular_integral(s, t, 1e-9L, mono);
  CHECK(std::abs(whole.value - expected) < 1e-8L);
  CHECK(std::abs(whole.value - fact.value) <
        fact.err_estimate + whole.err_estimate + 1e-9L);

  // disjoint quadratics against the Fresnel oracle
  GradedSystem sq = testutil::block_system(2, 2, {"x1^2", "x2^2"});
  BlockVector tq = BlockVector::zeros_like(sq);
  tq.blocks[1] = {2.3L, 1.1L};
  auto qi = singular_integral(sq, tq, 1e-9L);
  Complex oracle = fresnel_oracle(2.3L) * fresnel_oracle(1.1L);
  CHECK(std::abs(qi.value - oracle) < 1e-7L);
}

TEST_CASE("halving the tolerance moves the value within both estimates") {
  GradedSystem s = testutil::block_system(2, 2, {"x1^2 + x1*x2"});
  BlockVector t = BlockVector::zeros_like(s);
  t.blocks[1][0] = 3.3L;
  auto a = singular_integral(s, t, 2e-8L);
  auto b = singular_integral(s, t, 1e-8L);
  CHECK(std::abs(a.value - b.value) <= a.err_estimate + b.err_estimate + 1e-18L);
}

TEST_CASE("tolerance and dimension preconditions") {
  GradedSystem s = testutil::block_system(1, 1, {"x1"});
  CHECK_THROWS_AS(singular_integral(s, tau_single(s, 1, 1.0L), 1e-11L),
                  std::invalid_argument);
  GradedSystem big;
  big.n = 5;
  big.blocks = {{parse_polynomial("x1 + x2 + x3 + x4 + x5", 5)}};
  CHECK_THROWS_AS(
      singular_integral(big, BlockVector::zeros_like(big), 1e-8L),
      std::invalid_argument);
}

TEST_CASE("a starved cell budget is flagged, not hidden") {
  GradedSystem s = testutil::block_system(2, 2, {"x1^2 + x1*x2"});
  BlockVector t = BlockVector::zeros_like(s);
  t.blocks[1][0] = 40.0L;
  QuadOptions starved;
  starved.cell_budget = 32;
  auto q = singular_integral(s, t, 1e-9L, starved);
  CHECK(!q.converged);
  CHECK(q.err_estimate > 1e-9L);
}

TEST_CASE("three disjoint linear variables decay like the cube") {
  GradedSystem s = testutil::block_system(3, 1, {"x1 + x2 + x3"});
  BlockVector dir = BlockVector::zeros_like(s);
  dir.blocks[0][0] = 1.0L;
  std::vector<long double> ts{1.0L, 1.5L, 2.5L,  4.5L,  8.5L,
                              16.5L, 32.5L, 64.5L, 95.5L, 100.0L};
  DecayFit fit = decay_exponent(s, dir, ts, 1e-10L);
  // integer sample points are zeros of the closed form and get excluded
  CHECK(fit.table.front().excluded);
  CHECK(fit.table.back().excluded);
  CHECK(fit.used_points == 8);
  CHECK(fit.exponent > -3.2);
  CHECK(fit.exponent < -2.8);
  CHECK(fit.envelope_holds);  // R + 1 = 2 and the decay is faster

  // crest values sit on the closed-form envelope
  for (const auto& p : fit.table) {
    if (p.excluded) continue;
    long double expected = std::abs(linear_closed_form(p.t));
    CHECK(std::fabs(std::abs(p.value) - expected * expected * expected) <
          1e-9L);
  }
}

TEST_CASE("a single linear variable decays too slowly for the envelope") {
  GradedSystem s = testutil::block_system(1, 1, {"x1"});
  BlockVector dir = BlockVector::zeros_like(s);
  dir.blocks[0][0] = 1.0L;
  std::vector<long double> ts{1.5L, 2.5L, 4.5L, 8.5L, 16.5L,
                              32.5L, 64.5L, 95.5L, 150.5L};
  DecayFit fit = decay_exponent(s, dir, ts, 1e-10L);
  CHECK(fit.exponent > -1.2);
  CHECK(fit.exponent < -0.8);
  CHECK(!fit.envelope_holds);  // t^{-1} against a t^{-2} envelope
}

TEST_CASE("four quadratic variables decay like the Fresnel product") {
  GradedSystem s = testutil::block_system(4, 2, {"x1^2 + x2^2 + x3^2 + x4^2"});
  BlockVector dir = BlockVector::zeros_like(s);
  dir.blocks[1][0] = 1.0L;

  // value check against the independent product oracle
  auto q = singular_integral(s, tau_single(s, 2, 7.3L), 1e-9L);
  Complex f = fresnel_oracle(7.3L);
  CHECK(std::abs(q.value - f * f * f * f) < 1e-7L);

  std::vector<long double> ts{1.1L, 2.3L, 4.9L, 10.7L, 23.3L, 51.1L, 111.1L};
  DecayFit fit = decay_exponent(s, dir, ts, 1e-10L);
  CHECK(fit.used_points == 7);
  CHECK(fit.exponent > -2.4);
  CHECK(fit.exponent < -1.6);
}

TEST_CASE("decay preconditions reject bad sample sets") {
  GradedSystem s = testutil::block_system(1, 1, {"x1"});
  BlockVector dir = BlockVector::zeros_like(s);
  dir.blocks[0][0] = 1.0L;
  std::vector<long double> too_few{1.5L, 2.5L, 95.5L};
  CHECK_THROWS_AS(decay_exponent(s, dir, too_few, 1e-9L),
                  std::invalid_argument);
  std::vector<long double> narrow{1.5L, 2.5L, 4.5L, 8.5L};
  CHECK_THROWS_AS(decay_exponent(s, dir, narrow, 1e-9L),
                  std::invalid_argument);
  std::vector<long double> unordered{1.5L, 8.5L, 4.5L, 160.5L};
  CHECK_THROWS_AS(decay_exponent(s, dir, unordered, 1e-9L),
                  std::invalid_argument);
  BlockVector scaled = dir;
  scaled.blocks[0][0] = 0.5L;
  std::vector<long double> ok{1.5L, 4.5L, 16.5L, 160.5L};
  CHECK_THROWS_AS(decay_exponent(s, scaled, ok, 1e-9L), std::invalid_argument);
}

}  // TEST_SUITE
