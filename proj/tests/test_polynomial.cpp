#include <doctest.h>

#include <random>

#include "circlesum/polynomial.hpp"
#include "circlesum/system.hpp"
#include "test_util.hpp"

using namespace circlesum;

TEST_SUITE("polysys") {

TEST_CASE("degree_part filters terms by total degree") {
  Polynomial p = parse_polynomial("x1^2 + 3*x1 + 5", 1);
  CHECK(p.degree_part(2) == parse_polynomial("x1^2", 1));
  CHECK(p.degree_part(1) == parse_polynomial("3*x1", 1));
  CHECK(p.degree_part(3).is_zero());

  Polynomial q = parse_polynomial("x1*x2 + x1 + 7", 2);
  CHECK(q.degree_part(0) == parse_polynomial("7", 2));
}

TEST_CASE("evaluate is exact at integer points") {
  Polynomial sq = parse_polynomial("x1^2", 1);
  std::vector<BigInt> x{BigInt(3)};
  CHECK(sq.eval(std::span<const BigInt>(x)) == 9);

  Polynomial p = parse_polynomial("x1*x2 + x1", 2);
  std::vector<BigInt> y{BigInt(2), BigInt(5)};
  CHECK(p.eval(std::span<const BigInt>(y)) == 12);

  Polynomial c = parse_polynomial("x1^3 - x1", 1);
  std::vector<BigInt> z{BigInt(-2)};
  CHECK(c.eval(std::span<const BigInt>(z)) == -6);
}

TEST_CASE("evaluate rejects dimension mismatch") {
  Polynomial p = parse_polynomial("x1 + x2", 2);
  std::vector<BigInt> x{BigInt(1)};
  CHECK_THROWS_AS(p.eval(std::span<const BigInt>(x)), std::invalid_argument);
}

TEST_CASE("validate_system flags misplaced and mismatched entries") {
  // degree-1 polynomial placed in the quadratic block
  GradedSystem bad;
  bad.n = 1;
  bad.blocks = {{}, {parse_polynomial("x1 + 1", 1)}};
  auto v = validate_system(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].ell == 2);
  CHECK(v[0].r == 1);

  GradedSystem good;
  good.n = 2;
  good.blocks = {{parse_polynomial("x1 + x2", 2)}, {parse_polynomial("x1^2", 2)}};
  CHECK(validate_system(good).empty());

  GradedSystem mixed;
  mixed.n = 2;
  mixed.blocks = {{parse_polynomial("x1", 1)}};  // declared n = 2, poly has 1
  auto w = validate_system(mixed);
  REQUIRE(w.size() == 1);
  CHECK(w[0].ell == 1);

  // degree above the block index is as wrong as a vanishing top part
  GradedSystem high;
  high.n = 1;
  high.blocks = {{parse_polynomial("x1^3", 1)}};
  auto h = validate_system(high);
  REQUIRE(h.size() == 1);
  CHECK(h[0].message.find("degree") != std::string::npos);
}

TEST_CASE("polynomial equals the sum of its degree parts") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    Polynomial p = testutil::random_polynomial(rng, 3, 5, 6);
    Polynomial sum(3);
    for (int ell = 0; ell <= p.degree(); ++ell)
      sum = sum + p.degree_part(ell);
    CHECK(sum == p);
    // idempotence
    for (int ell = 0; ell <= p.degree(); ++ell) {
      Polynomial part = p.degree_part(ell);
      CHECK(part.degree_part(ell) == part);
    }
  }
}

TEST_CASE("evaluate is a ring homomorphism on random pairs") {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> coord(-5, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    Polynomial p = testutil::random_polynomial(rng, 2, 4, 4);
    Polynomial q = testutil::random_polynomial(rng, 2, 4, 4);
    std::vector<BigInt> x{BigInt(coord(rng)), BigInt(coord(rng))};
    std::span<const BigInt> xs(x);
    CHECK((p + q).eval(xs) == p.eval(xs) + q.eval(xs));
    CHECK((p * q).eval(xs) == p.eval(xs) * q.eval(xs));
  }
}

TEST_CASE("text form round-trips bit-exactly") {
  CHECK(parse_polynomial("3*x1^2*x2 - x3 + 7", 3).to_string() ==
        "3*x1^2*x2 - x3 + 7");
  CHECK(parse_polynomial("0", 2).to_string() == "0");
  CHECK(parse_polynomial("-x1", 1).to_string() == "-x1");
  CHECK(parse_polynomial("x1^1", 1).to_string() == "x1");

  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    Polynomial p = testutil::random_polynomial(rng, 3, 4, 5);
    CHECK(parse_polynomial(p.to_string(), 3) == p);
    // printing is a fixed point on canonical text
    std::string s = p.to_string();
    CHECK(parse_polynomial(s, 3).to_string() == s);
  }
}

TEST_CASE("parser rejects malformed input with a diagnostic") {
  try {
    parse_polynomial("x1^", 1);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_polynomial("x3", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("x0", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("3 + + 4", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("x1 x2", 2), std::invalid_argument);
}

TEST_CASE("big coefficients survive parse, arithmetic, and print") {
  std::string huge = "123456789012345678901234567890*x1 - 1";
  Polynomial p = parse_polynomial(huge, 1);
  CHECK(p.to_string() == huge);
  std::vector<BigInt> x{BigInt(10)};
  CHECK(p.eval(std::span<const BigInt>(x)) ==
        BigInt("1234567890123456789012345678899"));
}

}  // TEST_SUITE
