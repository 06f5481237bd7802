#pragma once

// Exact integer plumbing shared by every module: GMP-backed integers and
// rationals, conversions that keep the full 64-bit long double significand,
// and the exact mod-1 reduction used when turning integer polynomial values
// into phases.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace circlesum {

using BigInt = mpz_class;
using BigRat = mpq_class;

inline constexpr long double kPi =
    3.141592653589793238462643383279502884L;

// Thrown when an operation would exceed its configured work budget.
// Carries the work the input would need so callers can report it.
class budget_error : public std::runtime_error {
 public:
  budget_error(const std::string& what, double required, double budget)
      : std::runtime_error(what + " (required " + std::to_string(required) +
                           ", budget " + std::to_string(budget) + ")"),
        required_(required),
        budget_(budget) {}
  double required() const { return required_; }
  double budget() const { return budget_; }

 private:
  double required_;
  double budget_;
};

inline BigInt bigint_from_u64(std::uint64_t v) {
  BigInt z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof v, 0, 0, &v);
  return z;
}

// Truncating conversion keeping the top 64 bits of |z|; error <= 1 ulp.
inline long double to_long_double(const BigInt& z) {
  int s = sgn(z);
  if (s == 0) return 0.0L;
  BigInt a = abs(z);
  std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
  long double out;
  if (bits <= 64) {
    out = static_cast<long double>(mpz_get_ui(a.get_mpz_t()));
  } else {
    BigInt top = a >> (bits - 64);
    out = std::ldexp(static_cast<long double>(mpz_get_ui(top.get_mpz_t())),
                     static_cast<int>(bits - 64));
  }
  return s < 0 ? -out : out;
}

// frac(alpha * v) for integer v, with alpha taken at its exact binary value.
// The product is reduced mod 1 in integer arithmetic, so the only rounding
// is the final conversion into long double. Result lies in [0, 1).
inline long double frac_product_mod1(long double alpha, const BigInt& v) {
  if (alpha == 0.0L || sgn(v) == 0 || !std::isfinite(alpha)) return 0.0L;
  int e = 0;
  long double m = std::frexp(alpha, &e);
  long double scaled = std::ldexp(m, 64);  // integer magnitude in [2^63, 2^64)
  bool neg = scaled < 0;
  BigInt mant = bigint_from_u64(
      static_cast<std::uint64_t>(neg ? -scaled : scaled));
  if (neg) mant = -mant;
  long k = static_cast<long>(e) - 64;
  // alpha = mant * 2^k; k >= 0 makes alpha * v an integer.
  if (k >= 0) return 0.0L;
  BigInt prod = mant * v;
  BigInt r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), prod.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(-k));
  long double frac = std::ldexp(to_long_double(r), static_cast<int>(k));
  if (frac < 0.0L || frac >= 1.0L) frac = 0.0L;
  return frac;
}

// e(t) = exp(2*pi*i*t)
inline std::complex<long double> unit_phase(long double t) {
  long double w = 2.0L * kPi * t;
  return {std::cos(w), std::sin(w)};
}

// Distance from x to the nearest integer, in [0, 1/2].
inline long double nearest_int_distance(long double x) {
  return std::fabs(std::remainder(x, 1.0L));
}

}  // namespace circlesum
