#pragma once

// Non-negative extended rationals: exact GMP rationals plus a +infinity
// point. The threshold formulas are knife-edge comparisons, so they are kept
// in exact arithmetic end to end; doubles only appear at the reporting edge.

#include <limits>
#include <stdexcept>

#include "circlesum/bigint.hpp"

namespace circlesum {

class ExtendedRational {
 public:
  ExtendedRational() : value_(0) {}
  ExtendedRational(long num, long den = 1) : value_(num, den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    value_.canonicalize();
    check_sign();
  }
  explicit ExtendedRational(BigRat v) : value_(std::move(v)) {
    value_.canonicalize();
    check_sign();
  }

  static ExtendedRational infinity() {
    ExtendedRational x;
    x.infinite_ = true;
    return x;
  }

  // exact binary expansion of the double
  static ExtendedRational from_double(double v) {
    if (std::isinf(v)) return infinity();
    if (!(v >= 0)) throw std::invalid_argument("negative or NaN value");
    BigRat q;
    mpq_set_d(q.get_mpq_t(), v);
    return ExtendedRational(std::move(q));
  }

  bool is_infinite() const { return infinite_; }
  bool is_zero() const { return !infinite_ && value_ == 0; }
  const BigRat& rational() const {
    if (infinite_) throw std::logic_error("infinite value has no rational part");
    return value_;
  }

  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity()
                     : value_.get_d();
  }

  ExtendedRational operator+(const ExtendedRational& o) const {
    if (infinite_ || o.infinite_) return infinity();
    return ExtendedRational(BigRat(value_ + o.value_));
  }

  ExtendedRational operator*(const ExtendedRational& o) const {
    if (infinite_ || o.infinite_) {
      if (is_zero() || o.is_zero())
        throw std::logic_error("0 * infinity is undefined");
      return infinity();
    }
    return ExtendedRational(BigRat(value_ * o.value_));
  }

  // 1/x with 1/0 = +inf and 1/inf = 0
  ExtendedRational reciprocal() const {
    if (infinite_) return ExtendedRational(0);
    if (value_ == 0) return infinity();
    return ExtendedRational(BigRat(1 / value_));
  }

  bool operator==(const ExtendedRational& o) const {
    if (infinite_ != o.infinite_) return false;
    return infinite_ || value_ == o.value_;
  }
  bool operator<(const ExtendedRational& o) const {
    if (infinite_) return false;
    if (o.infinite_) return true;
    return value_ < o.value_;
  }
  bool operator>(const ExtendedRational& o) const { return o < *this; }
  bool operator<=(const ExtendedRational& o) const { return !(o < *this); }
  bool operator>=(const ExtendedRational& o) const { return !(*this < o); }

  friend ExtendedRational min(const ExtendedRational& a,
                              const ExtendedRational& b) {
    return a < b ? a : b;
  }
  friend ExtendedRational max(const ExtendedRational& a,
                              const ExtendedRational& b) {
    return a < b ? b : a;
  }

 private:
  void check_sign() const {
    if (value_ < 0) throw std::invalid_argument("negative value");
  }

  BigRat value_;
  bool infinite_ = false;
};

}  // namespace circlesum
