#pragma once

// Multivariate polynomials over the integers. Terms are held in a canonical
// graded-lexicographic order (highest total degree first, ties broken by the
// lexicographically greater exponent vector), no zero coefficients, no
// duplicate exponent vectors. The text form round-trips bit-exactly through
// parse/print.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circlesum/bigint.hpp"

namespace circlesum {

struct Monomial {
  std::vector<std::int32_t> exponents;
  BigInt coefficient;

  int total_degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
  }
  bool operator==(const Monomial& o) const {
    return exponents == o.exponents && coefficient == o.coefficient;
  }
};

// true when a sorts strictly before b in canonical order
inline bool grlex_before(std::span<const std::int32_t> a,
                         std::span<const std::int32_t> b) {
  int da = std::accumulate(a.begin(), a.end(), 0);
  int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int n) : n_(check_n(n)) {}

  static Polynomial zero(int n) { return Polynomial(n); }

  static Polynomial constant(int n, BigInt c) {
    Polynomial p(n);
    if (c != 0) p.terms_.push_back({std::vector<std::int32_t>(n, 0), std::move(c)});
    return p;
  }

  // index is 1-based
  static Polynomial variable(int n, int index) {
    if (index < 1 || index > n)
      throw std::invalid_argument("variable index out of range");
    Polynomial p(n);
    std::vector<std::int32_t> e(n, 0);
    e[index - 1] = 1;
    p.terms_.push_back({std::move(e), BigInt(1)});
    return p;
  }

  int var_count() const { return n_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // degree of the zero polynomial is -1
  int degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, t.total_degree());
    return d;
  }

  void add_term(std::vector<std::int32_t> exp, BigInt coef) {
    if (static_cast<int>(exp.size()) != n_)
      throw std::invalid_argument("exponent vector length mismatch");
    if (coef == 0) return;
    auto it = std::lower_bound(
        terms_.begin(), terms_.end(), exp,
        [](const Monomial& m, const std::vector<std::int32_t>& e) {
          return grlex_before(m.exponents, e);
        });
    if (it != terms_.end() && it->exponents == exp) {
      it->coefficient += coef;
      if (it->coefficient == 0) terms_.erase(it);
    } else {
      terms_.insert(it, Monomial{std::move(exp), std::move(coef)});
    }
  }

  Polynomial operator+(const Polynomial& o) const {
    check_same(o);
    Polynomial r = *this;
    for (const auto& t : o.terms_) r.add_term(t.exponents, t.coefficient);
    return r;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coefficient = -t.coefficient;
    return r;
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

  Polynomial operator*(const Polynomial& o) const {
    check_same(o);
    Polynomial r(n_);
    for (const auto& a : terms_) {
      for (const auto& b : o.terms_) {
        std::vector<std::int32_t> e(n_);
        for (int i = 0; i < n_; ++i) e[i] = a.exponents[i] + b.exponents[i];
        r.add_term(std::move(e), a.coefficient * b.coefficient);
      }
    }
    return r;
  }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(n_, 1);
    Polynomial base = *this;
    while (k > 0) {
      if (k & 1u) r = r * base;
      base = base * base;
      k >>= 1u;
    }
    return r;
  }

  BigInt eval(std::span<const BigInt> x) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("evaluation point has wrong dimension");
    BigInt acc = 0;
    BigInt term;
    for (const auto& t : terms_) {
      term = t.coefficient;
      for (int i = 0; i < n_; ++i) {
        for (std::int32_t k = 0; k < t.exponents[i]; ++k) term *= x[i];
      }
      acc += term;
    }
    return acc;
  }

  BigInt eval(std::span<const std::int64_t> x) const {
    std::vector<BigInt> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = BigInt(static_cast<long>(x[i]));
    return eval(std::span<const BigInt>(z));
  }

  // real-point evaluation; coefficients converted at full long double width
  long double eval_real(std::span<const long double> x) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("evaluation point has wrong dimension");
    long double acc = 0.0L;
    for (const auto& t : terms_) {
      long double term = to_long_double(t.coefficient);
      for (int i = 0; i < n_; ++i)
        for (std::int32_t k = 0; k < t.exponents[i]; ++k) term *= x[i];
      acc += term;
    }
    return acc;
  }

  // sum of the terms of total degree exactly ell (zero polynomial if none)
  Polynomial degree_part(int ell) const {
    Polynomial r(n_);
    for (const auto& t : terms_)
      if (t.total_degree() == ell) r.terms_.push_back(t);
    return r;
  }

  bool operator==(const Polynomial& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms_) {
      bool neg = t.coefficient < 0;
      BigInt mag = abs(t.coefficient);
      if (first) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      first = false;
      bool has_vars = t.total_degree() > 0;
      bool wrote_coef = false;
      if (!has_vars || mag != 1) {
        out += mag.get_str();
        wrote_coef = true;
      }
      for (int i = 0; i < n_; ++i) {
        if (t.exponents[i] == 0) continue;
        if (wrote_coef) out += "*";
        wrote_coef = true;
        out += "x" + std::to_string(i + 1);
        if (t.exponents[i] > 1) out += "^" + std::to_string(t.exponents[i]);
      }
    }
    return out;
  }

 private:
  static int check_n(int n) {
    if (n < 0) throw std::invalid_argument("negative variable count");
    return n;
  }
  void check_same(const Polynomial& o) const {
    if (n_ != o.n_) throw std::invalid_argument("variable count mismatch");
  }

  int n_ = 0;
  std::vector<Monomial> terms_;
};

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view text, int n) : text_(text), n_(n) {}

  Polynomial parse() {
    Polynomial p(n_);
    skip_ws();
    int sign = 1;
    if (peek() == '+' || peek() == '-') {
      if (get() == '-') sign = -1;
      skip_ws();
    }
    parse_term(p, sign);
    skip_ws();
    while (pos_ < text_.size()) {
      char op = get();
      if (op != '+' && op != '-') fail("expected '+' or '-'", pos_ - 1);
      skip_ws();
      parse_term(p, op == '-' ? -1 : 1);
      skip_ws();
    }
    return p;
  }

 private:
  void parse_term(Polynomial& p, int sign) {
    BigInt coef = sign;
    std::vector<std::int32_t> exp(n_, 0);
    bool any = false;
    while (true) {
      skip_ws();
      std::size_t here = pos_;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        coef *= parse_integer();
      } else if (peek() == 'x') {
        get();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
          fail("variable index expected after 'x'", pos_);
        long idx = parse_small_int();
        if (idx < 1 || idx > n_)
          fail("variable x" + std::to_string(idx) + " out of range (n = " +
                   std::to_string(n_) + ")",
               here);
        long e = 1;
        skip_ws();
        if (peek() == '^') {
          get();
          skip_ws();
          if (!std::isdigit(static_cast<unsigned char>(peek())))
            fail("exponent expected after '^'", pos_);
          e = parse_small_int();
          if (e < 0 || e > 64) fail("exponent out of range", here);
        }
        exp[idx - 1] += static_cast<std::int32_t>(e);
      } else {
        fail("unexpected token", here);
      }
      any = true;
      skip_ws();
      if (peek() == '*') {
        get();
        continue;
      }
      break;
    }
    if (!any) fail("empty term", pos_);
    p.add_term(std::move(exp), std::move(coef));
  }

  BigInt parse_integer() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) get();
    return BigInt(std::string(text_.substr(start, pos_ - start)), 10);
  }

  long parse_small_int() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) get();
    std::string s(text_.substr(start, pos_ - start));
    if (s.size() > 6) fail("number too large", start);
    return std::stol(s);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char get() { return pos_ < text_.size() ? text_[pos_++] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& why, std::size_t at) {
    std::string ctx(text_.substr(at, std::min<std::size_t>(8, text_.size() - at)));
    throw std::invalid_argument("polynomial parse error at column " +
                                std::to_string(at + 1) + " near '" + ctx +
                                "': " + why);
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the text form, e.g. "3*x1^2*x2 - x3 + 7". The special form "0"
// yields the zero polynomial.
inline Polynomial parse_polynomial(std::string_view text, int n) {
  return detail::PolyParser(text, n).parse();
}

}  // namespace circlesum
