#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>

#include "minkassign/errors.hpp"

namespace minkassign {

// Arbitrary-precision rational with eager normalization: always in lowest
// terms, denominator always positive. Backed by GMP's mpq type.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT: implicit by design, mirrors integer literals
  Rational(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(const mpz_class& n) : v_(n) {}
  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Exact conversion from a binary double (used when JSON carries plain numbers).
  static Rational from_double(double x) {
    Rational r;
    r.v_ = mpq_class(x);
    return r;
  }

  // Accepts "num/den" or "num", optionally signed. Throws DomainError otherwise.
  static Rational parse(const std::string& s) {
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0) {
      throw DomainError("invalid rational literal: \"" + s + "\"");
    }
    if (q.get_den() == 0) throw DomainError("rational with zero denominator: \"" + s + "\"");
    q.canonicalize();
    Rational r;
    r.v_ = q;
    return r;
  }

  // Canonical form "num/den", denominator always written (e.g. "0/1", "5/4", "-3/7").
  std::string str() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }
  double to_double() const { return v_.get_d(); }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }

  Rational operator-() const {
    Rational r;
    r.v_ = -v_;
    return r;
  }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (sgn(o.v_) == 0) throw DomainError("rational division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace minkassign

template <>
struct std::hash<minkassign::Rational> {
  std::size_t operator()(const minkassign::Rational& r) const noexcept {
    std::size_t hn = std::hash<unsigned long>{}(mpz_fdiv_ui(r.num().get_mpz_t(), 0xFFFFFFFFFFFFFFC5ull));
    std::size_t hd = std::hash<unsigned long>{}(mpz_fdiv_ui(r.den().get_mpz_t(), 0xFFFFFFFFFFFFFFC5ull));
    return hn ^ (hd + 0x9e3779b97f4a7c15ull + (hn << 6) + (hn >> 2));
  }
};
