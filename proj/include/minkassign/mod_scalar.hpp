#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>

#include "minkassign/errors.hpp"
#include "minkassign/rational.hpp"

namespace minkassign {

// Extended-gcd inverse of a modulo m. Throws UnluckyPrimeError when a is not
// invertible (a == 0 or gcd(a, m) > 1); callers treat that as a resample signal.
inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
  if (m < 2) throw DomainError("modulus must be >= 2");
  a %= m;
  if (a == 0) throw UnluckyPrimeError("zero has no inverse mod " + std::to_string(m));
  std::int64_t t = 0, new_t = 1;
  std::uint64_t r = m, new_r = a;
  while (new_r != 0) {
    std::uint64_t q = r / new_r;
    std::int64_t tmp_t = t - static_cast<std::int64_t>(q) * new_t;
    t = new_t;
    new_t = tmp_t;
    std::uint64_t tmp_r = r - q * new_r;
    r = new_r;
    new_r = tmp_r;
  }
  if (r != 1) {
    throw UnluckyPrimeError(std::to_string(a) + " not invertible mod " + std::to_string(m));
  }
  return t < 0 ? static_cast<std::uint64_t>(t + static_cast<std::int64_t>(m)) : static_cast<std::uint64_t>(t);
}

// Residue arithmetic modulo a runtime prime. Default modulus is the Mersenne
// prime 2^61 - 1, large enough that random evaluation points make accidental
// identity collisions vanishingly unlikely.
class ModScalar {
 public:
  static constexpr std::uint64_t kDefaultPrime = (std::uint64_t{1} << 61) - 1;

  ModScalar() : v_(0), p_(kDefaultPrime) {}
  ModScalar(std::uint64_t value, std::uint64_t p) : v_(value % check(p)), p_(p) {}

  static ModScalar from_integer(const mpz_class& n, std::uint64_t p) {
    check(p);
    std::uint64_t r = mpz_fdiv_ui(n.get_mpz_t(), p);  // nonnegative remainder, handles negatives
    return ModScalar(r, p);
  }

  std::uint64_t value() const { return v_; }
  std::uint64_t modulus() const { return p_; }

  ModScalar operator-() const { return ModScalar(v_ == 0 ? 0 : p_ - v_, p_); }

  ModScalar& operator+=(const ModScalar& o) {
    match(o);
    v_ += o.v_;
    if (v_ >= p_) v_ -= p_;
    return *this;
  }
  ModScalar& operator-=(const ModScalar& o) {
    match(o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + p_ - o.v_;
    return *this;
  }
  ModScalar& operator*=(const ModScalar& o) {
    match(o);
    v_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v_) * o.v_) % p_);
    return *this;
  }
  ModScalar& operator/=(const ModScalar& o) {
    match(o);
    return *this *= o.inverse();
  }

  ModScalar inverse() const { return ModScalar(mod_inverse(v_, p_), p_); }

  ModScalar pow(std::uint64_t e) const {
    ModScalar base = *this, acc(1, p_);
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  friend ModScalar operator+(ModScalar a, const ModScalar& b) { return a += b; }
  friend ModScalar operator-(ModScalar a, const ModScalar& b) { return a -= b; }
  friend ModScalar operator*(ModScalar a, const ModScalar& b) { return a *= b; }
  friend ModScalar operator/(ModScalar a, const ModScalar& b) { return a /= b; }

  friend bool operator==(const ModScalar& a, const ModScalar& b) {
    return a.p_ == b.p_ && a.v_ == b.v_;
  }
  friend bool operator!=(const ModScalar& a, const ModScalar& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const ModScalar& s) {
    return os << s.v_ << " (mod " << s.p_ << ")";
  }

 private:
  static std::uint64_t check(std::uint64_t p) {
    if (p < 2) throw DomainError("modulus must be >= 2");
    return p;
  }
  void match(const ModScalar& o) const {
    if (p_ != o.p_) throw DomainError("mixed moduli in modular arithmetic");
  }

  std::uint64_t v_;
  std::uint64_t p_;
};

// Image of an exact rational mod p. A denominator divisible by p is an
// unlucky-prime event, reported as retryable.
inline ModScalar rational_to_mod(const Rational& x, std::uint64_t p) {
  ModScalar num = ModScalar::from_integer(x.num(), p);
  ModScalar den = ModScalar::from_integer(x.den(), p);
  return num / den;
}

}  // namespace minkassign
