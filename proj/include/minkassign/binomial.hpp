#pragma once

#include <gmpxx.h>

#include "minkassign/errors.hpp"
#include "minkassign/rational.hpp"

namespace minkassign {

// Binomial coefficient with integer (possibly negative) top argument:
//   binomial(x, 0) = 1
//   binomial(x, b) = x(x-1)...(x-b+1) / b!
// so binomial(x, b) = 0 for 0 <= x < b, and negative tops follow the upper
// negation rule binomial(-x, b) = (-1)^b binomial(x+b-1, b).
inline mpz_class binomial_mpz(const mpz_class& top, long bottom) {
  if (bottom < 0) throw DomainError("binomial with negative bottom argument");
  mpz_class out;
  mpz_bin_ui(out.get_mpz_t(), top.get_mpz_t(), static_cast<unsigned long>(bottom));
  return out;
}

inline Rational binomial(const mpz_class& top, long bottom) {
  return Rational(binomial_mpz(top, bottom));
}

inline Rational binomial(long top, long bottom) { return binomial(mpz_class(top), bottom); }

}  // namespace minkassign
