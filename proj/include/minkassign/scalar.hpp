#pragma once

#include <gmpxx.h>

#include "minkassign/dual.hpp"
#include "minkassign/mod_scalar.hpp"
#include "minkassign/rational.hpp"

namespace minkassign {

// Small glue layer so templated evaluators can make constants of the right
// scalar type. ModScalar constants need a modulus, so constants are always
// built "like" an existing sample value.

inline Rational value_like(const Rational&, const mpz_class& n) { return Rational(n); }
inline ModScalar value_like(const ModScalar& s, const mpz_class& n) {
  return ModScalar::from_integer(n, s.modulus());
}
inline double value_like(double, const mpz_class& n) { return n.get_d(); }
template <class T>
Dual<T> value_like(const Dual<T>& s, const mpz_class& n) {
  return Dual<T>(value_like(s.a, n));
}

template <class S>
S zero_like(const S& sample) {
  return value_like(sample, mpz_class(0));
}
template <class S>
S one_like(const S& sample) {
  return value_like(sample, mpz_class(1));
}

inline bool is_zero(const Rational& x) { return x.sign() == 0; }
inline bool is_zero(const ModScalar& x) { return x.value() == 0; }
inline bool is_zero(double x) { return x == 0.0; }
template <class T>
bool is_zero(const Dual<T>& d) {
  return is_zero(d.a) && is_zero(d.b);
}

// Usable as a rate: positive where an order exists, nonzero for residues.
inline bool is_valid_rate(const Rational& x) { return x.sign() > 0; }
inline bool is_valid_rate(const ModScalar& x) { return x.value() != 0; }
inline bool is_valid_rate(double x) { return x > 0.0; }
template <class T>
bool is_valid_rate(const Dual<T>& d) {
  return is_valid_rate(d.a);
}

}  // namespace minkassign
