#pragma once

#include <ostream>

#include "minkassign/errors.hpp"
#include "minkassign/rational.hpp"

namespace minkassign {

// First-order dual number a + b*eps with eps^2 = 0. Evaluating a rational
// expression with one input's b set to 1 yields the exact partial derivative
// in the b component.
template <class T>
struct Dual {
  T a{};  // value
  T b{};  // derivative

  Dual() = default;
  Dual(T value) : a(std::move(value)) {}  // NOLINT: implicit lift of constants
  Dual(T value, T deriv) : a(std::move(value)), b(std::move(deriv)) {}

  Dual operator-() const { return Dual(-a, -b); }

  Dual& operator+=(const Dual& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    b = a * o.b + b * o.a;
    a = a * o.a;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    if (o.a == T{}) throw DomainError("dual division by zero value part");
    b = (b * o.a - a * o.b) / (o.a * o.a);
    a = a / o.a;
    return *this;
  }

  friend Dual operator+(Dual x, const Dual& y) { return x += y; }
  friend Dual operator-(Dual x, const Dual& y) { return x -= y; }
  friend Dual operator*(Dual x, const Dual& y) { return x *= y; }
  friend Dual operator/(Dual x, const Dual& y) { return x /= y; }

  friend bool operator==(const Dual& x, const Dual& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const Dual& x, const Dual& y) { return !(x == y); }

  friend std::ostream& operator<<(std::ostream& os, const Dual& d) {
    return os << d.a << " + " << d.b << "*eps";
  }
};

using DualRational = Dual<Rational>;

}  // namespace minkassign
