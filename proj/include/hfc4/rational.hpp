#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <ostream>
#include <string>

#include "hfc4/errors.hpp"

namespace hfc4 {

using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion: every finite double is a dyadic rational.
inline Rational exact(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot convert a non-finite value to a rational");
  return Rational(x);
}

/// Lebesgue exponent in [1, ∞] with exact arithmetic; ∞ is a sentinel with 1/∞ = 0.
class Exponent {
 public:
  Exponent() = default;
  Exponent(Rational v) : value_(std::move(v)) {}  // NOLINT implicit on purpose
  Exponent(long v) : value_(v) {}                  // NOLINT
  static Exponent infinity() {
    Exponent e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  const Rational& value() const {
    if (infinite_) throw DomainError("infinite exponent has no finite value");
    return value_;
  }
  Rational reciprocal() const {
    if (infinite_) return Rational(0);
    if (value_ == 0) throw DomainError("reciprocal of a zero exponent");
    return Rational(1) / value_;
  }
  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_.convert_to<double>();
  }
  std::string str() const { return infinite_ ? std::string("inf") : value_.str(); }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const Exponent& a, const Exponent& b) { return !(b < a); }
  friend std::ostream& operator<<(std::ostream& os, const Exponent& e) { return os << e.str(); }

 private:
  Rational value_{0};
  bool infinite_ = false;
};

/// Hölder conjugate q' = q/(q-1), with 1' = ∞ and ∞' = 1.
inline Exponent conjugate(const Exponent& q) {
  if (q.is_infinite()) return Exponent(Rational(1));
  if (q.value() == 1) return Exponent::infinity();
  return Exponent(q.value() / (q.value() - 1));
}

}  // namespace hfc4
