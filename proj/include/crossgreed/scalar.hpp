#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <string>

namespace crossgreed {

// Arbitrary-precision rational. GMP keeps every result in lowest terms.
using Rational = mpq_class;

template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool kExact = true;
  static constexpr const char* kName = "exact";

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational half() { return Rational(1, 2); }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static bool sums_to_one(const Rational& total) { return total == 1; }
  static bool equal(const Rational& a, const Rational& b) { return a == b; }
  static Rational ratio(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  static std::string to_string(const Rational& x) { return x.get_str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool kExact = false;
  static constexpr const char* kName = "float";
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kEqualTolerance = 1e-12;

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double half() { return 0.5; }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static bool is_zero(double x) { return x == 0.0; }
  static bool sums_to_one(double total) { return std::fabs(total - 1.0) <= kSumTolerance; }
  static bool equal(double a, double b) { return std::fabs(a - b) <= kEqualTolerance; }
  static double ratio(long num, long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static std::string to_string(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
  }
};

// Converts a double to the nearest scalar. For Rational this is the exact
// binary value of the double.
template <class Scalar>
Scalar from_double(double x) {
  return Scalar(x);
}

template <class Scalar>
double to_double(const Scalar& x) {
  return ScalarTraits<Scalar>::to_double(x);
}

}  // namespace crossgreed
