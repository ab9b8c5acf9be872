#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>

namespace lapmap {

/// Exact rational scalar (GMP backed). All map coordinates live here by default.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Variable-precision binary float (MPFR backed) for irrational tent slopes.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

/// Parses `p/q`, an integer, or a plain decimal literal (`-0.125`), exactly.
/// Decimals are read as p / 10^k; exponents are not accepted.
Rational parse_rational(std::string_view text);

/// `p/q`, or `p` when the denominator is one.
std::string to_string(const Rational& value);

/// Fixed 12-significant-digit decimal rendering used in every artifact.
std::string format_decimal(double value);

/// Nearest 12-significant-digit decimal, returned as an exact rational.
Rational round_decimal(double value);

/// Sets the working precision of `Real` in bits (affects newly created values).
void set_real_precision(unsigned bits);
unsigned real_precision();

/// Traits that let the generic map code treat exact and rounded scalars alike.
template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational tolerance() { return Rational(0); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static Rational from_rational(const Rational& v) { return v; }
  static std::string to_string(const Rational& v) { return lapmap::to_string(v); }
};

template <>
struct ScalarTraits<Real> {
  static constexpr bool exact = false;
  /// Slack for containment and equality checks: 2^(16 - precision).
  static Real tolerance();
  static double to_double(const Real& v) { return v.convert_to<double>(); }
  static Real from_rational(const Rational& v);
  static std::string to_string(const Real& v);
};

template <class Scalar>
double to_double(const Scalar& v) {
  return ScalarTraits<Scalar>::to_double(v);
}

template <class Scalar>
Scalar abs_value(const Scalar& v) {
  return v < 0 ? Scalar(-v) : v;
}

}  // namespace lapmap
