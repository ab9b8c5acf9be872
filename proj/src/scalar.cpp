#include "lapmap/scalar.hpp"

#include "lapmap/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace lapmap {

namespace {

boost::multiprecision::mpz_int parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw ParseError("empty number in '" + std::string(whole) + "'");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("invalid character '" + std::string(1, c) + "' in '" + std::string(whole) +
                       "'");
    }
  }
  return boost::multiprecision::mpz_int(std::string(digits));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

unsigned g_real_bits = 128;

}  // namespace

namespace {
const bool g_real_precision_init = [] {
  set_real_precision(128);
  return true;
}();
}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = trim(text);
  std::string_view s = whole;
  if (s.empty()) throw ParseError("empty scalar");
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = parse_digits(trim(s.substr(0, slash)), whole);
    auto den = parse_digits(trim(s.substr(slash + 1)), whole);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(whole) + "'");
    value = Rational(num, den);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) {
      throw ParseError("invalid decimal '" + std::string(whole) + "'");
    }
    boost::multiprecision::mpz_int num = int_part.empty() ? 0 : parse_digits(int_part, whole);
    boost::multiprecision::mpz_int den = 1;
    if (!frac_part.empty()) {
      auto frac = parse_digits(frac_part, whole);
      for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
      num = num * den + frac;
    }
    value = Rational(num, den);
  } else {
    value = Rational(parse_digits(s, whole));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
  auto num = boost::multiprecision::numerator(value);
  auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string format_decimal(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Rational round_decimal(double value) {
  if (!std::isfinite(value)) throw DomainError("cannot round a non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e", value);
  std::string_view s(buf);
  auto e = s.find('e');
  Rational mantissa = parse_rational(s.substr(0, e));
  int exponent = std::stoi(std::string(s.substr(e + 1)));
  Rational scale(1);
  for (int i = 0; i < std::abs(exponent); ++i) scale *= 10;
  return exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa / scale);
}

void set_real_precision(unsigned bits) {
  if (bits < 24 || bits > 100000) throw ConfigError("precision must lie in [24, 100000] bits");
  g_real_bits = bits;
  Real::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1);
}

unsigned real_precision() { return g_real_bits; }

Real ScalarTraits<Real>::tolerance() {
  Real tol(1);
  const int shift = 16 - static_cast<int>(g_real_bits);
  return boost::multiprecision::ldexp(tol, shift);
}

Real ScalarTraits<Real>::from_rational(const Rational& v) {
  return Real(boost::multiprecision::numerator(v).str()) /
         Real(boost::multiprecision::denominator(v).str());
}

std::string ScalarTraits<Real>::to_string(const Real& v) {
  return v.str(static_cast<std::streamsize>(std::ceil(g_real_bits * 0.30103)),
               std::ios_base::scientific);
}

}  // namespace lapmap
