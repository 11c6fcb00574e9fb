#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>

#include "pb/errors.hpp"

namespace pb {

/// Exact arbitrary-precision rational; always kept in canonical form.
using Rational = mpq_class;

/// Costs, budgets and payments.
using Money = Rational;

/// Codomain of satisfaction functions (non-negative).
using SatValue = Rational;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline mpz_class parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s))
    throw ParseError(ParseErrorKind::malformed_number, "not a number: '" + std::string(whole) + "'");
  mpz_class value(std::string(s), 10);
  return negative ? mpz_class(-value) : value;
}

inline mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

}  // namespace detail

/// p/q in canonical form (mpq_class's two-argument constructor does not
/// reduce, and equality on unreduced values is unreliable).
inline Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// Parses "p/q", an integer, or a decimal such as "2.5", "-0.125" or "1.5e3"
/// into an exact rational. Throws ParseError(malformed_number) otherwise.
inline Rational parse_rational(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError(ParseErrorKind::malformed_number, "empty number");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = detail::parse_integer(detail::trim(s.substr(0, slash)), s);
    mpz_class den = detail::parse_integer(detail::trim(s.substr(slash + 1)), s);
    if (den == 0) throw ParseError(ParseErrorKind::malformed_number, "zero denominator: '" + std::string(s) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  std::string_view mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    mpz_class exp = detail::parse_integer(s.substr(e + 1), s);
    if (!exp.fits_slong_p() || abs(exp) > 4096)
      throw ParseError(ParseErrorKind::malformed_number, "exponent out of range: '" + std::string(s) + "'");
    exponent = exp.get_si();
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  std::string_view int_part = mantissa, frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !detail::all_digits(int_part)) ||
      (!frac_part.empty() && !detail::all_digits(frac_part)))
    throw ParseError(ParseErrorKind::malformed_number, "not a number: '" + std::string(s) + "'");
  digits.append(int_part).append(frac_part);

  mpz_class num(digits, 10);
  exponent -= static_cast<long>(frac_part.size());
  Rational r;
  if (exponent >= 0) {
    r = Rational(num * detail::pow10(static_cast<unsigned long>(exponent)));
  } else {
    r = Rational(num, detail::pow10(static_cast<unsigned long>(-exponent)));
    r.canonicalize();
  }
  return negative ? Rational(-r) : r;
}

/// Canonical text form: "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Rounds a double to `digits` significant decimal digits and returns the
/// exact rational value of the rounded decimal.
inline Rational rationalize(double x, int digits = 12) {
  if (x == 0.0) return Rational(0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  return parse_rational(buf);
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// Smallest integer >= r.
inline mpz_class ceil(const Rational& r) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

/// Largest integer <= r.
inline mpz_class floor(const Rational& r) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

}  // namespace pb
