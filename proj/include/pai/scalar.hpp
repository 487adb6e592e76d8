#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "pai/errors.hpp"

namespace pai {

/// Exact rational scalar used by the exact test/analysis path.
using Rational = boost::multiprecision::cpp_rational;

/// Arithmetic policy for the two scalar paths: IEEE double (tolerance 1e-9)
/// and arbitrary-precision rationals (tolerance 0, every comparison exact).
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static double tolerance() { return 1e-9; }
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(std::int64_t v) { return static_cast<double>(v); }
  static double from_ratio(std::int64_t num, std::int64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool is_exact = true;
  static Rational tolerance() { return Rational(0); }
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_int(std::int64_t v) { return Rational(v); }
  static Rational from_ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }
  // Every finite double is a dyadic rational; this conversion is exact.
  static Rational from_double(double v) { return Rational(v); }
  static double to_double(const Rational& v) { return v.template convert_to<double>(); }
  static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
};

/// |a - b| <= tolerance of the scalar path (exact equality for rationals).
template <class S>
bool approx_equal(const S& a, const S& b) {
  return scalar_traits<S>::abs(a - b) <= scalar_traits<S>::tolerance();
}

namespace detail {
using BigInt = boost::multiprecision::cpp_int;

inline BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  if ((num % den) != 0 && ((num < 0) != (den < 0))) --q;
  return q;
}
}  // namespace detail

/// floor(x) for an exact rational.
inline detail::BigInt rational_floor(const Rational& x) {
  return detail::floor_div(numerator(x), denominator(x));
}

/// ceil(x) for an exact rational.
inline detail::BigInt rational_ceil(const Rational& x) {
  return -detail::floor_div(-numerator(x), denominator(x));
}

/// Parses a plain decimal literal ("-3", "0.01", "1.5e-2") into an exact rational.
inline Rational rational_from_decimal(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const char* why) -> Rational {
    throw ParseError(std::string("invalid decimal '") + std::string(text) + "': " + why);
  };
  if (text.empty()) fail("empty");
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  detail::BigInt mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  for (; pos < text.size() && text[pos] >= '0' && text[pos] <= '9'; ++pos) {
    mantissa = mantissa * 10 + (text[pos] - '0');
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    for (; pos < text.size() && text[pos] >= '0' && text[pos] <= '9'; ++pos) {
      mantissa = mantissa * 10 + (text[pos] - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) fail("no digits");
  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_neg = text[pos] == '-';
      ++pos;
    }
    if (pos == text.size()) fail("empty exponent");
    for (; pos < text.size() && text[pos] >= '0' && text[pos] <= '9'; ++pos)
      exponent = exponent * 10 + (text[pos] - '0');
    if (exp_neg) exponent = -exponent;
  }
  if (pos != text.size()) fail("trailing characters");
  long shift = exponent - frac_digits;
  detail::BigInt num = negative ? detail::BigInt(-mantissa) : mantissa;
  detail::BigInt den = 1;
  if (shift >= 0)
    for (long i = 0; i < shift; ++i) num *= 10;
  else
    for (long i = 0; i < -shift; ++i) den *= 10;
  return Rational(num, den);
}

/// Recovers the short rational a double originated from (continued fractions).
/// Used when JSON hands us 0.01 and the geometry needs exactly 1/100.
inline Rational nearest_rational(double x, std::int64_t max_denominator = 1'000'000) {
  if (!std::isfinite(x)) throw ConfigError("nearest_rational: non-finite input");
  bool negative = x < 0;
  double target = negative ? -x : x;
  // Convergents of the continued fraction of `target`.
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p_cur = static_cast<std::int64_t>(std::floor(target));
  std::int64_t q_cur = 1;
  double frac = target - std::floor(target);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    double inv = 1.0 / frac;
    std::int64_t a = static_cast<std::int64_t>(std::floor(inv));
    frac = inv - std::floor(inv);
    std::int64_t p_next = a * p_cur + p_prev;
    std::int64_t q_next = a * q_cur + q_prev;
    if (q_next > max_denominator) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    if (std::fabs(static_cast<double>(p_cur) / static_cast<double>(q_cur) - target) <
        1e-13 * std::max(1.0, target))
      break;
  }
  Rational result(p_cur, q_cur);
  double err = std::fabs(scalar_traits<Rational>::to_double(result) - target);
  if (err > 1e-9 * std::max(1.0, target))
    throw ConfigError("nearest_rational: no short rational within tolerance of " +
                      std::to_string(x));
  return negative ? Rational(-result) : result;
}

}  // namespace pai
