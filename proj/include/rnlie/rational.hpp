#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace rnlie {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Zero test used by every elimination routine: exact comparison for
/// rationals, absolute tolerance for floating point.
template <class T>
bool is_zero(const T& x, double tol) {
  if constexpr (is_exact_v<T>) {
    (void)tol;
    return x == 0;
  } else {
    return std::abs(x) <= tol;
  }
}

template <class T>
T abs_value(const T& x) {
  if constexpr (is_exact_v<T>) {
    return x < 0 ? Rational(-x) : x;
  } else {
    return std::abs(x);
  }
}

template <class T>
double to_double(const T& x) {
  if constexpr (is_exact_v<T>) {
    return x.template convert_to<double>();
  } else {
    return static_cast<double>(x);
  }
}

template <class T>
T from_double(double x) {
  if constexpr (is_exact_v<T>) {
    // exact binary expansion of the double
    return Rational(x);
  } else {
    return static_cast<T>(x);
  }
}

/// Parses "p/q", an integer, or a plain decimal ("-0.125", "1e-3") exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('/') != std::string::npos) {
    try {
      return Rational(s);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rational literal '" + s + "'");
    }
  }
  using boost::multiprecision::cpp_int;
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  cpp_int mantissa = 0;
  long exponent = 0;
  bool digits = false, dot = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (ch >= '0' && ch <= '9') {
      mantissa = mantissa * 10 + (ch - '0');
      if (dot) --exponent;
      digits = true;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) throw std::invalid_argument("malformed rational literal '" + s + "'");
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("malformed rational literal '" + s + "'");
    try {
      std::size_t used = 0;
      exponent += std::stol(s.substr(pos + 1), &used);
      if (pos + 1 + used != s.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rational literal '" + s + "'");
    }
  }
  Rational value(mantissa);
  cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(exponent)));
  value = exponent >= 0 ? Rational(value * Rational(scale)) : Rational(value / Rational(scale));
  return negative ? Rational(-value) : value;
}

/// "p/q" or "p" for integers.
inline std::string format_rational(const Rational& x) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace rnlie
