#include "coherent/numeric.hpp"

#include <cctype>
#include <sstream>

namespace coherent {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Base-10 accumulation; the GMP string constructors auto-detect the base,
// which would read a leading zero as octal.
boost::multiprecision::mpz_int digits_to_integer(std::string_view s) {
  boost::multiprecision::mpz_int value(0);
  for (char c : s) value = value * 10 + (c - '0');
  return value;
}

std::optional<Rational> parse_decimal(std::string_view text) {
  // [-+]? digits [. digits] [ (e|E) [-+]? digits ]
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string_view mantissa = s;
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    mantissa = s.substr(0, epos);
    std::string_view exp = s.substr(epos + 1);
    bool exp_neg = false;
    if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
      exp_neg = exp.front() == '-';
      exp.remove_prefix(1);
    }
    if (!all_digits(exp) || exp.size() > 6) return std::nullopt;
    exponent = std::stol(std::string(exp));
    if (exp_neg) exponent = -exponent;
  }
  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
    if (!all_digits(frac_part)) return std::nullopt;
  }
  if (!all_digits(int_part)) return std::nullopt;

  using Integer = boost::multiprecision::mpz_int;
  Integer digits = digits_to_integer(std::string(int_part) + std::string(frac_part));
  long shift = exponent - static_cast<long>(frac_part.size());
  Integer num = digits, den = 1;
  if (shift >= 0)
    num *= boost::multiprecision::pow(Integer(10), static_cast<unsigned>(shift));
  else
    den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(-shift));
  Rational r(num.backend().data(), den.backend().data());
  return negative ? Rational(-r) : r;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool neg = false;
    if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
      neg = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    boost::multiprecision::mpz_int d = digits_to_integer(den);
    if (d == 0) return std::nullopt;
    boost::multiprecision::mpz_int n = digits_to_integer(num);
    Rational r(n.backend().data(), d.backend().data());
    return neg ? Rational(-r) : r;
  }
  return parse_decimal(text);
}

std::string format_rational(const Rational& value) {
  std::ostringstream out;
  out << numerator(value) << "/" << denominator(value);
  return out.str();
}

Rational to_rational(const HighFloat& value) {
  if (!boost::multiprecision::isfinite(value))
    throw std::invalid_argument("to_rational: value is not finite");
  return Rational(value);
}

HighFloat to_highfloat(const Rational& value) {
  return HighFloat(numerator(value)) / HighFloat(denominator(value));
}

std::string format_highfloat(const HighFloat& value, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fmtflags(0), std::ios::floatfield);
  out.precision(digits);
  out << value;
  return out.str();
}

}  // namespace coherent
