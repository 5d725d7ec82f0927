#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "spnet/error.hpp"

namespace spnet {

/// Exact rational used for every duration and makespan.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

/// Parses "3", "-2", "1/10" or "2.5" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw ParseError("malformed rational: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  auto digits_only = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!digits_only(num) || !digits_only(den)) fail();
    Integer d{std::string(den)};
    if (d == 0) fail();
    value = Rational(Integer{std::string(num)}, d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !digits_only(whole)) ||
        (!frac.empty() && !digits_only(frac)))
      fail();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer w = whole.empty() ? Integer(0) : Integer{std::string(whole)};
    Integer f = frac.empty() ? Integer(0) : Integer{std::string(frac)};
    value = Rational(w * scale + f, scale);
  } else {
    if (!digits_only(body)) fail();
    value = Rational(Integer{std::string(body)});
  }
  return negative ? Rational(-value) : value;
}

/// "p/q", or "p" when the denominator is one.
inline std::string format_rational(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace spnet
