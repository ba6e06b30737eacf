#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "cantorperm/errors.hpp"

namespace cantorperm {

using Rational = mpq_class;
using BigInt = mpz_class;

/// "p/q" in lowest terms with q > 0; integers keep the "/1".
inline std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Accepts "p/q" or a bare integer "p".
inline Rational parse_rational(std::string_view s) {
  Rational q;
  std::string str(s);
  if (str.empty() || q.set_str(str, 10) != 0 || q.get_den() == 0)
    throw ArgumentError("not a rational number: \"" + str + "\"");
  q.canonicalize();
  return q;
}

/// base^exp for a possibly negative exponent.
inline Rational rational_pow(long base, long exp) {
  if (base == 0 && exp < 0) throw ArgumentError("zero to a negative power");
  BigInt p;
  mpz_pow_ui(p.get_mpz_t(), BigInt(base).get_mpz_t(), static_cast<unsigned long>(exp < 0 ? -exp : exp));
  if (exp >= 0) return Rational(p);
  Rational r(BigInt(1), p);
  r.canonicalize();
  return r;
}

}  // namespace cantorperm
