#pragma once

// Exact rational helpers on top of GMP. Every finite double is a dyadic
// rational, so exact paths convert inputs without loss.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smld {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational to_rational(double v) {
    Rational r(v);
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

Rational rational_pow(const Rational& base, long exponent);

// Exact q-th root of a nonnegative rational when both numerator and
// denominator are perfect q-th powers.
std::optional<Rational> exact_root(const Rational& value, unsigned long q);

// Continued-fraction approximations of v with denominator at most max_den,
// best (last convergent) first. The dyadic value of v itself is appended.
std::vector<Rational> rational_candidates(double v, long max_den = 1000000);

// Polynomial over Q, coefficients in increasing degree.
using RationalPoly = std::vector<Rational>;

Rational poly_eval(const RationalPoly& p, const Rational& x);

// Divides p by (x - r); returns the quotient if the remainder is zero.
std::optional<RationalPoly> deflate(const RationalPoly& p, const Rational& r);

std::string to_string(const Rational& r);
Rational rational_from_string(const std::string& s);

} // namespace smld
