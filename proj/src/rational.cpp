#include "smld/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace smld {

Rational rational_pow(const Rational& base, long exponent) {
    if (exponent == 0) return Rational(1);
    const bool invert = exponent < 0;
    unsigned long e = invert ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
    Rational out;
    if (invert) {
        if (num == 0) throw std::domain_error("rational_pow: zero to a negative power");
        out = Rational(den, num);
    } else {
        out = Rational(num, den);
    }
    out.canonicalize();
    return out;
}

std::optional<Rational> exact_root(const Rational& value, unsigned long q) {
    if (value < 0) return std::nullopt;
    if (q == 1) return value;
    Integer num, den;
    if (mpz_root(num.get_mpz_t(), value.get_num_mpz_t(), q) == 0) return std::nullopt;
    if (mpz_root(den.get_mpz_t(), value.get_den_mpz_t(), q) == 0) return std::nullopt;
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::vector<Rational> rational_candidates(double v, long max_den) {
    std::vector<Rational> out;
    if (!std::isfinite(v)) return out;
    // Convergents h_k / k_k of the continued fraction of v.
    Integer h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
    double rem = v;
    for (int it = 0; it < 64; ++it) {
        const double a_d = std::floor(rem);
        if (std::abs(a_d) > 1e15) break;
        Integer a(a_d);
        Integer h = a * h_prev + h_prev2;
        Integer k = a * k_prev + k_prev2;
        if (k > max_den) break;
        out.emplace_back(h, k);
        out.back().canonicalize();
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        const double frac = rem - a_d;
        if (frac < 1e-15) break;
        rem = 1.0 / frac;
    }
    std::vector<Rational> ordered(out.rbegin(), out.rend());
    ordered.push_back(to_rational(v));
    return ordered;
}

Rational poly_eval(const RationalPoly& p, const Rational& x) {
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::optional<RationalPoly> deflate(const RationalPoly& p, const Rational& r) {
    if (p.size() < 2) return std::nullopt;
    RationalPoly q(p.size() - 1);
    Rational carry = 0;
    for (std::size_t i = p.size(); i-- > 1;) {
        carry = p[i] + carry * r;
        q[i - 1] = carry;
    }
    Rational remainder = p[0] + carry * r;
    if (remainder != 0) return std::nullopt;
    return q;
}

std::string to_string(const Rational& r) { return r.get_str(); }

Rational rational_from_string(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    r.canonicalize();
    return r;
}

} // namespace smld
