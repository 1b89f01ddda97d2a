#pragma once

// Exponential polynomials sum_k c_k x^{d_k} e^{mu_k x}, real-root isolation
// by Rolle recursion, and zero sets of linear recurrences.

#include <optional>
#include <vector>

#include "smld/matrix.hpp"
#include "smld/rational.hpp"

namespace smld {

struct ExpTerm {
    double c = 0;
    double mu = 0;
    int d = 0;
    // Exact data when known: c itself, and the base with mu = ln(base).
    std::optional<Rational> c_exact;
    std::optional<Rational> base;
};

class ExpPoly {
public:
    ExpPoly() = default;
    // Merges equal (mu, d) pairs (exactly when both bases are known, else
    // within 1e-12 in mu), drops zero coefficients, sorts by (mu, d).
    explicit ExpPoly(std::vector<ExpTerm> terms);

    const std::vector<ExpTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    // sum over distinct mu of (max d + 1); bounds the number of real zeros
    // by weight() - 1.
    int weight() const;
    // All coefficients and bases exact.
    bool exact() const;

    double operator()(double x) const;
    std::optional<Rational> exact_at(long n) const;
    // sum |c| max(1, |x|)^d e^{mu x}
    double scale(double x) const;
    // Value and scale both multiplied by the same positive factor so that
    // neither overflows.
    std::pair<double, double> scaled(double x) const;

    ExpPoly derivative() const;
    // Multiplies by e^{-mu x} where mu is the smallest exponent.
    ExpPoly divided_by_leading_exponential() const;

private:
    std::vector<ExpTerm> terms_;
};

// x -> w^T E(x, g) v assembled from the Jordan data of g; exact when g has
// exact Jordan data.
ExpPoly from_linear_orbit(const Matrix& g, const Vector& v, const Vector& w);

struct RootBracket {
    double lo = 0;
    double hi = 0;
    // The sign does not change but |value| dips below tol * scale at a
    // critical point: a likely double zero.
    bool tangential = false;
};

// Brackets, each with exactly one zero, covering every zero in [lo, hi].
// Throws ZeroFunction for an empty term list, TolTooCoarse when brackets of
// width tol cannot separate the critical points.
std::vector<RootBracket> isolate_zeros(const ExpPoly& ep, double lo, double hi, double tol = 1e-10);

struct Recurrence {
    // a_n = coeffs[0] a_{n-1} + ... + coeffs[k-1] a_{n-k}
    std::vector<double> coeffs;
    std::vector<double> init;  // a_0 .. a_{k-1}
};

Matrix companion_matrix(const Recurrence& r);
std::vector<double> recurrence_terms(const Recurrence& r, long n_max);
ExpPoly recurrence_exp_poly(const Recurrence& r);

// {n in [0, n_max] : a_n = 0}. NotPositiveSpectrum when the companion
// matrix is not in GL+.
std::vector<long> recurrence_zero_set(const Recurrence& r, long n_max, double tol = 1e-9);

} // namespace smld
