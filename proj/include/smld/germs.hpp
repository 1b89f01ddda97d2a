#pragma once

// Univariate germs fixing 0, as truncated power series, and the conjugacies
// that straighten them: Koenigs (hyperbolic), Boettcher (superattracting)
// and an Abel coordinate for the parabolic case.
//
// Series arithmetic is templated over double and Rational; the numeric
// charts used for evaluation far from 0 are double only.

#include <functional>
#include <string>
#include <vector>

#include "smld/rational.hpp"

namespace smld {

inline constexpr int default_germ_order = 16;

template <class T>
class Series {
public:
    Series() : c_(default_germ_order + 1, T(0)) {}
    explicit Series(int order) : c_(static_cast<std::size_t>(order) + 1, T(0)) {}
    // Coefficients c_1, c_2, ...; the order is max(order, coeffs.size()).
    Series(const std::vector<T>& coeffs, int order);

    static Series identity(int order = default_germ_order);
    static Series monomial(T coefficient, int degree, int order = default_germ_order);

    int order() const { return static_cast<int>(c_.size()) - 1; }
    // Coefficient of x^k; zero beyond the order.
    T operator[](int k) const { return k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : T(0); }
    T& at(int k) { return c_.at(static_cast<std::size_t>(k)); }
    std::vector<T> coefficients() const { return {c_.begin() + 1, c_.end()}; }
    // Index of the first nonzero coefficient, 0 when identically zero.
    int valuation() const;
    bool is_zero() const { return valuation() == 0; }

    T operator()(const T& x) const;
    Series truncated(int order) const;

    bool operator==(const Series& o) const { return c_ == o.c_; }

private:
    std::vector<T> c_; // c_[0] is the constant term, always 0
};

using Germ = Series<double>;
using RationalGerm = Series<Rational>;

RationalGerm to_rational(const Germ& g);
Germ to_double(const RationalGerm& g);

// Plain product of two series vanishing at 0, truncated at the given order.
template <class T>
Series<T> multiply(const Series<T>& f, const Series<T>& g, int order);
// f o g truncated to min(f.order, g.order), or to the given order.
template <class T>
Series<T> compose(const Series<T>& f, const Series<T>& g, int order = -1);
template <class T>
Series<T> series_invert(const Series<T>& f);
template <class T>
Series<T> square_germ(const Series<T>& f);

struct FixedPointClass {
    enum class Kind { IdenticallyZero, Superattracting, Hyperbolic, Indifferent };
    Kind kind = Kind::IdenticallyZero;
    int degree = 0;      // N for Superattracting
    double lambda = 0;   // c_1 for Hyperbolic
    int sigma = 0;       // sign of c_1 (Indifferent) or of c_N (Superattracting)
};

std::string to_string(FixedPointClass::Kind kind);

template <class T>
FixedPointClass classify_germ(const Series<T>& f);

// alpha with alpha(0) = 0, alpha'(0) = 1 and alpha o f = lambda alpha to the
// order of f.
template <class T>
Series<T> koenigs(const Series<T>& f);

template <class T>
struct Boettcher {
    Series<T> alpha;
    int sigma = 1;
    int degree = 2;
    T rho;  // |c_N| rho^{N-1} = 1; alpha'(0) = 1 / rho
};

// alpha o f o alpha^{-1} = sigma x^N to the order of f. The germ is treated
// as the polynomial it represents. In Rational mode rho must be rational
// (NotRational otherwise).
template <class T>
Boettcher<T> boettcher(const Series<T>& f);

// Root of a monotone function on [lo, hi] by bisection; target must lie
// between g(lo) and g(hi).
double bisect_monotone(const std::function<double(double)>& g, double target, double lo, double hi);

// Numerical Koenigs coordinate on the basin of an attracting hyperbolic
// fixed point: alpha(x) = lambda^{-k} alpha_K(f^k(x)) once f^k(x) is small.
class KoenigsChart {
public:
    explicit KoenigsChart(const Germ& f, double small = 1e-3, long max_iterations = 100000);

    double lambda() const { return lambda_; }
    const Germ& series() const { return alpha_; }
    double operator()(double x) const;
    // alpha^{-1}(y) for y between alpha(lo) and alpha(hi); the inverse
    // series is used directly once |y| is small enough.
    double inverse(double y, double lo, double hi) const;

private:
    Germ f_;
    Germ alpha_;
    Germ alpha_inverse_;
    double lambda_;
    double small_;
    double inverse_small_;
    long max_iterations_;
};

// Numerical Boettcher coordinate: |alpha(x)| = |alpha_K(f^k(x))|^{1/N^k} with
// the sign of x.
class BoettcherChart {
public:
    explicit BoettcherChart(const Germ& f, double small = 1e-2, long max_iterations = 64);

    int sigma() const { return data_.sigma; }
    int degree() const { return data_.degree; }
    const Boettcher<double>& data() const { return data_; }
    double operator()(double x) const;
    double inverse(double y, double lo, double hi) const;

private:
    Germ f_;
    Boettcher<double> data_;
    Germ alpha_inverse_;
    double small_;
    double inverse_small_;
    long max_iterations_;
};

struct AbelOptions {
    double tol = 1e-9;
    // Right end of the validity interval (0, x_max) on the chosen side; 0
    // picks it automatically.
    double x_max = 0.0;
    int model_order = 12;
    long max_iterations = 10000000;
};

// psi with psi(f(x)) = psi(x) + 1 on one attracting side of a parabolic
// point f(x) = x + a x^{p+1} + ... . psi(x) = psi_hat(f^k(x)) - k with the
// asymptotic model psi_hat(z) = sum_{k=-p}^{L} e_k z^k + beta log|z|.
class AbelCoordinate {
public:
    AbelCoordinate(const Germ& f, int side, const AbelOptions& options = {});

    int contact_order() const { return p_; }
    double leading() const { return a_; }
    int side() const { return side_; }
    double x_max() const { return x_max_; }
    double log_coefficient() const { return beta_; }

    // Model term -1/(p a x^p).
    double leading_model(double x) const;
    double operator()(double x) const;
    // psi^{-1}(s) for s >= psi(side * x_max).
    double inverse(double s) const;
    double defect(double x) const;

private:
    double model(double z) const;

    Germ f_;
    int side_;
    int p_ = 1;
    double a_ = 0;
    double beta_ = 0;
    std::vector<double> e_;  // e_[k + p] for k = -p..L
    double x_max_ = 0;
    double switch_radius_ = 0.1;  // where the model takes over
    double s0_ = 0;        // psi at the end of the validity interval
    double s_switch_ = 0;  // psi at the switch radius
    long max_iterations_;
};

// True when side (+1 or -1) is attracting for a parabolic f.
bool side_attracting(const Germ& f, int side);

double eval_germ(const Germ& f, double x);
double iterate_germ(const Germ& f, double x, long n);

} // namespace smld
