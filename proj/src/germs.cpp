#include "smld/germs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smld/errors.hpp"
#include "smld/matrix_power.hpp"

namespace smld {

namespace {

double to_double_value(double v) { return v; }
double to_double_value(const Rational& v) { return v.get_d(); }

int sign_of(double v) { return v < 0 ? -1 : 1; }
int sign_of(const Rational& v) { return sgn(v) < 0 ? -1 : 1; }

bool is_unit(double v) { return std::abs(v) == 1.0; }
bool is_unit(const Rational& v) { return abs(v) == 1; }

template <class T>
T power(const T& base, int e) {
    T out(1);
    for (int i = 0; i < e; ++i) out *= base;
    return out;
}

// rho with |c_N| rho^{N-1} = 1.
double leading_scale(double c, int n) { return std::pow(std::abs(c), -1.0 / (n - 1)); }

Rational leading_scale(const Rational& c, int n) {
    Rational inv = 1 / abs(c);
    auto root = exact_root(inv, static_cast<unsigned long>(n - 1));
    if (!root) throw NotRational("|c_N|^(-1/(N-1)) is irrational for this germ");
    return *root;
}

template <class T>
Series<T> series_power(const Series<T>& f, int e, int order) {
    Series<T> out = f.truncated(order);
    for (int i = 1; i < e; ++i) out = multiply(out, f, order);
    return out;
}

} // namespace

template <class T>
Series<T>::Series(const std::vector<T>& coeffs, int order)
    : c_(static_cast<std::size_t>(std::max<int>(order, static_cast<int>(coeffs.size()))) + 1, T(0)) {
    for (std::size_t k = 0; k < coeffs.size(); ++k) c_[k + 1] = coeffs[k];
}

template <class T>
Series<T> Series<T>::identity(int order) {
    return monomial(T(1), 1, order);
}

template <class T>
Series<T> Series<T>::monomial(T coefficient, int degree, int order) {
    Series s(order);
    if (degree >= 1 && degree <= order) s.c_[static_cast<std::size_t>(degree)] = coefficient;
    return s;
}

template <class T>
int Series<T>::valuation() const {
    for (std::size_t k = 1; k < c_.size(); ++k)
        if (c_[k] != 0) return static_cast<int>(k);
    return 0;
}

template <class T>
T Series<T>::operator()(const T& x) const {
    T acc(0);
    for (std::size_t k = c_.size() - 1; k >= 1; --k) acc = (acc + c_[k]) * x;
    return acc;
}

template <class T>
Series<T> Series<T>::truncated(int order) const {
    Series s(order);
    for (int k = 1; k <= std::min(order, this->order()); ++k) s.c_[static_cast<std::size_t>(k)] = c_[static_cast<std::size_t>(k)];
    return s;
}

template <class T>
Series<T> multiply(const Series<T>& f, const Series<T>& g, int order) {
    Series<T> out(order);
    const int vf = f.valuation(), vg = g.valuation();
    if (vf == 0 || vg == 0) return out;
    for (int i = vf; i <= std::min(order, f.order()); ++i) {
        if (f[i] == 0) continue;
        for (int j = vg; i + j <= order && j <= g.order(); ++j) out.at(i + j) += f[i] * g[j];
    }
    return out;
}

template <class T>
Series<T> compose(const Series<T>& f, const Series<T>& g, int order) {
    const int k_out = order < 0 ? std::min(f.order(), g.order()) : order;
    // Horner in g, carrying the constant term separately.
    Series<T> acc(k_out);
    T constant(0);
    for (int k = std::min(f.order(), k_out); k >= 1; --k) {
        constant += f[k];
        Series<T> next = multiply(acc, g, k_out);
        for (int i = 1; i <= k_out; ++i) next.at(i) += constant * g[i];
        acc = next;
        constant = T(0);
    }
    return acc;
}

template <class T>
Series<T> series_invert(const Series<T>& f) {
    const T c1 = f[1];
    if (c1 == 0) throw NotInvertible("series with vanishing linear term has no compositional inverse");
    Series<T> g = Series<T>::monomial(T(1) / c1, 1, f.order());
    for (int k = 2; k <= f.order(); ++k) {
        const T e = compose(f, g)[k];
        g.at(k) -= e / c1;
    }
    return g;
}

template <class T>
Series<T> square_germ(const Series<T>& f) {
    return compose(f, f);
}

std::string to_string(FixedPointClass::Kind kind) {
    switch (kind) {
    case FixedPointClass::Kind::IdenticallyZero: return "IdenticallyZero";
    case FixedPointClass::Kind::Superattracting: return "Superattracting";
    case FixedPointClass::Kind::Hyperbolic: return "Hyperbolic";
    case FixedPointClass::Kind::Indifferent: return "Indifferent";
    }
    return "?";
}

template <class T>
FixedPointClass classify_germ(const Series<T>& f) {
    FixedPointClass c;
    const int v = f.valuation();
    if (v == 0) return c;
    if (v >= 2) {
        c.kind = FixedPointClass::Kind::Superattracting;
        c.degree = v;
        c.sigma = sign_of(f[v]);
        return c;
    }
    c.degree = 1;
    c.sigma = sign_of(f[1]);
    if (is_unit(f[1])) {
        c.kind = FixedPointClass::Kind::Indifferent;
    } else {
        c.kind = FixedPointClass::Kind::Hyperbolic;
        c.lambda = to_double_value(f[1]);
    }
    return c;
}

template <class T>
Series<T> koenigs(const Series<T>& f) {
    const auto cls = classify_germ(f);
    if (cls.kind != FixedPointClass::Kind::Hyperbolic)
        throw UnsupportedGerm("Koenigs linearisation needs 0 < |f'(0)| != 1");
    const int k = f.order();
    const T lambda = f[1];
    std::vector<Series<T>> powers{Series<T>(k), f};
    for (int j = 2; j < k; ++j) powers.push_back(multiply(powers.back(), f, k));
    Series<T> alpha = Series<T>::identity(k);
    T lambda_c = lambda;
    for (int c = 2; c <= k; ++c) {
        lambda_c *= lambda;
        T known(0);
        for (int j = 1; j < c; ++j) known += alpha[j] * powers[static_cast<std::size_t>(j)][c];
        alpha.at(c) = known / (lambda - lambda_c);
    }
    return alpha;
}

template <class T>
Boettcher<T> boettcher(const Series<T>& f) {
    const auto cls = classify_germ(f);
    if (cls.kind != FixedPointClass::Kind::Superattracting)
        throw UnsupportedGerm("Boettcher coordinates need f'(0) = 0 and f not identically 0");
    const int n = cls.degree, k = f.order(), work = k + n - 1;
    Boettcher<T> out;
    out.sigma = cls.sigma;
    out.degree = n;
    out.rho = leading_scale(f[n], n);

    // ft(x) = f(rho x) / rho has leading coefficient sigma.
    Series<T> ft(work);
    T scale(1);
    for (int i = 1; i <= f.order(); ++i) {
        ft.at(i) = f[i] * scale;
        scale *= out.rho;
    }
    const T sigma(out.sigma);
    Series<T> beta = Series<T>::identity(work);
    for (int m = 2; m <= k; ++m) {
        const int at = n + m - 1;
        const T lhs = compose(beta, ft, at)[at];
        const T rhs = series_power(beta, n, at)[at];
        beta.at(m) = (lhs - sigma * rhs) / (sigma * T(n));
    }
    // alpha(x) = beta(x / rho)
    out.alpha = Series<T>(k);
    T inv(1);
    for (int i = 1; i <= k; ++i) {
        inv /= out.rho;
        out.alpha.at(i) = beta[i] * inv;
    }
    return out;
}

RationalGerm to_rational(const Germ& g) {
    RationalGerm out(g.order());
    for (int k = 1; k <= g.order(); ++k) out.at(k) = to_rational(g[k]);
    return out;
}

Germ to_double(const RationalGerm& g) {
    Germ out(g.order());
    for (int k = 1; k <= g.order(); ++k) out.at(k) = g[k].get_d();
    return out;
}

double eval_germ(const Germ& f, double x) { return f(x); }

double iterate_germ(const Germ& f, double x, long n) {
    for (long i = 0; i < n; ++i) x = f(x);
    return x;
}

double bisect_monotone(const std::function<double(double)>& g, double target, double lo, double hi) {
    double glo = g(lo), ghi = g(hi);
    if (glo == target) return lo;
    if (ghi == target) return hi;
    const bool increasing = ghi > glo;
    const double span = std::abs(ghi - glo);
    if ((target - glo) * (target - ghi) > 0) {
        // Allow a few ulps of slack at the ends.
        if (std::min(std::abs(target - glo), std::abs(target - ghi)) <= 1e-13 * std::max(1.0, span))
            return std::abs(target - glo) < std::abs(target - ghi) ? lo : hi;
        throw NoConvergence("bisection target is not bracketed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double gm = g(mid);
        if (gm == target) return mid;
        if ((gm < target) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Koenigs

namespace {

// Largest r <= start (by halving) at which the last two terms of the series
// are negligible against its linear term.
double tail_radius(const Germ& s, double start) {
    const int k = s.order();
    const double lead = std::abs(s[1]);
    double r = start;
    auto tail = [&](double t) { return std::abs(s[k]) * std::pow(t, k - 1) + std::abs(s[k - 1]) * std::pow(t, k - 2); };
    while (r > 1e-12 && tail(r) > 1e-17 * lead) r *= 0.5;
    return r;
}

} // namespace

KoenigsChart::KoenigsChart(const Germ& f, double small, long max_iterations)
    : f_(f), alpha_(koenigs(f)), alpha_inverse_(series_invert(alpha_)), lambda_(f[1]), small_(small),
      inverse_small_(small), max_iterations_(max_iterations) {
    // Shrink the switch-over radii until the series tails are negligible.
    small_ = tail_radius(alpha_, small_);
    inverse_small_ = tail_radius(alpha_inverse_, inverse_small_);
}

double KoenigsChart::operator()(double x) const {
    if (x == 0.0) return 0.0;
    double z = x;
    long k = 0;
    while (std::abs(z) > small_) {
        if (std::abs(lambda_) > 1.0) throw OutsideBasin("Koenigs chart of a repelling point is only local");
        z = f_(z);
        if (!std::isfinite(z) || ++k > max_iterations_) throw OutsideBasin("orbit does not approach the fixed point");
        if (z == 0.0) return 0.0;
    }
    return alpha_(z) / std::pow(lambda_, static_cast<double>(k));
}

double KoenigsChart::inverse(double y, double lo, double hi) const {
    if (std::abs(y) <= inverse_small_) return alpha_inverse_(y);
    return bisect_monotone([this](double x) { return (*this)(x); }, y, lo, hi);
}

// Boettcher

BoettcherChart::BoettcherChart(const Germ& f, double small, long max_iterations)
    : f_(f), data_(boettcher(f)), alpha_inverse_(series_invert(data_.alpha)), small_(small), inverse_small_(small),
      max_iterations_(max_iterations) {
    small_ = tail_radius(data_.alpha, small_);
    inverse_small_ = tail_radius(alpha_inverse_, inverse_small_);
}

double BoettcherChart::operator()(double x) const {
    if (x == 0.0) return 0.0;
    double z = x;
    long k = 0;
    while (std::abs(z) > small_) {
        z = f_(z);
        if (!std::isfinite(z) || ++k > max_iterations_) throw OutsideBasin("orbit does not approach the fixed point");
        if (z == 0.0) return 0.0;
    }
    const double yk = data_.alpha(z);
    const double log_abs = std::log(std::abs(yk)) / std::pow(static_cast<double>(data_.degree), static_cast<double>(k));
    return (x < 0 ? -1.0 : 1.0) * std::exp(log_abs);
}

double BoettcherChart::inverse(double y, double lo, double hi) const {
    if (std::abs(y) <= inverse_small_) return alpha_inverse_(y);
    return bisect_monotone([this](double x) { return (*this)(x); }, y, lo, hi);
}

// Abel coordinate

namespace {

struct Parabolic {
    int p;
    double a;
};

Parabolic parabolic_data(const Germ& f) {
    if (f[1] != 1.0) throw NotParabolic("Abel coordinates need f'(0) = 1");
    for (int k = 2; k <= f.order(); ++k)
        if (f[k] != 0.0) return {k - 1, f[k]};
    throw NotParabolic("germ is the identity to its order");
}

} // namespace

bool side_attracting(const Germ& f, int side) {
    const auto d = parabolic_data(f);
    if (side > 0) return d.a < 0;
    return d.a * ((d.p + 1) % 2 == 0 ? 1.0 : -1.0) > 0;
}

AbelCoordinate::AbelCoordinate(const Germ& f, int side, const AbelOptions& options)
    : f_(f), side_(side > 0 ? 1 : -1), max_iterations_(options.max_iterations) {
    const auto d = parabolic_data(f);
    p_ = d.p;
    a_ = d.a;
    if (side != 1 && side != -1) throw DimensionError("side must be +1 or -1");
    if (!side_attracting(f, side_)) throw SideNotAttracting("f pushes points away from 0 on this side");

    // Coefficient matching for psi_hat(f(x)) - psi_hat(x) = 1 with f = x (1 + u).
    const int l = std::max(options.model_order, 1);
    const int top = p_ + l + 2;  // orders matched, two beyond the model for the error estimate
    const int width = top + p_ + 1;
    std::vector<std::vector<double>> upow{std::vector<double>(static_cast<std::size_t>(width), 0.0)};
    upow[0][0] = 1.0;
    std::vector<double> u(static_cast<std::size_t>(width), 0.0);
    for (int m = 1; m < width; ++m) u[static_cast<std::size_t>(m)] = f[m + 1];
    for (int m = 1; m * p_ < width; ++m) {
        std::vector<double> next(static_cast<std::size_t>(width), 0.0);
        for (int i = 0; i < width; ++i)
            for (int j = 1; i + j < width; ++j)
                next[static_cast<std::size_t>(i + j)] += upow.back()[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
        upow.push_back(next);
    }
    auto binomial_series = [&](int k) {
        std::vector<double> s(static_cast<std::size_t>(width), 0.0);
        for (std::size_t m = 1; m < upow.size(); ++m) {
            const double b = gen_binomial(static_cast<double>(k), static_cast<int>(m));
            for (int i = 0; i < width; ++i) s[static_cast<std::size_t>(i)] += b * upow[m][static_cast<std::size_t>(i)];
        }
        return s;
    };
    std::vector<double> logs(static_cast<std::size_t>(width), 0.0);
    for (std::size_t m = 1; m < upow.size(); ++m) {
        const double w = (m % 2 ? 1.0 : -1.0) / static_cast<double>(m);
        for (int i = 0; i < width; ++i) logs[static_cast<std::size_t>(i)] += w * upow[m][static_cast<std::size_t>(i)];
    }
    const int k_top = top - p_;
    std::vector<std::vector<double>> s_k(static_cast<std::size_t>(k_top + p_ + 1));
    for (int k = -p_; k <= k_top; ++k)
        if (k != 0) s_k[static_cast<std::size_t>(k + p_)] = binomial_series(k);

    std::vector<double> e(static_cast<std::size_t>(k_top + p_ + 1), 0.0);
    double beta = 0.0;
    for (int j = 0; j <= top; ++j) {
        double known = 0.0;
        for (int k = -p_; k < j - p_; ++k)
            if (k != 0) known += e[static_cast<std::size_t>(k + p_)] * s_k[static_cast<std::size_t>(k + p_)][static_cast<std::size_t>(j - k)];
        if (j > p_) known += beta * logs[static_cast<std::size_t>(j)];
        const double rhs = (j == 0 ? 1.0 : 0.0) - known;
        if (j == p_)
            beta = rhs / a_;
        else
            e[static_cast<std::size_t>(j)] = rhs / ((j - p_) * a_);
    }
    beta_ = beta;
    // Keep e_{-p}..e_L for the model; e_{L+1}, e_{L+2} size the error.
    const double e1 = std::abs(e[static_cast<std::size_t>(l + 1 + p_)]);
    const double e2 = std::abs(e[static_cast<std::size_t>(l + 2 + p_)]);
    e.resize(static_cast<std::size_t>(l + p_ + 1));
    e_ = e;
    double z = 0.1;
    while (z > 1e-8 && e1 * std::pow(z, l + 1) + e2 * std::pow(z, l + 2) > 1e-15) z *= 0.9;
    switch_radius_ = z;
    const double steps = 1.0 / (p_ * std::abs(a_) * std::pow(z, p_));
    if (steps > static_cast<double>(max_iterations_))
        throw NoConvergence("Abel iteration would need about " + std::to_string(static_cast<long>(steps)) + " steps");

    // Validity interval: f maps (0, x_max] on this side into itself,
    // moving towards 0, and is increasing there.
    auto valid = [&](double r) {
        double prev = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double x = side_ * r * i / 200.0;
            const double y = f_(x);
            if (!(y * side_ > 0) || !(std::abs(y) < std::abs(x))) return false;
            if (i > 1 && !((y - prev) * side_ > 0)) return false;
            prev = y;
        }
        return true;
    };
    if (options.x_max > 0) {
        if (!valid(options.x_max)) throw OutsideBasin("requested validity interval leaves the attracting petal");
        x_max_ = options.x_max;
    } else {
        double r = 0.5;
        while (r > 1e-6 && !valid(r)) r *= 0.8;
        if (!valid(r)) throw SideNotAttracting("no attracting interval found on this side");
        x_max_ = r;
    }

    for (int i = 1; i <= 32; ++i) {
        const double x = side_ * x_max_ * i / 32.0;
        if (!(defect(x) <= options.tol))
            throw NoConvergence("Abel defect " + std::to_string(defect(x)) + " exceeds the tolerance");
    }
    s0_ = (*this)(side_ * x_max_);
    s_switch_ = model(side_ * switch_radius_);
}

double AbelCoordinate::leading_model(double x) const { return -1.0 / (p_ * a_ * std::pow(x, p_)); }

double AbelCoordinate::model(double z) const {
    double acc = beta_ * std::log(std::abs(z));
    double zk = std::pow(z, -p_);
    for (int k = -p_; k < static_cast<int>(e_.size()) - p_; ++k, zk *= z)
        if (k != 0) acc += e_[static_cast<std::size_t>(k + p_)] * zk;
    return acc;
}

double AbelCoordinate::operator()(double x) const {
    if (!(x * side_ > 0)) throw SideNotAttracting("point is not on the chosen side of 0");
    double z = x;
    long k = 0;
    while (std::abs(z) > switch_radius_) {
        z = f_(z);
        if (!(z * side_ > 0) || ++k > max_iterations_) throw NoConvergence("Abel iteration left the petal or ran out of budget");
    }
    return model(z) - static_cast<double>(k);
}

double AbelCoordinate::inverse(double s) const {
    if (s < s0_ - 1e-12 * std::max(1.0, std::abs(s0_))) throw DomainEscape("Abel value below the validity interval");
    auto model_fn = [this](double z) { return model(z); };
    const double zs = side_ * switch_radius_;
    if (s >= s_switch_) {
        // psi is the model itself near 0; no iteration needed.
        double lo = zs;
        while (model(lo) < s && std::abs(lo) > 1e-300) lo *= 0.5;
        return bisect_monotone(model_fn, s, lo, zs);
    }
    // Step k units into the model region, then pull back with f^{-1}.
    const long k = static_cast<long>(std::ceil(s_switch_ - s));
    double lo = zs;
    while (model(lo) < s + k && std::abs(lo) > 1e-300) lo *= 0.5;
    double y = bisect_monotone(model_fn, s + static_cast<double>(k), lo, zs);
    bool ok = true;
    for (long i = 0; i < k && ok; ++i) {
        const double x = y;
        double t = x;
        for (int it = 0; it < 50; ++it) {
            double v = 0.0, d = 0.0;
            for (int j = f_.order(); j >= 1; --j) {
                d = d * t + v;
                v = v * t + f_[j];
            }
            v *= t;
            const double next = t - (v - x) / d;
            if (!std::isfinite(next)) break;
            const bool done = std::abs(next - t) <= 1e-16 * std::abs(t);
            t = next;
            if (done) break;
        }
        y = t;
        ok = y * side_ > 0 && std::abs(y) <= x_max_ * (1 + 1e-12) && std::abs(f_(y) - x) <= 1e-15 * std::abs(x);
    }
    if (ok) return y;

    const double x0 = side_ * x_max_;
    const double shift = std::floor(std::max(0.0, s - s0_));
    const double target = s - shift;
    double x = bisect_monotone([this](double t) { return (*this)(t); }, target, x0, f_(x0));
    return iterate_germ(f_, x, static_cast<long>(shift));
}

double AbelCoordinate::defect(double x) const { return std::abs((*this)(f_(x)) - (*this)(x) - 1.0); }

// Explicit instantiations.
template class Series<double>;
template class Series<Rational>;
#define SMLD_GERM_OPS(T)                                                   \
    template Series<T> multiply(const Series<T>&, const Series<T>&, int);  \
    template Series<T> compose(const Series<T>&, const Series<T>&, int);   \
    template Series<T> series_invert(const Series<T>&);                    \
    template Series<T> square_germ(const Series<T>&);                      \
    template FixedPointClass classify_germ(const Series<T>&);              \
    template Series<T> koenigs(const Series<T>&);                          \
    template Boettcher<T> boettcher(const Series<T>&);
SMLD_GERM_OPS(double)
SMLD_GERM_OPS(Rational)

} // namespace smld
