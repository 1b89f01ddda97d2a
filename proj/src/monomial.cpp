#include "smld/monomial.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "smld/errors.hpp"

namespace smld {

namespace {

RationalMatrix to_rational(const IntMatrix& m) {
    RationalMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

IntMatrix integer_matrix_power(const IntMatrix& m, long k) {
    IntMatrix out = IntMatrix::Identity(m.rows(), m.cols());
    for (long i = 0; i < k; ++i) out = out * m;
    return out;
}

// Sign vectors as bit masks: bit j set when coordinate j is negative.
using Mask = std::uint32_t;

Mask to_mask(const SignVector& s) {
    Mask m = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s[j] < 0) m |= Mask{1} << j;
    return m;
}

SignVector from_mask(Mask m, int n) {
    SignVector s(static_cast<std::size_t>(n), 1);
    for (int j = 0; j < n; ++j)
        if (m & (Mask{1} << j)) s[static_cast<std::size_t>(j)] = -1;
    return s;
}

struct SignMap {
    std::vector<Mask> row_parity; // row i: mask of j with M_ij odd
    Mask offset = 0;              // negative scale signs
    int n = 0;

    Mask operator()(Mask s) const {
        Mask out = offset;
        for (int i = 0; i < n; ++i)
            if (__builtin_popcount(row_parity[static_cast<std::size_t>(i)] & s) & 1) out ^= Mask{1} << i;
        return out;
    }
};

SignMap make_sign_map(const IntMatrix& m, const SignVector& scale_signs) {
    SignMap f;
    f.n = static_cast<int>(m.rows());
    f.row_parity.assign(static_cast<std::size_t>(f.n), 0);
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            if (m(i, j) % 2 != 0) f.row_parity[static_cast<std::size_t>(i)] |= Mask{1} << j;
    f.offset = to_mask(scale_signs);
    return f;
}

SignOrbit orbit_of(const SignMap& f, const SignVector& s) {
    SignOrbit o;
    o.start = s;
    std::map<Mask, int> seen;
    Mask cur = to_mask(s);
    std::vector<Mask> path;
    while (!seen.count(cur)) {
        seen[cur] = static_cast<int>(path.size());
        path.push_back(cur);
        cur = f(cur);
    }
    o.preperiod = seen[cur];
    o.period = static_cast<int>(path.size()) - o.preperiod;
    for (Mask m : path) o.trajectory.push_back(from_mask(m, f.n));
    return o;
}

// lcm of cycle lengths over all masks in [lo, hi).
long cycle_lcm(const SignMap& f, Mask lo, Mask hi) {
    long acc = 1;
    for (Mask s = lo; s < hi; ++s) {
        // Floyd-free: run n+1 steps to land on the cycle (transients of an
        // affine map on F_2^n are at most n), then measure it.
        Mask c = s;
        for (int k = 0; k <= f.n; ++k) c = f(c);
        long len = 1;
        for (Mask d = f(c); d != c; d = f(d)) ++len;
        acc = std::lcm(acc, len);
    }
    return acc;
}

long period_over_all(const SignMap& f, int max_dimension) {
    if (f.n > max_dimension || f.n > 30)
        throw DimensionTooLarge("sign enumeration over 2^" + std::to_string(f.n) + " vectors exceeds the budget");
    const Mask total = Mask{1} << f.n;
    constexpr Mask chunk = 1u << 12;
    if (total <= chunk) return cycle_lcm(f, 0, total);
    std::vector<std::future<long>> parts;
    for (Mask lo = 0; lo < total; lo += chunk)
        parts.push_back(std::async(std::launch::async, cycle_lcm, std::cref(f), lo, std::min<Mask>(total, lo + chunk)));
    long acc = 1;
    for (auto& p : parts) acc = std::lcm(acc, p.get());
    return acc;
}

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

} // namespace

MonomialMap::MonomialMap(IntMatrix exponents, Vector scale, const MonomialOptions& options)
    : exponents_(std::move(exponents)), scale_(std::move(scale)) {
    const auto n = exponents_.rows();
    if (n == 0 || exponents_.cols() != n) throw DimensionError("exponent matrix must be square and nonempty");
    if (scale_.size() != n) throw DimensionError("scale vector has the wrong length");
    for (int i = 0; i < n; ++i) {
        if (scale_[i] == 0.0 || !std::isfinite(scale_[i]))
            throw InvalidMonomialMap("scale component " + std::to_string(i) + " must be finite and nonzero");
        for (int j = 0; j < n; ++j)
            if (exponents_(i, j) < 0) throw InvalidMonomialMap("exponents must be nonnegative integers");
    }
    const RationalMatrix m = to_rational(exponents_);
    if (integer_determinant(m) == 0) throw InvalidMonomialMap("exponent matrix is singular");
    RationalMatrix power = RationalMatrix::identity(static_cast<int>(n));
    for (int k = 1; k <= options.root_of_unity_orders; ++k) {
        power = power * m;
        if (integer_determinant(power - RationalMatrix::identity(static_cast<int>(n))) == 0)
            throw InvalidMonomialMap("M^" + std::to_string(k) + " has eigenvalue 1 (root of unity among eigenvalues)");
    }
    strong_ = is_glnplus(exponents_real(), options.tol);
}

MonomialMap MonomialMap::from_rows(const std::vector<std::vector<long>>& rows, const std::vector<double>& scale) {
    const auto n = static_cast<int>(rows.size());
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw DimensionError("exponent matrix must be square");
        for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return MonomialMap(m, Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size())));
}

bool MonomialMap::scale_is_signs() const {
    for (int i = 0; i < scale_.size(); ++i)
        if (std::abs(scale_[i]) != 1.0) return false;
    return true;
}

SignVector MonomialMap::scale_signs() const {
    SignVector s;
    for (int i = 0; i < scale_.size(); ++i) s.push_back(scale_[i] < 0 ? -1 : 1);
    return s;
}

Vector apply_monomial(const MonomialMap& map, const Vector& point) {
    const int n = map.dimension();
    if (point.size() != n) throw DimensionError("point dimension does not match the map");
    Vector out(n);
    for (int i = 0; i < n; ++i) {
        double v = map.scale()[i];
        for (int j = 0; j < n; ++j) {
            const long e = map.exponents()(i, j);
            if (e == 0) continue;
            v *= std::pow(point[j], static_cast<double>(e));
        }
        out[i] = v;
    }
    return out;
}

Vector apply_monomial_power(const MonomialMap& map, const Vector& point, long times) {
    Vector y = point;
    for (long k = 0; k < times; ++k) y = apply_monomial(map, y);
    return y;
}

SignOrbit sign_orbit(const IntMatrix& exponents, const SignVector& s) {
    return sign_orbit(exponents, s, SignVector(s.size(), 1));
}

SignOrbit sign_orbit(const IntMatrix& exponents, const SignVector& s, const SignVector& scale_signs) {
    if (static_cast<Eigen::Index>(s.size()) != exponents.rows() || scale_signs.size() != s.size())
        throw DimensionError("sign vector dimension does not match the exponent matrix");
    if (s.size() > 30) throw DimensionTooLarge("sign vectors longer than 30 are not supported");
    return orbit_of(make_sign_map(exponents, scale_signs), s);
}

long sign_period_B(const IntMatrix& exponents, int max_dimension) {
    return period_over_all(make_sign_map(exponents, SignVector(static_cast<std::size_t>(exponents.rows()), 1)),
                           max_dimension);
}

long map_sign_period(const MonomialMap& map, int max_dimension) {
    return period_over_all(make_sign_map(map.exponents(), map.scale_signs()), max_dimension);
}

ScaleNormalization normalize_scale(const MonomialMap& map, const MonomialOptions& options) {
    const int n = map.dimension();
    const RationalMatrix shifted = to_rational(map.exponents()) - RationalMatrix::identity(n);
    if (integer_determinant(shifted) == 0) throw SingularSystem("M - I is singular");

    Vector mu(n);
    bool exact = true;
    const RationalMatrix inv = shifted.inverse();
    for (int j = 0; j < n && exact; ++j) {
        Rational acc = 1;
        for (int k = 0; k < n && exact; ++k) {
            // mu_j = prod_k |lambda_k|^(-inv_jk)
            Rational e = -inv(j, k);
            e.canonicalize();
            if (e == 0) continue;
            const Integer& p = e.get_num();
            const Integer& q = e.get_den();
            if (abs(p) > 64 || q > 64) {
                exact = false;
                break;
            }
            Rational base = abs(smld::to_rational(map.scale()[k]));
            auto root = exact_root(rational_pow(base, p.get_si()), q.get_ui());
            if (!root) {
                exact = false;
                break;
            }
            acc *= *root;
        }
        if (exact) mu[j] = acc.get_d();
    }
    if (!exact) {
        Vector rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -std::log(std::abs(map.scale()[i]));
        Eigen::FullPivLU<Matrix> lu(shifted.to_double());
        mu = lu.solve(rhs).array().exp().matrix();
    }

    Vector signs(n);
    for (int i = 0; i < n; ++i) signs[i] = map.scale()[i] < 0 ? -1.0 : 1.0;
    ScaleNormalization out{mu, MonomialMap(map.exponents(), signs, options), exact};

    // Conjugation identity on sample points: mu^{-1} (lambda (mu x)^M) = sgn(lambda) x^M.
    for (double base : {0.3, 0.55, 0.8}) {
        Vector x(n);
        for (int i = 0; i < n; ++i) x[i] = base * (1.0 + 0.1 * i) * (i % 2 ? -1.0 : 1.0);
        const Vector lhs = apply_monomial(map, mu.cwiseProduct(x)).cwiseQuotient(mu);
        const Vector rhs = apply_monomial(out.normalized, x);
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, sup_norm(rhs)))
            throw SingularSystem("scale normalisation failed its conjugation check");
    }
    return out;
}

MonomialOrbit::MonomialOrbit(const MonomialMap& map, const Vector& a, const MonomialOptions& options) : map_(map) {
    const int n = map.dimension();
    if (a.size() != n) throw DimensionError("point dimension does not match the map");
    if (!map.scale_is_signs()) throw InvalidMonomialMap("orbit interpolation expects a scale in {+1,-1}^n");

    period_ = map_sign_period(map, options.max_sign_dimension);
    const IntMatrix power = integer_matrix_power(map.exponents(), period_);
    if (!is_glnplus(power.cast<double>(), options.tol)) throw NotStrong("M^B has a non-positive or complex eigenvalue");

    // Zero pattern: coordinate i becomes 0 once some j with M_ij > 0 is 0.
    std::vector<bool> zero(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) zero[static_cast<std::size_t>(i)] = a[i] == 0.0;
    int zero_steps = 0;
    for (;;) {
        std::vector<bool> next = zero;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (zero[static_cast<std::size_t>(j)] && map.exponents()(i, j) > 0) next[static_cast<std::size_t>(i)] = true;
        if (next == zero) break;
        zero = std::move(next);
        ++zero_steps;
    }
    for (int i = 0; i < n; ++i)
        if (!zero[static_cast<std::size_t>(i)]) live_.push_back(i);

    const Vector after_zero = apply_monomial_power(map, a, zero_steps);
    const int live = static_cast<int>(live_.size());
    IntMatrix sub(live, live);
    SignVector live_signs, live_scale;
    for (int p = 0; p < live; ++p) {
        const int i = live_[static_cast<std::size_t>(p)];
        for (int q = 0; q < live; ++q) sub(p, q) = map.exponents()(i, live_[static_cast<std::size_t>(q)]);
        live_signs.push_back(after_zero[i] < 0 ? -1 : 1);
        live_scale.push_back(map.scale()[i] < 0 ? -1 : 1);
    }
    int sign_steps = 0;
    if (live > 0) sign_steps = sign_orbit(sub, live_signs, live_scale).preperiod;
    transient_ = zero_steps + sign_steps;
    base_ = apply_monomial_power(map, a, transient_);

    // Basin: Phi^B shrinks the sup norm monotonically below 1.
    {
        Vector y = base_;
        double prev = sup_norm(y);
        for (int k = 0; k < options.basin_iterations; ++k) {
            y = apply_monomial_power(map, y, period_);
            const double cur = sup_norm(y);
            if (!(cur <= prev) || !(cur < 1.0) || !std::isfinite(cur))
                throw OutsideBasin("Phi^B does not contract the orbit of the point monotonically below 1");
            prev = cur;
            if (cur == 0.0) break;
        }
    }

    live_logs_.resize(live);
    constexpr double floor_log = -745.0; // below the smallest subnormal
    for (int p = 0; p < live; ++p)
        live_logs_[p] = std::max(std::log(std::abs(base_[live_[static_cast<std::size_t>(p)]])), floor_log);
    if (live > 0) power_jordan_ = jordan_real(integer_matrix_power(sub, period_).cast<double>(), options.tol);
}

Vector MonomialOrbit::operator()(double x) const {
    const int n = map_.dimension();
    Vector out = Vector::Zero(n);
    if (live_.empty()) return out;
    const Matrix e = real_power(power_jordan_, x);
    const Vector logs = e * live_logs_;
    for (std::size_t p = 0; p < live_.size(); ++p) {
        const int i = live_[p];
        out[i] = (base_[i] < 0 ? -1.0 : 1.0) * std::exp(logs[static_cast<Eigen::Index>(p)]);
    }
    return out;
}

Vector interpolate_monomial_orbit(const MonomialMap& map, const Vector& a, double x, const MonomialOptions& options) {
    return MonomialOrbit(map, a, options)(x);
}

} // namespace smld
