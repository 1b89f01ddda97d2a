#include "smld/exp_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smld/errors.hpp"
#include "smld/matrix_power.hpp"

namespace smld {

namespace {

bool same_exponent(const ExpTerm& a, const ExpTerm& b) {
    if (a.base && b.base) return *a.base == *b.base;
    return std::abs(a.mu - b.mu) <= 1e-12 * std::max(1.0, std::abs(a.mu));
}

// x (x - 1) ... (x - j + 1) / j! as exact coefficients, increasing degree.
RationalPoly binomial_poly(int j) {
    RationalPoly p{Rational(1)};
    for (int i = 0; i < j; ++i) {
        RationalPoly next(p.size() + 1, Rational(0));
        for (std::size_t k = 0; k < p.size(); ++k) {
            next[k + 1] += p[k];
            next[k] -= p[k] * i;
        }
        p = next;
    }
    Rational fact(1);
    for (int i = 2; i <= j; ++i) fact *= i;
    for (auto& c : p) c /= fact;
    return p;
}

} // namespace

ExpPoly::ExpPoly(std::vector<ExpTerm> terms) {
    // Cluster exponents first so that nearly equal mu share one value; a
    // cluster keeps its exact base only if all members agree on it.
    std::sort(terms.begin(), terms.end(), [](const ExpTerm& a, const ExpTerm& b) { return a.mu < b.mu; });
    for (std::size_t i = 0; i < terms.size();) {
        std::size_t j = i + 1;
        bool exact_base = terms[i].base.has_value();
        while (j < terms.size() && same_exponent(terms[j - 1], terms[j])) {
            exact_base = exact_base && terms[j].base && *terms[j].base == *terms[i].base;
            ++j;
        }
        for (std::size_t k = i; k < j; ++k) {
            terms[k].mu = terms[i].mu;
            if (!exact_base) terms[k].base.reset();
        }
        i = j;
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const ExpTerm& a, const ExpTerm& b) { return a.mu != b.mu ? a.mu < b.mu : a.d < b.d; });
    for (const auto& t : terms) {
        if (t.d < 0) throw DimensionError("exponential polynomial degrees must be nonnegative");
        if (!terms_.empty() && terms_.back().mu == t.mu && terms_.back().d == t.d) {
            ExpTerm& acc = terms_.back();
            const double magnitude = std::abs(acc.c) + std::abs(t.c);
            if (acc.c_exact && t.c_exact) {
                acc.c_exact = *acc.c_exact + *t.c_exact;
                acc.c = acc.c_exact->get_d();
            } else {
                acc.c_exact.reset();
                acc.c += t.c;
                if (std::abs(acc.c) <= 1e-13 * magnitude) acc.c = 0.0;
            }
            continue;
        }
        terms_.push_back(t);
    }
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [](const ExpTerm& t) { return t.c_exact ? *t.c_exact == 0 : t.c == 0.0; }),
                 terms_.end());
}

int ExpPoly::weight() const {
    int w = 0;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (i + 1 == terms_.size() || terms_[i + 1].mu != terms_[i].mu) w += terms_[i].d + 1;
    return w;
}

bool ExpPoly::exact() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const ExpTerm& t) { return t.c_exact && t.base; });
}

double ExpPoly::operator()(double x) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.c * std::pow(x, t.d) * std::exp(t.mu * x);
    return acc;
}

std::optional<Rational> ExpPoly::exact_at(long n) const {
    if (!exact()) return std::nullopt;
    Rational acc(0);
    for (const auto& t : terms_) acc += *t.c_exact * rational_pow(Rational(n), t.d) * rational_pow(*t.base, n);
    return acc;
}

// The scale uses max(1, |x|)^d so it stays positive where all terms vanish.
std::pair<double, double> ExpPoly::scaled(double x) const {
    const double ax = std::abs(x);
    const double lx = ax == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(ax);
    const double ls = std::log(std::max(1.0, ax));
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) top = std::max(top, t.mu * x + t.d * ls);
    if (!std::isfinite(top)) return {0.0, 0.0};
    double v = 0.0, s = 0.0;
    for (const auto& t : terms_) {
        const double sign = (x < 0 && t.d % 2) ? -1.0 : 1.0;
        const double mv = t.d == 0 ? std::exp(t.mu * x - top) : std::exp(t.mu * x + t.d * lx - top);
        v += t.c * sign * mv;
        s += std::abs(t.c) * std::exp(t.mu * x + t.d * ls - top);
    }
    return {v, s};
}

double ExpPoly::scale(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.c) * std::pow(std::max(1.0, std::abs(x)), t.d) * std::exp(t.mu * x);
    return s;
}

ExpPoly ExpPoly::derivative() const {
    std::vector<ExpTerm> out;
    for (const auto& t : terms_) {
        if (t.mu != 0.0) {
            ExpTerm a = t;
            a.c = t.c * t.mu;
            a.c_exact.reset();
            out.push_back(a);
        }
        if (t.d > 0) {
            ExpTerm b = t;
            b.d = t.d - 1;
            b.c = t.c * t.d;
            if (t.c_exact) b.c_exact = *t.c_exact * t.d;
            out.push_back(b);
        }
    }
    return ExpPoly(std::move(out));
}

ExpPoly ExpPoly::divided_by_leading_exponential() const {
    if (terms_.empty()) return *this;
    const ExpTerm lead = terms_.front();
    std::vector<ExpTerm> out = terms_;
    for (auto& t : out) {
        t.mu = t.mu == lead.mu ? 0.0 : t.mu - lead.mu;
        if (t.base && lead.base)
            t.base = *t.base / *lead.base;
        else
            t.base.reset();
    }
    return ExpPoly(std::move(out));
}

ExpPoly from_linear_orbit(const Matrix& g, const Vector& v, const Vector& w) {
    if (v.size() != g.rows() || w.size() != g.rows()) throw DimensionError("vector sizes do not match the matrix");
    const JordanDecomposition jd = jordan_real(g);
    std::vector<ExpTerm> terms;
    int off = 0;
    if (jd.exact) {
        const auto& ex = *jd.exact;
        RationalMatrix vr(static_cast<int>(v.size()), 1), wr(1, static_cast<int>(w.size()));
        for (int i = 0; i < v.size(); ++i) vr(i, 0) = to_rational(v[i]), wr(0, i) = to_rational(w[i]);
        const RationalMatrix left = wr * ex.transform_inverse;
        const RationalMatrix right = ex.transform * vr;
        for (std::size_t b = 0; b < jd.partition.size(); ++b) {
            const int m = jd.partition[b];
            const Rational& lambda = ex.eigenvalues[b];
            RationalPoly poly(static_cast<std::size_t>(m), Rational(0));
            for (int i = 0; i < m; ++i)
                for (int j = 0; i + j < m; ++j) {
                    const Rational coef = left(0, off + i) * right(off + i + j, 0) / rational_pow(lambda, j);
                    if (coef == 0) continue;
                    const RationalPoly bp = binomial_poly(j);
                    for (std::size_t d = 0; d < bp.size(); ++d) poly[d] += coef * bp[d];
                }
            for (int d = 0; d < m; ++d)
                terms.push_back({poly[static_cast<std::size_t>(d)].get_d(), std::log(lambda.get_d()), d,
                                 poly[static_cast<std::size_t>(d)], lambda});
            off += m;
        }
        return ExpPoly(std::move(terms));
    }
    const Vector left = (w.transpose() * jd.transform_inverse).transpose();
    const Vector right = jd.transform * v;
    for (std::size_t b = 0; b < jd.partition.size(); ++b) {
        const int m = jd.partition[b];
        const double lambda = jd.eigenvalues[b];
        std::vector<double> poly(static_cast<std::size_t>(m), 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; i + j < m; ++j) {
                const double coef = left[off + i] * right[off + i + j] / std::pow(lambda, j);
                const auto bp = gen_binomial_polynomial(j);
                for (std::size_t d = 0; d < bp.size(); ++d) poly[d] += coef * bp[d];
            }
        for (int d = 0; d < m; ++d) terms.push_back({poly[static_cast<std::size_t>(d)], std::log(lambda), d, {}, {}});
        off += m;
    }
    return ExpPoly(std::move(terms));
}

namespace {

void add_root(std::vector<RootBracket>& out, double lo, double hi, bool tangential = false) {
    out.push_back({lo, hi, tangential});
}

// Bisection on a sign change of g over [a, b] down to width tol.
RootBracket refine(const ExpPoly& g, double a, double b, double va, double tol) {
    for (int it = 0; it < 400 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double vm = g.scaled(m).first;
        if (vm == 0.0) return {m, m, false};
        if ((vm < 0) == (va < 0))
            a = m, va = vm;
        else
            b = m;
    }
    return {a, b, false};
}

std::vector<RootBracket> isolate(const ExpPoly& f, double lo, double hi, double tol) {
    const ExpPoly g = f.divided_by_leading_exponential();
    std::vector<RootBracket> out;
    if (g.weight() <= 1) return out;  // c e^{mu x}: no zeros
    const auto crit = isolate(g.derivative(), lo, hi, tol);
    auto value = [&](double x) { return g.scaled(x).first; };

    auto monotone = [&](double a, double b) {
        if (a > b) return;
        const double va = value(a), vb = value(b);
        if (va == 0.0) add_root(out, a, a);
        if (vb == 0.0) add_root(out, b, b);
        if (va != 0.0 && vb != 0.0 && (va < 0) != (vb < 0)) out.push_back(refine(g, a, b, va, tol));
    };
    // A bracket around a critical point holds at most two zeros.
    auto critical = [&](double a, double b) {
        const auto [va, sa] = g.scaled(a);
        const auto [vb, sb] = g.scaled(b);
        if (va != 0.0 && vb != 0.0 && (va < 0) != (vb < 0)) {
            add_root(out, a, b);
            return;
        }
        const double m = 0.5 * (a + b);
        const auto [vm, sm] = g.scaled(m);
        if (va != 0.0 && vb != 0.0 && vm != 0.0 && (vm < 0) != (va < 0)) {
            add_root(out, a, m);
            add_root(out, m, b);
            return;
        }
        if (va == 0.0 || vb == 0.0 || vm == 0.0 || std::abs(va) <= tol * sa || std::abs(vb) <= tol * sb ||
            std::abs(vm) <= tol * sm)
            add_root(out, a, b, true);
    };

    double cur = lo;
    for (const auto& c : crit) {
        if (c.lo < cur) throw TolTooCoarse("critical brackets overlap at this tolerance");
        monotone(cur, c.lo);
        critical(c.lo, c.hi);
        cur = c.hi;
    }
    monotone(cur, hi);

    std::sort(out.begin(), out.end(), [](const RootBracket& a, const RootBracket& b) { return a.lo < b.lo; });
    std::vector<RootBracket> merged;
    for (const auto& r : out) {
        if (!merged.empty() && r.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, r.hi);
            merged.back().tangential = merged.back().tangential || r.tangential;
            continue;
        }
        merged.push_back(r);
    }
    if (static_cast<int>(merged.size()) > g.weight() - 1)
        throw TolTooCoarse("more brackets than the zero bound allows; refine the tolerance");
    return merged;
}

} // namespace

std::vector<RootBracket> isolate_zeros(const ExpPoly& ep, double lo, double hi, double tol) {
    if (ep.empty()) throw ZeroFunction("the exponential polynomial is identically zero");
    if (!(lo <= hi)) throw DimensionError("empty interval");
    if (!(tol > 0)) throw TolTooCoarse("tolerance must be positive");
    return isolate(ep, lo, hi, tol);
}

Matrix companion_matrix(const Recurrence& r) {
    const int k = static_cast<int>(r.coeffs.size());
    if (k == 0 || static_cast<int>(r.init.size()) != k)
        throw DimensionError("recurrence needs as many initial values as coefficients");
    Matrix c = Matrix::Zero(k, k);
    for (int i = 0; i + 1 < k; ++i) c(i, i + 1) = 1.0;
    for (int i = 0; i < k; ++i) c(k - 1, i) = r.coeffs[static_cast<std::size_t>(k - 1 - i)];
    return c;
}

std::vector<double> recurrence_terms(const Recurrence& r, long n_max) {
    std::vector<double> a(r.init.begin(), r.init.end());
    const std::size_t k = r.coeffs.size();
    while (static_cast<long>(a.size()) <= n_max) {
        double next = 0.0;
        for (std::size_t i = 0; i < k; ++i) next += r.coeffs[i] * a[a.size() - 1 - i];
        a.push_back(next);
    }
    a.resize(static_cast<std::size_t>(std::max<long>(n_max + 1, 0)));
    return a;
}

ExpPoly recurrence_exp_poly(const Recurrence& r) {
    const Matrix c = companion_matrix(r);
    if (!is_glnplus(c)) throw NotPositiveSpectrum("characteristic roots of the recurrence are not all real and positive");
    const int k = static_cast<int>(c.rows());
    Vector s0(k), e1 = Vector::Zero(k);
    for (int i = 0; i < k; ++i) s0[i] = r.init[static_cast<std::size_t>(i)];
    e1[0] = 1.0;
    return from_linear_orbit(c, s0, e1);
}

std::vector<long> recurrence_zero_set(const Recurrence& r, long n_max, double tol) {
    const ExpPoly ep = recurrence_exp_poly(r);
    std::vector<long> out;
    if (n_max < 0) return out;
    if (ep.empty()) {
        for (long n = 0; n <= n_max; ++n) out.push_back(n);
        return out;
    }
    const auto brackets = isolate_zeros(ep, -0.5, static_cast<double>(n_max) + 0.5, 1e-10);
    for (const auto& b : brackets) {
        const long first = static_cast<long>(std::ceil(b.lo - 1e-6));
        const long last = static_cast<long>(std::floor(b.hi + 1e-6));
        for (long n = std::max(0L, first); n <= std::min(n_max, last); ++n) {
            bool zero;
            if (auto exact = ep.exact_at(n))
                zero = *exact == 0;
            else
                zero = std::abs(ep(static_cast<double>(n))) <= tol * ep.scale(static_cast<double>(n));
            if (zero && (out.empty() || out.back() != n)) out.push_back(n);
        }
    }
    return out;
}

} // namespace smld
