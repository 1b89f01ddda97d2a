#include "smld/orbit.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

#include "smld/errors.hpp"

namespace smld {

namespace {

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

Vector scalar(double v) { return Vector::Constant(1, v); }

bool exactly_linear(const Germ& f) {
    for (int k = 2; k <= f.order(); ++k)
        if (f[k] != 0.0) return false;
    return true;
}

bool near_identity(const Germ& g, double tol) {
    if (g[1] != 1.0) return false;
    for (int k = 2; k <= g.order(); ++k)
        if (std::abs(g[k]) > tol) return false;
    return true;
}

double iterate_scalar(const Germ& f, double x, long n) {
    for (long i = 0; i < n; ++i) x = f(x);
    return x;
}

// Orbit points b_r = f^r(b), r < n.
std::vector<double> orbit_points(const Germ& f, double b, long n) {
    std::vector<double> out{b};
    for (long r = 1; r < n; ++r) out.push_back(f(out.back()));
    return out;
}

class ZeroEvaluator : public FactorEvaluator {
public:
    explicit ZeroEvaluator(int transient) : transient_(transient) {}
    int dimension() const override { return 1; }
    long period() const override { return 1; }
    int transient() const override { return transient_; }
    Vector eval(long, double) const override { return scalar(0.0); }
    std::string method() const override { return "zero"; }

private:
    int transient_;
};

class ConstantEvaluator : public FactorEvaluator {
public:
    explicit ConstantEvaluator(std::vector<double> points) : points_(std::move(points)) {}
    int dimension() const override { return 1; }
    long period() const override { return static_cast<long>(points_.size()); }
    int transient() const override { return 0; }
    Vector eval(long r, double) const override { return scalar(points_[static_cast<std::size_t>(r)]); }
    std::string method() const override { return "constant"; }

private:
    std::vector<double> points_;
};

// alpha^{-1}(lambda^r mu^s alpha(b)), mu = lambda^{N_f} > 0.
class KoenigsEvaluator : public FactorEvaluator {
public:
    KoenigsEvaluator(const Germ& f, double b) : f_(f), chart_(f), linear_(exactly_linear(f)) {
        const double lambda = f[1];
        period_ = lambda < 0 ? 2 : 1;
        mu_ = std::pow(lambda, static_cast<double>(period_));
        points_ = orbit_points(f, b, period_);
        if (std::abs(lambda) > 1.0) {
            for (double p : points_)
                if (p != 0.0) throw OutsideBasin("orbit of a repelling hyperbolic point leaves every neighbourhood");
        }
        for (double p : points_) charts_.push_back(p == 0.0 ? 0.0 : chart_(p));
    }
    int dimension() const override { return 1; }
    long period() const override { return period_; }
    int transient() const override { return 0; }
    std::string method() const override { return "koenigs"; }

    Vector eval(long r, double s) const override {
        const double b = points_[static_cast<std::size_t>(r)];
        if (b == 0.0) return scalar(0.0);
        if (linear_ && s == std::floor(s) && s <= 1e5) {
            // Same operation sequence as direct iteration.
            return scalar(iterate_scalar(f_, b, static_cast<long>(s) * period_));
        }
        const double y = std::pow(mu_, s) * charts_[static_cast<std::size_t>(r)];
        if (linear_) return scalar(y);
        return scalar(chart_.inverse(y, 0.0, b));
    }

private:
    Germ f_;
    KoenigsChart chart_;
    bool linear_;
    long period_ = 1;
    double mu_ = 1;
    std::vector<double> points_;
    std::vector<double> charts_;
};

// alpha^{-1}(F_r(s)) with F_r the monomial interpolant of y -> sigma y^N
// through alpha(b_r).
class BoettcherEvaluator : public FactorEvaluator {
public:
    BoettcherEvaluator(const Germ& f, double a, const MonomialOptions& options) : chart_(f) {
        IntMatrix m(1, 1);
        m(0, 0) = chart_.degree();
        const MonomialMap map(m, scalar(static_cast<double>(chart_.sigma())), options);
        period_ = map_sign_period(map, options.max_sign_dimension);
        // Sign transient of alpha(a), which has the sign of a.
        transient_ = a == 0.0 ? 0 : sign_orbit(m, {a < 0 ? -1 : 1}, {chart_.sigma()}).preperiod;
        points_ = orbit_points(f, iterate_scalar(f, a, transient_), period_);
        for (double p : points_) {
            if (p == 0.0) {
                orbits_.emplace_back();
                continue;
            }
            orbits_.emplace_back(MonomialOrbit(map, scalar(chart_(p)), options));
        }
    }
    int dimension() const override { return 1; }
    long period() const override { return period_; }
    int transient() const override { return transient_; }
    std::string method() const override { return "boettcher"; }

    Vector eval(long r, double s) const override {
        const double b = points_[static_cast<std::size_t>(r)];
        if (b == 0.0) return scalar(0.0);
        const double y = (*orbits_[static_cast<std::size_t>(r)])(s)[0];
        if (y == 0.0) return scalar(0.0);
        return scalar(chart_.inverse(y, 0.0, b));
    }

private:
    BoettcherChart chart_;
    long period_ = 1;
    int transient_ = 0;
    std::vector<double> points_;
    std::vector<std::optional<MonomialOrbit>> orbits_;
};

// Chebyshev interpolant of a smooth function on [0, 1].
class Chebyshev {
public:
    Chebyshev() = default;
    Chebyshev(const std::function<double(double)>& fn, int m) : c_(static_cast<std::size_t>(m), 0.0) {
        std::vector<double> v(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) v[static_cast<std::size_t>(k)] = fn(0.5 * (std::cos(M_PI * (k + 0.5) / m) + 1.0));
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k) acc += v[static_cast<std::size_t>(k)] * std::cos(M_PI * j * (k + 0.5) / m);
            c_[static_cast<std::size_t>(j)] = 2.0 * acc / m;
        }
        c_[0] *= 0.5;
    }
    double operator()(double x) const {
        const double t = 2.0 * x - 1.0;
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = c_.size(); j-- > 1;) {
            const double b0 = 2.0 * t * b1 - b2 + c_[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c_[0];
    }

private:
    std::vector<double> c_;
};

// psi^{-1}(psi(b_r) + s) for f (period 1) or f o f (period 2). The
// fractional part goes through a cached interpolant of psi^{-1} on one
// fundamental interval, the integer part through iteration.
class AbelEvaluator : public FactorEvaluator {
public:
    AbelEvaluator(const Germ& f, double b, long period, const AbelOptions& options) : period_(period) {
        g_ = period == 1 ? f : compose(f, f, f.order() * f.order());
        points_ = orbit_points(f, b, period);
        for (double p : points_) {
            Unit u;
            if (p != 0.0) {
                AbelOptions local = options;
                local.x_max = std::abs(p);
                u.psi.emplace(g_, p > 0 ? 1 : -1, local);
                u.value = (*u.psi)(p);
                const AbelCoordinate& psi = *u.psi;
                const double v = u.value;
                u.cheb = Chebyshev([&](double t) { return psi.inverse(v + t); }, 40);
                u.fast = true;
                for (double t : {0.0137, 0.2718, 0.5, 0.7071, 0.9973})
                    if (!(std::abs(u.cheb(t) - psi.inverse(v + t)) <= 1e-13 * std::abs(p))) u.fast = false;
            }
            units_.push_back(std::move(u));
        }
    }
    int dimension() const override { return 1; }
    long period() const override { return period_; }
    int transient() const override { return 0; }
    std::string method() const override { return "abel"; }

    Vector eval(long r, double s) const override {
        const Unit& u = units_[static_cast<std::size_t>(r)];
        if (!u.psi) return scalar(0.0);
        const double n = std::floor(s), t = s - n;
        double z = points_[static_cast<std::size_t>(r)];
        if (t > 0.0) z = u.fast ? u.cheb(t) : u.psi->inverse(u.value + t);
        return scalar(iterate_germ(g_, z, static_cast<long>(n)));
    }

private:
    struct Unit {
        std::optional<AbelCoordinate> psi;
        double value = 0.0;
        Chebyshev cheb;
        bool fast = false;
    };
    long period_;
    Germ g_;
    std::vector<double> points_;
    std::vector<Unit> units_;
};

class MonomialEvaluator : public FactorEvaluator {
public:
    MonomialEvaluator(const MonomialMap& map, const Vector& a, const MonomialOptions& options)
        : norm_(normalize_scale(map, options)), orbit_(norm_.normalized, a.cwiseQuotient(norm_.mu), options) {
        period_ = orbit_.period();
        transient_ = orbit_.transient();
        // Orbit points r = 0..B-1 after the transient, in normalised coordinates.
        Vector y = orbit_.base_point();
        for (long r = 0; r < period_; ++r) {
            orbits_.emplace_back(norm_.normalized, y, options);
            y = apply_monomial(norm_.normalized, y);
        }
    }
    int dimension() const override { return static_cast<int>(norm_.mu.size()); }
    long period() const override { return period_; }
    int transient() const override { return transient_; }
    std::string method() const override { return "monomial"; }

    Vector eval(long r, double s) const override {
        return norm_.mu.cwiseProduct(orbits_[static_cast<std::size_t>(r)](s));
    }

private:
    ScaleNormalization norm_;
    MonomialOrbit orbit_;
    long period_ = 1;
    int transient_ = 0;
    std::vector<MonomialOrbit> orbits_;
};

class ProjectiveEvaluator : public FactorEvaluator {
public:
    ProjectiveEvaluator(const Matrix& h, const Vector& b, double infinity_tol)
        : jordan_(jordan_real(h)), b_(b), infinity_tol_(infinity_tol) {}
    int dimension() const override { return static_cast<int>(b_.size()); }
    long period() const override { return 1; }
    int transient() const override { return 0; }
    std::string method() const override { return "projective"; }
    Vector eval(long, double s) const override { return projective_power(jordan_, s, b_, infinity_tol_); }

private:
    JordanDecomposition jordan_;
    Vector b_;
    double infinity_tol_;
};

std::shared_ptr<const FactorEvaluator> univariate_evaluator(const Germ& f, double a, const BundleOptions& options) {
    using K = FixedPointClass::Kind;
    const auto cls = classify_germ(f);
    switch (cls.kind) {
    case K::IdenticallyZero:
        return std::make_shared<ZeroEvaluator>(a == 0.0 ? 0 : 1);
    case K::Hyperbolic:
        return std::make_shared<KoenigsEvaluator>(f, a);
    case K::Superattracting:
        return std::make_shared<BoettcherEvaluator>(f, a, options.monomial);
    case K::Indifferent: {
        const long period = cls.sigma > 0 ? 1 : 2;
        const Germ g = cls.sigma > 0 ? f : square_germ(f);
        if (near_identity(g, 1e-12)) return std::make_shared<ConstantEvaluator>(orbit_points(f, a, period));
        if (a == 0.0) return std::make_shared<ConstantEvaluator>(std::vector<double>(static_cast<std::size_t>(period), 0.0));
        return std::make_shared<AbelEvaluator>(f, a, period, options.abel);
    }
    }
    throw UnsupportedGerm("unclassified germ");
}

} // namespace

int factor_dimension(const Factor& f) {
    return std::visit(overloaded{[](const UnivariateFactor&) { return 1; },
                                 [](const MonomialFactor& m) { return m.map.dimension(); },
                                 [](const ProjectiveFactor& p) { return static_cast<int>(p.h.rows()) - 1; }},
                      f);
}

std::string factor_kind(const Factor& f) {
    return std::visit(overloaded{[](const UnivariateFactor&) { return std::string("germ"); },
                                 [](const MonomialFactor&) { return std::string("monomial"); },
                                 [](const ProjectiveFactor&) { return std::string("projective"); }},
                      f);
}

ProductSystem::ProductSystem(std::vector<Factor> factors) : factors_(std::move(factors)) {
    for (const auto& f : factors_) {
        if (const auto* p = std::get_if<ProjectiveFactor>(&f)) {
            if (p->h.rows() < 2 || p->h.rows() != p->h.cols())
                throw DimensionError("projective factor needs a square matrix of size >= 2");
            if (!is_glnplus(p->h)) throw NotPositiveSpectrum("projective factor matrix has a non-positive or complex eigenvalue");
        } else if (const auto* m = std::get_if<MonomialFactor>(&f)) {
            if (!m->map.strong()) throw NotStrong("monomial factor exponent matrix is not in GL+");
        }
    }
}

int ProductSystem::dimension() const {
    int n = 0;
    for (const auto& f : factors_) n += factor_dimension(f);
    return n;
}

std::vector<int> ProductSystem::offsets() const {
    std::vector<int> out;
    int n = 0;
    for (const auto& f : factors_) {
        out.push_back(n);
        n += factor_dimension(f);
    }
    return out;
}

Vector step(const ProductSystem& system, const Vector& point, double infinity_tol) {
    if (point.size() != system.dimension()) throw DimensionError("point dimension does not match the system");
    Vector out(point.size());
    int off = 0;
    for (const auto& f : system.factors()) {
        const int d = factor_dimension(f);
        const Vector block = point.segment(off, d);
        Vector next = std::visit(
            overloaded{[&](const UnivariateFactor& u) { return scalar(u.germ(block[0])); },
                       [&](const MonomialFactor& m) { return apply_monomial(m.map, block); },
                       [&](const ProjectiveFactor& p) {
                           Vector hom(d + 1);
                           hom << block, 1.0;
                           const Vector img = p.h * hom;
                           if (std::abs(img[d]) <= infinity_tol) throw InfinityCrossing("orbit reached the hyperplane at infinity");
                           return Vector(img.head(d) / img[d]);
                       }},
            f);
        out.segment(off, d) = next;
        off += d;
    }
    return out;
}

Vector iterate(const ProductSystem& system, const Vector& a, long n, double box) {
    auto check = [&](const Vector& v) {
        for (int i = 0; i < v.size(); ++i)
            if (!(std::abs(v[i]) <= box)) throw DomainEscape("coordinate " + std::to_string(i) + " left the box");
    };
    if (a.size() != system.dimension()) throw DimensionError("point dimension does not match the system");
    Vector y = a;
    check(y);
    for (long k = 0; k < n; ++k) {
        y = step(system, y);
        check(y);
    }
    return y;
}

Vector projective_power(const JordanDecomposition& h, double x, const Vector& point, double infinity_tol) {
    const int d = h.dimension() - 1;
    if (point.size() != d) throw DimensionError("point dimension does not match the projective factor");
    Vector hom(d + 1);
    hom << point, 1.0;
    const Vector img = real_power(h, x) * hom;
    if (std::abs(img[d]) <= infinity_tol) throw InfinityCrossing("power reaches the hyperplane at infinity");
    return img.head(d) / img[d];
}

Vector projective_power(const Matrix& h, double x, const Vector& point, double infinity_tol) {
    if (!is_glnplus(h)) throw NotPositiveSpectrum("projective power needs a matrix in GL+");
    return projective_power(jordan_real(h), x, point, infinity_tol);
}

InterpolationBundle build_bundle(const ProductSystem& system, const Vector& a, const BundleOptions& options) {
    if (a.size() != system.dimension()) throw DimensionError("point dimension does not match the system");
    InterpolationBundle out;
    out.system_ = system;
    out.start_ = a;
    const auto offsets = system.offsets();
    for (std::size_t i = 0; i < system.factors().size(); ++i) {
        const auto& f = system.factors()[i];
        const Vector block = a.segment(offsets[i], factor_dimension(f));
        out.evaluators_.push_back(std::visit(
            overloaded{[&](const UnivariateFactor& u) { return univariate_evaluator(u.germ, block[0], options); },
                       [&](const MonomialFactor& m) -> std::shared_ptr<const FactorEvaluator> {
                           return std::make_shared<MonomialEvaluator>(m.map, block, options.monomial);
                       },
                       [&](const ProjectiveFactor& p) -> std::shared_ptr<const FactorEvaluator> {
                           return std::make_shared<ProjectiveEvaluator>(p.h, block, options.infinity_tol);
                       }},
            f));
    }
    for (const auto& e : out.evaluators_) {
        out.modulus_ = std::lcm(out.modulus_, e->period());
        out.transient_ = std::max(out.transient_, e->transient());
    }
    out.base_ = iterate(system, a, out.transient_, options.box);
    return out;
}

Vector InterpolationBundle::operator()(long j, double x) const {
    if (j < 0 || j >= modulus_) throw DimensionError("residue out of range");
    if (!(x >= 0.0)) throw DomainEscape("bundle arguments must be nonnegative");
    Vector out(system_.dimension());
    int off = 0;
    for (const auto& e : evaluators_) {
        const long nf = e->period();
        const long k = (transient_ - e->transient()) + j;
        const long r = k % nf, q = k / nf;
        out.segment(off, e->dimension()) = e->eval(r, static_cast<double>(q) + x * static_cast<double>(modulus_ / nf));
        off += e->dimension();
    }
    return out;
}

Vector evaluate_bundle(const InterpolationBundle& bundle, long j, double x) { return bundle(j, x); }

BundleReport verify_bundle(const InterpolationBundle& bundle, const ProductSystem& system, const Vector& a, long m_max,
                           double tol) {
    BundleReport rep;
    const long n = bundle.modulus();
    Vector y = a;
    long step_index = 0;
    auto advance_to = [&](long target) {
        for (; step_index < target; ++step_index) y = step(system, y);
    };
    for (long m = 0; m <= m_max; ++m)
        for (long j = 0; j < n; ++j) {
            advance_to(n * m + j + bundle.transient());
            double dev;
            try {
                dev = (bundle(j, static_cast<double>(m)) - y).cwiseAbs().maxCoeff();
            } catch (const Error&) {
                dev = std::numeric_limits<double>::infinity();
            }
            if (!std::isfinite(dev)) dev = std::numeric_limits<double>::infinity();
            ++rep.samples;
            if (!(dev <= rep.max_deviation)) {
                rep.max_deviation = dev;
                rep.worst_j = j;
                rep.worst_m = m;
            }
        }
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

} // namespace smld
