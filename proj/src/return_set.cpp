#include "smld/return_set.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>

#include "smld/errors.hpp"

namespace smld {

Variety::Variety(std::vector<VarietyTerm> terms, double scale) : terms_(std::move(terms)), scale_(scale) {
    if (terms_.empty()) throw InvalidVariety("a variety needs at least one term");
    dimension_ = static_cast<int>(terms_.front().exponents.size());
    bool nonzero = false;
    for (const auto& t : terms_) {
        if (static_cast<int>(t.exponents.size()) != dimension_)
            throw InvalidVariety("all terms must have the same number of exponents");
        for (int e : t.exponents)
            if (e < 0) throw InvalidVariety("exponents must be nonnegative");
        if (!std::isfinite(t.c)) throw InvalidVariety("coefficients must be finite");
        nonzero = nonzero || t.c != 0.0;
    }
    if (!nonzero) throw InvalidVariety("a variety needs a nonzero coefficient");
    if (!(scale_ >= 0.0) || !std::isfinite(scale_)) throw InvalidVariety("scale must be finite and nonnegative");
}

namespace {

double monomial_value(const std::vector<int>& e, const Vector& p) {
    double v = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) v *= std::pow(p[static_cast<Eigen::Index>(i)], e[i]);
    return v;
}

void check_dimension(const Variety& H, const Vector& p) {
    if (H.dimension() != p.size()) throw DimensionError("variety and point dimensions differ");
}

} // namespace

double Variety::operator()(const Vector& p) const {
    check_dimension(*this, p);
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.c * monomial_value(t.exponents, p);
    return acc;
}

double Variety::magnitude(const Vector& p) const {
    check_dimension(*this, p);
    double acc = scale_;
    for (const auto& t : terms_) acc += std::abs(t.c * monomial_value(t.exponents, p));
    return acc;
}

bool Variety::vanishes_at(const Vector& p, double tol) const { return std::abs((*this)(p)) <= tol * magnitude(p); }

std::vector<long> compute_hits(const ProductSystem& system, const Vector& a, const Variety& H, long n_max, double tol,
                               double box) {
    if (a.size() != system.dimension()) throw DimensionError("start point dimension differs from the system");
    std::vector<long> hits;
    Vector p = a;
    for (long n = 0; n <= n_max; ++n) {
        if (n > 0) p = step(system, p);
        if (p.cwiseAbs().maxCoeff() > box) throw DomainEscape("orbit left the box at step " + std::to_string(n));
        if (H.vanishes_at(p, tol)) hits.push_back(n);
    }
    return hits;
}

std::string to_string(VerdictKind k) {
    switch (k) {
    case VerdictKind::Finite: return "finite";
    case VerdictKind::Cofinite: return "cofinite";
    case VerdictKind::All: return "all";
    }
    return "?";
}

std::optional<ClassExpPoly> class_exp_poly(const InterpolationBundle& bundle, long j, const Variety& H) {
    const ProductSystem& system = bundle.system();
    if (H.dimension() != system.dimension()) throw DimensionError("variety and system dimensions differ");
    std::vector<double> lambda;
    for (const auto& f : system.factors()) {
        const auto* u = std::get_if<UnivariateFactor>(&f);
        if (!u) return std::nullopt;
        for (int k = 2; k <= u->germ.order(); ++k)
            if (u->germ[k] != 0.0) return std::nullopt;
        lambda.push_back(u->germ[1]);
    }
    // Coordinate i along the class: b_i kappa_i^x with b = Phi^(t + j)(a).
    Vector b = bundle.base_point();
    for (long k = 0; k < j; ++k) b = step(system, b);
    const long N = bundle.modulus();
    std::vector<Rational> kappa, base;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const Rational k = rational_pow(to_rational(lambda[i]), N);
        if (b[static_cast<Eigen::Index>(i)] != 0.0 && k <= 0) return std::nullopt;
        kappa.push_back(k > 0 ? k : Rational(1));
        base.push_back(to_rational(b[static_cast<Eigen::Index>(i)]));
    }
    // Collect per exact base; a sum far below its parts is rounding residue.
    std::vector<std::pair<Rational, std::pair<Rational, double>>> groups;
    for (const auto& t : H.terms()) {
        Rational c = to_rational(t.c), r(1);
        for (std::size_t i = 0; i < t.exponents.size(); ++i) {
            c *= rational_pow(base[i], t.exponents[i]);
            r *= rational_pow(kappa[i], t.exponents[i]);
        }
        if (c == 0) continue;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == r; });
        if (it == groups.end()) {
            groups.push_back({r, {c, std::abs(c.get_d())}});
        } else {
            it->second.first += c;
            it->second.second += std::abs(c.get_d());
        }
    }
    ClassExpPoly out;
    std::vector<ExpTerm> terms;
    for (const auto& [r, sum] : groups) {
        if (sum.first == 0) continue;
        if (std::abs(sum.first.get_d()) <= 1e-13 * sum.second) {
            out.exact = false;
            continue;
        }
        terms.push_back({sum.first.get_d(), std::log(r.get_d()), 0, sum.first, r});
    }
    out.ep = ExpPoly(std::move(terms));
    return out;
}

namespace {

struct Sample {
    double x;
    double h;
    double s;
};

std::vector<Sample> sample_class(const InterpolationBundle& bundle, long j, const Variety& H, double x_max,
                                 int per_unit) {
    std::vector<Sample> out;
    const long count = static_cast<long>(std::floor(x_max * per_unit));
    for (long i = 0; i <= count; ++i) {
        const double x = static_cast<double>(i) / per_unit;
        const Vector p = bundle(j, x);
        out.push_back({x, H(p), H.magnitude(p)});
    }
    if (out.empty() || out.back().x < x_max) {
        const Vector p = bundle(j, x_max);
        out.push_back({x_max, H(p), H.magnitude(p)});
    }
    return out;
}

int count_sign_changes(const std::vector<Sample>& samples) {
    int changes = 0;
    double last = 0.0;
    for (const auto& s : samples) {
        if (s.h == 0.0) continue;
        if (last != 0.0 && (s.h < 0) != (last < 0)) ++changes;
        last = s.h;
    }
    return changes;
}

ClassVerdict exp_poly_verdict(const ClassExpPoly& cep, ClassVerdict v, long N, double x_max, double tol) {
    v.method = "exp_poly";
    const ExpPoly& ep = cep.ep;
    v.certified = cep.exact;
    if (ep.empty()) {
        v.kind = VerdictKind::All;
        v.start = v.first;
        return v;
    }
    const auto brackets = isolate_zeros(ep, 0.0, x_max);
    v.sign_changes = static_cast<int>(std::count_if(brackets.begin(), brackets.end(),
                                                    [](const RootBracket& r) { return !r.tangential; }));
    std::set<long> zeros;
    const long m_max = static_cast<long>(std::floor(x_max));
    for (const auto& r : brackets) {
        const long lo = std::max(0L, static_cast<long>(std::floor(r.lo - 1e-6)));
        const long hi = std::min(m_max, static_cast<long>(std::ceil(r.hi + 1e-6)));
        for (long m = lo; m <= hi; ++m) {
            const double x = static_cast<double>(m);
            if (std::abs(ep(x)) <= tol * ep.scale(x)) zeros.insert(v.first + N * m);
        }
    }
    v.zeros.assign(zeros.begin(), zeros.end());
    return v;
}

} // namespace

ClassVerdict analyze_class(const InterpolationBundle& bundle, long j, const Variety& H, double x_max,
                           const ClassOptions& options) {
    const long N = bundle.modulus();
    if (j < 0 || j >= N) throw DimensionError("residue out of range");
    ClassVerdict v;
    v.residue = j;
    v.first = bundle.transient() + j;
    if (x_max < 0.0) {
        v.method = "empty";
        return v;
    }
    if (auto ep = class_exp_poly(bundle, j, H)) return exp_poly_verdict(*ep, v, N, x_max, options.tol);

    v.method = "grid";
    const int per = std::max(1, options.samples_per_unit);
    const auto samples = sample_class(bundle, j, H, x_max, per);
    v.sign_changes = count_sign_changes(samples);
    auto small = [&](const Sample& s) { return std::abs(s.h) <= options.tol * s.s; };

    // Longest vanishing tail of the grid, in whole units.
    std::size_t tail = samples.size();
    while (tail > 0 && small(samples[tail - 1])) --tail;
    const long m_max = static_cast<long>(std::floor(x_max));
    long m0 = m_max + 1;
    if (tail < samples.size()) m0 = static_cast<long>(std::ceil(samples[tail].x));
    bool cofinite = m_max - m0 + 1 >= options.min_tail;
    if (cofinite) {
        // The integer oracle must agree beyond m0 as well.
        Vector p = iterate(bundle.system(), bundle.start(), v.first + N * m0, std::numeric_limits<double>::infinity());
        for (long m = m0; m <= m_max && cofinite; ++m) {
            if (m > m0)
                for (long k = 0; k < N; ++k) p = step(bundle.system(), p);
            cofinite = H.vanishes_at(p, options.tol);
        }
    }
    for (const auto& s : samples) {
        const double m = std::round(s.x);
        if (m != s.x || (cofinite && m >= m0)) continue;
        if (small(s)) v.zeros.push_back(v.first + N * static_cast<long>(m));
    }
    if (cofinite) {
        v.kind = m0 == 0 ? VerdictKind::All : VerdictKind::Cofinite;
        v.start = v.first + N * m0;
    }
    return v;
}

int class_sign_changes(const InterpolationBundle& bundle, long j, const Variety& H, double x_max,
                       int samples_per_unit) {
    if (x_max < 0.0) return 0;
    return count_sign_changes(sample_class(bundle, j, H, x_max, std::max(1, samples_per_unit)));
}

bool ReturnSetDecomposition::contains(long n) const {
    if (n < 0 || n > n_max) return false;
    if (std::binary_search(exceptional.begin(), exceptional.end(), n)) return true;
    for (const auto& p : progressions)
        if (n >= p.start && (n - p.start) % modulus == 0) return true;
    return false;
}

std::vector<long> ReturnSetDecomposition::reconstruct() const {
    std::vector<long> out;
    for (long n = 0; n <= n_max; ++n)
        if (contains(n)) out.push_back(n);
    return out;
}

ReturnSetDecomposition decompose(const std::vector<long>& hits, const std::vector<ClassVerdict>& verdicts, long N,
                                 long n_max) {
    if (N < 1) throw DimensionError("modulus must be positive");
    std::vector<bool> seen(static_cast<std::size_t>(N), false);
    for (const auto& v : verdicts) {
        if (v.residue < 0 || v.residue >= N || seen[static_cast<std::size_t>(v.residue)])
            throw DimensionError("verdicts must cover each residue exactly once");
        seen[static_cast<std::size_t>(v.residue)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw DimensionError("verdicts must cover each residue exactly once");

    const std::set<long> hit(hits.begin(), hits.end());
    ReturnSetDecomposition out;
    out.modulus = N;
    out.n_max = n_max;
    std::set<long> covered;
    for (const auto& v : verdicts) {
        auto in_class = [&](long n) { return n >= v.first && (n - v.first) % N == 0; };
        const std::string where = "residue " + std::to_string(v.residue) + ": ";
        if (v.kind == VerdictKind::Finite) {
            std::set<long> claimed;
            for (long n : v.zeros)
                if (n <= n_max) claimed.insert(n);
            for (long n = v.first; n <= n_max; n += N)
                if (hit.count(n) != claimed.count(n))
                    throw InconsistentVerdict(where + "finite verdict disagrees with the hit oracle at n = " +
                                              std::to_string(n));
            continue;
        }
        for (long n = v.start; n <= n_max; n += N)
            if (!hit.count(n))
                throw InconsistentVerdict(where + "progression misses n = " + std::to_string(n));
        if (!in_class(v.start)) throw InconsistentVerdict(where + "progression start outside its class");
        // Canonical start: absorb earlier hits of the same progression.
        long start = v.start;
        while (start - N >= 0 && hit.count(start - N)) start -= N;
        for (long n = start; n <= n_max; n += N) covered.insert(n);
        out.progressions.push_back({((start % N) + N) % N, start, v.certified});
    }
    std::sort(out.progressions.begin(), out.progressions.end(),
              [](const Progression& a, const Progression& b) { return a.residue < b.residue; });
    for (long n : hit)
        if (n >= 0 && n <= n_max && !covered.count(n)) out.exceptional.push_back(n);
    return out;
}

ReturnSetReport analyze_return_set(const ProductSystem& system, const Vector& a, const Variety& H, long n_max,
                                   const ReturnSetOptions& options) {
    if (H.dimension() != system.dimension()) throw DimensionError("variety and system dimensions differ");
    ReturnSetReport rep;
    rep.hits = compute_hits(system, a, H, n_max, options.classes.tol, options.bundle.box);
    const InterpolationBundle bundle = build_bundle(system, a, options.bundle);
    rep.modulus = bundle.modulus();
    rep.transient = bundle.transient();
    const long N = rep.modulus;
    auto run = [&](long j) {
        const double x_max = static_cast<double>(n_max - rep.transient - j) / static_cast<double>(N);
        return analyze_class(bundle, j, H, x_max, options.classes);
    };
    if (options.parallel && N > 1) {
        std::vector<std::future<ClassVerdict>> jobs;
        for (long j = 0; j < N; ++j) jobs.push_back(std::async(std::launch::async, run, j));
        for (auto& f : jobs) rep.verdicts.push_back(f.get());
    } else {
        for (long j = 0; j < N; ++j) rep.verdicts.push_back(run(j));
    }
    rep.decomposition = decompose(rep.hits, rep.verdicts, N, n_max);
    return rep;
}

std::string to_string(Trichotomy t) {
    switch (t) {
    case Trichotomy::All: return "all";
    case Trichotomy::Evens: return "evens";
    case Trichotomy::Odds: return "odds";
    case Trichotomy::Finite: return "finite";
    }
    return "?";
}

TrichotomyResult trichotomy_check(const ProductSystem& system, const Vector& a, const Variety& H, long n_max,
                                  const ReturnSetOptions& options) {
    for (const auto& f : system.factors()) {
        const auto* u = std::get_if<UnivariateFactor>(&f);
        if (!u) throw UnsupportedGerm("the trichotomy applies to products of univariate germs");
        if (std::abs(u->germ[1]) > 1.0) throw OutsideBasin("the trichotomy needs |f'(0)| <= 1");
    }
    TrichotomyResult out;
    out.report = analyze_return_set(system, a, H, n_max, options);
    const auto& d = out.report.decomposition;
    if (d.modulus != 1 && d.modulus != 2)
        throw TrichotomyViolation("modulus " + std::to_string(d.modulus) + " is neither 1 nor 2");
    std::set<long> residues;
    for (const auto& p : d.progressions) residues.insert(p.residue);
    if (residues.empty())
        out.label = Trichotomy::Finite;
    else if (static_cast<long>(residues.size()) == d.modulus)
        out.label = Trichotomy::All;
    else if (*residues.begin() == 0)
        out.label = Trichotomy::Evens;
    else
        out.label = Trichotomy::Odds;
    return out;
}

} // namespace smld
