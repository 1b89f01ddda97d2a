// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "generators.hpp"
#include "golden_systems.hpp"
#include "smld/exp_poly.hpp"
#include "smld/germs.hpp"
#include "smld/matrix_power.hpp"
#include "smld/monomial.hpp"

using namespace smld;
using smld::testing::coordinate_minus;
using smld::testing::vec;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first failing check in detail.
struct Checker {
    Outcome& out;
    void operator()(bool ok, const std::string& what) {
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = what;
        }
    }
};

IntMatrix ints(std::initializer_list<std::initializer_list<long>> rows) {
    IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (long v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

Outcome criterion1() {
    Outcome out{true, "50 random GL+ matrices, cocycle and integer powers within 1e-8"};
    Checker check{out};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 5;
        auto s = smld::testing::random_glnplus(rng, n);
        const auto jd = jordan_real(s.g);
        for (int k = 0; k < 4; ++k) {
            const double x = ux(rng);
            check(rel_err(real_power(jd, x + 1), s.g * real_power(jd, x)) <= 1e-8,
                  "cocycle failed on trial " + std::to_string(trial));
        }
        for (int m = 0; m <= 6; ++m)
            check(rel_err(real_power(jd, m), smld::testing::repeated_product(s.g, m)) <= 1e-8,
                  "integer power failed on trial " + std::to_string(trial));
    }
    Matrix g(2, 2);
    g << 2, 1, 0, 2;
    const auto jd = jordan_real(g);
    RationalMatrix want(2, 2);
    want(0, 0) = 8;
    want(0, 1) = 12;
    want(1, 1) = 8;
    check(jd.exact.has_value() && exact_power(jd, 3) == want, "[[2,1],[0,2]]^3 not exactly [[8,12],[0,8]]");
    return out;
}

Outcome criterion2() {
    Outcome out{true, "50 random monomial maps normalized to {+1,-1} scales within 1e-10; lambda=-8 gives mu=1/8"};
    Checker check{out};
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> mag(0.1, 10.0), u(-1.5, 1.5);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 3;
        auto base = smld::testing::random_strong_map(rng, n, false);
        Vector lambda(n);
        for (int i = 0; i < n; ++i) lambda[i] = (coin(rng) ? -1 : 1) * mag(rng);
        const MonomialMap map(base.exponents(), lambda);
        const auto norm = normalize_scale(map);
        for (int i = 0; i < n; ++i) {
            check(std::abs(norm.normalized.scale()[i]) == 1.0, "scale not in {+1,-1} on trial " + std::to_string(trial));
            check(norm.mu[i] > 0, "mu not positive on trial " + std::to_string(trial));
        }
        for (int k = 0; k < 5; ++k) {
            Vector x(n);
            for (int i = 0; i < n; ++i) x[i] = u(rng);
            const Vector lhs = apply_monomial(map, norm.mu.cwiseProduct(x)).cwiseQuotient(norm.mu);
            const Vector rhs = apply_monomial(norm.normalized, x);
            for (int i = 0; i < n; ++i)
                check(std::abs(lhs[i] - rhs[i]) <= 1e-10 * std::max(1.0, std::abs(rhs[i])),
                      "conjugation identity failed on trial " + std::to_string(trial));
        }
    }
    const auto sq = normalize_scale(MonomialMap(ints({{2}}), vec({-8})));
    check(sq.exact && sq.mu[0] == 0.125 && sq.normalized.scale()[0] == -1.0, "lambda=-8, M=[[2]] did not give mu=1/8");
    return out;
}

Outcome criterion3() {
    Outcome out{true, "golden monomial orbits: F(x+1)=Phi^B(F(x)) within 1e-8 and 25 integer steps; cat map B=3"};
    Checker check{out};
    struct Case {
        MonomialMap map;
        Vector a;
        long period;
    };
    const std::vector<Case> cases = {
        {MonomialMap(ints({{2, 1}, {1, 1}}), vec({1, 1})), vec({0.7, -0.6}), 3},
        {MonomialMap(ints({{2, 1}, {1, 1}}), vec({1, 1})), vec({-0.5, -0.8}), 3},
        {MonomialMap(ints({{2}}), vec({1})), vec({0.5}), 1},
        {MonomialMap(ints({{3}}), vec({-1})), vec({0.9}), 2},
        {MonomialMap(ints({{2, 1}, {0, 3}}), vec({1, -1})), vec({0.6, -0.8}), 0},
        {MonomialMap(ints({{3, 1, 0}, {1, 3, 1}, {0, 1, 3}}), vec({1, 1, -1})), vec({0.9, -0.7, 0.8}), 0},
    };
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> ux(0.0, 10.0);
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const auto& k = cases[c];
        const std::string tag = " on golden map " + std::to_string(c);
        const MonomialOrbit f(k.map, k.a);
        if (k.period > 0) check(f.period() == k.period, "wrong period" + tag);
        const long b = f.period();
        Vector y = apply_monomial_power(k.map, k.a, f.transient());
        for (int m = 0; m <= 25; ++m) {
            check((f(m) - y).cwiseAbs().maxCoeff() <= 1e-8, "iteration mismatch at m=" + std::to_string(m) + tag);
            y = apply_monomial_power(k.map, y, b);
        }
        for (int s = 0; s < 20; ++s) {
            const double x = ux(rng);
            check((f(x + 1) - apply_monomial_power(k.map, f(x), b)).cwiseAbs().maxCoeff() <= 1e-8,
                  "functional equation failed" + tag);
        }
    }
    return out;
}

Outcome criterion4() {
    Outcome out{true, "10 germs: exact Koenigs/Boettcher defects through order 16, alpha_2=4; Abel defects <= 1e-6"};
    Checker check{out};
    auto rg = [](std::vector<double> c) { return to_rational(Germ(c, 16)); };
    const std::vector<RationalGerm> hyperbolic = {
        rg({0.5, 1}), rg({-0.25, 1, -0.5}), rg({2, 1}), rg({0.75, 0, 1}), rg({-0.5, 0.125, 0.25, -1}),
    };
    for (std::size_t i = 0; i < hyperbolic.size(); ++i) {
        const RationalGerm& f = hyperbolic[i];
        const RationalGerm alpha = koenigs(f);
        const RationalGerm lhs = compose(alpha, f);
        RationalGerm rhs(f.order());
        for (int k = 1; k <= f.order(); ++k) rhs.at(k) = f[1] * alpha[k];
        check(f.order() >= 16 && lhs == rhs, "Koenigs defect nonzero for germ " + std::to_string(i));
    }
    check(koenigs(hyperbolic[0])[2] == 4, "x/2 + x^2 did not give alpha_2 = 4");
    const std::vector<RationalGerm> superattracting = {
        rg({0, 1}), rg({0, 1, 1}), rg({0, -8, 0, 1}), rg({0, 0, 4, 1}), rg({0, 0, 1, 0, -0.5}),
    };
    for (std::size_t i = 0; i < superattracting.size(); ++i) {
        const RationalGerm& f = superattracting[i];
        const auto b = boettcher(f);
        int degree = 1;
        while (f[degree] == 0) ++degree;
        const RationalGerm conj = compose(compose(b.alpha, f), series_invert(b.alpha));
        check(conj == RationalGerm::monomial(Rational(b.sigma), degree, f.order()),
              "Boettcher defect nonzero for germ " + std::to_string(i));
    }
    struct Side {
        Germ f;
        int side;
    };
    for (const auto& s : {Side{Germ({1, -1}, 16), +1}, Side{Germ({1, 0, -1}, 16), +1}, Side{Germ({1, 0, -1}, 16), -1}}) {
        const AbelCoordinate psi(s.f, s.side);
        for (int i = 1; i <= 200; ++i) {
            const double x = s.side * psi.x_max() * i / 200;
            check(psi.defect(x) <= 1e-6, "Abel defect too large at x=" + std::to_string(x));
        }
    }
    return out;
}

Outcome criterion5() {
    Outcome out{true, "12 golden systems reconstruct on [0,200] and are stable at 400"};
    Checker check{out};
    const auto systems = smld::testing::golden_return_systems();
    check(systems.size() == 12, "golden suite does not have 12 systems");
    for (const auto& g : systems) {
        const auto r200 = analyze_return_set(g.system, g.a, g.H, 200);
        const auto r400 = analyze_return_set(g.system, g.a, g.H, 400);
        check(r200.decomposition.reconstruct() == r200.hits, g.name + ": reconstruction failed at 200");
        check(r400.decomposition.reconstruct() == r400.hits, g.name + ": reconstruction failed at 400");
        check(r200.decomposition.exceptional == r400.decomposition.exceptional, g.name + ": exceptional set moved");
        const auto& p2 = r200.decomposition.progressions;
        const auto& p4 = r400.decomposition.progressions;
        bool same = p2.size() == p4.size();
        for (std::size_t i = 0; same && i < p2.size(); ++i)
            same = p2[i].residue == p4[i].residue && p2[i].start == p4[i].start;
        check(same, g.name + ": progressions moved");
    }
    return out;
}

Outcome criterion6() {
    Outcome out{true, "trichotomy: Evens, Finite with exceptional {0}, All certified via ExpPoly"};
    Checker check{out};
    const ProductSystem flip({smld::testing::germ({-1})});
    const auto ev = trichotomy_check(flip, vec({0.3}), coordinate_minus(1, 0, 0.3), 200);
    check(ev.label == Trichotomy::Evens, "x -> -x from 0.3 is not Evens");

    const ProductSystem half({smld::testing::germ({0.5})});
    const auto fin = trichotomy_check(half, vec({1}), coordinate_minus(1, 0, 1.0), 200);
    check(fin.label == Trichotomy::Finite && fin.report.decomposition.exceptional == std::vector<long>{0},
          "x/2 from 1 is not Finite with {0}");

    const ProductSystem pair({smld::testing::germ({0.5}), smld::testing::germ({0.25})});
    const auto all = trichotomy_check(pair, vec({1, 1}), Variety({{{2, 0}, 1.0}, {{0, 1}, -1.0}}), 200);
    bool certified = all.label == Trichotomy::All && !all.report.decomposition.progressions.empty();
    for (const auto& p : all.report.decomposition.progressions) certified = certified && p.certified;
    for (const auto& v : all.report.verdicts) certified = certified && v.certified && v.method == "exp_poly";
    check(certified, "x1^2 = x2 orbit is not a certified All");
    return out;
}

// Exact zero set of a rational-coefficient recurrence.
std::vector<long> exact_zeros(const Recurrence& r, long n_max) {
    std::vector<Rational> a;
    for (double v : r.init) a.emplace_back(v);
    const std::size_t k = r.coeffs.size();
    while (static_cast<long>(a.size()) <= n_max) {
        Rational next = 0;
        for (std::size_t i = 0; i < k; ++i) next += Rational(r.coeffs[i]) * a[a.size() - 1 - i];
        a.push_back(next);
    }
    std::vector<long> out;
    for (long n = 0; n <= n_max; ++n)
        if (a[static_cast<std::size_t>(n)] == 0) out.push_back(n);
    return out;
}

Outcome criterion7() {
    Outcome out{true, "10 recurrences match exact brute force to n=500; 200 random isolate_zeros instances"};
    Checker check{out};
    const std::vector<std::pair<Recurrence, std::vector<long>>> recs = {
        {{{3, -2}, {7, 6}}, {3}},                  // 8 - 2^n
        {{{3, -3, 1}, {6, 2, 0}}, {2, 3}},         // (n-2)(n-3)
        {{{4, -4}, {4, 4}}, {2}},                  // (4-2n) 2^n
        {{{5, -6}, {0, -1}}, {0}},                 // 2^n - 3^n
        {{{4, -3}, {-26, -24}}, {3}},              // 3^n - 27
        {{{1.5, -0.5}, {0.875, 0.375}}, {3}},      // 2^-n - 1/8
        {{{1, -0.25}, {-5, -2}}, {5}},             // (n-5) 2^-n
        {{{5, -6}, {2, 5}}, {}},                   // 2^n + 3^n
        {{{6, -11, 6}, {1, 0, 0}}, {1, 2}},        // 3 - 3 2^n + 3^n
        {{{3, -2}, {-1023, -1022}}, {10}},         // 2^n - 1024
    };
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& [r, want] = recs[i];
        const auto oracle = exact_zeros(r, 500);
        check(oracle == want, "oracle disagrees with the closed form for recurrence " + std::to_string(i));
        check(recurrence_zero_set(r, 500) == oracle, "zero set mismatch for recurrence " + std::to_string(i));
    }

    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> c(-3.0, 3.0), mu(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(0, 2);
    const int cells = 10000;
    const double lo = -4, hi = 4, cell = (hi - lo) / cells;
    for (int trial = 0; trial < 200; ++trial) {
        const ExpPoly ep({{c(rng), mu(rng), deg(rng), {}, {}}, {c(rng), mu(rng), deg(rng), {}, {}},
                          {c(rng), mu(rng), deg(rng), {}, {}}});
        const auto brackets = isolate_zeros(ep, lo, hi);
        check(static_cast<int>(brackets.size()) <= ep.weight() - 1, "bound exceeded on trial " + std::to_string(trial));
        double prev = ep(lo);
        for (int i = 1; i <= cells; ++i) {
            const double x = lo + (hi - lo) * i / cells;
            const double v = ep(x);
            if (prev == 0 || v == 0 || (prev < 0) != (v < 0)) {
                const double mid = x - 0.5 * cell;
                bool covered = false;
                for (const auto& b : brackets)
                    if (mid >= b.lo - cell && mid <= b.hi + cell) covered = true;
                check(covered, "missed sign change on trial " + std::to_string(trial));
            }
            prev = v;
        }
    }
    return out;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        std::function<Outcome()> run;
        double budget_s;  // 0: no runtime bound
    };
    const std::vector<Criterion> criteria = {
        {1, criterion1, 5}, {2, criterion2, 0}, {3, criterion3, 10}, {4, criterion4, 0},
        {5, criterion5, 30}, {6, criterion6, 0}, {7, criterion7, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s && o.pass)
            o = {false, o.detail + "; over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget"};
        std::printf("criterion %d: %s (%s; %.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
