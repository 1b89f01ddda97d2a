#include <doctest.h>

#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "generators.hpp"
#include "smld/errors.hpp"
#include "smld/monomial.hpp"

using namespace smld;
using smld::testing::random_strong_map;

namespace {

IntMatrix ints(std::initializer_list<std::initializer_list<long>> rows) {
    IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    int i = 0;
    for (auto& r : rows) {
        int j = 0;
        for (long v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

int sign_of(double v) { return v < 0 ? -1 : 1; }

} // namespace

TEST_CASE("apply_monomial examples") {
    CHECK(apply_monomial(MonomialMap(ints({{2}}), vec({1})), vec({0.5}))[0] == 0.25);
    CHECK(apply_monomial(MonomialMap(ints({{2}}), vec({-8})), vec({0.5}))[0] == -2.0);
    Vector y = apply_monomial(MonomialMap(ints({{2, 1}, {1, 1}}), vec({1, 1})), vec({2, 3}));
    CHECK(y == vec({12, 6}));
    // 0^0 = 1
    CHECK(apply_monomial(MonomialMap(ints({{2, 0}, {0, 3}}), vec({1, 1})), vec({0, 0.5})) == vec({0, 0.125}));
}

TEST_CASE("MonomialMap validation") {
    CHECK_THROWS_AS(MonomialMap(ints({{1, 1}, {1, 1}}), vec({1, 1})), InvalidMonomialMap);     // singular
    CHECK_THROWS_AS(MonomialMap(ints({{0, 1}, {1, 0}}), vec({1, 1})), InvalidMonomialMap);     // eigenvalues +-1
    CHECK_THROWS_AS(MonomialMap(ints({{1, 1}, {0, 2}}), vec({1, 1})), InvalidMonomialMap);     // eigenvalue 1
    CHECK_THROWS_AS(MonomialMap(ints({{2, 0}, {0, 2}}), vec({1, 0})), InvalidMonomialMap);     // zero scale
    CHECK_THROWS_AS(MonomialMap(ints({{2, -1}, {0, 2}}), vec({1, 1})), InvalidMonomialMap);    // negative entry
    CHECK_THROWS_AS(MonomialMap(ints({{2}}), vec({1, 1})), DimensionError);
    CHECK(MonomialMap(ints({{2, 1}, {1, 1}}), vec({1, 1})).strong());
    // [[1,2],[2,1]] has eigenvalues 3 and -1: rejected. [[1,3],[2,1]] is
    // valid but has a negative eigenvalue, so not strong.
    CHECK_THROWS_AS(MonomialMap(ints({{1, 2}, {2, 1}}), vec({1, 1})), InvalidMonomialMap);
    CHECK_FALSE(MonomialMap(ints({{1, 3}, {2, 1}}), vec({1, 1})).strong());
}

TEST_CASE("sign_orbit examples") {
    auto all_plus = sign_orbit(ints({{2, 1}, {1, 1}}), {1, 1});
    CHECK(all_plus.preperiod == 0);
    CHECK(all_plus.period == 1);

    auto sq = sign_orbit(ints({{2}}), {-1});
    CHECK(sq.preperiod == 1);
    CHECK(sq.period == 1);
    CHECK(sq.trajectory == std::vector<SignVector>{{-1}, {1}});

    auto cat = sign_orbit(ints({{2, 1}, {1, 1}}), {-1, 1});
    CHECK(cat.preperiod == 0);
    CHECK(cat.period == 3);
    CHECK(cat.trajectory == std::vector<SignVector>{{-1, 1}, {1, -1}, {-1, -1}});

    // With a negative scale x -> -x^3 the sign -1 is fixed and +1 flips.
    auto neg = sign_orbit(ints({{3}}), {1}, {-1});
    CHECK(neg.preperiod == 0);
    CHECK(neg.period == 2);
}

TEST_CASE("sign_period_B examples") {
    CHECK(sign_period_B(ints({{2}})) == 1);
    CHECK(sign_period_B(ints({{2, 1}, {1, 1}})) == 3);
    CHECK(sign_period_B(ints({{2, 0}, {0, 3}})) == 1);
    CHECK(map_sign_period(MonomialMap(ints({{3}}), vec({-1}))) == 2);
    CHECK_THROWS_AS(sign_period_B(IntMatrix::Identity(22, 22) * 2, 20), DimensionTooLarge);
}

TEST_CASE("sign_period_B is divisible by every orbit period") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 4;
        auto map = random_strong_map(rng, n, false);
        const long b = sign_period_B(map.exponents());
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            SignVector s(n);
            for (int j = 0; j < n; ++j) s[j] = (mask >> j) & 1 ? -1 : 1;
            CHECK(b % sign_orbit(map.exponents(), s).period == 0);
        }
    }
}

TEST_CASE("parallel enumeration agrees with the serial one") {
    // Seven copies of [[2,1],[1,1]]; n = 14 crosses the chunking threshold.
    IntMatrix m = IntMatrix::Zero(14, 14);
    for (int k = 0; k < 7; ++k) {
        m(2 * k, 2 * k) = 2, m(2 * k, 2 * k + 1) = 1;
        m(2 * k + 1, 2 * k) = 1, m(2 * k + 1, 2 * k + 1) = 1;
    }
    CHECK(sign_period_B(m) == 3);
    m(0, 0) = 3; // this block is [[1,1],[1,1]] mod 2, cycles of length 1 only
    CHECK(sign_period_B(m) == 3);
}

TEST_CASE("sign map is well defined on random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 4;
        auto map = random_strong_map(rng, n, true);
        Vector x(n);
        SignVector s(n);
        for (int i = 0; i < n; ++i) {
            do x[i] = u(rng);
            while (x[i] == 0.0);
            s[i] = sign_of(x[i]);
        }
        const Vector y = apply_monomial(map, x);
        const auto orbit = sign_orbit(map.exponents(), s, map.scale_signs());
        const auto next = [](const SignOrbit& o) {
            return o.trajectory.size() > 1 ? o.trajectory[1] : o.trajectory[static_cast<std::size_t>(o.preperiod)];
        };
        SignVector got(n);
        for (int i = 0; i < n; ++i) got[i] = sign_of(y[i]);
        CHECK(got == next(orbit));
        if (map.scale() == Vector::Ones(n)) CHECK(got == next(sign_orbit(map.exponents(), s)));
    }
}

TEST_CASE("normalize_scale examples") {
    auto id = normalize_scale(MonomialMap(ints({{2, 1}, {1, 1}}), vec({1, 1})));
    CHECK(id.mu == vec({1, 1}));

    auto sq = normalize_scale(MonomialMap(ints({{2}}), vec({-8})));
    CHECK(sq.exact);
    CHECK(sq.mu[0] == 0.125);
    CHECK(sq.normalized.scale()[0] == -1.0);

    auto diag = normalize_scale(MonomialMap(ints({{2, 0}, {0, 3}}), vec({4, 2})));
    CHECK(diag.mu[0] == 0.25);
    CHECK(diag.mu[1] == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
    CHECK(diag.normalized.scale() == vec({1, 1}));
}

TEST_CASE("normalize_scale conjugation identity on random maps") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> mag(0.1, 10.0), u(-1.5, 1.5);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 3;
        auto base = random_strong_map(rng, n, false);
        Vector lambda(n);
        for (int i = 0; i < n; ++i) lambda[i] = (coin(rng) ? -1 : 1) * mag(rng);
        MonomialMap map(base.exponents(), lambda);
        auto norm = normalize_scale(map);
        for (int k = 0; k < 5; ++k) {
            Vector x(n);
            for (int i = 0; i < n; ++i) x[i] = u(rng);
            const Vector lhs = apply_monomial(map, norm.mu.cwiseProduct(x)).cwiseQuotient(norm.mu);
            const Vector rhs = apply_monomial(norm.normalized, x);
            for (int i = 0; i < n; ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-10 * std::max(1.0, std::abs(rhs[i])));
        }
    }
}

TEST_CASE("interpolate_monomial_orbit examples") {
    MonomialMap sq(ints({{2}}), vec({1}));
    MonomialOrbit f(sq, vec({0.5}));
    CHECK(f.transient() == 0);
    CHECK(f.period() == 1);
    CHECK(f(0)[0] == 0.5);
    CHECK(f(1)[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f(2)[0] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(f(0.5)[0] == doctest::Approx(std::pow(2.0, -std::sqrt(2.0))).epsilon(1e-14));
    CHECK(f(1.5)[0] == doctest::Approx(f(0.5)[0] * f(0.5)[0]).epsilon(1e-14));

    MonomialMap cat(ints({{2, 1}, {1, 1}}), vec({1, 1}));
    for (double x : {0.0, 0.7, 3.2}) CHECK(interpolate_monomial_orbit(cat, vec({0, 0}), x) == vec({0, 0}));
}

TEST_CASE("interpolate_monomial_orbit transients and zeros") {
    // Negative start under squaring: one step to reach the + orthant.
    MonomialOrbit neg(MonomialMap(ints({{2}}), vec({1})), vec({-0.5}));
    CHECK(neg.transient() == 1);
    CHECK(neg(0)[0] == 0.25);

    // x -> -x^3: the sign alternates, so B = 2.
    MonomialOrbit alt(MonomialMap(ints({{3}}), vec({-1})), vec({0.9}));
    CHECK(alt.period() == 2);
    CHECK(alt(1)[0] == doctest::Approx(std::pow(0.9, 9)).epsilon(1e-13));

    // Zero in coordinate 2 spreads into coordinate 1 after one step.
    MonomialMap tri(ints({{2, 1}, {0, 2}}), vec({1, 1}));
    MonomialOrbit z(tri, vec({0.5, 0.0}));
    CHECK(z.transient() == 1);
    CHECK(z(0.5) == vec({0, 0}));
    // Only coordinate 2 is zero and stays so; coordinate 1 evolves alone.
    MonomialOrbit z2(tri, vec({0.0, 0.5}));
    CHECK(z2.transient() == 0);
    CHECK(z2(1)[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(z2(1)[0] == 0.0);
}

TEST_CASE("interpolate_monomial_orbit errors") {
    CHECK_THROWS_AS(MonomialOrbit(MonomialMap(ints({{2}}), vec({1})), vec({1.5})), OutsideBasin);
    CHECK_THROWS_AS(MonomialOrbit(MonomialMap(ints({{2}}), vec({1})), vec({1.0})), OutsideBasin);
    // [[1,3],[2,1]] is not strong but its square is, and B = 2 here.
    CHECK(MonomialOrbit(MonomialMap(ints({{1, 3}, {2, 1}}), vec({1, 1})), vec({0.1, 0.1})).period() == 2);
    // A scaled 3-cycle has complex eigenvalues and B = 1.
    CHECK_THROWS_AS(
        MonomialOrbit(MonomialMap(ints({{0, 2, 0}, {0, 0, 2}, {2, 0, 0}}), vec({1, 1, 1})), vec({0.1, 0.1, 0.1})),
        NotStrong);
    CHECK_THROWS_AS(MonomialOrbit(MonomialMap(ints({{2}}), vec({3})), vec({0.1})), InvalidMonomialMap);
}

TEST_CASE("interpolation agrees with iteration and the functional equation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.95, 0.95), ux(0.0, 10.0);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 3;
        auto map = random_strong_map(rng, n, true);
        Vector a(n);
        for (int i = 0; i < n; ++i) a[i] = u(rng);
        std::optional<MonomialOrbit> f;
        try {
            f.emplace(map, a);
        } catch (const NotStrong&) {
            continue; // M^B strong fails only for non-strong M; kept for safety
        }
        ++checked;
        CAPTURE(trial);
        const long b = f->period();
        Vector y = apply_monomial_power(map, a, f->transient());
        for (int m = 0; m <= 25; ++m) {
            const Vector fm = (*f)(m);
            CHECK((fm - y).cwiseAbs().maxCoeff() <= 1e-8);
            y = apply_monomial_power(map, y, b);
        }
        for (int k = 0; k < 5; ++k) {
            const double x = ux(rng);
            const Vector lhs = (*f)(x + 1);
            const Vector rhs = apply_monomial_power(map, (*f)(x), b);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    CHECK(checked >= 30);
}
