#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "smld/errors.hpp"
#include "smld/matrix_power.hpp"

using namespace smld;
using smld::testing::random_glnplus;
using smld::testing::repeated_product;

TEST_CASE("is_glnplus on small cases") {
    CHECK(is_glnplus(Matrix::Identity(3, 3)));
    CHECK_FALSE(is_glnplus(square_from_rows({{0, -1}, {1, 0}})));
    CHECK_FALSE(is_glnplus(square_from_rows({{-1}})));
    CHECK_FALSE(is_glnplus(square_from_rows({{1, 0}, {0, 0}})));
    CHECK(is_glnplus(square_from_rows({{2, 1}, {0, 2}})));
}

TEST_CASE("square_from_rows rejects ragged input") {
    CHECK_THROWS_AS(square_from_rows({{1, 2}, {3}}), DimensionError);
    CHECK_THROWS_AS(square_from_rows({{1, 2}}), DimensionError);
}

TEST_CASE("jordan_real of diagonal and Jordan-block inputs") {
    auto d = jordan_real(square_from_rows({{3, 0}, {0, 1}}));
    CHECK(d.partition == std::vector<int>{1, 1});
    CHECK(d.eigenvalues == std::vector<double>{3, 1});
    REQUIRE(d.exact);

    auto j = jordan_real(square_from_rows({{2, 1}, {0, 2}}));
    CHECK(j.partition == std::vector<int>{2});
    CHECK(j.eigenvalues == std::vector<double>{2});
    CHECK((j.transform - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("jordan_real of a companion matrix") {
    // Brute-force oracle: det(g - t I) vanishes exactly at t = 1, 2 on an
    // integer scan of [-5, 5].
    Matrix g = square_from_rows({{0, 1}, {-2, 3}});
    std::vector<int> roots;
    for (int t = -5; t <= 5; ++t)
        if ((g - t * Matrix::Identity(2, 2)).determinant() == 0.0) roots.push_back(t);
    CHECK(roots == std::vector<int>{1, 2});

    auto jd = jordan_real(g);
    CHECK(jd.partition == std::vector<int>{1, 1});
    CHECK(jd.eigenvalues == std::vector<double>{2, 1});
    CHECK((jd.transform * g * jd.transform_inverse - jd.jordan_matrix()).norm() == 0.0);
}

TEST_CASE("jordan_real ordering: sizes then eigenvalues non-increasing") {
    // diag(1, 5) (+) J_2(3) (+) J_2(4)
    Matrix d = Matrix::Zero(6, 6);
    d(0, 0) = 1;
    d(1, 1) = 5;
    d(2, 2) = 3, d(2, 3) = 1, d(3, 3) = 3;
    d(4, 4) = 4, d(4, 5) = 1, d(5, 5) = 4;
    auto jd = jordan_real(d);
    CHECK(jd.partition == std::vector<int>{2, 2, 1, 1});
    CHECK(jd.eigenvalues == std::vector<double>{4, 3, 5, 1});
}

TEST_CASE("jordan_real errors") {
    CHECK_THROWS_AS(jordan_real(square_from_rows({{0, -1}, {1, 0}})), SpectrumError);
    CHECK_THROWS_AS(jordan_real(square_from_rows({{-2}})), SpectrumError);
    Matrix rot(2, 2);
    rot << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
    CHECK_THROWS_AS(jordan_real(rot), SpectrumError);
}

TEST_CASE("gen_binomial values") {
    CHECK(gen_binomial(3.0, 2) == 3.0);
    CHECK(gen_binomial(0.37, 0) == 1.0);
    CHECK(gen_binomial(0.5, 2) == -0.125);
    auto p = gen_binomial_polynomial(2); // (x^2 - x) / 2
    CHECK(p == std::vector<double>{0.0, -0.5, 0.5});
}

TEST_CASE("gen_binomial Pascal recurrence, exactly on a rational grid") {
    for (int num = -12; num <= 12; ++num)
        for (int den : {1, 2, 3, 7}) {
            Rational x(num, den);
            x.canonicalize();
            for (int j = 1; j <= 6; ++j)
                CHECK(gen_binomial(x, j) == gen_binomial(Rational(x - 1), j - 1) + gen_binomial(Rational(x - 1), j));
        }
}

TEST_CASE("real_power golden values") {
    CHECK(real_power(square_from_rows({{4}}), 0.5)(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    Matrix g = square_from_rows({{2, 1}, {0, 2}});
    Matrix cube = real_power(g, 3.0);
    CHECK(cube == square_from_rows({{8, 12}, {0, 8}}));
    CHECK(cube == repeated_product(g, 3));
    for (double x : {-1.5, 0.0, 0.3, 2.7, 10.0})
        CHECK(real_power(Matrix::Identity(4, 4), x) == Matrix::Identity(4, 4));
}

TEST_CASE("real_power properties on random GL+ matrices") {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> ux(0.0, 10.0), uy(0.0, 5.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 5;
        auto sample = random_glnplus(rng, n);
        CAPTURE(trial);
        REQUIRE(is_glnplus(sample.g));
        auto jd = jordan_real(sample.g);
        std::vector<int> expected = sample.partition;
        std::sort(expected.rbegin(), expected.rend());
        CHECK(jd.partition == expected);

        for (int m = 0; m <= 8; ++m) {
            Matrix ref = repeated_product(sample.g, m);
            CHECK((real_power(jd, m) - ref).norm() <= 1e-8 * (1 + ref.norm()));
        }
        const double x = ux(rng);
        Matrix next = real_power(jd, x + 1);
        CHECK((next - sample.g * real_power(jd, x)).norm() <= 1e-8 * (1 + next.norm()));

        const double a = uy(rng), b = uy(rng);
        Matrix sum = real_power(jd, a + b);
        CHECK((real_power(jd, a) * real_power(jd, b) - sum).norm() <= 1e-7 * (1 + sum.norm()));
        CHECK(is_glnplus(real_power(jd, x)));
    }
}

TEST_CASE("defective blocks survive a change of basis") {
    Matrix d = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) d(i, i) = 1.5;
    for (int i = 0; i < 4; ++i) d(i, i + 1) = 1.0;
    Matrix h = Matrix::Identity(5, 5);
    h(0, 3) = 0.3;
    h(4, 1) = -0.7;
    h(2, 0) = 0.25;
    Matrix g = h * d * h.inverse();
    auto jd = jordan_real(g);
    CHECK(jd.partition == std::vector<int>{5});
    CHECK(jd.eigenvalues[0] == doctest::Approx(1.5).epsilon(1e-12));
    Matrix ref = repeated_product(g, 7);
    CHECK((real_power(jd, 7.0) - ref).norm() <= 1e-8 * ref.norm());
}
