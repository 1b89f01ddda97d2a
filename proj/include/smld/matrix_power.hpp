#pragma once

// Real Jordan data for matrices with positive real spectrum and the
// interpolated power E(x, g), the unique real-variable extension of g^m with
// E(1, g) = g and E(x + 1, g) = g E(x, g).

#include <optional>
#include <vector>

#include "smld/matrix.hpp"

namespace smld {

struct JordanOptions {
    // Reconstruction and rank tolerance (relative to ||g||).
    double tol = 1e-8;
    // Largest denominator tried when recognising rational eigenvalues.
    long max_denominator = 1000000;
    bool allow_exact = true;
};

// Exact Jordan data, present when g is rational with rational eigenvalues.
struct ExactJordan {
    std::vector<Rational> eigenvalues;
    RationalMatrix transform;
    RationalMatrix transform_inverse;
};

// h g h^{-1} = (l_1 I + J_{p_1}) (+) ... (+) (l_k I + J_{p_k}) with block sizes
// non-increasing and, for equal sizes, eigenvalues non-increasing.
struct JordanDecomposition {
    std::vector<int> partition;
    std::vector<double> eigenvalues;
    Matrix transform;
    Matrix transform_inverse;
    std::optional<ExactJordan> exact;

    int dimension() const { return static_cast<int>(transform.rows()); }
    Matrix jordan_matrix() const;
};

bool is_glnplus(const Matrix& g, double tol = 1e-8);

JordanDecomposition jordan_real(const Matrix& g, const JordanOptions& options = {});
inline JordanDecomposition jordan_real(const Matrix& g, double tol) {
    JordanOptions o;
    o.tol = tol;
    return jordan_real(g, o);
}

// x (x - 1) ... (x - j + 1) / j!
double gen_binomial(double x, int j);
Rational gen_binomial(const Rational& x, int j);

// Coefficients of gen_binomial(x, j) as a polynomial in x, increasing degree.
std::vector<double> gen_binomial_polynomial(int j);

Matrix real_power(const Matrix& g, double x, const JordanOptions& options = {});
Matrix real_power(const JordanDecomposition& jd, double x);

// Exact g^m from Jordan data; requires jd.exact.
RationalMatrix exact_power(const JordanDecomposition& jd, long m);

} // namespace smld
