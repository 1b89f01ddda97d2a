#pragma once

#include <Eigen/Dense>

#include <vector>

#include "smld/rational.hpp"

namespace smld {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Builds a square matrix from rows; throws DimensionError when ragged or
// non-square.
Matrix square_from_rows(const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> to_rows(const Matrix& m);

void require_square(const Matrix& m, const char* where);

// J_n: ones on the upper off-diagonal.
Matrix shift_matrix(int n);

Matrix integer_power(const Matrix& g, int m);

// Dense rational matrix for the exact paths. Row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

    static RationalMatrix identity(int n);
    static RationalMatrix from(const Matrix& m);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    const Rational& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

    RationalMatrix operator*(const RationalMatrix& o) const;
    RationalMatrix operator+(const RationalMatrix& o) const;
    RationalMatrix operator-(const RationalMatrix& o) const;
    RationalMatrix scaled(const Rational& s) const;
    bool operator==(const RationalMatrix& o) const;

    Matrix to_double() const;

    // Reduced row echelon form; returns pivot columns.
    std::vector<int> rref_in_place();
    int rank() const;
    // Basis of the right kernel, one column per basis vector.
    RationalMatrix kernel() const;
    // Throws SingularSystem when singular.
    RationalMatrix inverse() const;
    RationalMatrix column(int j) const;
    RationalMatrix hcat(const RationalMatrix& o) const;
    bool is_integer() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rational> data_;
};

// Characteristic polynomial det(xI - A), increasing degree, exact
// (Faddeev-LeVerrier over Q).
RationalPoly characteristic_polynomial(const RationalMatrix& a);

Integer integer_determinant(const RationalMatrix& a);

} // namespace smld
