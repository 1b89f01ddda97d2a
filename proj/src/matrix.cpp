#include "smld/matrix.hpp"

#include <string>

#include "smld/errors.hpp"

namespace smld {

Matrix square_from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<int>(rows.size());
    if (n == 0) throw DimensionError("matrix has no rows");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw DimensionError("row " + std::to_string(i) + " has " +
                                 std::to_string(rows[static_cast<std::size_t>(i)].size()) + " entries, expected " +
                                 std::to_string(n));
        for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
    return out;
}

void require_square(const Matrix& m, const char* where) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw DimensionError(std::string(where) + ": expected a nonempty square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

Matrix shift_matrix(int n) {
    Matrix j = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
    return j;
}

Matrix integer_power(const Matrix& g, int m) {
    require_square(g, "integer_power");
    Matrix out = Matrix::Identity(g.rows(), g.cols());
    for (int k = 0; k < m; ++k) out = out * g;
    return out;
}

RationalMatrix RationalMatrix::identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::from(const Matrix& m) {
    RationalMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j) r(i, j) = to_rational(m(i, j));
    return r;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionError("rational matrix product shape mismatch");
    RationalMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
        }
    return out;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& o) const {
    RationalMatrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += o.data_[k];
    return out;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& o) const {
    RationalMatrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= o.data_[k];
    return out;
}

RationalMatrix RationalMatrix::scaled(const Rational& s) const {
    RationalMatrix out = *this;
    for (auto& v : out.data_) v *= s;
    return out;
}

bool RationalMatrix::operator==(const RationalMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Matrix RationalMatrix::to_double() const {
    Matrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).get_d();
    return m;
}

std::vector<int> RationalMatrix::rref_in_place() {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < cols_ && row < rows_; ++col) {
        int sel = -1;
        for (int i = row; i < rows_; ++i)
            if ((*this)(i, col) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != row)
            for (int j = 0; j < cols_; ++j) std::swap((*this)(sel, j), (*this)(row, j));
        const Rational inv = 1 / (*this)(row, col);
        for (int j = 0; j < cols_; ++j) (*this)(row, j) *= inv;
        for (int i = 0; i < rows_; ++i) {
            if (i == row || (*this)(i, col) == 0) continue;
            const Rational f = (*this)(i, col);
            for (int j = 0; j < cols_; ++j) (*this)(i, j) -= f * (*this)(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

int RationalMatrix::rank() const {
    RationalMatrix copy = *this;
    return static_cast<int>(copy.rref_in_place().size());
}

RationalMatrix RationalMatrix::kernel() const {
    RationalMatrix r = *this;
    const auto pivots = r.rref_in_place();
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols_), false);
    for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    std::vector<int> free_cols;
    for (int j = 0; j < cols_; ++j)
        if (!is_pivot[static_cast<std::size_t>(j)]) free_cols.push_back(j);
    RationalMatrix basis(cols_, static_cast<int>(free_cols.size()));
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        const int fc = free_cols[f];
        basis(fc, static_cast<int>(f)) = 1;
        for (std::size_t p = 0; p < pivots.size(); ++p)
            basis(pivots[p], static_cast<int>(f)) = -r(static_cast<int>(p), fc);
    }
    return basis;
}

RationalMatrix RationalMatrix::inverse() const {
    if (rows_ != cols_) throw DimensionError("inverse of a non-square matrix");
    const int n = rows_;
    RationalMatrix aug = hcat(identity(n));
    const auto pivots = aug.rref_in_place();
    if (static_cast<int>(pivots.size()) < n || pivots[static_cast<std::size_t>(n - 1)] != n - 1)
        throw SingularSystem("rational matrix is singular");
    RationalMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

RationalMatrix RationalMatrix::column(int j) const {
    RationalMatrix c(rows_, 1);
    for (int i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
    return c;
}

RationalMatrix RationalMatrix::hcat(const RationalMatrix& o) const {
    if (rows_ != o.rows_ && cols_ != 0) throw DimensionError("hcat row mismatch");
    const int rows = cols_ == 0 ? o.rows_ : rows_;
    RationalMatrix out(rows, cols_ + o.cols_);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
        for (int j = 0; j < o.cols_; ++j) out(i, cols_ + j) = o(i, j);
    }
    return out;
}

bool RationalMatrix::is_integer() const {
    for (const auto& v : data_)
        if (v.get_den() != 1) return false;
    return true;
}

RationalPoly characteristic_polynomial(const RationalMatrix& a) {
    const int n = a.rows();
    // M_0 = 0, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
    RationalPoly c(static_cast<std::size_t>(n + 1));
    c[static_cast<std::size_t>(n)] = 1;
    RationalMatrix m(n, n);
    for (int k = 1; k <= n; ++k) {
        m = a * m;
        for (int i = 0; i < n; ++i) m(i, i) += c[static_cast<std::size_t>(n - k + 1)];
        const RationalMatrix am = a * m;
        Rational tr = 0;
        for (int i = 0; i < n; ++i) tr += am(i, i);
        c[static_cast<std::size_t>(n - k)] = -tr / k;
        c[static_cast<std::size_t>(n - k)].canonicalize();
    }
    return c;
}

Integer integer_determinant(const RationalMatrix& a) {
    // Bareiss fraction-free elimination; entries must be integers.
    const int n = a.rows();
    std::vector<Integer> m(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (a(i, j).get_den() != 1) throw DimensionError("integer_determinant needs integer entries");
            m[static_cast<std::size_t>(i * n + j)] = a(i, j).get_num();
        }
    auto at = [&](int i, int j) -> Integer& { return m[static_cast<std::size_t>(i * n + j)]; };
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (at(k, k) == 0) {
            int sel = -1;
            for (int i = k + 1; i < n; ++i)
                if (at(i, k) != 0) {
                    sel = i;
                    break;
                }
            if (sel < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(sel, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Integer v = at(i, j) * at(k, k) - at(i, k) * at(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                at(i, j) = v;
            }
        prev = at(k, k);
    }
    return sign * at(n - 1, n - 1);
}

} // namespace smld
