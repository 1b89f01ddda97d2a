#include "smld/matrix_power.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "smld/errors.hpp"

namespace smld {

namespace {

struct Block {
    int size;
    double eigenvalue;
    Matrix columns; // n x size, Jordan chain [N^{s-1} w, ..., w]
    RationalMatrix exact_columns;
    Rational exact_eigenvalue;
};

void order_blocks(std::vector<Block>& blocks) {
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
        if (a.size != b.size) return a.size > b.size;
        return a.eigenvalue > b.eigenvalue;
    });
}

double norm_of(const Matrix& g) { return std::max(1.0, g.norm()); }

// ---------------------------------------------------------------- exact path

std::optional<std::vector<std::pair<Rational, int>>> rational_spectrum(const RationalMatrix& r, const Matrix& g,
                                                                       long max_den) {
    RationalPoly remaining = characteristic_polynomial(r);
    std::vector<std::pair<Rational, int>> roots;
    Eigen::EigenSolver<Matrix> es(g, false);
    if (es.info() != Eigen::Success) return std::nullopt;
    std::vector<double> estimates;
    for (int i = 0; i < es.eigenvalues().size(); ++i) estimates.push_back(es.eigenvalues()[i].real());
    // Cluster means recover defective eigenvalues whose numeric estimates spread.
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(estimates.size());
    estimates.push_back(mean);
    for (double est : estimates) {
        if (remaining.size() <= 1) break;
        for (const Rational& cand : rational_candidates(est, max_den)) {
            int mult = 0;
            while (remaining.size() > 1) {
                auto q = deflate(remaining, cand);
                if (!q) break;
                remaining = std::move(*q);
                ++mult;
            }
            if (mult > 0) {
                roots.emplace_back(cand, mult);
                break;
            }
        }
    }
    if (remaining.size() != 1) return std::nullopt;
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return roots;
}

std::vector<Block> exact_blocks(const RationalMatrix& r, const Rational& lambda, int multiplicity) {
    const int n = r.rows();
    const RationalMatrix a = r - RationalMatrix::identity(n).scaled(lambda);
    std::vector<RationalMatrix> powers{RationalMatrix::identity(n)};
    std::vector<RationalMatrix> kernels{RationalMatrix(n, 0)};
    std::vector<int> nullity{0};
    while (nullity.back() < multiplicity) {
        powers.push_back(powers.back() * a);
        kernels.push_back(powers.back().kernel());
        nullity.push_back(kernels.back().cols());
        if (static_cast<int>(nullity.size()) > n + 1) throw ConditioningError("exact kernel chain did not stabilise");
    }
    const int top = static_cast<int>(nullity.size()) - 1;
    auto at_least = [&](int s) { return s > top ? 0 : nullity[static_cast<std::size_t>(s)] - nullity[static_cast<std::size_t>(s - 1)]; };

    struct Chain {
        RationalMatrix top;
        int size;
    };
    std::vector<Chain> chains;
    for (int s = top; s >= 1; --s) {
        const int count = at_least(s) - at_least(s + 1);
        if (count == 0) continue;
        RationalMatrix span = kernels[static_cast<std::size_t>(s - 1)];
        for (const auto& c : chains) span = span.hcat(powers[static_cast<std::size_t>(c.size - s)] * c.top);
        int rank = span.cols() == 0 ? 0 : span.rank();
        int added = 0;
        const RationalMatrix& ks = kernels[static_cast<std::size_t>(s)];
        for (int j = 0; j < ks.cols() && added < count; ++j) {
            RationalMatrix candidate = span.hcat(ks.column(j));
            const int cr = candidate.rank();
            if (cr > rank) {
                span = std::move(candidate);
                rank = cr;
                chains.push_back({ks.column(j), s});
                ++added;
            }
        }
        if (added != count) throw ConditioningError("exact Jordan chain selection failed");
    }

    std::vector<Block> blocks;
    for (const auto& c : chains) {
        Block b;
        b.size = c.size;
        b.exact_eigenvalue = lambda;
        b.eigenvalue = lambda.get_d();
        RationalMatrix cols(n, 0);
        for (int k = c.size - 1; k >= 0; --k) cols = cols.hcat(powers[static_cast<std::size_t>(k)] * c.top);
        b.exact_columns = cols;
        b.columns = cols.to_double();
        blocks.push_back(std::move(b));
    }
    return blocks;
}

std::optional<JordanDecomposition> try_exact(const Matrix& g, const JordanOptions& options) {
    const RationalMatrix r = RationalMatrix::from(g);
    auto spectrum = rational_spectrum(r, g, options.max_denominator);
    if (!spectrum) return std::nullopt;
    for (const auto& [lambda, mult] : *spectrum)
        if (lambda <= 0) throw SpectrumError("eigenvalue " + to_string(lambda) + " is not positive");
    std::vector<Block> blocks;
    for (const auto& [lambda, mult] : *spectrum) {
        auto bs = exact_blocks(r, lambda, mult);
        blocks.insert(blocks.end(), bs.begin(), bs.end());
    }
    order_blocks(blocks);
    const int n = r.rows();
    RationalMatrix p(n, 0);
    JordanDecomposition jd;
    ExactJordan ex;
    for (const auto& b : blocks) {
        p = p.hcat(b.exact_columns);
        jd.partition.push_back(b.size);
        jd.eigenvalues.push_back(b.eigenvalue);
        ex.eigenvalues.push_back(b.exact_eigenvalue);
    }
    ex.transform_inverse = p;
    ex.transform = p.inverse();
    jd.transform = ex.transform.to_double();
    jd.transform_inverse = ex.transform_inverse.to_double();
    jd.exact = std::move(ex);
    return jd;
}

// -------------------------------------------------------------- numeric path

struct Cluster {
    double mu = 0.0;
    int multiplicity = 0;
    Matrix basis;     // n x m orthonormal, invariant under g
    Matrix nilpotent; // m x m
};

struct ComplexSchurForm {
    Eigen::MatrixXcd t;
    Eigen::MatrixXcd u;
};

// Swaps the adjacent diagonal entries k, k+1 of the triangular factor by a
// unitary rotation, updating the Schur vectors.
void swap_adjacent(ComplexSchurForm& s, int k) {
    using C = std::complex<double>;
    const int n = static_cast<int>(s.t.rows());
    const C t11 = s.t(k, k), t22 = s.t(k + 1, k + 1);
    const C f = s.t(k, k + 1), gg = t22 - t11;
    double cs;
    C sn;
    if (std::abs(gg) == 0.0) {
        cs = 1.0;
        sn = 0.0;
    } else if (std::abs(f) == 0.0) {
        cs = 0.0;
        sn = std::conj(gg) / std::abs(gg);
    } else {
        const double nrm = std::hypot(std::abs(f), std::abs(gg));
        cs = std::abs(f) / nrm;
        sn = (f / std::abs(f)) * std::conj(gg) / nrm;
    }
    auto rot = [](C& x, C& y, double c, C sv) {
        const C nx = c * x + sv * y;
        y = c * y - std::conj(sv) * x;
        x = nx;
    };
    for (int j = k + 2; j < n; ++j) rot(s.t(k, j), s.t(k + 1, j), cs, sn);
    for (int i = 0; i < k; ++i) rot(s.t(i, k), s.t(i, k + 1), cs, std::conj(sn));
    s.t(k, k) = t22;
    s.t(k + 1, k + 1) = t11;
    for (int i = 0; i < n; ++i) rot(s.u(i, k), s.u(i, k + 1), cs, std::conj(sn));
}

// Real orthonormal basis of the invariant subspace belonging to the diagonal
// positions in members, obtained by moving them to the leading corner.
Matrix schur_invariant_subspace(ComplexSchurForm s, std::vector<int> members) {
    std::sort(members.begin(), members.end());
    const int m = static_cast<int>(members.size());
    for (int target = 0; target < m; ++target)
        for (int pos = members[static_cast<std::size_t>(target)]; pos > target; --pos) swap_adjacent(s, pos - 1);
    const int n = static_cast<int>(s.u.rows());
    Matrix both(n, 2 * m);
    both.leftCols(m) = s.u.leftCols(m).real();
    both.rightCols(m) = s.u.leftCols(m).imag();
    Eigen::JacobiSVD<Matrix> svd(both, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(m);
}

Matrix matrix_pow_int(const Matrix& a, int k) {
    Matrix out = Matrix::Identity(a.rows(), a.cols());
    for (int i = 0; i < k; ++i) out = out * a;
    return out;
}

std::optional<Cluster> make_cluster(const Matrix& g, const ComplexSchurForm& schur,
                                    const std::vector<std::complex<double>>& ev, const std::vector<int>& members,
                                    double tol) {
    std::complex<double> mean = 0;
    for (int i : members) mean += ev[static_cast<std::size_t>(i)];
    mean /= static_cast<double>(members.size());
    if (std::abs(mean.imag()) > tol) throw SpectrumError("complex eigenvalue near " + std::to_string(mean.real()) + " + " +
                                                         std::to_string(mean.imag()) + "i");
    const int m = static_cast<int>(members.size());
    Cluster c;
    c.multiplicity = m;
    c.basis = schur_invariant_subspace(schur, members);
    Matrix b = c.basis.transpose() * g * c.basis;
    c.mu = b.trace() / m;
    c.nilpotent = b - c.mu * Matrix::Identity(m, m);
    if (m > 1) {
        const double scale = norm_of(g);
        const double defect = matrix_pow_int(c.nilpotent, m).norm();
        if (defect > 1e-10 * m * std::pow(scale, m)) return std::nullopt;
    }
    return c;
}

std::vector<std::vector<int>> single_linkage(const std::vector<std::complex<double>>& ev, const std::vector<int>& idx,
                                             double delta) {
    std::vector<int> parent(idx.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            if (std::abs(ev[static_cast<std::size_t>(idx[i])] - ev[static_cast<std::size_t>(idx[j])]) <= delta)
                parent[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(idx.size(), -1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const int r = find(static_cast<int>(i));
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(idx[i]);
    }
    return groups;
}

void collect_clusters(const Matrix& g, const ComplexSchurForm& schur, const std::vector<std::complex<double>>& ev,
                      const std::vector<int>& idx, double delta, double tol, std::vector<Cluster>& out) {
    for (const auto& group : single_linkage(ev, idx, delta)) {
        if (auto c = make_cluster(g, schur, ev, group, tol)) {
            out.push_back(std::move(*c));
            continue;
        }
        if (delta < 1e-13) throw ConditioningError("eigenvalue cluster is neither defective nor separable");
        collect_clusters(g, schur, ev, group, delta / 8.0, tol, out);
    }
}

std::vector<Cluster> spectral_clusters(const Matrix& g, double tol) {
    Eigen::ComplexSchur<Matrix> cs(g);
    if (cs.info() != Eigen::Success) throw ConditioningError("Schur iteration did not converge");
    ComplexSchurForm schur{cs.matrixT(), cs.matrixU()};
    std::vector<std::complex<double>> ev;
    for (int i = 0; i < schur.t.rows(); ++i) ev.push_back(schur.t(i, i));
    std::vector<int> idx(ev.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Cluster> out;
    collect_clusters(g, schur, ev, idx, 1e-2 * norm_of(g), tol, out);
    return out;
}

Matrix null_basis(const Matrix& a, int dim) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(dim);
}

Matrix orthonormal_columns(const Matrix& a, int rank) {
    if (rank == 0 || a.cols() == 0) return Matrix(a.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
    return svd.matrixU().leftCols(rank);
}

std::vector<Block> numeric_blocks(const Cluster& c, double tol, double g_scale) {
    const int m = c.multiplicity;
    const Matrix& nil = c.nilpotent;
    std::vector<Matrix> powers{Matrix::Identity(m, m)};
    std::vector<int> nullity{0};
    for (int k = 1; k <= m; ++k) {
        powers.push_back(powers.back() * nil);
        Eigen::JacobiSVD<Matrix> svd(powers.back());
        const double thresh = tol * std::pow(g_scale, k);
        int r = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] <= thresh) ++r;
        r = std::max(r, nullity.back());
        if (k == m) r = m;
        nullity.push_back(r);
        if (r == m) break;
    }
    const int top = static_cast<int>(nullity.size()) - 1;
    auto at_least = [&](int s) { return s > top ? 0 : nullity[static_cast<std::size_t>(s)] - nullity[static_cast<std::size_t>(s - 1)]; };

    struct Chain {
        Vector top;
        int size;
    };
    std::vector<Chain> chains;
    for (int s = top; s >= 1; --s) {
        const int count = at_least(s) - at_least(s + 1);
        if (count <= 0) continue;
        const int prev = nullity[static_cast<std::size_t>(s - 1)];
        Matrix span(m, prev + static_cast<int>(chains.size()));
        if (prev > 0) span.leftCols(prev) = null_basis(powers[static_cast<std::size_t>(s - 1)], prev);
        for (std::size_t i = 0; i < chains.size(); ++i)
            span.col(prev + static_cast<int>(i)) = powers[static_cast<std::size_t>(chains[i].size - s)] * chains[i].top;
        const Matrix q = orthonormal_columns(span, static_cast<int>(span.cols()));
        const Matrix ks = null_basis(powers[static_cast<std::size_t>(s)], nullity[static_cast<std::size_t>(s)]);
        const Matrix proj = ks - q * (q.transpose() * ks);
        const Matrix tops = orthonormal_columns(proj, count);
        for (int j = 0; j < count; ++j) chains.push_back({tops.col(j), s});
    }

    std::vector<Block> blocks;
    for (const auto& ch : chains) {
        Block b;
        b.size = ch.size;
        b.eigenvalue = c.mu;
        Matrix local(m, ch.size);
        for (int k = 0; k < ch.size; ++k) local.col(k) = powers[static_cast<std::size_t>(ch.size - 1 - k)] * ch.top;
        b.columns = c.basis * local;
        blocks.push_back(std::move(b));
    }
    return blocks;
}

JordanDecomposition numeric_jordan(const Matrix& g, const JordanOptions& options) {
    const double scale = norm_of(g);
    std::vector<Block> blocks;
    for (const auto& c : spectral_clusters(g, options.tol)) {
        if (!(c.mu > options.tol)) throw SpectrumError("eigenvalue " + std::to_string(c.mu) + " is not positive");
        auto bs = numeric_blocks(c, options.tol, scale);
        blocks.insert(blocks.end(), bs.begin(), bs.end());
    }
    order_blocks(blocks);
    const int n = static_cast<int>(g.rows());
    Matrix p(n, n);
    JordanDecomposition jd;
    int col = 0;
    for (const auto& b : blocks) {
        p.middleCols(col, b.size) = b.columns;
        col += b.size;
        jd.partition.push_back(b.size);
        jd.eigenvalues.push_back(b.eigenvalue);
    }
    if (col != n) throw ConditioningError("Jordan chains do not span the space");
    Eigen::FullPivLU<Matrix> lu(p);
    if (!lu.isInvertible()) throw ConditioningError("Jordan basis is singular");
    jd.transform_inverse = p;
    jd.transform = lu.inverse();
    return jd;
}

} // namespace

Matrix JordanDecomposition::jordan_matrix() const {
    const int n = dimension();
    Matrix j = Matrix::Zero(n, n);
    int off = 0;
    for (std::size_t b = 0; b < partition.size(); ++b) {
        const int s = partition[b];
        j.block(off, off, s, s) = eigenvalues[b] * Matrix::Identity(s, s) + shift_matrix(s);
        off += s;
    }
    return j;
}

bool is_glnplus(const Matrix& g, double tol) {
    require_square(g, "is_glnplus");
    if (!g.allFinite()) return false;
    try {
        JordanOptions o;
        o.tol = tol;
        if (auto spectrum = rational_spectrum(RationalMatrix::from(g), g, o.max_denominator)) {
            for (const auto& [lambda, mult] : *spectrum)
                if (!(lambda.get_d() > tol)) return false;
            return true;
        }
        for (const auto& c : spectral_clusters(g, tol))
            if (!(c.mu > tol)) return false;
        return true;
    } catch (const ContractError&) {
        return false;
    }
}

JordanDecomposition jordan_real(const Matrix& g, const JordanOptions& options) {
    require_square(g, "jordan_real");
    if (!g.allFinite()) throw SpectrumError("matrix has non-finite entries");
    JordanDecomposition jd;
    if (auto exact = options.allow_exact ? try_exact(g, options) : std::nullopt)
        jd = std::move(*exact);
    else
        jd = numeric_jordan(g, options);

    const double defect = (jd.transform * g * jd.transform_inverse - jd.jordan_matrix()).norm();
    const double allowed = options.tol * norm_of(g);
    if (!(defect <= allowed))
        throw ConditioningError("reconstruction defect " + std::to_string(defect) + " exceeds " + std::to_string(allowed));
    return jd;
}

double gen_binomial(double x, int j) {
    double acc = 1.0;
    for (int i = 0; i < j; ++i) acc *= (x - i) / (i + 1);
    return acc;
}

Rational gen_binomial(const Rational& x, int j) {
    Rational acc = 1;
    for (int i = 0; i < j; ++i) acc *= (x - i) / Rational(i + 1);
    acc.canonicalize();
    return acc;
}

std::vector<double> gen_binomial_polynomial(int j) {
    std::vector<double> p{1.0};
    for (int i = 0; i < j; ++i) {
        // p <- p * (x - i) / (i + 1)
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) {
            next[k + 1] += p[k] / (i + 1);
            next[k] -= p[k] * i / (i + 1);
        }
        p = std::move(next);
    }
    return p;
}

RationalMatrix exact_power(const JordanDecomposition& jd, long m) {
    if (!jd.exact) throw NotRational("exact_power needs exact Jordan data");
    const int n = jd.dimension();
    RationalMatrix d(n, n);
    int off = 0;
    for (std::size_t b = 0; b < jd.partition.size(); ++b) {
        const int s = jd.partition[b];
        const Rational& lambda = jd.exact->eigenvalues[b];
        const Rational lm = rational_pow(lambda, m);
        for (int j = 0; j < s; ++j) {
            const Rational coeff = lm * gen_binomial(Rational(m), j) * rational_pow(lambda, -j);
            for (int i = 0; i + j < s; ++i) d(off + i, off + i + j) = coeff;
        }
        off += s;
    }
    return jd.exact->transform_inverse * d * jd.exact->transform;
}

Matrix real_power(const JordanDecomposition& jd, double x) {
    if (jd.exact && x == std::floor(x) && std::abs(x) <= 1e5) return exact_power(jd, static_cast<long>(x)).to_double();
    const int n = jd.dimension();
    Matrix d = Matrix::Zero(n, n);
    int off = 0;
    for (std::size_t b = 0; b < jd.partition.size(); ++b) {
        const int s = jd.partition[b];
        const double lambda = jd.eigenvalues[b];
        const double lx = std::exp(x * std::log(lambda));
        for (int j = 0; j < s; ++j) {
            const double coeff = lx * gen_binomial(x, j) * std::pow(lambda, -j);
            for (int i = 0; i + j < s; ++i) d(off + i, off + i + j) = coeff;
        }
        off += s;
    }
    return jd.transform_inverse * d * jd.transform;
}

Matrix real_power(const Matrix& g, double x, const JordanOptions& options) {
    return real_power(jordan_real(g, options), x);
}

} // namespace smld
