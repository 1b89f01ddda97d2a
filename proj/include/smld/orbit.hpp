#pragma once

// Product systems of univariate germs, monomial maps and projective-linear
// maps, and the interpolation bundle G_0..G_{N-1} of their orbits:
// G_j(m) = Phi^(Nm + j + t)(a) and G_j(x + 1) = Phi^N(G_j(x)).

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "smld/germs.hpp"
#include "smld/matrix.hpp"
#include "smld/matrix_power.hpp"
#include "smld/monomial.hpp"

namespace smld {

struct UnivariateFactor {
    Germ germ;
};

struct MonomialFactor {
    MonomialMap map;
};

// x -> dehomogenise(h (x, 1)) on the last-coordinate affine chart.
struct ProjectiveFactor {
    Matrix h;
};

using Factor = std::variant<UnivariateFactor, MonomialFactor, ProjectiveFactor>;

int factor_dimension(const Factor& f);
std::string factor_kind(const Factor& f);

class ProductSystem {
public:
    ProductSystem() = default;
    // Validates: projective matrices in GL+, monomial factors strong.
    explicit ProductSystem(std::vector<Factor> factors);

    const std::vector<Factor>& factors() const { return factors_; }
    int dimension() const;
    // Start offset of each factor's coordinate block.
    std::vector<int> offsets() const;

private:
    std::vector<Factor> factors_;
};

struct BundleOptions {
    // Iterates must stay within |coordinate| <= box.
    double box = 1.0;
    double tol = 1e-8;
    // Homogeneous coordinates below this are treated as infinity.
    double infinity_tol = 1e-12;
    AbelOptions abel;
    MonomialOptions monomial;
};

// One application of each factor's map to its block.
Vector step(const ProductSystem& system, const Vector& point, double infinity_tol = 1e-12);
// n steps; DomainEscape once a coordinate exceeds the box.
Vector iterate(const ProductSystem& system, const Vector& a, long n, double box = 1.0);

Vector projective_power(const Matrix& h, double x, const Vector& point, double infinity_tol = 1e-12);
Vector projective_power(const JordanDecomposition& h, double x, const Vector& point, double infinity_tol = 1e-12);

// Evaluates one factor along its own orbit: eval(r, s) approximates
// f^(t_f + r + N_f s)(a_f) for 0 <= r < N_f and real s >= 0.
class FactorEvaluator {
public:
    virtual ~FactorEvaluator() = default;
    virtual int dimension() const = 0;
    virtual long period() const = 0;
    virtual int transient() const = 0;
    virtual Vector eval(long r, double s) const = 0;
    // "koenigs", "boettcher", "abel", "constant", "zero", "monomial", "projective"
    virtual std::string method() const = 0;
};

class InterpolationBundle {
public:
    long modulus() const { return modulus_; }
    int transient() const { return transient_; }
    const Vector& base_point() const { return base_; }
    const ProductSystem& system() const { return system_; }
    const Vector& start() const { return start_; }
    const std::vector<std::shared_ptr<const FactorEvaluator>>& evaluators() const { return evaluators_; }

    // G_j(x) for 0 <= j < N and x >= 0.
    Vector operator()(long j, double x) const;

private:
    friend InterpolationBundle build_bundle(const ProductSystem&, const Vector&, const BundleOptions&);

    ProductSystem system_;
    Vector start_;
    long modulus_ = 1;
    int transient_ = 0;
    Vector base_;
    std::vector<std::shared_ptr<const FactorEvaluator>> evaluators_;
};

InterpolationBundle build_bundle(const ProductSystem& system, const Vector& a, const BundleOptions& options = {});
Vector evaluate_bundle(const InterpolationBundle& bundle, long j, double x);

struct BundleReport {
    double max_deviation = 0.0;
    long worst_j = 0;
    long worst_m = 0;
    long samples = 0;
    bool pass = true;
};

// max over 0 <= m <= m_max and all j of |G_j(m) - Phi^(Nm + j + t)(a)|.
BundleReport verify_bundle(const InterpolationBundle& bundle, const ProductSystem& system, const Vector& a, long m_max,
                           double tol);

} // namespace smld
