#pragma once

// Monomial normal forms x -> lambda * x^M, their sign dynamics on {+1,-1}^n
// and the real-variable interpolation of their orbits.

#include <vector>

#include "smld/matrix.hpp"
#include "smld/matrix_power.hpp"

namespace smld {

using IntMatrix = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;
using SignVector = std::vector<int>;

struct MonomialOptions {
    // Orders k for which eigenvalues of M^k are checked against 1.
    int root_of_unity_orders = 12;
    // Largest n for the 2^n sign enumeration.
    int max_sign_dimension = 20;
    int basin_iterations = 60;
    double tol = 1e-8;
};

class MonomialMap {
public:
    // Validates: nonnegative integer exponents, det M != 0, no eigenvalue of
    // M^k equal to 1 for k <= options.root_of_unity_orders, nonzero scale.
    MonomialMap(IntMatrix exponents, Vector scale, const MonomialOptions& options = {});

    static MonomialMap from_rows(const std::vector<std::vector<long>>& rows, const std::vector<double>& scale);

    int dimension() const { return static_cast<int>(exponents_.rows()); }
    const IntMatrix& exponents() const { return exponents_; }
    const Vector& scale() const { return scale_; }
    Matrix exponents_real() const { return exponents_.cast<double>(); }

    // Every eigenvalue of M real and positive.
    bool strong() const { return strong_; }
    bool scale_is_signs() const;
    SignVector scale_signs() const;

    bool operator==(const MonomialMap& o) const { return exponents_ == o.exponents_ && scale_ == o.scale_; }

private:
    IntMatrix exponents_;
    Vector scale_;
    bool strong_ = false;
};

// Component i is scale_i * prod_j x_j^{M_ij}, with 0^0 = 1.
Vector apply_monomial(const MonomialMap& map, const Vector& point);
Vector apply_monomial_power(const MonomialMap& map, const Vector& point, long times);

struct SignOrbit {
    SignVector start;
    int preperiod = 0;
    int period = 1;
    // Visited sign vectors, preperiod + period entries; the next one
    // repeats trajectory[preperiod].
    std::vector<SignVector> trajectory;
};

// Orbit of s under the sign map of x -> x^M.
SignOrbit sign_orbit(const IntMatrix& exponents, const SignVector& s);
// Orbit of s under the sign map of x -> scale_signs * x^M.
SignOrbit sign_orbit(const IntMatrix& exponents, const SignVector& s, const SignVector& scale_signs);

// lcm of the cycle lengths of x -> x^M on {+1,-1}^n. Throws
// DimensionTooLarge above max_dimension.
long sign_period_B(const IntMatrix& exponents, int max_dimension = 20);
// Same for the map including its scale signs; equals sign_period_B when
// every scale sign is +1.
long map_sign_period(const MonomialMap& map, int max_dimension = 20);

struct ScaleNormalization {
    Vector mu;               // positive; conjugating by x -> mu * x
    MonomialMap normalized;  // scale in {+1,-1}^n
    bool exact = false;      // mu recovered as exact rationals
};

// Solves (M - I) log mu = -log|lambda| so that mu^{-1} (lambda (mu x)^M) =
// sgn(lambda) x^M.
ScaleNormalization normalize_scale(const MonomialMap& map, const MonomialOptions& options = {});

// Interpolant F with F(0) = Phi^t(a) and F(x + 1) = Phi^B(F(x)) for a map with
// scale in {+1,-1}^n. t covers both the sign preperiod and the steps until
// the zero pattern of the orbit stabilises.
class MonomialOrbit {
public:
    MonomialOrbit(const MonomialMap& map, const Vector& a, const MonomialOptions& options = {});

    int transient() const { return transient_; }
    long period() const { return period_; }
    const Vector& base_point() const { return base_; }
    Vector operator()(double x) const;

private:
    MonomialMap map_;
    int transient_ = 0;
    long period_ = 1;
    Vector base_;
    std::vector<int> live_;  // coordinates not absorbed into 0
    Vector live_logs_;       // ln|b_j| on live coordinates
    JordanDecomposition power_jordan_;
};

Vector interpolate_monomial_orbit(const MonomialMap& map, const Vector& a, double x,
                                  const MonomialOptions& options = {});

} // namespace smld
