#pragma once

// Return sets {n : H(Phi^n(a)) = 0}: brute-force hits, per-residue analysis
// through the interpolation bundle, and the normal form "finite set plus
// arithmetic progressions of modulus N".

#include <optional>
#include <string>
#include <vector>

#include "smld/exp_poly.hpp"
#include "smld/orbit.hpp"

namespace smld {

struct VarietyTerm {
    std::vector<int> exponents;
    double c = 0.0;
};

// Polynomial H = sum c x^e. Terms are kept as given (x - x is a valid,
// identically vanishing H).
class Variety {
public:
    Variety() = default;
    // scale is an absolute floor added to the pointwise magnitude.
    Variety(std::vector<VarietyTerm> terms, double scale = 0.0);

    int dimension() const { return dimension_; }
    const std::vector<VarietyTerm>& terms() const { return terms_; }
    double scale() const { return scale_; }

    double operator()(const Vector& p) const;
    // sum |c| |p^e| + scale
    double magnitude(const Vector& p) const;
    bool vanishes_at(const Vector& p, double tol) const;

private:
    std::vector<VarietyTerm> terms_;
    int dimension_ = 0;
    double scale_ = 0.0;
};

std::vector<long> compute_hits(const ProductSystem& system, const Vector& a, const Variety& H, long n_max,
                               double tol = 1e-10, double box = 1.0);

enum class VerdictKind { Finite, Cofinite, All };
std::string to_string(VerdictKind k);

// Verdict for the class n = first + N m, m >= 0. zeros and start are in n.
struct ClassVerdict {
    long residue = 0;
    long first = 0;
    VerdictKind kind = VerdictKind::Finite;
    std::vector<long> zeros;
    long start = 0;
    bool certified = false;
    std::string method;  // "exp_poly" or "grid"
    int sign_changes = 0;
};

struct ClassOptions {
    double tol = 1e-10;
    int samples_per_unit = 16;
    // Cofinite needs at least this many consecutive vanishing integers.
    int min_tail = 3;
};

struct ClassExpPoly {
    ExpPoly ep;
    // False when some exponent's terms cancelled only up to rounding.
    bool exact = true;
};

// h_j = H o G_j as an exponential polynomial when every factor is a linear
// univariate germ.
std::optional<ClassExpPoly> class_exp_poly(const InterpolationBundle& bundle, long j, const Variety& H);

ClassVerdict analyze_class(const InterpolationBundle& bundle, long j, const Variety& H, double x_max,
                           const ClassOptions& options = {});

// Sign changes of H o G_j on a uniform grid over [0, x_max].
int class_sign_changes(const InterpolationBundle& bundle, long j, const Variety& H, double x_max, int samples_per_unit);

struct Progression {
    long residue = 0;
    long start = 0;
    bool certified = false;
};

struct ReturnSetDecomposition {
    long modulus = 1;
    long n_max = 0;
    std::vector<long> exceptional;
    std::vector<Progression> progressions;

    bool contains(long n) const;
    std::vector<long> reconstruct() const;
};

// InconsistentVerdict when a verdict disagrees with the hits on [0, n_max].
ReturnSetDecomposition decompose(const std::vector<long>& hits, const std::vector<ClassVerdict>& verdicts, long N,
                                 long n_max);

struct ReturnSetOptions {
    ClassOptions classes;
    BundleOptions bundle;
    bool parallel = true;
};

struct ReturnSetReport {
    long modulus = 1;
    int transient = 0;
    std::vector<long> hits;
    std::vector<ClassVerdict> verdicts;
    ReturnSetDecomposition decomposition;
};

ReturnSetReport analyze_return_set(const ProductSystem& system, const Vector& a, const Variety& H, long n_max,
                                   const ReturnSetOptions& options = {});

enum class Trichotomy { All, Evens, Odds, Finite };
std::string to_string(Trichotomy t);

struct TrichotomyResult {
    Trichotomy label = Trichotomy::Finite;
    ReturnSetReport report;
};

// Univariate factors with |f'(0)| <= 1 only.
TrichotomyResult trichotomy_check(const ProductSystem& system, const Vector& a, const Variety& H, long n_max,
                                  const ReturnSetOptions& options = {});

} // namespace smld
