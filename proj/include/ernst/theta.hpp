#pragma once

// Riemann theta functions with characteristics,
//   Theta_pq(z) = sum_n exp(pi i (n+p)^T B (n+p) + 2 pi i (n+p)^T (z+q)),
// summed over a Cholesky ellipsoid with a certified tail bound.

#include <cstddef>

#include "ernst/curve.hpp"
#include "ernst/linalg.hpp"

namespace ernst {

struct Characteristics {
    RVector p;
    CVector q;

    static Characteristics zero(int g) { return {RVector(g, 0.0), CVector(g, 0.0)}; }
};

struct ThetaValue {
    cplx value;
    double error_bound = 0.0;  // absolute bound on the truncated tail
    double abs_sum = 0.0;      // sum of |term|, a natural magnitude scale
    std::size_t terms = 0;
};

class ThetaContext {
public:
    ThetaContext(ComplexMatrix b, Characteristics chars, double eps = 1e-12);
    ThetaContext(const RiemannMatrix& rm, Characteristics chars, double eps = 1e-12);

    // Same period matrix and truncation data, new characteristics.
    ThetaContext with_chars(Characteristics chars) const;

    int genus() const noexcept { return static_cast<int>(b_.rows()); }
    const ComplexMatrix& b() const noexcept { return b_; }
    const Characteristics& chars() const noexcept { return chars_; }
    double eps() const noexcept { return eps_; }
    double radius() const noexcept { return radius_; }
    const RealMatrix& chol_im() const noexcept { return chol_; }
    double shortest_vector() const noexcept { return shortest_; }

    ThetaValue evaluate(const CVector& z) const;
    CVector gradient(const CVector& z) const;

private:
    template <typename F>
    std::size_t for_each_point(const CVector& z, F&& f) const;
    void setup_radius();

    ComplexMatrix b_;
    Characteristics chars_;
    double eps_;
    RealMatrix chol_;
    double lambda_min_ = 0.0;
    double shortest_ = 0.0;
    double radius_ = 0.0;
};

cplx theta(const ThetaContext& ctx, const CVector& z);
CVector theta_gradient(const ThetaContext& ctx, const CVector& z);

// |Theta(z+m) - exp(2 pi i <p,m>) Theta(z)| / (|Theta(z)| + eps)
double lattice_shift_check(const ThetaContext& ctx, const CVector& z, const std::vector<long>& m);

struct ConjugationResult {
    cplx alpha;
    double max_deviation = 0.0;
    int probes = 0;
};

/// conj Theta(z) = alpha * Theta(-conj z - 2 Re(q + B p) + diag(Re B)), probed on a
/// Halton sequence in the unit polydisc. Requires 2 Re(B) integral.
ConjugationResult conjugation_constant(const ThetaContext& ctx, int probes = 16);

struct HalfIntegerCharacteristic {
    RVector p_star;
    RVector q_star;

    Characteristics chars() const;
    bool odd() const;
};

// First odd half-integer characteristic (lexicographic in p then q, 0 before 1/2)
// whose theta vanishes at 0 with nonvanishing gradient.
HalfIntegerCharacteristic find_odd_characteristic(const ComplexMatrix& b, double eps = 1e-12);

std::vector<HalfIntegerCharacteristic> all_half_integer_characteristics(int g);

struct FayTerms {
    cplx t1, t2, t3;
    double residual = 0.0;
};

/// Fay's trisecant identity with each prime form E(x,y) replaced by
/// Theta_odd(A_x - A_y); the spinor factors cancel between the three terms.
FayTerms fay_terms(const ThetaContext& ctx, const HalfIntegerCharacteristic& odd, const CVector& a,
                   const CVector& b, const CVector& c, const CVector& d, const CVector& z);

double fay_residual(const ThetaContext& ctx, const HalfIntegerCharacteristic& odd, const CVector& a,
                    const CVector& b, const CVector& c, const CVector& d, const CVector& z);

// Upper incomplete gamma for s a positive multiple of 1/2.
double upper_gamma_half(double s, double x);

// Point k (k >= 1) of the Halton sequence in the given prime base.
double halton(int k, int base);

}  // namespace ernst
