#pragma once

// Hyperelliptic curves y^2 = (x - xi)(x - conj xi) prod_j (x - E_j)(x - F_j)
// with straight cuts, their normalized period matrices and Abel vectors.

#include <optional>
#include <vector>

#include "ernst/linalg.hpp"

namespace ernst {

enum class PairKind { conjugate, real_pair };

struct BranchPair {
    cplx e;
    cplx f;
    PairKind kind = PairKind::conjugate;

    static BranchPair conjugate(cplx e) { return {e, std::conj(e), PairKind::conjugate}; }
    static BranchPair real(double e, double f) { return {e, f, PairKind::real_pair}; }

    int sigma() const noexcept { return kind == PairKind::conjugate ? 1 : 0; }
};

// Throws InvalidSpectralData when the kind invariants fail.
void validate_pair(const BranchPair& pair);

struct CurveTolerances {
    double rho_min = 1e-3;
    double sep_min = 1e-6;
    double tol_period = 1e-9;
    double tol_sym = 1e-8;
    double tol_real = 1e-8;
    double tol_abel = 1e-8;
};

// A straight cut from s0 to s1.
struct Cut {
    cplx s0;
    cplx s1;

    cplx mid() const { return 0.5 * (s0 + s1); }
    cplx half() const { return 0.5 * (s1 - s0); }
    // Principal-branch factor w*sqrt(1 - (h/w)^2), analytic off the segment.
    cplx factor(cplx x) const;
};

class SpectralData {
public:
    SpectralData(double zeta, double rho, std::vector<BranchPair> pairs, CurveTolerances tol = {});

    double zeta() const noexcept { return zeta_; }
    double rho() const noexcept { return rho_; }
    cplx xi() const noexcept { return {zeta_, rho_}; }
    int genus() const noexcept { return static_cast<int>(pairs_.size()); }
    const std::vector<BranchPair>& pairs() const noexcept { return pairs_; }
    const CurveTolerances& tolerances() const noexcept { return tol_; }

    // xi, conj(xi), E_1, F_1, ...
    CVector roots() const;
    // cut 0 is [conj xi, xi]; cut j+1 belongs to pair j, oriented F->E (conjugate) or e->f (real)
    const std::vector<Cut>& cuts() const noexcept { return cuts_; }

    cplx y_squared(cplx x) const;
    // Value on the + sheet, y ~ x^{g+1} at infinity.
    cplx y_plus(cplx x) const;

    // R_ij = 0 on the diagonal of conjugate pairs, -1/2 elsewhere.
    RealMatrix real_pattern() const;

private:
    double zeta_;
    double rho_;
    std::vector<BranchPair> pairs_;
    CurveTolerances tol_;
    std::vector<Cut> cuts_;
};

/// Continues sqrt(prod (x - root)) along path_samples. The first value is the
/// root nearest `hint` (principal root without a hint); each later value is
/// the root nearer its predecessor. Throws BranchJumpDetected when the chosen
/// root turns by more than pi/4 (pi/2 in y^2) between samples.
CVector track_sqrt(const CVector& poly_roots, const CVector& path_samples,
                   std::optional<cplx> hint = std::nullopt);

struct RawPeriods {
    ComplexMatrix a;  // a[j][m] = \oint_{a_j} x^m dx / y
    ComplexMatrix b;  // b[j][m] = \int_{b_j} x^m dx / y
    std::vector<int> a_orders;
};

RawPeriods raw_periods(const SpectralData& sd, int order = 64);

struct DifferentialBasis {
    ComplexMatrix coeffs;  // omega_k = sum_m coeffs(k, m) x^m dx / y
};

struct RiemannMatrix {
    ComplexMatrix b;
    RealMatrix r;
    RealMatrix r_pattern;
    RealMatrix chol_im;
    RVector delta;
    // b_j -> b_j - sum_k shift(j,k) a_k applied to reach the real-part pattern
    Matrix<long> b_cycle_shift;
    // -1 where the a-cycle (and its b-cycle) had to be reversed
    std::vector<int> orientation;
    double symmetry_defect = 0.0;
};

struct AbelData {
    CVector to_inf_plus;
    CVector to_inf_minus;
    RVector half_lattice;
};

struct Surface {
    SpectralData sd;
    DifferentialBasis basis;
    RiemannMatrix riemann;
    AbelData abel;
};

struct PeriodSolution {
    DifferentialBasis basis;
    RiemannMatrix riemann;
};

PeriodSolution riemann_matrix(const SpectralData& sd, int order = 64);

AbelData abel_to_infinity(const SpectralData& sd, const DifferentialBasis& basis, int order = 64);

// Periods, normalization and Abel vectors in one pass.
Surface build_surface(const SpectralData& sd, int order = 64);

// int x^m dx / y (m < g) from xi to infinity on the + sheet along the vertical ray.
CVector abel_ray_raw(const SpectralData& sd, int order = 64);

/// Abel vector from xi to the point over `x` reached by a tracked path on the
/// + sheet (sheet = +1) or its image under y -> -y (sheet = -1).
CVector abel_map(const Surface& surface, cplx x, int sheet, int order = 64);

}  // namespace ernst
