#pragma once

// Theta-functional Ernst potentials on the curve family parametrized by
// xi = zeta + i rho, together with the identities they satisfy.

#include <vector>

#include "ernst/curve.hpp"
#include "ernst/theta.hpp"

namespace ernst {

enum class Variant { standard, shifted };

struct SolutionSpec {
    std::vector<BranchPair> pairs;
    RVector p;
    RVector q_im;
    // Used verbatim as Re(q) only when enforce_reality is off.
    RVector q_re;
    bool enforce_reality = true;
    bool include_phase = true;
    Variant variant = Variant::standard;

    int genus() const noexcept { return static_cast<int>(pairs.size()); }
    void validate() const;
    RealMatrix real_pattern() const;
};

struct WorldPoint {
    double rho = 1.0;
    double zeta = 0.0;
};

struct EvalOptions {
    int quad_order = 64;
    double theta_eps = 1e-12;
    double eps_div = 1e-10;
    bool diagnostics = true;
    CurveTolerances curve;
};

struct ErnstEvaluation {
    cplx value;
    double f = 0.0;
    cplx phase{1.0, 0.0};
    double conj_residual = 0.0;
    double realpart_residual = 0.0;
    CVector theta_args[2];
    double truncation_bound = 0.0;
};

Characteristics build_characteristics(const SolutionSpec& spec);

ErnstEvaluation ernst_potential(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts = {});

// Right-hand side of the conjugation formula: phase * Theta(h + v) / Theta(h - v)
// with v the Abel vector to infinity+ and h = (1/2, ..., 1/2).
cplx conjugate_via_formula(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts = {});

// Re(E) rebuilt from theta values at 0, h, -v, h - v (Fay reduction).
double real_part_via_fay(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts = {});

struct PdeOptions {
    bool richardson = false;
};

struct PdeResidual {
    cplx absolute;            // LHS - RHS in the xi form
    double relative = 0.0;    // |LHS - RHS| / max(|LHS|, |RHS|, eps)
    cplx absolute_laplace;    // (E + conj E) Lap E - 8 E_xi E_xibar
    double form_gap = 0.0;    // |4 * absolute - absolute_laplace|
    cplx lhs, rhs;
    // expected rounding error of LHS - RHS; when both sides are below it the
    // field is flat at this step and only the absolute residual means anything
    double roundoff = 0.0;
    bool at_roundoff() const { return std::max(std::abs(lhs), std::abs(rhs)) <= roundoff; }
};

PdeResidual pde_residual(const SolutionSpec& spec, const WorldPoint& pt, double h,
                         const EvalOptions& opts = {}, const PdeOptions& pde = {});

double default_fd_step(const WorldPoint& pt);

struct MetricVertex {
    WorldPoint pt;
    double a_field = 0.0;
    double k_field = 0.0;
    double f = 0.0;
    cplx value;
};

struct MetricFields {
    std::vector<MetricVertex> vertices;
    WorldPoint anchor;
};

struct MetricIntegrand {
    cplx a_xi;
    cplx k_xi;
    cplx value;
    double roundoff = 0.0;  // integrand changes below this are finite-difference noise
};

// A_xi and k_xi at one vertex from the finite-difference stencil.
MetricIntegrand metric_integrand(const SolutionSpec& spec, const WorldPoint& pt, double h,
                                 const EvalOptions& opts = {}, const PdeOptions& pde = {});

// Trapezoid sums along the path, gauged to 0 at path[0].
MetricFields integrate_metric(const std::vector<WorldPoint>& path, const std::vector<MetricIntegrand>& f);

MetricFields metric_quadratures(const SolutionSpec& spec, const std::vector<WorldPoint>& path, double h,
                                const EvalOptions& opts = {}, const PdeOptions& pde = {});

// Throws InvalidArgument unless consecutive vertices are at most 10 h apart.
void check_metric_path(const std::vector<WorldPoint>& path, double h);

// Inserts vertices so consecutive points are at most max_step apart.
std::vector<WorldPoint> densify_path(const std::vector<WorldPoint>& path, double max_step);

}  // namespace ernst
