#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's quadrature, branch tracking or ellipsoid summation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ernst/curve.hpp"
#include "ernst/potential.hpp"

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// Arithmetic-geometric mean with the "right" square root at every step.
inline cplx agm(cplx a, cplx b)
{
    for (int i = 0; i < 100; ++i) {
        const cplx a1 = 0.5 * (a + b);
        cplx b1 = std::sqrt(a * b);
        if (std::abs(a1 - b1) > std::abs(a1 + b1)) b1 = -b1;
        a = a1;
        b = b1;
        if (std::abs(a - b) <= 1e-17 * std::abs(a)) break;
    }
    return a;
}

// int_{e2}^{e3} dx / sqrt((x-e1)(x-e2)(x-e3)(x-e4)) up to sign, through the
// Landen/Gauss form pi / AGM(sqrt((e4-e2)(e3-e1)), sqrt((e4-e3)(e2-e1))).
inline cplx quartic_half_period_agm(cplx e1, cplx e2, cplx e3, cplx e4)
{
    const cplx a = std::sqrt((e4 - e2) * (e3 - e1));
    cplx b = std::sqrt((e4 - e3) * (e2 - e1));
    if (std::abs(a - b) > std::abs(a + b)) b = -b;
    return pi / agm(a, b);
}

// Carlson's symmetric integral R_F by duplication, for complex arguments off
// the negative real axis (one argument may be zero).
inline cplx carlson_rf(cplx x, cplx y, cplx z)
{
    for (int i = 0; i < 200; ++i) {
        const cplx sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const cplx lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        const cplx mu = (x + y + z) / 3.0;
        const double dev = std::max({std::abs(x - mu), std::abs(y - mu), std::abs(z - mu)}) / std::abs(mu);
        if (dev < 1e-4) {
            const cplx dx = (mu - x) / mu, dy = (mu - y) / mu, dz = (mu - z) / mu;
            const cplx e2 = dx * dy - dz * dz, e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(mu);
        }
    }
    return {NAN, NAN};
}

// int_E^F dx / y for y^2 = (x-E)(x-F)(x-r1)(x-r2) along the segment, up to sign.
// x = (E + F s)/(1 + s) turns it into 2 R_F(0, a1, a2) with a = (E-r)/(F-r).
inline cplx segment_integral(cplx e, cplx f, cplx r1, cplx r2)
{
    const cplx a1 = (e - r1) / (f - r1), a2 = (e - r2) / (f - r2);
    const cplx k = -(f - e) * (f - e) * (f - r1) * (f - r2);
    return (f - e) * 2.0 * carlson_rf(0.0, a1, a2) / std::sqrt(k);
}

// int_xi^{xi + i infinity} dx / y for y^2 = (x-xi)(x-r1)(x-r2)(x-r3), up to sign.
// With x = xi + i t and t = 1/u this is 2 R_F(1/b1, 1/b2, 1/b3) / prod sqrt(b), b = -i (xi - r).
inline cplx ray_integral(cplx xi, cplx r1, cplx r2, cplx r3)
{
    const cplx i(0.0, 1.0);
    const cplx b1 = -i * (xi - r1), b2 = -i * (xi - r2), b3 = -i * (xi - r3);
    return i * 2.0 * carlson_rf(1.0 / b1, 1.0 / b2, 1.0 / b3) / (std::sqrt(b1) * std::sqrt(b2) * std::sqrt(b3));
}

// Theta series summed over the box |n_j| <= n_max.
inline cplx box_theta(const ernst::ComplexMatrix& b, const std::vector<double>& p, const std::vector<cplx>& q,
                      const std::vector<cplx>& z, int n_max)
{
    const int g = static_cast<int>(b.rows());
    std::vector<int> n(g, -n_max);
    cplx sum = 0.0;
    const cplx i(0.0, 1.0);
    while (true) {
        cplx e = 0.0;
        for (int j = 0; j < g; ++j) {
            const double xj = n[j] + p[j];
            cplx bx = 0.0;
            for (int k = 0; k < g; ++k) bx += b(j, k) * (n[k] + p[k]);
            e += pi * i * xj * bx + 2.0 * pi * i * xj * (z[j] + q[j]);
        }
        sum += std::exp(e);
        int j = 0;
        while (j < g && ++n[j] > n_max) n[j++] = -n_max;
        if (j == g) break;
    }
    return sum;
}

inline cplx scalar_theta(cplx tau, double p, cplx q, cplx z, int n_max = 30)
{
    const cplx i(0.0, 1.0);
    cplx s = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        const double x = n + p;
        s += std::exp(pi * i * x * x * tau + 2.0 * pi * i * x * (z + q));
    }
    return s;
}

// AGM and the segment integral agree only when the pair's cut does not cross
// [conj xi, xi]; across that cut the AGM lands on a different homotopy class.
inline bool agm_applicable(cplx xi, const ernst::BranchPair& pr)
{
    return pr.kind == ernst::PairKind::conjugate || xi.real() < pr.e.real() || xi.real() > pr.f.real();
}

// Genus-1 data built from the closed-form integrals, normalized the same way
// the library promises: Im(tau) > 0, Re(tau) on the half-integer pattern,
// Re(v) = 1/4.
struct Genus1 {
    cplx a_period;   // loop integral of dx/y around the pair's cut, up to sign
    cplx ray;        // int_xi^infinity dx/y along the vertical ray, up to sign
    cplx tau;
    cplx v;
};

inline Genus1 genus1_reference(cplx xi, const ernst::BranchPair& pr, bool use_agm)
{
    const cplx xb = std::conj(xi);
    Genus1 r;
    // the pair's cut joins F to E (conjugate) or e to f (real)
    const cplx s0 = pr.kind == ernst::PairKind::conjugate ? pr.f : pr.e;
    const cplx s1 = pr.kind == ernst::PairKind::conjugate ? pr.e : pr.f;
    r.a_period = 2.0 * (use_agm ? quartic_half_period_agm(xb, s0, s1, xi) : segment_integral(s0, s1, xi, xb));
    const cplx b = 2.0 * segment_integral(xi, pr.e, xb, pr.f);
    r.ray = ray_integral(xi, xb, pr.e, pr.f);

    cplx tau = b / r.a_period;
    if (tau.imag() < 0) tau = -tau;
    const double pattern = pr.kind == ernst::PairKind::conjugate ? 0.0 : -0.5;
    tau -= std::round(tau.real() - pattern);
    r.tau = tau;

    cplx v = r.ray / r.a_period;
    const double frac = v.real() - std::floor(v.real());
    if (std::abs(frac - 0.75) < 0.1) v = -v;
    v -= std::round(v.real() - 0.25);
    r.v = v;
    return r;
}

// Genus-1 Ernst potential from the reference data and the scalar theta series.
inline cplx genus1_ernst(const Genus1& ref, const ernst::BranchPair& pr, double p, double q_im, bool phase = true)
{
    const double re_q = pr.kind == ernst::PairKind::conjugate ? 0.0 : -0.25 + 0.5 * p;
    const cplx q(re_q, q_im);
    const cplx ph = phase ? std::exp(cplx(0.0, -pi * p)) : cplx(1.0);
    return ph * scalar_theta(ref.tau, p, q, ref.v) / scalar_theta(ref.tau, p, q, -ref.v);
}

// ------------------------------------------------------------ random configurations

struct Draw {
    double zeta = 0.0;
    double rho = 1.0;
    std::vector<ernst::BranchPair> pairs;
};

inline double seg_dist(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

// Separation rules: branch points >= 0.3 apart, conjugate cuts never meet
// real cuts, cuts keep 0.2 from each other and from xi.
inline bool well_separated(double zeta, double rho, const std::vector<ernst::BranchPair>& pairs)
{
    const cplx xi(zeta, rho);
    std::vector<cplx> pts{xi, std::conj(xi)};
    for (const auto& p : pairs) {
        pts.push_back(p.e);
        pts.push_back(p.f);
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i] - pts[j]) < 0.3) return false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& a = pairs[i];
        const cplx a0 = a.kind == ernst::PairKind::conjugate ? a.f : a.e;
        const cplx a1 = a.kind == ernst::PairKind::conjugate ? a.e : a.f;
        if (seg_dist(xi, a0, a1) < 0.2) return false;
        if (a.kind == ernst::PairKind::conjugate && std::abs(a.e.real() - zeta) < 0.2) return false;
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const auto& b = pairs[j];
            if (a.kind == ernst::PairKind::conjugate && b.kind == ernst::PairKind::conjugate) {
                if (std::abs(a.e.real() - b.e.real()) < 0.2) return false;
            } else if (a.kind == ernst::PairKind::real_pair && b.kind == ernst::PairKind::real_pair) {
                if (a.f.real() + 0.2 > b.e.real() && b.f.real() + 0.2 > a.e.real()) return false;
            } else {
                const auto& c = a.kind == ernst::PairKind::conjugate ? a : b;
                const auto& r = a.kind == ernst::PairKind::conjugate ? b : a;
                if (c.e.real() > r.e.real() - 0.2 && c.e.real() < r.f.real() + 0.2) return false;
            }
        }
    }
    return true;
}

class Generator {
public:
    explicit Generator(unsigned seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    Draw draw(int g)
    {
        for (;;) {
            Draw d;
            d.zeta = uniform(-1.0, 1.0);
            d.rho = uniform(0.3, 1.5);
            for (int j = 0; j < g; ++j) {
                if (uniform(0.0, 1.0) < 0.5) {
                    d.pairs.push_back(ernst::BranchPair::conjugate({uniform(-3.0, 3.0), uniform(0.3, 2.5)}));
                } else {
                    const double e = uniform(-4.0, 3.5);
                    d.pairs.push_back(ernst::BranchPair::real(e, e + uniform(0.3, 2.0)));
                }
            }
            if (well_separated(d.zeta, d.rho, d.pairs)) return d;
        }
    }

    // nearby world point that keeps the separation rules
    ernst::WorldPoint nearby(const Draw& d)
    {
        for (;;) {
            const double z = d.zeta + uniform(-0.4, 0.4);
            const double r = std::max(0.25, d.rho + uniform(-0.3, 0.3));
            if (well_separated(z, r, d.pairs)) return {r, z};
        }
    }

    ernst::SolutionSpec spec(const Draw& d)
    {
        ernst::SolutionSpec s;
        s.pairs = d.pairs;
        for (std::size_t j = 0; j < d.pairs.size(); ++j) {
            s.p.push_back(uniform(-0.5, 0.5));
            s.q_im.push_back(uniform(-0.3, 0.3));
        }
        return s;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace oracle
