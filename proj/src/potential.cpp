#include "ernst/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace ernst {

namespace {

std::string where(const WorldPoint& pt)
{
    std::ostringstream os;
    os.precision(17);
    os << "(rho=" << pt.rho << ", zeta=" << pt.zeta << ")";
    return os.str();
}

struct PointState {
    Surface surface;
    ThetaContext ctx;
    ThetaContext ctx0;
    cplx phase;
    RVector shift;  // Delta/2 for the shifted variant, else 0
};

PointState make_state(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts)
{
    spec.validate();
    SpectralData sd(pt.zeta, pt.rho, spec.pairs, opts.curve);
    Surface s = build_surface(sd, opts.quad_order);
    const int g = sd.genus();
    ThetaContext ctx(s.riemann, build_characteristics(spec), opts.theta_eps);
    ThetaContext ctx0 = ctx.with_chars(Characteristics::zero(g));
    double psum = 0.0;
    for (double v : spec.p) psum += v;
    const cplx phase = spec.include_phase ? std::exp(-pi * I * psum) : cplx(1.0, 0.0);
    RVector shift(g, 0.0);
    if (spec.variant == Variant::shifted)
        for (int j = 0; j < g; ++j) shift[j] = 0.5 * s.riemann.r_pattern(j, j);
    return {std::move(s), std::move(ctx), std::move(ctx0), phase, std::move(shift)};
}

CVector axpy(double a, const CVector& x, const RVector& y, const RVector& s)
{
    CVector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = a * x[j] + y[j] + s[j];
    return out;
}

// Theta value that must stay away from the divisor.
cplx denominator(const ThetaContext& ctx, const CVector& z, double eps_div, double num_scale,
                 const WorldPoint& pt)
{
    const ThetaValue t = ctx.evaluate(z);
    if (std::abs(t.value) < eps_div * std::max(num_scale, t.abs_sum))
        throw Error(ErrorCode::ThetaDivisorHit, "theta denominator vanishes at " + where(pt));
    return t.value;
}

cplx potential_value(const PointState& st, const EvalOptions& opts, const WorldPoint& pt, double* bound)
{
    const CVector& v = st.surface.abel.to_inf_plus;
    const RVector zero(v.size(), 0.0);
    const ThetaValue num = st.ctx.evaluate(axpy(1.0, v, zero, st.shift));
    const ThetaValue den = st.ctx.evaluate(axpy(-1.0, v, zero, st.shift));
    if (std::abs(den.value) < opts.eps_div * std::max(std::abs(num.value), den.abs_sum))
        throw Error(ErrorCode::ThetaDivisorHit, "theta denominator vanishes at " + where(pt));
    if (bound) *bound = std::max(num.error_bound, den.error_bound);
    return st.phase * num.value / den.value;
}

cplx conjugate_value(const PointState& st, const EvalOptions& opts, const WorldPoint& pt)
{
    const CVector& v = st.surface.abel.to_inf_plus;
    const RVector& h = st.surface.abel.half_lattice;
    const cplx num = theta(st.ctx, axpy(1.0, v, h, st.shift));
    const cplx den = denominator(st.ctx, axpy(-1.0, v, h, st.shift), opts.eps_div, std::abs(num), pt);
    return st.phase * num / den;
}

cplx real_part_value(const PointState& st, const EvalOptions& opts, const WorldPoint& pt)
{
    const CVector& v = st.surface.abel.to_inf_plus;
    const RVector& h = st.surface.abel.half_lattice;
    const std::size_t g = v.size();
    const RVector zero(g, 0.0);
    RVector minus_h(g);
    for (std::size_t j = 0; j < g; ++j) minus_h[j] = -h[j];
    const CVector cz(g, 0.0);

    const cplx q_num = theta(st.ctx0, axpy(-1.0, v, zero, zero)) * theta(st.ctx0, axpy(-1.0, v, h, zero));
    const cplx q_den = theta(st.ctx0, cz) * theta(st.ctx0, axpy(1.0, cz, minus_h, zero));
    if (std::abs(q_den) == 0.0) throw Error(ErrorCode::ThetaDivisorHit, "normalizing theta vanishes at " + where(pt));
    const cplx q = q_num / q_den;

    const cplx num = theta(st.ctx, axpy(1.0, cz, zero, st.shift)) * theta(st.ctx, axpy(1.0, cz, h, st.shift));
    const cplx d1 = denominator(st.ctx, axpy(-1.0, v, zero, st.shift), opts.eps_div, 0.0, pt);
    const cplx d2 = denominator(st.ctx, axpy(-1.0, v, h, st.shift), opts.eps_div, 0.0, pt);
    return q * st.phase * num / (d1 * d2);
}

struct Stencil {
    cplx e, e_z, e_r, e_zz, e_rr;
};

cplx value_at(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts)
{
    try {
        const PointState st = make_state(spec, pt, opts);
        return potential_value(st, opts, pt, nullptr);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ThetaDivisorHit) throw;
        throw Error(ErrorCode::StencilDegenerate, "stencil point " + where(pt) + ": " + e.what());
    }
}

Stencil stencil_once(const SolutionSpec& spec, const WorldPoint& pt, double h, const EvalOptions& opts, cplx center)
{
    const cplx zp = value_at(spec, {pt.rho, pt.zeta + h}, opts);
    const cplx zm = value_at(spec, {pt.rho, pt.zeta - h}, opts);
    const cplx rp = value_at(spec, {pt.rho + h, pt.zeta}, opts);
    const cplx rm = value_at(spec, {pt.rho - h, pt.zeta}, opts);
    return {center, (zp - zm) / (2.0 * h), (rp - rm) / (2.0 * h), (zp - 2.0 * center + zm) / (h * h),
            (rp - 2.0 * center + rm) / (h * h)};
}

Stencil stencil(const SolutionSpec& spec, const WorldPoint& pt, double h, const EvalOptions& base,
                const PdeOptions& pde, const CurveTolerances& tol)
{
    if (!(h > 0.0) || h > 1e-2) throw Error(ErrorCode::InvalidArgument, "finite-difference step must lie in (0, 1e-2]");
    if (pt.rho <= tol.rho_min + 2.0 * h)
        throw Error(ErrorCode::StencilDegenerate, "stencil at " + where(pt) + " reaches the axis exclusion zone");
    EvalOptions opts = base;
    opts.diagnostics = false;
    const cplx c = value_at(spec, pt, opts);
    Stencil s = stencil_once(spec, pt, h, opts, c);
    if (pde.richardson) {
        const Stencil t = stencil_once(spec, pt, 0.5 * h, opts, c);
        auto rich = [](cplx coarse, cplx fine) { return (4.0 * fine - coarse) / 3.0; };
        s = {c, rich(s.e_z, t.e_z), rich(s.e_r, t.e_r), rich(s.e_zz, t.e_zz), rich(s.e_rr, t.e_rr)};
    }
    return s;
}

}  // namespace

void SolutionSpec::validate() const
{
    const std::size_t g = pairs.size();
    if (g == 0) throw Error(ErrorCode::InvalidArgument, "solution needs at least one branch pair");
    if (p.size() != g) throw Error(ErrorCode::InvalidArgument, "p has the wrong length");
    if (q_im.size() != g) throw Error(ErrorCode::InvalidArgument, "q_im has the wrong length");
    if (!enforce_reality && q_re.size() != g)
        throw Error(ErrorCode::InvalidArgument, "q_re must be given when reality is not enforced");
    for (const auto& pr : pairs) validate_pair(pr);
    for (double v : p)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite p");
    for (double v : q_im)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite q_im");
    for (double v : q_re)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite q_re");
}

RealMatrix SolutionSpec::real_pattern() const
{
    const int g = genus();
    RealMatrix r(g, g, -0.5);
    for (int i = 0; i < g; ++i)
        if (pairs[i].kind == PairKind::conjugate) r(i, i) = 0.0;
    return r;
}

Characteristics build_characteristics(const SolutionSpec& spec)
{
    spec.validate();
    const int g = spec.genus();
    Characteristics c;
    c.p = spec.p;
    c.q.resize(g);
    double psum = 0.0;
    for (double v : spec.p) psum += v;
    const RealMatrix r = spec.real_pattern();
    for (int j = 0; j < g; ++j) {
        double re;
        if (!spec.enforce_reality)
            re = spec.q_re[j];
        else if (spec.variant == Variant::shifted) {
            re = 0.0;
            for (int k = 0; k < g; ++k) re -= r(j, k) * spec.p[k];
        } else if (spec.pairs[j].kind == PairKind::conjugate)
            re = 0.5 * (psum - spec.p[j]);
        else
            re = -0.25 + 0.5 * psum;
        c.q[j] = cplx(re, spec.q_im[j]);
    }
    return c;
}

ErnstEvaluation ernst_potential(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts)
{
    const PointState st = make_state(spec, pt, opts);
    ErnstEvaluation ev;
    ev.value = potential_value(st, opts, pt, &ev.truncation_bound);
    ev.f = ev.value.real();
    ev.phase = st.phase;
    const CVector& v = st.surface.abel.to_inf_plus;
    const RVector zero(v.size(), 0.0);
    ev.theta_args[0] = axpy(1.0, v, zero, st.shift);
    ev.theta_args[1] = axpy(-1.0, v, zero, st.shift);
    if (opts.diagnostics) {
        const double scale = std::max(std::abs(ev.value), 1e-300);
        ev.conj_residual = std::abs(conjugate_value(st, opts, pt) - std::conj(ev.value)) / scale;
        ev.realpart_residual = std::abs(real_part_value(st, opts, pt) - ev.f) / scale;
    }
    return ev;
}

cplx conjugate_via_formula(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts)
{
    return conjugate_value(make_state(spec, pt, opts), opts, pt);
}

double real_part_via_fay(const SolutionSpec& spec, const WorldPoint& pt, const EvalOptions& opts)
{
    return real_part_value(make_state(spec, pt, opts), opts, pt).real();
}

double default_fd_step(const WorldPoint& pt)
{
    return 1e-3 * std::max(1.0, std::hypot(pt.zeta, pt.rho));
}

PdeResidual pde_residual(const SolutionSpec& spec, const WorldPoint& pt, double h, const EvalOptions& opts,
                         const PdeOptions& pde)
{
    const Stencil s = stencil(spec, pt, h, opts, pde, opts.curve);
    const cplx e_xi = 0.5 * (s.e_z - I * s.e_r);
    const cplx e_xib = 0.5 * (s.e_z + I * s.e_r);
    const cplx e_xixib = 0.25 * (s.e_zz + s.e_rr);
    const cplx sum = s.e + std::conj(s.e);
    const cplx xi(pt.zeta, pt.rho);
    const cplx diff = std::conj(xi) - xi;

    PdeResidual r;
    r.lhs = sum * (e_xixib - (e_xib - e_xi) / (2.0 * diff));
    r.rhs = 2.0 * e_xi * e_xib;
    r.absolute = r.lhs - r.rhs;
    r.relative = std::abs(r.absolute) / std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-300});
    const cplx lap = s.e_rr + s.e_zz + s.e_r / pt.rho;
    r.absolute_laplace = sum * lap - 8.0 * e_xi * e_xib;
    r.form_gap = std::abs(4.0 * r.absolute - r.absolute_laplace);
    const double ulp = std::numeric_limits<double>::epsilon() * std::abs(s.e);
    r.roundoff = 100.0 * ulp * (std::abs(sum) / (h * h) + 2.0 * std::max(std::abs(e_xi), std::abs(e_xib)) / h);
    return r;
}

std::vector<WorldPoint> densify_path(const std::vector<WorldPoint>& path, double max_step)
{
    if (!(max_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_step must be positive");
    std::vector<WorldPoint> out;
    if (path.empty()) return out;
    out.push_back(path.front());
    for (std::size_t i = 1; i < path.size(); ++i) {
        const WorldPoint a = path[i - 1], b = path[i];
        const double len = std::hypot(b.rho - a.rho, b.zeta - a.zeta);
        const int n = std::max(1, static_cast<int>(std::ceil(len / max_step - 1e-12)));
        for (int k = 1; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            out.push_back({a.rho + t * (b.rho - a.rho), a.zeta + t * (b.zeta - a.zeta)});
        }
    }
    return out;
}

MetricIntegrand metric_integrand(const SolutionSpec& spec, const WorldPoint& pt, double h, const EvalOptions& opts,
                                 const PdeOptions& pde)
{
    const Stencil s = stencil(spec, pt, h, opts, pde, opts.curve);
    const cplx e_xi = 0.5 * (s.e_z - I * s.e_r);
    const cplx e_xib = 0.5 * (s.e_z + I * s.e_r);
    const cplx sum = s.e + std::conj(s.e);
    // (E - conj E)_xi = E_xi - conj(E_xibar)
    const double noise = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(s.e) / h;
    return {2.0 * pt.rho * (e_xi - std::conj(e_xib)) / (sum * sum),
            2.0 * I * pt.rho * e_xi * std::conj(e_xib) / (sum * sum), s.e,
            2.0 * pt.rho * noise / std::norm(sum)};
}

MetricFields integrate_metric(const std::vector<WorldPoint>& path, const std::vector<MetricIntegrand>& f)
{
    if (path.empty() || path.size() != f.size()) throw Error(ErrorCode::InvalidArgument, "metric path and integrands differ");
    const std::size_t n = path.size();
    double a_mean = 0.0, k_mean = 0.0;
    for (const auto& v : f) {
        a_mean += std::abs(v.a_xi) / static_cast<double>(n);
        k_mean += std::abs(v.k_xi) / static_cast<double>(n);
    }
    auto coarse = [](cplx u, cplx v, double mean, double floor) {
        const double d = std::abs(v - u);
        return d > floor && d > 0.5 * std::max({std::abs(u), std::abs(v), mean});
    };
    for (std::size_t i = 1; i < n; ++i) {
        const double floor = std::max(f[i - 1].roundoff, f[i].roundoff);
        if (coarse(f[i - 1].a_xi, f[i].a_xi, a_mean, floor) || coarse(f[i - 1].k_xi, f[i].k_xi, k_mean, floor))
            throw Error(ErrorCode::PathTooCoarse, "integrand changes by more than 50% before " + where(path[i]));
    }

    MetricFields out;
    out.anchor = path.front();
    out.vertices.resize(n);
    double a = 0.0, k = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const cplx dxi(path[i].zeta - path[i - 1].zeta, path[i].rho - path[i - 1].rho);
            a += ((f[i - 1].a_xi + f[i].a_xi) * dxi).real();
            k += ((f[i - 1].k_xi + f[i].k_xi) * dxi).real();
        }
        out.vertices[i] = {path[i], a, k, f[i].value.real(), f[i].value};
    }
    return out;
}

void check_metric_path(const std::vector<WorldPoint>& path, double h)
{
    if (path.empty()) throw Error(ErrorCode::InvalidArgument, "metric path is empty");
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double step = std::hypot(path[i].rho - path[i - 1].rho, path[i].zeta - path[i - 1].zeta);
        if (step > 10.0 * h * (1.0 + 1e-9))
            throw Error(ErrorCode::InvalidArgument, "metric path vertices are more than 10 h apart near " + where(path[i]));
    }
}

MetricFields metric_quadratures(const SolutionSpec& spec, const std::vector<WorldPoint>& path, double h,
                                const EvalOptions& opts, const PdeOptions& pde)
{
    check_metric_path(path, h);
    std::vector<MetricIntegrand> f;
    f.reserve(path.size());
    for (const auto& pt : path) f.push_back(metric_integrand(spec, pt, h, opts, pde));
    return integrate_metric(path, f);
}

}  // namespace ernst
