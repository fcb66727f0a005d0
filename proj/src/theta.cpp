#include "ernst/theta.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ernst {

namespace {

constexpr double kMaxLatticePoints = 1e8;
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Calls f(u) for every u = n + shift (n integral) with |L^T u| <= radius.
template <typename F>
void enumerate_ellipsoid(const RealMatrix& l, const RVector& shift, double radius, F&& f)
{
    const int g = static_cast<int>(l.rows());
    RVector u(g);
    const double r2 = radius * radius;
    // partial[k] = squared norm contributed by coordinates k..g-1
    auto rec = [&](auto&& self, int k, double used) -> void {
        double t = 0.0;
        for (int i = k + 1; i < g; ++i) t += l(i, k) * u[i];
        const double budget = std::sqrt(std::max(0.0, r2 - used));
        const double lkk = l(k, k);
        const double lo = (-budget - t) / lkk, hi = (budget - t) / lkk;
        const long n_lo = static_cast<long>(std::ceil(lo - shift[k]));
        const long n_hi = static_cast<long>(std::floor(hi - shift[k]));
        for (long n = n_lo; n <= n_hi; ++n) {
            u[k] = static_cast<double>(n) + shift[k];
            const double comp = lkk * u[k] + t;
            const double next = used + comp * comp;
            if (next > r2) continue;
            if (k == 0)
                f(static_cast<const RVector&>(u));
            else
                self(self, k - 1, next);
        }
    };
    rec(rec, g - 1, 0.0);
}

double ball_volume(int g, double r)
{
    return std::pow(std::sqrt(pi) * r, g) / std::tgamma(0.5 * g + 1.0);
}

// Tail of sum exp(-pi |L^T u|^2) outside radius R (in |L^T u| units), for a lattice
// whose shortest nonzero vector has length rmin in the same units.
double tail_bound(int g, double rmin, double radius)
{
    const double sp = std::sqrt(pi);
    const double rr = sp * radius, rm = sp * rmin;
    if (rr <= 0.5 * (std::sqrt(static_cast<double>(g)) + rm)) return INFINITY;
    const double a = rr - 0.5 * rm;
    return 0.5 * g * std::pow(2.0 / rm, g) * upper_gamma_half(0.5 * g, a * a);
}

}  // namespace

double upper_gamma_half(double s, double x)
{
    const int twice = static_cast<int>(std::lround(2.0 * s));
    if (twice < 1 || std::abs(2.0 * s - twice) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "upper_gamma_half needs s in (1/2)N");
    double val, cur;
    if (twice % 2 == 0) {
        val = std::exp(-x);
        cur = 1.0;
    } else {
        val = std::sqrt(pi) * std::erfc(std::sqrt(x));
        cur = 0.5;
    }
    while (cur < s - 1e-12) {
        val = cur * val + std::pow(x, cur) * std::exp(-x);
        cur += 1.0;
    }
    return val;
}

double halton(int k, int base)
{
    double f = 1.0, r = 0.0;
    while (k > 0) {
        f /= base;
        r += f * (k % base);
        k /= base;
    }
    return r;
}

ThetaContext::ThetaContext(ComplexMatrix b, Characteristics chars, double eps)
    : b_(std::move(b)), chars_(std::move(chars)), eps_(eps)
{
    const int g = genus();
    if (!b_.square() || g < 1) throw Error(ErrorCode::InvalidArgument, "theta needs a square period matrix");
    if (static_cast<int>(chars_.p.size()) != g || static_cast<int>(chars_.q.size()) != g)
        throw Error(ErrorCode::InvalidArgument, "characteristic length differs from genus");
    if (!(eps_ > 0.0 && eps_ < 1.0)) throw Error(ErrorCode::InvalidArgument, "theta eps must lie in (0,1)");
    for (const auto& v : b_.data())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorCode::InvalidArgument, "non-finite period matrix");
    RealMatrix y = imag_part(b_);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < i; ++j) y(i, j) = y(j, i) = 0.5 * (y(i, j) + y(j, i));
    chol_ = cholesky_spd(y);
    lambda_min_ = min_eigenvalue_spd(y);
    setup_radius();
}

ThetaContext::ThetaContext(const RiemannMatrix& rm, Characteristics chars, double eps)
    : ThetaContext(rm.b, std::move(chars), eps)
{
}

ThetaContext ThetaContext::with_chars(Characteristics chars) const
{
    if (chars.p.size() != chars_.p.size() || chars.q.size() != chars_.q.size())
        throw Error(ErrorCode::InvalidArgument, "characteristic length differs from genus");
    ThetaContext c = *this;
    c.chars_ = std::move(chars);
    c.setup_radius();
    return c;
}

void ThetaContext::setup_radius()
{
    const int g = genus();
    // shortest nonzero lattice vector, searched inside the shortest basis vector
    double r0 = INFINITY;
    for (int j = 0; j < g; ++j) {
        double s = 0.0;
        for (int i = j; i < g; ++i) s += chol_(i, j) * chol_(i, j);
        r0 = std::min(r0, std::sqrt(s));
    }
    shortest_ = r0;
    enumerate_ellipsoid(chol_, RVector(g, 0.0), r0 * (1.0 + 1e-12), [&](const RVector& u) {
        double s = 0.0;
        bool zero = true;
        for (int k = 0; k < g; ++k) {
            double t = 0.0;
            for (int i = k; i < g; ++i) t += chol_(i, k) * u[i];
            s += t * t;
            if (u[k] != 0.0) zero = false;
        }
        if (!zero) shortest_ = std::min(shortest_, std::sqrt(s));
    });

    double pnorm = 0.0;
    for (double v : chars_.p) pnorm += v * v;
    const double closed = std::sqrt((std::log(1.0 / eps_) + g * std::log(10.0)) / (pi * lambda_min_)) +
                          std::sqrt(pnorm) + 2.0;
    double lo = 0.0, hi = 1.0;
    while (tail_bound(g, shortest_, hi) > eps_) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail_bound(g, shortest_, mid) > eps_ ? lo : hi) = mid;
    }
    radius_ = std::max({closed, hi, 1.0});

    double det = 1.0;
    for (int i = 0; i < g; ++i) det *= chol_(i, i);
    const double count = ball_volume(g, radius_) / det;
    if (count > kMaxLatticePoints)
        throw Error(ErrorCode::RadiusOverflow, "ellipsoid holds ~" + std::to_string(count) + " lattice points");
}

template <typename F>
std::size_t ThetaContext::for_each_point(const CVector& z, F&& f) const
{
    const int g = genus();
    if (static_cast<int>(z.size()) != g) throw Error(ErrorCode::InvalidArgument, "theta argument length differs from genus");
    CVector w(g);
    RVector im(g);
    for (int j = 0; j < g; ++j) {
        w[j] = z[j] + chars_.q[j];
        im[j] = w[j].imag();
    }
    const RVector c = cholesky_solve(chol_, im);
    RVector shift(g);
    for (int j = 0; j < g; ++j) shift[j] = chars_.p[j] + c[j];
    std::size_t count = 0;
    RVector x(g);
    enumerate_ellipsoid(chol_, shift, radius_, [&](const RVector& u) {
        for (int j = 0; j < g; ++j) x[j] = u[j] - c[j];
        cplx e = 0.0;
        for (int j = 0; j < g; ++j) {
            cplx bx = 0.0;
            for (int k = 0; k < g; ++k) bx += b_(j, k) * x[k];
            e += x[j] * (0.5 * bx + w[j]);
        }
        f(x, std::exp(2.0 * pi * I * e));
        ++count;
    });
    return count;
}

ThetaValue ThetaContext::evaluate(const CVector& z) const
{
    ThetaValue out;
    out.terms = for_each_point(z, [&](const RVector&, cplx t) {
        out.value += t;
        out.abs_sum += std::abs(t);
    });
    const int g = genus();
    RVector im(g);
    for (int j = 0; j < g; ++j) im[j] = (z[j] + chars_.q[j]).imag();
    const RVector c = cholesky_solve(chol_, im);
    double quad = 0.0;
    for (int j = 0; j < g; ++j) quad += im[j] * c[j];
    out.error_bound = tail_bound(g, shortest_, radius_) * std::exp(pi * quad);
    return out;
}

CVector ThetaContext::gradient(const CVector& z) const
{
    CVector grad(genus());
    for_each_point(z, [&](const RVector& x, cplx t) {
        for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += x[k] * t;
    });
    for (auto& v : grad) v *= 2.0 * pi * I;
    return grad;
}

cplx theta(const ThetaContext& ctx, const CVector& z) { return ctx.evaluate(z).value; }

CVector theta_gradient(const ThetaContext& ctx, const CVector& z) { return ctx.gradient(z); }

double lattice_shift_check(const ThetaContext& ctx, const CVector& z, const std::vector<long>& m)
{
    const int g = ctx.genus();
    if (static_cast<int>(m.size()) != g) throw Error(ErrorCode::InvalidArgument, "shift length differs from genus");
    CVector zm = z;
    double pm = 0.0;
    for (int j = 0; j < g; ++j) {
        zm[j] += static_cast<double>(m[j]);
        pm += ctx.chars().p[j] * static_cast<double>(m[j]);
    }
    const cplx base = theta(ctx, z);
    const cplx shifted = theta(ctx, zm);
    return std::abs(shifted - std::exp(2.0 * pi * I * pm) * base) / (std::abs(base) + ctx.eps());
}

ConjugationResult conjugation_constant(const ThetaContext& ctx, int probes)
{
    const int g = ctx.genus();
    const auto& b = ctx.b();
    for (const auto& v : b.data())
        if (std::abs(2.0 * v.real() - std::round(2.0 * v.real())) > 1e-8)
            throw Error(ErrorCode::PreconditionRealPart, "2 Re(B) has a non-integer entry");
    if (probes < 10) throw Error(ErrorCode::InvalidArgument, "need at least 10 conjugation probes");
    if (2 * g > static_cast<int>(std::size(kPrimes)))
        throw Error(ErrorCode::InvalidArgument, "genus too large for the probe sequence");

    RVector s(g);
    const auto& ch = ctx.chars();
    for (int j = 0; j < g; ++j) {
        cplx bp = 0.0;
        for (int k = 0; k < g; ++k) bp += b(j, k) * ch.p[k];
        s[j] = -2.0 * (ch.q[j] + bp).real() + b(j, j).real();
    }
    auto image = [&](const CVector& z) {
        CVector w(g);
        for (int j = 0; j < g; ++j) w[j] = -std::conj(z[j]) + s[j];
        return w;
    };

    std::vector<CVector> pts{CVector(g, 0.0)};
    for (int k = 1; k <= probes; ++k) {
        CVector z(g);
        for (int j = 0; j < g; ++j) {
            const double r = std::sqrt(halton(k, kPrimes[2 * j]));
            const double phi = 2.0 * pi * halton(k, kPrimes[2 * j + 1]);
            z[j] = std::polar(r, phi);
        }
        pts.push_back(z);
    }

    std::vector<cplx> lhs, rhs;
    std::vector<double> scale;
    for (const auto& z : pts) {
        const ThetaValue t = ctx.evaluate(z);
        const ThetaValue u = ctx.evaluate(image(z));
        lhs.push_back(std::conj(t.value));
        rhs.push_back(u.value);
        scale.push_back(u.abs_sum);
    }
    ConjugationResult res;
    std::size_t anchor = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (std::abs(rhs[i]) > 1e3 * ctx.eps() * scale[i]) {
            anchor = i;
            break;
        }
    if (anchor == pts.size()) throw Error(ErrorCode::DegenerateProbe, "every probe hits a theta zero");
    res.alpha = lhs[anchor] / rhs[anchor];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const cplx r = res.alpha * rhs[i];
        const double den = std::max({std::abs(lhs[i]), std::abs(r), ctx.eps()});
        res.max_deviation = std::max(res.max_deviation, std::abs(lhs[i] - r) / den);
    }
    res.probes = static_cast<int>(pts.size()) - 1;
    return res;
}

Characteristics HalfIntegerCharacteristic::chars() const
{
    Characteristics c;
    c.p = p_star;
    c.q.assign(q_star.begin(), q_star.end());
    return c;
}

bool HalfIntegerCharacteristic::odd() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < p_star.size(); ++j) s += p_star[j] * q_star[j];
    return std::lround(4.0 * s) % 2 == 1;
}

std::vector<HalfIntegerCharacteristic> all_half_integer_characteristics(int g)
{
    std::vector<HalfIntegerCharacteristic> out;
    const unsigned long total = 1ul << (2 * g);
    for (unsigned long bits = 0; bits < total; ++bits) {
        HalfIntegerCharacteristic h{RVector(g), RVector(g)};
        // most significant bit is p_1, so counting order is lexicographic
        for (int j = 0; j < 2 * g; ++j) {
            const double v = (bits >> (2 * g - 1 - j)) & 1ul ? 0.5 : 0.0;
            (j < g ? h.p_star[j] : h.q_star[j - g]) = v;
        }
        out.push_back(std::move(h));
    }
    return out;
}

HalfIntegerCharacteristic find_odd_characteristic(const ComplexMatrix& b, double eps)
{
    const int g = static_cast<int>(b.rows());
    ThetaContext base(b, Characteristics::zero(g), eps);
    for (const auto& h : all_half_integer_characteristics(g)) {
        if (!h.odd()) continue;
        const ThetaContext ctx = base.with_chars(h.chars());
        const CVector zero(g, 0.0);
        const ThetaValue v = ctx.evaluate(zero);
        const double gnorm = std::sqrt([&] {
            double s = 0.0;
            for (const auto& c : ctx.gradient(zero)) s += std::norm(c);
            return s;
        }());
        if (std::abs(v.value) <= 1e-10 * v.abs_sum && gnorm >= 1e-6 * v.abs_sum) return h;
    }
    throw Error(ErrorCode::NoneFound, "no nonsingular odd half-integer characteristic");
}

FayTerms fay_terms(const ThetaContext& ctx, const HalfIntegerCharacteristic& odd, const CVector& a,
                   const CVector& b, const CVector& c, const CVector& d, const CVector& z)
{
    const int g = ctx.genus();
    for (const auto* v : {&a, &b, &c, &d, &z})
        if (static_cast<int>(v->size()) != g) throw Error(ErrorCode::InvalidArgument, "Fay argument length differs from genus");
    const ThetaContext star = ctx.with_chars(odd.chars());
    auto comb = [&](std::initializer_list<std::pair<double, const CVector*>> parts) {
        CVector w(g, 0.0);
        for (const auto& [k, v] : parts)
            for (int j = 0; j < g; ++j) w[j] += k * (*v)[j];
        return w;
    };
    auto e = [&](const CVector& x, const CVector& y) { return theta(star, comb({{1.0, &x}, {-1.0, &y}})); };
    auto th = [&](const CVector& w) { return theta(ctx, w); };

    FayTerms t;
    t.t1 = e(c, a) * e(d, b) * th(comb({{1.0, &z}, {1.0, &c}, {-1.0, &b}})) *
           th(comb({{1.0, &z}, {1.0, &d}, {-1.0, &a}}));
    t.t2 = e(c, b) * e(a, d) * th(comb({{1.0, &z}, {1.0, &c}, {-1.0, &a}})) *
           th(comb({{1.0, &z}, {1.0, &d}, {-1.0, &b}}));
    t.t3 = e(c, d) * e(a, b) * th(z) * th(comb({{1.0, &z}, {1.0, &d}, {-1.0, &a}, {1.0, &c}, {-1.0, &b}}));
    const double big = std::max({std::abs(t.t1), std::abs(t.t2), std::abs(t.t3)});
    if (big < ctx.eps()) throw Error(ErrorCode::DegenerateConfiguration, "all Fay terms vanish");
    t.residual = std::abs(t.t1 + t.t2 - t.t3) / std::max(big, ctx.eps());
    return t;
}

double fay_residual(const ThetaContext& ctx, const HalfIntegerCharacteristic& odd, const CVector& a,
                    const CVector& b, const CVector& c, const CVector& d, const CVector& z)
{
    return fay_terms(ctx, odd, a, b, c, d, z).residual;
}

}  // namespace ernst
