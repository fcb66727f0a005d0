#include "ernst/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ernst/quadrature.hpp"

namespace ernst {

namespace {

constexpr int kMaxChebyshevOrder = 16384;
constexpr double kChebyshevTol = 1e-13;
constexpr double kPanelRatio = 2.0;
constexpr int kMaxPanelDepth = 48;

std::string fmt(cplx z)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real() << "," << z.imag() << ")";
    return os.str();
}

double point_segment_distance(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool segments_intersect(cplx a, cplx b, cplx c, cplx d)
{
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
           d4 != 0;
}

double segment_distance(cplx a, cplx b, cplx c, cplx d)
{
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

// ---------------------------------------------------------------- paths

enum class LegMap { linear, sqrt_start, sqrt_end, inverse_tail };

// A leg of an integration path in path order. For sqrt maps the branch point
// sits at the start (sqrt_start) or end (sqrt_end); inverse_tail runs from
// zeta + iY up to infinity.
struct Leg {
    cplx p0;
    cplx p1;
    LegMap map = LegMap::linear;
    int singular_root = -1;
};

struct Node {
    cplx x;
    cplx dx;  // includes the quadrature weight
    cplx y2;
};

struct LegParam {
    cplx x;
    cplx dxds;
    cplx offset;  // x - singular root, computed without cancellation
};

LegParam leg_eval(const Leg& leg, double s)
{
    const cplx d = leg.p1 - leg.p0;
    switch (leg.map) {
    case LegMap::linear:
        return {leg.p0 + d * s, d, 0.0};
    case LegMap::sqrt_start:
        return {leg.p0 + d * (s * s), 2.0 * d * s, d * (s * s)};
    case LegMap::sqrt_end:
        return {leg.p1 - d * (s * s), 2.0 * d * s, -d * (s * s)};
    case LegMap::inverse_tail: {
        // p0 = zeta + iY, x = zeta + iY/s
        const cplx iy = leg.p0 - cplx(leg.p0.real(), 0.0);
        return {leg.p0.real() + iy / s, iy / (s * s), 0.0};
    }
    }
    return {};
}

// Pre-images of a root in the leg parameter.
void root_images(const Leg& leg, cplx r, std::vector<cplx>& out)
{
    const cplx d = leg.p1 - leg.p0;
    switch (leg.map) {
    case LegMap::linear:
        out.push_back((r - leg.p0) / d);
        break;
    case LegMap::sqrt_start: {
        const cplx u = std::sqrt((r - leg.p0) / d);
        out.push_back(u);
        out.push_back(-u);
        break;
    }
    case LegMap::sqrt_end: {
        const cplx u = std::sqrt((leg.p1 - r) / d);
        out.push_back(u);
        out.push_back(-u);
        break;
    }
    case LegMap::inverse_tail: {
        const cplx iy = leg.p0 - cplx(leg.p0.real(), 0.0);
        const cplx den = r - leg.p0.real();
        if (std::abs(den) > 0.0) out.push_back(iy / den);
        break;
    }
    }
}

void split_panels(double a, double b, const std::vector<cplx>& images, int depth,
                  std::vector<std::pair<double, double>>& panels)
{
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    bool ok = true;
    for (const auto& z : images)
        if (std::abs(z - c) < kPanelRatio * hw) {
            ok = false;
            break;
        }
    if (ok || depth >= kMaxPanelDepth) {
        panels.emplace_back(a, b);
        return;
    }
    split_panels(a, c, images, depth + 1, panels);
    split_panels(c, b, images, depth + 1, panels);
}

std::vector<Node> path_nodes(const SpectralData& sd, const std::vector<Leg>& legs, int order)
{
    const CVector roots = sd.roots();
    const auto& gl = gauss_legendre(order);
    std::vector<Node> nodes;
    for (const auto& leg : legs) {
        std::vector<cplx> images;
        for (std::size_t k = 0; k < roots.size(); ++k)
            if (static_cast<int>(k) != leg.singular_root) root_images(leg, roots[k], images);
        std::vector<std::pair<double, double>> panels;
        split_panels(0.0, 1.0, images, 0, panels);

        std::vector<Node> leg_nodes;
        for (const auto& [a, b] : panels) {
            const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
            for (int i = 0; i < gl.order; ++i) {
                const double s = c + hw * gl.nodes[i];
                const LegParam lp = leg_eval(leg, s);
                cplx y2 = 1.0;
                for (std::size_t k = 0; k < roots.size(); ++k)
                    y2 *= static_cast<int>(k) == leg.singular_root ? lp.offset : lp.x - roots[k];
                leg_nodes.push_back({lp.x, lp.dxds * (hw * gl.weights[i]), y2});
            }
        }
        // sqrt_end and the tail run against the path direction; leg_eval already
        // returns -dx/ds for them, so only the node order needs flipping
        if (leg.map == LegMap::sqrt_end || leg.map == LegMap::inverse_tail)
            std::reverse(leg_nodes.begin(), leg_nodes.end());
        nodes.insert(nodes.end(), leg_nodes.begin(), leg_nodes.end());
    }
    return nodes;
}

struct PathResult {
    CVector integrals;
    cplx y_end;
};

// sum x^m dx / y over the nodes, y tracked from the + sheet value at the first node
PathResult integrate_path(const SpectralData& sd, const std::vector<Leg>& legs, int order,
                          std::optional<cplx> y_start = std::nullopt)
{
    const auto nodes = path_nodes(sd, legs, order);
    const int g = sd.genus();
    CVector y(nodes.size());
    cplx prev = y_start ? *y_start : sd.y_plus(nodes.front().x);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        cplx r = std::sqrt(nodes[i].y2);
        if (std::abs(r - prev) > std::abs(-r - prev)) r = -r;
        if (i > 0 && std::abs(std::arg(r / prev)) > 0.25 * pi)
            throw Error(ErrorCode::BranchJumpDetected, "path node " + std::to_string(i) + " at " + fmt(nodes[i].x));
        y[i] = r;
        prev = r;
    }
    CVector out(g);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const cplx f = nodes[i].dx / y[i];
        cplx xm = 1.0;
        for (int m = 0; m < g; ++m) {
            out[m] += xm * f;
            xm *= nodes[i].x;
        }
    }
    return {out, y.back()};
}

double root_scale(const SpectralData& sd)
{
    double s = 0.0;
    for (const auto& r : sd.roots()) s = std::max(s, std::abs(r));
    return s;
}

// ---------------------------------------------------------------- geometry checks

void check_configuration(const SpectralData& sd)
{
    const auto& cuts = sd.cuts();
    const auto& pairs = sd.pairs();
    const double sep = sd.tolerances().sep_min;
    for (std::size_t j = 1; j < cuts.size(); ++j) {
        if (point_segment_distance(sd.xi(), cuts[j].s0, cuts[j].s1) < sep)
            throw Error(ErrorCode::ContourCollision, "xi lies on the cut of pair " + std::to_string(j - 1));
        if (pairs[j - 1].kind == PairKind::conjugate &&
            std::abs(pairs[j - 1].e.real() - sd.zeta()) < sep)
            throw Error(ErrorCode::ContourCollision, "cut of pair " + std::to_string(j - 1) + " overlaps the xi cut");
        for (std::size_t k = j + 1; k < cuts.size(); ++k)
            if (segment_distance(cuts[j].s0, cuts[j].s1, cuts[k].s0, cuts[k].s1) < sep)
                throw Error(ErrorCode::ContourCollision,
                            "cuts of pairs " + std::to_string(j - 1) + " and " + std::to_string(k - 1) + " meet");
    }
}

// Straight segments of a route, excluding the cut the route starts on and the one it ends on.
bool route_clear(const SpectralData& sd, const std::vector<cplx>& pts, int own_cut, double clearance)
{
    const auto& cuts = sd.cuts();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        for (std::size_t c = 1; c < cuts.size(); ++c) {
            if (static_cast<int>(c) == own_cut) continue;
            if (segment_distance(pts[i], pts[i + 1], cuts[c].s0, cuts[c].s1) < clearance) return false;
        }
        if (i > 0 && segment_distance(pts[i], pts[i + 1], cuts[0].s0, cuts[0].s1) < clearance) return false;
        if (point_segment_distance(std::conj(sd.xi()), pts[i], pts[i + 1]) < clearance) return false;
    }
    // leaving xi straight down would run along its own cut
    const cplx lead = (pts[1] - pts[0]) / std::abs(pts[1] - pts[0]);
    if (std::abs(lead + I) < 1e-6) return false;
    // the own cut may only be touched at the route's end point
    const Cut& own = cuts[own_cut];
    for (std::size_t i = 0; i + 2 < pts.size(); ++i)
        if (segment_distance(pts[i], pts[i + 1], own.s0, own.s1) < clearance) return false;
    const cplx last0 = pts[pts.size() - 2], last1 = pts.back();
    const cplx other = std::abs(own.s1 - last1) < std::abs(own.s0 - last1) ? own.s0 : own.s1;
    if (point_segment_distance(other, last0, last1) < clearance) return false;
    const cplx dir = (last1 - last0) / std::abs(last1 - last0);
    const cplx cdir = (other - last1) / std::abs(other - last1);
    if (std::abs(cross(dir, cdir)) < 1e-12 && (dir * std::conj(cdir)).real() < 0) return false;
    return true;
}

std::vector<Leg> legs_from_points(const std::vector<cplx>& pts, int start_root, int end_root)
{
    std::vector<Leg> legs;
    if (pts.size() == 2 && end_root < 0) {
        legs.push_back({pts[0], pts[1], LegMap::sqrt_start, start_root});
        return legs;
    }
    if (pts.size() == 2) {
        const cplx mid = 0.5 * (pts[0] + pts[1]);
        legs.push_back({pts[0], mid, LegMap::sqrt_start, start_root});
        legs.push_back({mid, pts[1], LegMap::sqrt_end, end_root});
        return legs;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        LegMap m = LegMap::linear;
        int root = -1;
        if (i == 0) {
            m = LegMap::sqrt_start;
            root = start_root;
        } else if (i + 2 == pts.size() && end_root >= 0) {
            m = LegMap::sqrt_end;
            root = end_root;
        }
        legs.push_back({pts[i], pts[i + 1], m, root});
    }
    return legs;
}

// Route from xi to E_j: straight when it keeps clear of foreign cuts, otherwise
// over the top of every branch point.
std::vector<cplx> b_route(const SpectralData& sd, int j)
{
    const cplx xi = sd.xi();
    const cplx e = sd.pairs()[j].e;
    const int own = j + 1;
    std::vector<cplx> straight{xi, e};
    if (route_clear(sd, straight, own, 0.05 * std::abs(e - xi))) return straight;

    double top = 0.0, lo = 0.0, hi = 0.0;
    for (const auto& r : sd.roots()) {
        top = std::max(top, r.imag());
        lo = std::min(lo, r.real());
        hi = std::max(hi, r.real());
    }
    const double h = top + 0.5 * std::max(1.0, hi - lo);
    std::vector<cplx> stair{xi, cplx(sd.zeta(), h)};
    if (std::abs(e.real() - sd.zeta()) > 0.0) stair.push_back(cplx(e.real(), h));
    stair.push_back(e);
    if (route_clear(sd, stair, own, sd.tolerances().sep_min)) return stair;
    throw Error(ErrorCode::ContourCollision, "no clear b-cycle route to pair " + std::to_string(j));
}

ComplexMatrix b_periods(const SpectralData& sd, int order)
{
    const int g = sd.genus();
    ComplexMatrix b(g, g);
    for (int j = 0; j < g; ++j) {
        const auto pts = b_route(sd, j);
        // root indices: 0 xi, 1 conj xi, 2 + 2j E_j
        const auto res = integrate_path(sd, legs_from_points(pts, 0, 2 + 2 * j), order);
        for (int m = 0; m < g; ++m) b(j, m) = 2.0 * res.integrals[m];
    }
    return b;
}

// Counterclockwise loop around cut `c` on the + sheet, as twice the integral
// s0 -> s1 along its right-hand side.
CVector a_period(const SpectralData& sd, std::size_t c, int order, int& used_order)
{
    const int g = sd.genus();
    const auto& cuts = sd.cuts();
    const Cut& cut = cuts[c];
    const cplx mid = cut.mid(), half = cut.half();
    CVector others;
    const CVector roots = sd.roots();
    for (const auto& r : roots)
        if (r != cut.s0 && r != cut.s1) others.push_back(r);

    auto eval = [&](int n) {
        const auto rule = quadrature_nodes(QuadratureKind::gauss_chebyshev, n);
        CVector xs(n);
        for (int k = 0; k < n; ++k) xs[k] = mid + half * rule.nodes[k];
        // Right-hand limit of the own factor is -i*half*sqrt(1-t^2) while y = i*half*sqrt(1-t^2)*r.
        cplx hint = -1.0;
        for (std::size_t o = 0; o < cuts.size(); ++o)
            if (o != c) hint *= cuts[o].factor(xs[0]);
        const CVector r = track_sqrt(others, xs, hint);
        CVector row(g);
        for (int k = 0; k < n; ++k) {
            cplx xm = 1.0;
            for (int m = 0; m < g; ++m) {
                row[m] += xm / r[k];
                xm *= xs[k];
            }
        }
        for (auto& v : row) v *= 2.0 * (-I) * (pi / n);
        return row;
    };

    int n = std::max(order, 16);
    CVector prev;
    bool have_prev = false;
    double change = 0.0;
    for (; n <= kMaxChebyshevOrder; n *= 2) {
        CVector cur;
        try {
            cur = eval(n);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BranchJumpDetected) throw;
            have_prev = false;
            continue;
        }
        if (have_prev) {
            double diff = 0.0, scale = 0.0;
            for (int m = 0; m < g; ++m) {
                diff = std::max(diff, std::abs(cur[m] - prev[m]));
                scale = std::max(scale, std::abs(cur[m]));
            }
            change = diff / scale;
            if (change <= kChebyshevTol) {
                used_order = n;
                return cur;
            }
        }
        prev = cur;
        have_prev = true;
    }
    if (have_prev && change <= sd.tolerances().tol_period) {
        used_order = kMaxChebyshevOrder;
        return prev;
    }
    throw Error(ErrorCode::QuadratureNotConverged,
                "a-period of pair " + std::to_string(c - 1) + ", last relative change " + std::to_string(change));
}

struct Normalized {
    PeriodSolution periods;
    CVector abel;  // already shifted to Re = 1/4
};

Normalized normalize(const SpectralData& sd, const RawPeriods& raw, const CVector& phi)
{
    const int g = sd.genus();
    const auto& tol = sd.tolerances();
    ComplexMatrix braw = raw.b;
    const ComplexMatrix ainv = inverse(raw.a);
    ComplexMatrix b = braw * ainv;
    for (int j = 0; j < g; ++j)
        if (b(j, j).imag() < 0)
            for (int k = 0; k < g; ++k) b(j, k) = -b(j, k);

    ComplexMatrix c = ainv.transpose();
    CVector v = multiply(c, phi);
    std::vector<int> d(g, 1);
    for (int j = 0; j < g; ++j) {
        const double frac = v[j].real() - std::floor(v[j].real());
        if (std::abs(frac - 0.25) <= tol.tol_abel)
            d[j] = 1;
        else if (std::abs(frac - 0.75) <= tol.tol_abel)
            d[j] = -1;
        else
            throw Error(ErrorCode::AbelRealPartUnresolvable,
                        "component " + std::to_string(j) + " has real part " + std::to_string(v[j].real()));
    }
    for (int j = 0; j < g; ++j) {
        v[j] *= static_cast<double>(d[j]);
        for (int k = 0; k < g; ++k) {
            b(j, k) *= static_cast<double>(d[j] * d[k]);
            c(j, k) *= static_cast<double>(d[j]);
        }
    }

    const RealMatrix pattern = sd.real_pattern();
    Matrix<long> shift(g, g);
    double resid = 0.0;
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k) {
            const double dev = b(j, k).real() - pattern(j, k);
            shift(j, k) = std::lround(dev);
            resid = std::max(resid, std::abs(dev - static_cast<double>(shift(j, k))));
        }
    if (resid > tol.tol_real) {
        std::ostringstream os;
        os.precision(12);
        os << "Re(B) off the half-integer pattern by " << resid << "; Re(B) =";
        for (int j = 0; j < g; ++j) {
            os << " [";
            for (int k = 0; k < g; ++k) os << (k ? " " : "") << b(j, k).real();
            os << "]";
        }
        throw Error(ErrorCode::RealPartMismatch, os.str());
    }
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k) b(j, k) -= static_cast<double>(shift(j, k));

    double sym = 0.0;
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k) sym = std::max(sym, std::abs(b(j, k) - b(k, j)));
    if (sym > tol.tol_sym)
        throw Error(ErrorCode::PeriodMatrixInvalid, "period matrix asymmetric by " + std::to_string(sym));
    for (int j = 0; j < g; ++j)
        for (int k = j + 1; k < g; ++k) b(j, k) = b(k, j) = 0.5 * (b(j, k) + b(k, j));

    // a-periods of the normalized differentials
    ComplexMatrix a_oriented = raw.a;
    for (int j = 0; j < g; ++j)
        for (int m = 0; m < g; ++m) a_oriented(j, m) *= static_cast<double>(d[j]);
    const double norm_defect = max_abs(a_oriented * c.transpose() - ComplexMatrix::identity(g));
    if (norm_defect > tol.tol_period)
        throw Error(ErrorCode::SingularMatrix, "a-normalization defect " + std::to_string(norm_defect));

    RiemannMatrix rm;
    rm.b = b;
    rm.r = real_part(b);
    rm.r_pattern = pattern;
    try {
        rm.chol_im = cholesky_spd(imag_part(b));
    } catch (const Error& e) {
        throw Error(ErrorCode::PeriodMatrixInvalid, std::string("Im(B) not positive definite: ") + e.what());
    }
    rm.delta.resize(g);
    for (int j = 0; j < g; ++j) rm.delta[j] = rm.r(j, j);
    rm.b_cycle_shift = shift;
    rm.orientation = d;
    rm.symmetry_defect = sym;

    for (int j = 0; j < g; ++j) v[j] -= std::round(v[j].real() - 0.25);
    return {{DifferentialBasis{c}, rm}, v};
}

AbelData make_abel(const CVector& v)
{
    AbelData ad;
    ad.to_inf_plus = v;
    ad.to_inf_minus.resize(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) ad.to_inf_minus[j] = -v[j];
    ad.half_lattice.assign(v.size(), 0.5);
    return ad;
}

}  // namespace

// ---------------------------------------------------------------- public

void validate_pair(const BranchPair& p)
{
    if (!std::isfinite(p.e.real()) || !std::isfinite(p.e.imag()) || !std::isfinite(p.f.real()) ||
        !std::isfinite(p.f.imag()))
        throw Error(ErrorCode::InvalidSpectralData, "non-finite branch point");
    if (p.kind == PairKind::conjugate) {
        if (std::abs(p.f - std::conj(p.e)) > 1e-14 * std::max(1.0, std::abs(p.e)))
            throw Error(ErrorCode::InvalidSpectralData, "conjugate pair with f != conj(e): " + fmt(p.e) + " " + fmt(p.f));
        if (!(p.e.imag() > 0))
            throw Error(ErrorCode::InvalidSpectralData, "conjugate pair needs Im(e) > 0: " + fmt(p.e));
    } else {
        if (p.e.imag() != 0.0 || p.f.imag() != 0.0)
            throw Error(ErrorCode::InvalidSpectralData, "real pair with complex entries: " + fmt(p.e) + " " + fmt(p.f));
        if (!(p.e.real() < p.f.real()))
            throw Error(ErrorCode::InvalidSpectralData, "real pair needs e < f");
    }
}

cplx Cut::factor(cplx x) const
{
    const cplx w = x - mid();
    const cplx q = half() / w;
    return w * std::sqrt(1.0 - q * q);
}

SpectralData::SpectralData(double zeta, double rho, std::vector<BranchPair> pairs, CurveTolerances tol)
    : zeta_(zeta), rho_(rho), pairs_(std::move(pairs)), tol_(tol)
{
    if (!std::isfinite(zeta_) || !std::isfinite(rho_))
        throw Error(ErrorCode::InvalidSpectralData, "non-finite world point");
    if (pairs_.empty()) throw Error(ErrorCode::InvalidSpectralData, "genus must be >= 1");
    if (rho_ < tol_.rho_min)
        throw Error(ErrorCode::InvalidSpectralData, "rho = " + std::to_string(rho_) + " below rho_min");
    for (const auto& p : pairs_) validate_pair(p);
    const CVector rs = roots();
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = i + 1; j < rs.size(); ++j)
            if (std::abs(rs[i] - rs[j]) < tol_.sep_min)
                throw Error(ErrorCode::InvalidSpectralData, "branch points " + fmt(rs[i]) + " and " + fmt(rs[j]) + " coincide");

    cuts_.push_back({std::conj(xi()), xi()});
    for (const auto& p : pairs_)
        cuts_.push_back(p.kind == PairKind::conjugate ? Cut{p.f, p.e} : Cut{p.e, p.f});
}

CVector SpectralData::roots() const
{
    CVector r{xi(), std::conj(xi())};
    for (const auto& p : pairs_) {
        r.push_back(p.e);
        r.push_back(p.f);
    }
    return r;
}

cplx SpectralData::y_squared(cplx x) const
{
    cplx v = 1.0;
    for (const auto& r : roots()) v *= x - r;
    return v;
}

cplx SpectralData::y_plus(cplx x) const
{
    cplx v = 1.0;
    for (const auto& c : cuts_) v *= c.factor(x);
    return v;
}

RealMatrix SpectralData::real_pattern() const
{
    const int g = genus();
    RealMatrix r(g, g, -0.5);
    for (int i = 0; i < g; ++i)
        if (pairs_[i].kind == PairKind::conjugate) r(i, i) = 0.0;
    return r;
}

CVector track_sqrt(const CVector& poly_roots, const CVector& path, std::optional<cplx> hint)
{
    CVector out;
    out.reserve(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        cplx y2 = 1.0;
        for (const auto& r : poly_roots) y2 *= path[i] - r;
        cplx y = std::sqrt(y2);
        if (i == 0) {
            if (hint && std::abs(y - *hint) > std::abs(-y - *hint)) y = -y;
        } else {
            const cplx prev = out.back();
            if (std::abs(y - prev) > std::abs(-y - prev)) y = -y;
            if (std::abs(std::arg(y / prev)) > 0.25 * pi)
                throw Error(ErrorCode::BranchJumpDetected,
                            "sample " + std::to_string(i) + " at " + fmt(path[i]) + " jumps from " + fmt(prev));
        }
        out.push_back(y);
    }
    return out;
}

RawPeriods raw_periods(const SpectralData& sd, int order)
{
    if (order < 16) throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 16");
    check_configuration(sd);
    const int g = sd.genus();
    RawPeriods raw;
    raw.a = ComplexMatrix(g, g);
    raw.a_orders.resize(g);
    for (int j = 0; j < g; ++j) {
        const CVector row = a_period(sd, j + 1, order, raw.a_orders[j]);
        for (int m = 0; m < g; ++m) raw.a(j, m) = row[m];
    }
    raw.b = b_periods(sd, order);
    return raw;
}

CVector abel_ray_raw(const SpectralData& sd, int order)
{
    check_configuration(sd);
    const double y_top = std::max(2.0 * root_scale(sd), 2.0 * sd.rho());
    const cplx top(sd.zeta(), y_top);
    std::vector<Leg> legs{{sd.xi(), top, LegMap::sqrt_start, 0}, {top, top, LegMap::inverse_tail, -1}};
    return integrate_path(sd, legs, order).integrals;
}

PeriodSolution riemann_matrix(const SpectralData& sd, int order)
{
    return normalize(sd, raw_periods(sd, order), abel_ray_raw(sd, order)).periods;
}

AbelData abel_to_infinity(const SpectralData& sd, const DifferentialBasis& basis, int order)
{
    CVector v = multiply(basis.coeffs, abel_ray_raw(sd, order));
    const double tol = sd.tolerances().tol_abel;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double shift = std::round(v[j].real() - 0.25);
        if (std::abs(v[j].real() - shift - 0.25) > tol)
            throw Error(ErrorCode::AbelRealPartUnresolvable,
                        "component " + std::to_string(j) + " has real part " + std::to_string(v[j].real()));
        v[j] -= shift;
    }
    return make_abel(v);
}

Surface build_surface(const SpectralData& sd, int order)
{
    auto n = normalize(sd, raw_periods(sd, order), abel_ray_raw(sd, order));
    return {sd, n.periods.basis, n.periods.riemann, make_abel(n.abel)};
}

CVector abel_map(const Surface& s, cplx x, int sheet, int order)
{
    const SpectralData& sd = s.sd;
    for (const auto& r : sd.roots())
        if (std::abs(x - r) < sd.tolerances().sep_min)
            throw Error(ErrorCode::InvalidArgument, "abel_map target is a branch point");
    const CVector roots = sd.roots();
    double top = x.imag(), lo = x.real(), hi = x.real();
    for (const auto& r : roots) {
        top = std::max(top, r.imag());
        lo = std::min(lo, r.real());
        hi = std::max(hi, r.real());
    }
    const double width = std::max(1.0, hi - lo);
    top += 0.5 * width;
    // up from xi, across above every branch point, then straight to x; the final
    // leg is tilted until it passes no branch point closely
    std::vector<cplx> pts;
    for (double tilt : {0.0, 0.173, -0.173, 0.359, -0.359, 0.611, -0.611}) {
        const cplx corner(x.real() + tilt * width, top);
        std::vector<cplx> cand{sd.xi(), cplx(sd.zeta(), top)};
        if (corner.real() != sd.zeta()) cand.push_back(corner);
        cand.push_back(x);
        double clear = INFINITY;
        for (std::size_t i = 1; i + 1 < cand.size(); ++i)
            for (const auto& r : roots) clear = std::min(clear, point_segment_distance(r, cand[i], cand[i + 1]));
        if (clear > 1e-2 * width) {
            pts = cand;
            break;
        }
    }
    if (pts.empty()) throw Error(ErrorCode::ContourCollision, "no clear path to " + fmt(x));
    const auto raw = integrate_path(sd, legs_from_points(pts, 0, -1), order);
    CVector v = multiply(s.basis.coeffs, raw.integrals);
    if (sheet < 0)
        for (auto& c : v) c = -c;
    return v;
}

}  // namespace ernst
