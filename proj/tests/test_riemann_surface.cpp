#include <doctest.h>

#include "ernst/curve.hpp"
#include "oracles.hpp"

using namespace ernst;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ernst::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("branch pair validation")
{
    CHECK_NOTHROW(validate_pair(BranchPair::conjugate({1.0, 2.0})));
    CHECK_NOTHROW(validate_pair(BranchPair::real(-1.0, 1.0)));
    CHECK(code_of([] { validate_pair(BranchPair::conjugate({1.0, -2.0})); }) == ErrorCode::InvalidSpectralData);
    CHECK(code_of([] { validate_pair(BranchPair::real(1.0, -1.0)); }) == ErrorCode::InvalidSpectralData);
    CHECK(code_of([] { validate_pair({cplx(1.0, 1.0), cplx(1.0, 2.0), PairKind::conjugate}); }) ==
          ErrorCode::InvalidSpectralData);
    CHECK(code_of([] { validate_pair({cplx(0.0, 0.1), 1.0, PairKind::real_pair}); }) == ErrorCode::InvalidSpectralData);
    CHECK(BranchPair::conjugate({0.0, 1.0}).sigma() == 1);
    CHECK(BranchPair::real(0.0, 1.0).sigma() == 0);
}

TEST_CASE("spectral data invariants")
{
    const SpectralData sd(0.5, 1.0, {BranchPair::conjugate({-1.0, 2.0}), BranchPair::real(1.0, 2.0)});
    CHECK(sd.genus() == 2);
    CHECK(sd.roots().size() == 6);
    CHECK(sd.cuts().size() == 3);
    CHECK(sd.xi() == cplx(0.5, 1.0));

    // y_plus squares to the polynomial and behaves like x^{g+1}
    for (cplx x : {cplx(3.0, 3.0), cplx(-2.0, 0.3), cplx(0.1, -4.0)})
        CHECK(std::abs(sd.y_plus(x) * sd.y_plus(x) - sd.y_squared(x)) <= 1e-12 * std::abs(sd.y_squared(x)));
    const cplx far(1e4, 3e3);
    CHECK(std::abs(sd.y_plus(far) / std::pow(far, 3) - 1.0) < 1e-3);

    const RealMatrix pat = sd.real_pattern();
    CHECK(pat(0, 0) == 0.0);
    CHECK(pat(1, 1) == -0.5);
    CHECK(pat(0, 1) == -0.5);

    CHECK(code_of([] { SpectralData(0.0, 1e-4, {BranchPair::real(-1.0, 1.0)}); }) == ErrorCode::InvalidSpectralData);
    CHECK(code_of([] { SpectralData(0.0, 1.0, {}); }) == ErrorCode::InvalidSpectralData);
    CHECK(code_of([] { SpectralData(0.0, 1.0, {BranchPair::conjugate({0.0, 1.0})}); }) == ErrorCode::InvalidSpectralData);
    // a conjugate cut on the same vertical line as the xi cut
    const SpectralData stacked(0.0, 1.0, {BranchPair::conjugate({0.0, 2.0})});
    CHECK(code_of([&] { raw_periods(stacked); }) == ErrorCode::ContourCollision);
}

TEST_CASE("track_sqrt along the imaginary axis")
{
    const CVector roots{-1.0, 1.0};
    CVector path;
    for (int k = 0; k <= 50; ++k) path.push_back(cplx(0.0, 1.0 + k / 50.0));
    const CVector y = track_sqrt(roots, path);
    REQUIRE(y.size() == path.size());
    // principal root at the start: sqrt(-2) = i sqrt(2)
    CHECK(std::abs(y[0] - cplx(0.0, std::sqrt(2.0))) <= 1e-15);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double t = path[k].imag();
        CHECK(std::abs(y[k] - cplx(0.0, std::sqrt(t * t + 1.0))) <= 1e-14);
    }
    const CVector other = track_sqrt(roots, path, cplx(0.0, -1.0));
    CHECK(std::abs(other.back() + y.back()) <= 1e-14);
}

TEST_CASE("track_sqrt single sample and coarse path")
{
    const CVector one = track_sqrt({-1.0, 1.0}, {cplx(0.0, 1.0)});
    REQUIRE(one.size() == 1);
    CHECK(std::abs(one[0] - cplx(0.0, std::sqrt(2.0))) <= 1e-15);

    // two samples straddling the root at 0: both candidate roots turn by pi/2
    CHECK(code_of([] { track_sqrt({0.0}, {cplx(1.0, 0.0), cplx(-1.0, 0.0)}); }) == ErrorCode::BranchJumpDetected);
}

TEST_CASE("a-period against the AGM oracle")
{
    const auto pair = BranchPair::conjugate({-2.0, 1.0});
    const SpectralData sd(0.0, 1.0, {pair});
    const RawPeriods raw = raw_periods(sd);
    const cplx xi(0.0, 1.0);
    REQUIRE(oracle::agm_applicable(xi, pair));
    const cplx a_agm = 2.0 * oracle::quartic_half_period_agm(std::conj(xi), pair.f, pair.e, xi);
    CHECK(std::abs(std::abs(raw.a(0, 0)) - std::abs(a_agm)) <= 1e-10 * std::abs(a_agm));
    // the Carlson segment integral is an independent second route
    const cplx a_rf = 2.0 * oracle::segment_integral(pair.f, pair.e, xi, std::conj(xi));
    CHECK(std::abs(std::abs(raw.a(0, 0)) - std::abs(a_rf)) <= 1e-10 * std::abs(a_rf));
}

TEST_CASE("raw periods converge under order doubling")
{
    const SpectralData sd(0.2, 0.8, {BranchPair::conjugate({-1.5, 0.7}), BranchPair::real(0.5, 1.7)});
    const RawPeriods r32 = raw_periods(sd, 32);
    const RawPeriods r64 = raw_periods(sd, 64);
    CHECK(max_abs(r32.a - r64.a) <= 1e-12 * max_abs(r64.a));
    CHECK(max_abs(r32.b - r64.b) <= 1e-12 * max_abs(r64.b));
    CHECK(code_of([&] { raw_periods(sd, 8); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("a-periods under the curve's symmetries")
{
    // zeta = 0 and pairs mirrored by x -> -conj(x); with y(x) ~ x^{g+1} this gives
    // A[2][m] = (-1)^{g+1} (-1)^m conj(A[1][m]); conjugation alone makes A imaginary
    const SpectralData sd(0.0, 1.0, {BranchPair::conjugate({-1.0, 0.5}), BranchPair::conjugate({1.0, 0.5})});
    const RawPeriods raw = raw_periods(sd);
    for (int m = 0; m < 2; ++m) {
        const double sign = m % 2 ? 1.0 : -1.0;
        CHECK(std::abs(raw.a(1, m) - sign * std::conj(raw.a(0, m))) <= 1e-12 * std::abs(raw.a(0, m)));
        for (int j = 0; j < 2; ++j) CHECK(std::abs(raw.a(j, m).real()) <= 1e-12 * std::abs(raw.a(j, m)));
    }
}

TEST_CASE("real part patterns of the period matrix")
{
    SUBCASE("conjugate pair")
    {
        const auto sol = riemann_matrix(SpectralData(0.3, 1.0, {BranchPair::conjugate({-2.0, 1.0})}));
        CHECK(std::abs(sol.riemann.b(0, 0).real()) <= 1e-8);
        CHECK(sol.riemann.b(0, 0).imag() > 0.0);
    }
    SUBCASE("real pair")
    {
        const auto sol = riemann_matrix(SpectralData(0.3, 1.0, {BranchPair::real(1.0, 2.5)}));
        CHECK(std::abs(sol.riemann.b(0, 0).real() + 0.5) <= 1e-8);
    }
    SUBCASE("mixed genus 2")
    {
        const auto sol =
            riemann_matrix(SpectralData(0.0, 1.0, {BranchPair::conjugate({-1.5, 1.2}), BranchPair::real(0.8, 2.0)}));
        const RealMatrix expect{{0.0, -0.5}, {-0.5, -0.5}};
        CHECK(max_abs(real_part(sol.riemann.b) - expect) <= 1e-8);
        CHECK(sol.riemann.symmetry_defect <= 1e-8);
        CHECK(max_abs(sol.riemann.b - sol.riemann.b.transpose()) == 0.0);
        const RealMatrix l = sol.riemann.chol_im;
        CHECK(max_abs(l * l.transpose() - imag_part(sol.riemann.b)) <= 1e-12);
        CHECK(std::abs(sol.riemann.delta[0]) <= 1e-8);
        CHECK(std::abs(sol.riemann.delta[1] + 0.5) <= 1e-8);
    }
}

TEST_CASE("normalized differentials have unit a-periods")
{
    const SpectralData sd(-0.4, 0.9, {BranchPair::conjugate({1.0, 1.5}), BranchPair::real(-3.0, -2.0),
                                      BranchPair::conjugate({-1.2, 0.4})});
    const RawPeriods raw = raw_periods(sd);
    const auto sol = riemann_matrix(sd);
    // a-periods of omega_k are sum_m C(k, m) A_raw(j, m)
    const ComplexMatrix norm = raw.a * sol.basis.coeffs.transpose();
    const RealMatrix flip = [&] {
        RealMatrix d(3, 3);
        for (int j = 0; j < 3; ++j) d(j, j) = sol.riemann.orientation[j];
        return d;
    }();
    CHECK(max_abs(to_complex(flip) * norm - ComplexMatrix::identity(3)) <= 1e-9);
}

TEST_CASE("lemniscatic curve: xi = i with the real pair (-1, 1)")
{
    const SpectralData sd(0.0, 1.0, {BranchPair::real(-1.0, 1.0)});
    const RawPeriods raw = raw_periods(sd);
    // y^2 = x^4 - 1: a-period 2 sqrt(2) K(1/sqrt 2) with K from the AGM
    const double a_k = std::sqrt(2.0) * oracle::pi / std::abs(oracle::agm(1.0, std::sqrt(0.5)));
    CHECK(std::abs(std::abs(raw.a(0, 0)) - a_k) <= 1e-10 * a_k);

    const Surface s = build_surface(sd);
    const auto ref = oracle::genus1_reference(sd.xi(), sd.pairs()[0], false);
    CHECK(std::abs(s.riemann.b(0, 0).imag() - ref.tau.imag()) <= 1e-9);
    // the square lattice, reduced to Re = -1/2
    CHECK(std::abs(s.riemann.b(0, 0) - cplx(-0.5, 0.5)) <= 1e-9);
    CHECK(std::abs(s.abel.to_inf_plus[0] - ref.v) <= 1e-9);
}

TEST_CASE("Abel vectors to infinity")
{
    const SpectralData sd(0.1, 0.7, {BranchPair::real(-2.5, -1.0), BranchPair::conjugate({1.3, 0.9})});
    const Surface s = build_surface(sd);
    for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(2.0 * s.abel.to_inf_plus[j].real() - 0.5) <= 2e-8);
        CHECK(s.abel.to_inf_plus[j] + s.abel.to_inf_minus[j] == cplx(0.0));
        CHECK(s.abel.half_lattice[j] == 0.5);
    }
}

TEST_CASE("abel_map endpoints")
{
    const SpectralData sd(0.0, 1.0, {BranchPair::conjugate({-2.0, 1.0}), BranchPair::real(1.0, 2.0)});
    const Surface s = build_surface(sd);
    // the two sheets give opposite vectors
    const cplx x(0.7, 2.3);
    const CVector up = abel_map(s, x, 1);
    const CVector down = abel_map(s, x, -1);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(up[j] + down[j]) <= 1e-12);
    // far along the ray the map approaches the Abel vector to infinity modulo the lattice
    const CVector far = abel_map(s, cplx(0.0, 1e6), 1);
    for (int j = 0; j < 2; ++j) {
        const cplx d = far[j] - s.abel.to_inf_plus[j];
        CHECK(std::abs(d.real() - std::round(d.real())) <= 1e-5);
    }
    CHECK(code_of([&] { abel_map(s, cplx(1.0, 0.0), 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("randomized sweep keeps every invariant")
{
    oracle::Generator gen(2024);
    for (int g = 1; g <= 3; ++g) {
        for (int k = 0; k < 6; ++k) {
            const auto d = gen.draw(g);
            const SpectralData sd(d.zeta, d.rho, d.pairs);
            const Surface s = build_surface(sd);
            CHECK(max_abs(real_part(s.riemann.b) - sd.real_pattern()) <= 1e-8);
            CHECK(s.riemann.symmetry_defect <= 1e-8);
            CHECK(min_eigenvalue_spd(imag_part(s.riemann.b)) > 0.0);
            for (const cplx& v : s.abel.to_inf_plus) CHECK(std::abs(v.real() - 0.25) <= 1e-8);
        }
    }
}

TEST_CASE("period matrix is continuous in xi")
{
    const std::vector<BranchPair> pairs{BranchPair::conjugate({-1.0, 1.5}), BranchPair::real(1.0, 2.0)};
    const auto b0 = riemann_matrix(SpectralData(0.0, 1.0, pairs)).riemann.b;
    double prev = 0.0;
    for (double delta : {1e-3, 5e-4, 2.5e-4}) {
        const auto b1 = riemann_matrix(SpectralData(delta, 1.0, pairs)).riemann.b;
        const double diff = max_abs(b1 - b0);
        if (prev > 0.0) CHECK(prev / diff == doctest::Approx(2.0).epsilon(0.05));
        prev = diff;
    }
}
