#include <doctest.h>

#include <random>

#include "ernst/linalg.hpp"
#include "ernst/quadrature.hpp"

using namespace ernst;

namespace {

double max_diff(const RealMatrix& a, const RealMatrix& b) { return max_abs(a - b); }

RealMatrix random_spd(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> nd;
    RealMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = nd(rng);
    RealMatrix s = m * m.transpose();
    for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.5;
    return s;
}

}  // namespace

TEST_CASE("cholesky of identity and diagonal")
{
    CHECK(max_diff(cholesky_spd(RealMatrix::identity(2)), RealMatrix::identity(2)) == 0.0);
    const RealMatrix d{{4.0, 0.0}, {0.0, 9.0}};
    CHECK(max_diff(cholesky_spd(d), RealMatrix{{2.0, 0.0}, {0.0, 3.0}}) == 0.0);
}

TEST_CASE("cholesky multiplies back")
{
    const RealMatrix m{{2.0, 1.0}, {1.0, 2.0}};
    const RealMatrix l = cholesky_spd(m);
    CHECK(l(0, 1) == 0.0);
    CHECK(max_diff(l * l.transpose(), m) <= 1e-14);

    std::mt19937_64 rng(11);
    for (std::size_t n = 1; n <= 8; ++n) {
        const RealMatrix s = random_spd(rng, n);
        const RealMatrix f = cholesky_spd(s);
        CHECK(max_diff(f * f.transpose(), s) <= 1e-12 * max_abs(s));
    }
}

TEST_CASE("cholesky rejects indefinite and asymmetric input")
{
    const RealMatrix indef{{1.0, 2.0}, {2.0, 1.0}};
    try {
        cholesky_spd(indef);
        FAIL("expected NotPositiveDefinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    }
    const RealMatrix asym{{2.0, 1.0}, {0.0, 2.0}};
    CHECK_THROWS_AS(cholesky_spd(asym), Error);
}

TEST_CASE("cholesky_solve")
{
    const RealMatrix m{{4.0, 2.0}, {2.0, 3.0}};
    const RVector x = cholesky_solve(cholesky_spd(m), {2.0, 1.0});
    const RVector back = multiply(m, x);
    CHECK(back[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(back[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve_linear examples")
{
    const ComplexMatrix b{{1.0, 2.0}, {cplx(0.0, 3.0), -1.0}};
    CHECK(max_abs(solve_linear(ComplexMatrix::identity(2), b) - b) == 0.0);

    const ComplexMatrix a{{cplx(0.0, 2.0), 0.0}, {0.0, -1.0}};
    const ComplexMatrix x = solve_linear(a, ComplexMatrix::identity(2));
    CHECK(std::abs(x(0, 0) - cplx(0.0, -0.5)) <= 1e-15);
    CHECK(std::abs(x(1, 1) + 1.0) <= 1e-15);
    CHECK(std::abs(x(0, 1)) == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m(3, 3), rhs(3, 2);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) m(i, j) = {nd(rng), nd(rng)};
            for (std::size_t j = 0; j < 2; ++j) rhs(i, j) = {nd(rng), nd(rng)};
        }
        const ComplexMatrix sol = solve_linear(m, rhs);
        CHECK(max_abs(m * sol - rhs) <= 1e-10 * max_abs(rhs));
    }
}

TEST_CASE("solve_linear flags singular matrices")
{
    const ComplexMatrix s{{1.0, 2.0}, {2.0, 4.0}};
    try {
        solve_linear(s, ComplexMatrix::identity(2));
        FAIL("expected SingularMatrix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularMatrix);
    }
}

TEST_CASE("inverse and smallest eigenvalue")
{
    const ComplexMatrix a{{2.0, cplx(0.0, 1.0)}, {1.0, 3.0}};
    CHECK(max_abs(a * inverse(a) - ComplexMatrix::identity(2)) <= 1e-14);
    const RealMatrix m{{2.0, 1.0}, {1.0, 2.0}};
    CHECK(min_eigenvalue_spd(m) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("close uses the hybrid tolerance")
{
    CHECK(close(1.0, 1.0 + 5e-11));
    CHECK_FALSE(close(1.0, 1.0 + 1e-9));
    CHECK(close(0.0, 5e-13));
}

TEST_CASE("Gauss-Chebyshev closed forms")
{
    const auto r1 = quadrature_nodes(QuadratureKind::gauss_chebyshev, 1);
    REQUIRE(r1.nodes.size() == 1);
    CHECK(r1.nodes[0] == 0.0);
    CHECK(r1.weights[0] == doctest::Approx(pi).epsilon(1e-15));

    const auto r2 = quadrature_nodes(QuadratureKind::gauss_chebyshev, 2);
    REQUIRE(r2.nodes.size() == 2);
    CHECK(std::abs(std::abs(r2.nodes[0]) - std::sqrt(0.5)) <= 1e-15);
    CHECK(r2.nodes[0] == doctest::Approx(-r2.nodes[1]).epsilon(1e-15));
    for (double w : r2.weights) CHECK(w == doctest::Approx(pi / 2).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre order 5 on t^4")
{
    const auto r = quadrature_nodes(QuadratureKind::gauss_legendre, 5);
    double s = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], 4);
    CHECK(std::abs(s - 0.4) <= 1e-14);
}

TEST_CASE("monomial exactness up to degree 2n-1")
{
    // int_{-1}^1 t^m dt and int_{-1}^1 t^m / sqrt(1-t^2) dt for even m
    auto legendre_moment = [](int m) { return m % 2 ? 0.0 : 2.0 / (m + 1); };
    auto chebyshev_moment = [](int m) {
        if (m % 2) return 0.0;
        double v = pi;
        for (int k = 1; k <= m / 2; ++k) v *= (2.0 * k - 1.0) / (2.0 * k);
        return v;
    };
    for (int n : {1, 2, 3, 7, 12, 20}) {
        const auto gl = quadrature_nodes(QuadratureKind::gauss_legendre, n);
        const auto gc = quadrature_nodes(QuadratureKind::gauss_chebyshev, n);
        CHECK(gl.nodes.size() == static_cast<std::size_t>(n));
        for (int m = 0; m <= 2 * n - 1; ++m) {
            double sl = 0.0, sc = 0.0;
            for (int k = 0; k < n; ++k) {
                sl += gl.weights[k] * std::pow(gl.nodes[k], m);
                sc += gc.weights[k] * std::pow(gc.nodes[k], m);
            }
            CHECK(std::abs(sl - legendre_moment(m)) <= 1e-13);
            CHECK(std::abs(sc - chebyshev_moment(m)) <= 1e-13);
        }
    }
}

TEST_CASE("quadrature rejects order zero")
{
    CHECK_THROWS_AS(quadrature_nodes(QuadratureKind::gauss_legendre, 0), Error);
    CHECK(&gauss_legendre(32) == &gauss_legendre(32));
}
