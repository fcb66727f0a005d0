#include "ernst/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "ernst/error.hpp"
#include "ernst/linalg.hpp"

namespace ernst {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_eval(int n, double x)
{
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

QuadratureRule legendre_rule(int n)
{
    QuadratureRule rule;
    rule.kind = QuadratureKind::gauss_legendre;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi's initial guess, then Newton
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre_eval(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre_eval(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule chebyshev_rule(int n)
{
    QuadratureRule rule;
    rule.kind = QuadratureKind::gauss_chebyshev;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.assign(n, pi / n);
    for (int k = 1; k <= n; ++k) rule.nodes[k - 1] = std::cos((2.0 * k - 1.0) * pi / (2.0 * n));
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

QuadratureRule quadrature_nodes(QuadratureKind kind, int order)
{
    if (order < 1) throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
    return kind == QuadratureKind::gauss_legendre ? legendre_rule(order) : chebyshev_rule(order);
}

const QuadratureRule& gauss_legendre(int order)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<QuadratureRule>(quadrature_nodes(QuadratureKind::gauss_legendre, order));
    return *slot;
}

}  // namespace ernst
