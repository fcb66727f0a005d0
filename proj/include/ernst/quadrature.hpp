#pragma once

#include <vector>

namespace ernst {

enum class QuadratureKind { gauss_legendre, gauss_chebyshev };

// Nodes on [-1, 1]. Chebyshev weights belong to the weight 1/sqrt(1 - t^2).
struct QuadratureRule {
    QuadratureKind kind = QuadratureKind::gauss_legendre;
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule quadrature_nodes(QuadratureKind kind, int order);

// Cached Gauss-Legendre rule; thread safe, returned reference stays valid.
const QuadratureRule& gauss_legendre(int order);

}  // namespace ernst
