#pragma once

#include <vector>

namespace perihyp {

/// Gauss-Legendre rule mapped to the reference cell [0,1].
struct GaussRule {
    std::vector<double> nodes;    // in (0,1), increasing
    std::vector<double> weights;  // sum to 1
    /// partial[q][p] = integral over [0, nodes[q]] of the p-th Lagrange basis
    /// polynomial through `nodes`; integrates the node interpolant up to each node.
    std::vector<std::vector<double>> partial;
};

GaussRule gauss_legendre(int points);

/// Shared five-point rule.
const GaussRule& gauss5();

/// Composite Gauss-Legendre integral of f over [a,b] split into `cells` equal cells.
template <class F>
double integrate(F&& f, double a, double b, int cells = 1) {
    const GaussRule& rule = gauss5();
    const double h = (b - a) / cells;
    double sum = 0.0;
    for (int c = 0; c < cells; ++c) {
        const double left = a + c * h;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) sum += rule.weights[q] * f(left + h * rule.nodes[q]);
    }
    return sum * h;
}

}  // namespace perihyp
