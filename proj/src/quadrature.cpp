#include "perihyp/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "perihyp/error.hpp"

namespace perihyp {

GaussRule gauss_legendre(int points) {
    if (points < 1) throw ConfigError("Gauss-Legendre rule needs at least one point");
    const int n = points;
    std::vector<double> x(n), w(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        // map [-1,1] -> [0,1], ascending order
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = w[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }

    GaussRule rule;
    rule.nodes = x;
    rule.weights = w;

    // Lagrange basis integrals: build each basis polynomial's monomial
    // coefficients and integrate exactly from 0.
    rule.partial.assign(n, std::vector<double>(n, 0.0));
    for (int p = 0; p < n; ++p) {
        std::vector<double> poly{1.0};
        double denom = 1.0;
        for (int m = 0; m < n; ++m) {
            if (m == p) continue;
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t d = 0; d < poly.size(); ++d) {
                next[d + 1] += poly[d];
                next[d] -= x[m] * poly[d];
            }
            poly = std::move(next);
            denom *= x[p] - x[m];
        }
        for (int q = 0; q < n; ++q) {
            double s = 0.0, xp = x[q];
            for (std::size_t d = 0; d < poly.size(); ++d) {
                s += poly[d] * xp / static_cast<double>(d + 1);
                xp *= x[q];
            }
            rule.partial[q][p] = s / denom;
        }
    }
    return rule;
}

const GaussRule& gauss5() {
    static const GaussRule rule = gauss_legendre(5);
    return rule;
}

}  // namespace perihyp
