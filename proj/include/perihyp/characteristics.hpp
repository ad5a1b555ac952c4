#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "perihyp/field.hpp"
#include "perihyp/problem.hpp"

namespace perihyp {

using SpeedFunction = std::function<double(double)>;

/// Cumulative travel times A_j(x) = int_0^x dz / a_j(z) for two families.
/// Stored at the boundaries of `cells` equal cells; values in between add a
/// local five-point Gauss-Legendre integral from the cell start, so the
/// table is accurate to quadrature order everywhere, not just at the knots.
class TravelTimeTable {
public:
    TravelTimeTable(std::array<SpeedFunction, 2> speeds, int cells);

    /// refinement x n_x cells.
    static TravelTimeTable build(const FirstOrderProblem& p, int n_x, int refinement = 4);

    double cumulative(int j, double x) const;
    /// alpha_j(x, y) = A_j(y) - A_j(x).
    double alpha(int j, double x, double y) const { return cumulative(j, y) - cumulative(j, x); }
    double speed(int j, double x) const { return speeds_[j](x); }
    int cells() const noexcept { return cells_; }

private:
    std::array<SpeedFunction, 2> speeds_;
    int cells_;
    std::array<std::vector<double>, 2> knots_;
};

/// c_j(t,x,y) = exp( int_y^x d_{u_j} f_j(z, u(t + alpha_j(x,z), z)) / a_j(z) dz ),
/// j = 0 or 1, by composite Gauss-Legendre along the characteristic.
double exp_weight(int j, double t, double x, double y, const PeriodicField& u, const FirstOrderProblem& p,
                  const TravelTimeTable& table);

/// Same weight for a precomputed diagonal coefficient field b (b_j = d_{u_j} f_j at u).
double exp_weight(int j, double t, double x, double y, const FieldSpectrum& b, const TravelTimeTable& table);

}  // namespace perihyp
