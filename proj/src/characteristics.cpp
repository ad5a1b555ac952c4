#include "perihyp/characteristics.hpp"

#include <algorithm>
#include <cmath>

#include "perihyp/error.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

double local_integral(const SpeedFunction& a, double left, double right) {
    if (right == left) return 0.0;
    const GaussRule& g = gauss5();
    const double h = right - left;
    double s = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] / a(left + h * g.nodes[q]);
    return s * h;
}

}  // namespace

TravelTimeTable::TravelTimeTable(std::array<SpeedFunction, 2> speeds, int cells)
    : speeds_(std::move(speeds)), cells_(cells) {
    if (cells < 1) throw ConfigError("travel-time table needs at least one cell");
    for (int j = 0; j < 2; ++j) {
        auto& k = knots_[j];
        k.assign(cells + 1, 0.0);
        for (int c = 0; c < cells; ++c) {
            k[c + 1] = k[c] + local_integral(speeds_[j], static_cast<double>(c) / cells,
                                             static_cast<double>(c + 1) / cells);
        }
    }
}

TravelTimeTable TravelTimeTable::build(const FirstOrderProblem& p, int n_x, int refinement) {
    if (refinement < 1) throw ConfigError("refinement must be positive");
    return TravelTimeTable({[p](double x) { return p.speed(0, x); }, [p](double x) { return p.speed(1, x); }},
                           n_x * refinement);
}

double TravelTimeTable::cumulative(int j, double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("travel time requested outside [0,1]");
    const int c = std::min(static_cast<int>(x * cells_), cells_ - 1);
    const double left = static_cast<double>(c) / cells_;
    return knots_[j][c] + local_integral(speeds_[j], left, x);
}

double exp_weight(int j, double t, double x, double y, const FieldSpectrum& b, const TravelTimeTable& table) {
    if (x == y) return 1.0;
    const double ax = table.cumulative(j, x);
    const int cells = std::max(1, static_cast<int>(std::ceil(std::abs(x - y) * b.space_grid().intervals())));
    const double integral = integrate(
        [&](double z) {
            return b.eval(j, t + table.cumulative(j, z) - ax, z) / table.speed(j, z);
        },
        y, x, cells);
    return std::exp(integral);
}

double exp_weight(int j, double t, double x, double y, const PeriodicField& u, const FirstOrderProblem& p,
                  const TravelTimeTable& table) {
    if (x == y) return 1.0;
    const FieldSpectrum us(u);
    const double ax = table.cumulative(j, x);
    const int cells = std::max(1, static_cast<int>(std::ceil(std::abs(x - y) * u.space_grid().intervals())));
    const double integral = integrate(
        [&](double z) {
            const double s = t + table.cumulative(j, z) - ax;
            return p.diagonal_partial(j, s, z, us.eval(0, s, z), us.eval(1, s, z)) / table.speed(j, z);
        },
        y, x, cells);
    return std::exp(integral);
}

}  // namespace perihyp
