#include "perihyp/nonresonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "perihyp/error.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

// sum_m weight(m) * coef_comp(t_i + offset(m), y_m) for every time node.
template <class Offset, class Weight>
void accumulate_along(const FieldSpectrum& spectrum, const TransportGeometry& geo, int comp, Offset offset,
                      Weight weight, std::vector<double>& acc) {
    const int nt = geo.time_grid().size();
    std::vector<double> row(nt);
    for (int m = 0; m < geo.quad_size(); ++m) {
        const double w = weight(m);
        if (w == 0.0) continue;
        spectrum.shifted_row(comp, geo.quad_x(m), offset(m), row);
        for (int i = 0; i < nt; ++i) acc[i] += w * row[i];
    }
}

void finish(NonresonanceReport& r) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : r.integral_values) m = std::min(m, std::abs(v - r.threshold));
    r.margin = m;
    r.satisfied = m > r.tolerance;
}

}  // namespace

std::array<NonresonanceReport, 2> check_transport(const TransportGeometry& geo, const PeriodicField& diagonal,
                                                   double tol) {
    std::array<NonresonanceReport, 2> out;
    const int nt = geo.time_grid().size();
    const double rr = std::abs(geo.r1() * geo.r2());
    for (int c = 0; c < 2; ++c) {
        out[c].condition_id = c == 0 ? "first_order_1" : "first_order_2";
        out[c].form = "reflection";
        out[c].tolerance = tol;
    }
    if (rr == 0.0) {
        for (auto& r : out) {
            r.reflection_free = true;
            r.satisfied = true;
            r.margin = std::numeric_limits<double>::infinity();
            r.threshold = std::numeric_limits<double>::infinity();
        }
        return out;
    }
    const FieldSpectrum spectrum(diagonal);
    const int n = geo.space_grid().intervals();
    for (int c = 0; c < 2; ++c) {
        auto& r = out[c];
        r.threshold = -std::log(rr);
        r.integral_values.assign(nt, 0.0);
        for (int j = 0; j < 2; ++j) {
            const double end = geo.node_travel(j, n);
            const double sign = j == 0 ? 1.0 : -1.0;
            accumulate_along(
                spectrum, geo, j,
                [&](int m) { return c == 0 ? geo.quad_travel(j, m) - end : geo.quad_travel(j, m); },
                [&](int m) { return sign * geo.quad_weight(m) * geo.quad_inv_speed(j, m); }, r.integral_values);
        }
        finish(r);
    }
    return out;
}

std::array<NonresonanceReport, 2> check_first_order(const PeriodicField& u, const FirstOrderProblem& p, double tol) {
    const auto geo = TransportGeometry::for_problem(p, u.time_grid(), u.space_grid());
    if (p.r1 * p.r2 == 0.0) return check_transport(*geo, PeriodicField::zeros(2, u.time_grid(), u.space_grid()), tol);
    return check_transport(*geo, diagonal_coefficients(u, p), tol);
}

SecondOrderNonresonance check_second_order(const PeriodicField& u, const SecondOrderProblem& p, double tol) {
    if (u.components() != 1) throw ConfigError("second-order check expects a scalar field");
    const TimeGrid tg = u.time_grid();
    const SpaceGrid xg = u.space_grid();
    const auto ut = dt_field(u);
    const auto ux = dx_field(u);
    std::vector<double> speed(xg.nodes());
    for (int k = 0; k < xg.nodes(); ++k) speed[k] = p.speed(xg.node(k));
    // b_+ and b_- on the grid
    const auto b = PeriodicField::zeros(2, tg, xg).map(
        [&](int c, int i, int k, double) {
            const auto d = p.source_partials(tg.node(i), xg.node(k), u(0, i, k), ut(0, i, k), ux(0, i, k));
            return c == 0 ? d.d[1] + d.d[2] / speed[k] : d.d[1] - d.d[2] / speed[k];
        });
    auto a = p.a;
    auto table = std::make_shared<const TravelTimeTable>(
        std::array<SpeedFunction, 2>{[a](double x) { return -a.eval(std::span<const double>(&x, 1)); },
                                     [a](double x) { return a.eval(std::span<const double>(&x, 1)); }},
        4 * xg.intervals());
    const TransportGeometry geo(table, -1.0, 1.0, tg, xg);
    const FieldSpectrum spectrum(b);
    const int n = xg.intervals();
    const double total = geo.node_travel(1, n);  // int_0^1 dz / a

    SecondOrderNonresonance out;
    for (int c = 0; c < 2; ++c) {
        for (int form = 0; form < 2; ++form) {
            auto& r = form == 0 ? out.sum[c] : out.as_printed[c];
            r.condition_id = c == 0 ? "second_order_1" : "second_order_2";
            r.form = form == 0 ? "sum" : "as_printed";
            r.tolerance = tol;
            r.threshold = 0.0;
            r.integral_values.assign(tg.size(), 0.0);
            // alpha(x,1) = A(1) - A(x), alpha(0,x) = A(x)
            auto plus_offset = [&](int m) {
                const double A = geo.quad_travel(1, m);
                return c == 0 ? total - A : -A;
            };
            auto minus_offset = [&](int m) { return -plus_offset(m); };
            const double sign = form == 0 ? 1.0 : -1.0;
            accumulate_along(spectrum, geo, 0, plus_offset,
                             [&](int m) { return geo.quad_weight(m) * geo.quad_inv_speed(1, m); }, r.integral_values);
            accumulate_along(spectrum, geo, 1, minus_offset,
                             [&](int m) { return sign * geo.quad_weight(m) * geo.quad_inv_speed(1, m); },
                             r.integral_values);
            finish(r);
        }
    }
    return out;
}

std::vector<std::complex<double>> stationary_eigenvalues(const FirstOrderProblem& p, const StationaryProfile& ustat,
                                                         int k_min, int k_max) {
    const double rr = p.r1 * p.r2;
    if (rr == 0.0) throw DomainError("r1 r2 = 0: the stationary eigenproblem has no finite eigenvalues");
    auto b = [&](int j, double x) {
        const auto u = ustat(x);
        return p.diagonal_partial(j, 0.0, x, u[0], u[1]);
    };
    const int cells = 200;
    const double denom = integrate([&](double x) { return 1.0 / p.speed(1, x) - 1.0 / p.speed(0, x); }, 0.0, 1.0, cells);
    if (std::abs(denom) < 1e-12) {
        throw DegenerateDenominator("int_0^1 (1/a2 - 1/a1) dx vanishes; eigenvalues are undefined");
    }
    const double coupling =
        integrate([&](double x) { return b(1, x) / p.speed(1, x) - b(0, x) / p.speed(0, x); }, 0.0, 1.0, cells);
    const double re = (std::log(std::abs(rr)) - coupling) / denom;
    const double arg = rr < 0 ? std::numbers::pi : 0.0;
    std::vector<std::complex<double>> out;
    for (int k = k_min; k <= k_max; ++k) out.emplace_back(re, (arg + 2 * std::numbers::pi * k) / denom);
    return out;
}

std::vector<std::complex<double>> collocation_eigenvalues(const FirstOrderProblem& p, const StationaryProfile& ustat,
                                                          int points) {
    const int N = points;
    const int m = N + 1;
    // Chebyshev points mapped to [0,1] (x_0 = 1, x_N = 0) and differentiation matrix.
    Eigen::VectorXd s(m), x(m), c(m);
    for (int i = 0; i < m; ++i) {
        s[i] = std::cos(std::numbers::pi * i / N);
        x[i] = 0.5 * (1.0 + s[i]);
        c[i] = (i == 0 || i == N ? 2.0 : 1.0) * (i % 2 ? -1.0 : 1.0);
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j) D(i, j) = (c[i] / c[j]) / (s[i] - s[j]);
        }
    }
    for (int i = 0; i < m; ++i) D(i, i) = -D.row(i).sum();
    D *= 2.0;  // d/dx = 2 d/ds

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2 * m, 2 * m);
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < m; ++i) {
            const auto u = ustat(x[i]);
            const double a = p.speed(j, x[i]);
            const double b = p.diagonal_partial(j, 0.0, x[i], u[0], u[1]);
            for (int l = 0; l < m; ++l) A(j * m + i, j * m + l) = a * D(i, l);
            A(j * m + i, j * m + i) -= b;
        }
    }
    // v1(0) = r1 v2(0) replaces the v1 row at x = 0; v2(1) = r2 v1(1) the v2 row at x = 1.
    const int row1 = N, row2 = m + 0;
    A.row(row1).setZero();
    B.row(row1).setZero();
    A(row1, N) = 1.0;
    A(row1, m + N) = -p.r1;
    A.row(row2).setZero();
    B.row(row2).setZero();
    A(row2, m + 0) = 1.0;
    A(row2, 0) = -p.r2;

    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(A, B, false);
    const auto alphas = ges.alphas();
    const auto betas = ges.betas();
    std::vector<std::complex<double>> out;
    for (int i = 0; i < alphas.size(); ++i) {
        if (std::abs(betas[i]) < 1e-12 * std::max(1.0, std::abs(alphas[i]))) continue;
        out.push_back(alphas[i] / betas[i]);
    }
    std::sort(out.begin(), out.end(), [](auto l, auto r) { return std::abs(l.imag()) < std::abs(r.imag()); });
    return out;
}

}  // namespace perihyp
