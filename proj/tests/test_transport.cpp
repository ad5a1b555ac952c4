#include <doctest.h>

#include <cmath>
#include <numbers>

#include "perihyp/error.hpp"
#include "perihyp/quadrature.hpp"
#include "perihyp/sampling.hpp"
#include "perihyp/transport.hpp"

using namespace perihyp;
using std::numbers::pi;

namespace {

FirstOrderProblem sysex() { return FirstOrderProblem::from_strings("4", "-4", "0", "0", 1, -1); }

FirstOrderProblem coupled(double r1 = 0.7, double r2 = 0.8) {
    return FirstOrderProblem::from_strings("2 + sin(pi*x)", "-1 - x", "0.5*sin(u1) + 0.3*u2 + 0.2*cos(pi*x)",
                                           "0.25*u2*u2 + x*u1 - 0.1", r1, r2);
}

double diff(const PeriodicField& a, const PeriodicField& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_CASE("C on the resonant constant-speed example is a pair of plain shifts") {
    const TimeGrid tg(32);
    const SpaceGrid xg(16);
    const auto p = sysex();
    const auto u = random_band_limited(1, 2, tg, xg);
    const auto v = random_band_limited(2, 2, tg, xg);
    const auto c = apply_C(u, v, p);
    double err = 0.0;
    for (int i = 0; i < tg.size(); ++i) {
        for (int k = 0; k <= xg.intervals(); ++k) {
            const double t = tg.node(i), x = xg.node(k);
            err = std::max(err, std::abs(c(0, i, k) - eval_field(v, 1, t - x / 4, 0.0)));
            err = std::max(err, std::abs(c(1, i, k) + eval_field(v, 0, t + (x - 1) / 4, 1.0)));
        }
    }
    CHECK(err <= 1e-12);
}

TEST_CASE("C vanishes without boundary data or reflection") {
    const TimeGrid tg(16);
    const SpaceGrid xg(10);
    const auto u = random_band_limited(3, 2, tg, xg);
    auto v = random_band_limited(4, 2, tg, xg);
    const auto zero_traces = v.map([&](int, int, int k, double x) { return k == 0 || k == 10 ? 0.0 : x; });
    CHECK(apply_C(u, zero_traces, coupled()).sup_norm() == 0.0);
    CHECK(apply_C(u, v, coupled(0.0, 0.0)).sup_norm() == 0.0);
}

TEST_CASE("D boundary values and constant integrand") {
    const TimeGrid tg(16);
    const SpaceGrid xg(20);
    const auto u = random_band_limited(5, 2, tg, xg);
    const auto v = random_band_limited(6, 2, tg, xg);
    const auto d = apply_D(u, v, coupled());
    for (int i = 0; i < tg.size(); ++i) {
        CHECK(d(0, i, 0) == 0.0);
        CHECK(std::abs(d(1, i, 20)) <= 1e-15);
    }
    const auto one = PeriodicField::constant(2, tg, xg, 1.0);
    const auto d1 = apply_D(u, one, sysex());
    for (int k = 0; k <= 20; ++k) CHECK(std::abs(d1(0, 3, k) - xg.node(k) / 4) <= 1e-14);
}

TEST_CASE("D matches a fine-grid Simpson oracle") {
    const TimeGrid tg(16);
    const SpaceGrid xg(20);
    const auto p = coupled();
    const auto u = random_band_limited(7, 2, tg, xg);
    const auto v = random_band_limited(8, 2, tg, xg);
    const auto d = apply_D(u, v, p);
    const auto table = TravelTimeTable::build(p, 20, 8);
    const FieldSpectrum b(diagonal_coefficients(u, p));
    const FieldSpectrum vs(v);
    auto oracle = [&](int j, double t, double x) {
        const double lo = j == 0 ? 0.0 : x, hi = j == 0 ? x : 1.0;
        if (hi == lo) return 0.0;
        const int n = 2000;
        const double h = (hi - lo) / n;
        double s = 0.0;
        for (int m = 0; m <= n; ++m) {
            const double y = lo + m * h;
            const double w = (m == 0 || m == n) ? 1.0 : (m % 2 ? 4.0 : 2.0);
            const double ty = t + table.alpha(j, x, y);
            s += w * exp_weight(j, t, x, y, b, table) * vs.eval(j, ty, y) / table.speed(j, y);
        }
        return (j == 0 ? 1.0 : -1.0) * s * h / 3;
    };
    for (auto [i, k] : {std::pair{0, 7}, {5, 13}, {11, 20}, {3, 0}, {9, 1}}) {
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(d(j, i, k) - oracle(j, tg.node(i), xg.node(k))) <= 1e-7);
        }
    }
}

TEST_CASE("shift equation branches") {
    const int n = 32;
    // constant contraction
    auto eq = ShiftEquation::simple(std::vector<double>(n, 0.5), 0.3, std::vector<double>(n, 2.0));
    ShiftSolveInfo info;
    auto v = solve_shift_equation(eq, ShiftMode::automatic, &info);
    CHECK(info.method == "neumann");
    for (double x : v) CHECK(std::abs(x - 4.0) <= 1e-11);

    // expanding gain: constant fixed point of v = 2 v + 1
    eq = ShiftEquation::simple(std::vector<double>(n, 2.0), 0.37, std::vector<double>(n, 1.0));
    v = solve_shift_equation(eq, ShiftMode::automatic, &info);
    CHECK(info.method == "inverted");
    for (double x : v) CHECK(std::abs(x + 1.0) <= 1e-11);

    // the counterexample configuration
    eq = ShiftEquation::simple(std::vector<double>(n, -1.0), -0.5, std::vector<double>(n, 1.0));
    CHECK_THROWS_AS(solve_shift_equation(eq), ResonantGain);
    CHECK_THROWS_AS(solve_shift_equation(eq, ShiftMode::dense), ResonantGain);

    // forcing a branch that does not apply
    eq = ShiftEquation::simple(std::vector<double>(n, 0.5), 0.1, std::vector<double>(n, 1.0));
    CHECK_THROWS_AS(solve_shift_equation(eq, ShiftMode::inverted), ResonantGain);

    // t-dependent gain and rhs: all methods agree and satisfy the equation
    std::vector<double> g(n), r(n);
    for (int i = 0; i < n; ++i) {
        g[i] = 0.6 + 0.3 * std::sin(2 * pi * i / n);
        r[i] = std::cos(2 * pi * i / n) + 0.2 * std::sin(4 * pi * i / n);
    }
    eq = ShiftEquation::simple(g, 0.213, r);
    const auto a = solve_shift_equation(eq, ShiftMode::neumann);
    const auto b = solve_shift_equation(eq, ShiftMode::dense);
    auto res = eq.apply(a);
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(a[i] - b[i]) <= 1e-10);
        CHECK(std::abs(a[i] - res[i] - r[i]) <= 1e-11);
    }
    for (auto& x : g) x = 1.0 / x;
    eq = ShiftEquation::simple(g, -0.4, r);
    const auto c = solve_shift_equation(eq, ShiftMode::inverted);
    const auto e = solve_shift_equation(eq, ShiftMode::dense);
    res = eq.apply(c);
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(c[i] - e[i]) <= 1e-10);
        CHECK(std::abs(c[i] - res[i] - r[i]) <= 1e-10);
    }
}

TEST_CASE("inverting I - C") {
    const TimeGrid tg(32);
    const SpaceGrid xg(40);
    const auto p = coupled();
    const auto u = random_band_limited(11, 2, tg, xg);
    const auto f = random_band_limited(12, 2, tg, xg);

    CHECK(solve_I_minus_C(u, PeriodicField::zeros(2, tg, xg), p).sup_norm() == 0.0);

    InversionInfo info;
    const auto v = solve_I_minus_C(u, f, p, ShiftMode::automatic, &info);
    CHECK(info.reduction == "trace_at_0");
    CHECK(info.shift.method == "neumann");
    CHECK(diff(v, apply_C(u, v, p) + f) <= 1e-8);
    const auto vd = solve_I_minus_C(u, f, p, ShiftMode::dense);
    CHECK(diff(v, vd) <= 1e-8);

    // strongly reflecting boundaries: the inverted branch
    const auto q = coupled(2.5, 1.5);
    const auto w = solve_I_minus_C(u, f, q, ShiftMode::automatic, &info);
    CHECK(info.shift.method == "inverted");
    CHECK(diff(w, apply_C(u, w, q) + f) <= 1e-8);
    CHECK(diff(w, solve_I_minus_C(u, f, q, ShiftMode::dense)) <= 1e-8);

    // resonant example
    CHECK_THROWS_AS(solve_I_minus_C(u, f, sysex()), ResonantGain);
}

TEST_CASE("only the second reduction is non-resonant") {
    // With a1 = 1, a2 = -2 the two trace equations see the same line integrals
    // at different relative times: the gain of the trace-at-0 equation is
    // exp(-0.3 - sin(2 pi t)), which crosses 1, while the trace-at-1 gain is
    // exp(-0.3) everywhere.
    const TimeGrid tg(64);
    const SpaceGrid xg(40);
    const auto p = FirstOrderProblem::from_strings("1", "-2", "u1*(-0.3 + 0.5*sin(2*pi*(t - x)))",
                                                   "u2*(-sin(2*pi*(t + x/2)))", 1, 1);
    const auto u = PeriodicField::zeros(2, tg, xg);
    const auto f = random_band_limited(13, 2, tg, xg);
    const TransportOperator op(TransportGeometry::for_problem(p, tg, xg), diagonal_coefficients(u, p));
    ShiftSolveInfo s0;
    CHECK_THROWS_AS(solve_shift_equation(op.trace_equation_at_0(f), ShiftMode::automatic, &s0), ResonantGain);
    InversionInfo info;
    const auto v = op.solve_I_minus_C(f, ShiftMode::automatic, &info);
    CHECK(info.reduction == "trace_at_1");
    CHECK(info.shift.max_gain == doctest::Approx(std::exp(-0.3)).epsilon(1e-4));
    CHECK(diff(v, op.apply_C(v) + f) <= 1e-8);
}

TEST_CASE("linear solve satisfies the boundary conditions and the equation") {
    const auto p = coupled();
    auto run = [&](int nt, int nx) {
        const TimeGrid tg(nt);
        const SpaceGrid xg(nx);
        const auto u = random_band_limited(21, 2, tg, xg);
        const auto g = random_band_limited(22, 2, tg, xg);
        const auto v = solve_linear(u, g, p);
        for (int i = 0; i < nt; ++i) {
            CHECK(std::abs(v(0, i, 0) - p.r1 * v(1, i, 0)) <= 1e-10);
            CHECK(std::abs(v(1, i, nx) - p.r2 * v(0, i, nx)) <= 1e-10);
        }
        return diff(apply_A(v, p) - apply_B(u, v, p), g);
    };
    CHECK(solve_linear(random_band_limited(1, 2, TimeGrid(16), SpaceGrid(10)), PeriodicField::zeros(2, TimeGrid(16), SpaceGrid(10)), p)
              .sup_norm() == 0.0);
    const double e1 = run(32, 50), e2 = run(64, 100);
    MESSAGE("inversion defects " << e1 << " " << e2);
    CHECK(e2 <= 1e-4);
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("operator identities converge under refinement") {
    const auto p = coupled();
    auto defects = [&](int nt, int nx) {
        const TimeGrid tg(nt);
        const SpaceGrid xg(nx);
        const auto u = random_band_limited(31, 2, tg, xg);
        const auto v = random_band_limited(32, 2, tg, xg);
        const auto vbc = project_to_boundary(v, p.r1, p.r2);
        auto L = [&](const PeriodicField& w) { return apply_A(w, p) - apply_B(u, w, p); };
        const double i1 = L(apply_C(u, v, p)).sup_norm();
        const double i2 = diff(L(apply_D(u, v, p)), v);
        const double i3 = diff(apply_D(u, L(vbc), p), vbc - apply_C(u, vbc, p));
        return std::array<double, 3>{i1, i2, i3};
    };
    const auto a = defects(32, 50), b = defects(64, 100);
    for (int n = 0; n < 3; ++n) {
        MESSAGE("identity " << n + 1 << ": " << a[n] << " -> " << b[n]);
        CHECK(b[n] <= 1e-4);
        CHECK(a[n] / b[n] >= 8.0);
    }
}

TEST_CASE("linear solve commutes with time shifts") {
    const TimeGrid tg(32);
    const SpaceGrid xg(30);
    const auto p = coupled();
    const auto u = random_band_limited(41, 2, tg, xg);
    const auto g = random_band_limited(42, 2, tg, xg);
    for (double phi : {0.125, 0.3, -0.77}) {
        const auto lhs = solve_linear(time_shift(u, phi), time_shift(g, phi), p);
        const auto rhs = time_shift(solve_linear(u, g, p), phi);
        CHECK(diff(lhs, rhs) <= 1e-8);
    }
}
