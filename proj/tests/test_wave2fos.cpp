#include <doctest.h>

#include <cmath>
#include <numbers>

#include "perihyp/sampling.hpp"
#include "perihyp/transport.hpp"
#include "perihyp/wave2fos.hpp"

using namespace perihyp;
using std::numbers::pi;

namespace {

double diff(const PeriodicField& a, const PeriodicField& b) { return (a - b).sup_norm(); }

// u(t,0) = 0, u_x(t,1) = 0.
PeriodicField standing(TimeGrid tg, SpaceGrid xg) {
    return PeriodicField::sample(1, tg, xg, [](int, double t, double x) {
        return std::sin(2 * pi * t) * std::sin(pi * x / 2) + 0.3 * std::cos(2 * pi * t) * std::sin(1.5 * pi * x);
    });
}

SecondOrderProblem varying() { return SecondOrderProblem::from_strings("1 + 0.5*x*x", "-0.3*ut + 0.2*sin(u) + 0.1*ux"); }

}  // namespace

TEST_CASE("to_fos of u = sin(2 pi t) x with unit speed") {
    const TimeGrid tg(16);
    const SpaceGrid xg(20);
    const auto p = SecondOrderProblem::from_strings("1", "0");
    const auto u = PeriodicField::sample(1, tg, xg, [](int, double t, double x) { return std::sin(2 * pi * t) * x; });
    const auto v = to_fos(u, p);
    const auto expected = PeriodicField::sample(2, tg, xg, [](int c, double t, double x) {
        const double a = 2 * pi * std::cos(2 * pi * t) * x, b = std::sin(2 * pi * t);
        return c == 0 ? a + b : a - b;
    });
    CHECK(diff(v, expected) < 1e-11);
    CHECK(to_fos(PeriodicField::zeros(1, tg, xg), p).sup_norm() == 0.0);
}

TEST_CASE("boundary images of to_fos") {
    const TimeGrid tg(32);
    const SpaceGrid xg(200);
    const auto p = varying();
    const auto v = to_fos(standing(tg, xg), p);
    const int n = xg.intervals();
    for (int i = 0; i < tg.size(); ++i) {
        CHECK(std::abs(v(0, i, 0) + v(1, i, 0)) < 1e-12);
        CHECK(std::abs(v(0, i, n) - v(1, i, n)) < 1e-7);
    }
}

TEST_CASE("J, K, L invert to_fos") {
    const auto p = varying();
    double prev = 0.0;
    for (int nx : {100, 200}) {
        const TimeGrid tg(32);
        const SpaceGrid xg(nx);
        const auto u = standing(tg, xg);
        const auto v = to_fos(u, p);
        const double ej = diff(apply_J(v, p), u);
        const double ek = diff(apply_K(v), dt_field(u));
        const double el = diff(apply_L(v, p), dx_field(u));
        CHECK(ej < 1e-7);
        CHECK(ek < 1e-12);
        CHECK(el < 1e-12);
        if (prev > 0.0) CHECK(prev / ej > 8.0);
        prev = ej;
        for (int i = 0; i < tg.size(); ++i) CHECK(apply_J(v, p)(0, i, 0) == 0.0);
    }
}

TEST_CASE("from_fos round trip with unit speed") {
    const TimeGrid tg(64);
    const SpaceGrid xg(400);
    const auto p = SecondOrderProblem::from_strings("1", "0");
    const auto u = PeriodicField::sample(1, tg, xg,
                                         [](int, double t, double x) { return std::sin(2 * pi * t) * std::sin(pi * x / 2); });
    CHECK(diff(from_fos(to_fos(u, p), p), u) < 1e-8);
    CHECK(from_fos(PeriodicField::zeros(2, tg, xg), p).sup_norm() == 0.0);
}

TEST_CASE("equal components give vanishing J and L") {
    const TimeGrid tg(8);
    const SpaceGrid xg(10);
    const auto p = varying();
    const auto s = random_band_limited(3, 1, tg, xg);
    const auto v = stack(s, s);
    CHECK(apply_J(v, p).sup_norm() == 0.0);
    CHECK(apply_L(v, p).sup_norm() == 0.0);
    CHECK(diff(apply_K(v), s) == 0.0);
}

TEST_CASE("fos_rhs by direct substitution") {
    const TimeGrid tg(16);
    const SpaceGrid xg(40);
    const auto v = random_band_limited(4, 2, tg, xg);
    CHECK(fos_rhs(v, SecondOrderProblem::from_strings("2", "0")).sup_norm() == 0.0);

    const auto p = SecondOrderProblem::from_strings("1 + x", "u");
    const auto rhs = fos_rhs(v, p);
    const auto j = apply_J(v, p);
    double err = 0.0, asym = 0.0;
    for (int i = 0; i < tg.size(); ++i) {
        for (int k = 0; k < xg.nodes(); ++k) {
            const double expected = j(0, i, k) - 0.5 * (v(0, i, k) - v(1, i, k));  // a' = 1
            err = std::max(err, std::abs(rhs(0, i, k) - expected));
            asym = std::max(asym, std::abs(rhs(0, i, k) - rhs(1, i, k)));
        }
    }
    CHECK(err < 1e-14);
    CHECK(asym == 0.0);
}

TEST_CASE("sign of the speed-derivative term from the characteristic derivative of to_fos") {
    // v1_t - a v1_x = u_tt - a^2 u_xx - a a' u_x, v2_t + a v2_x likewise, for any u.
    const TimeGrid tg(32);
    const SpaceGrid xg(400);
    const auto p = SecondOrderProblem::from_strings("1 + 0.5*x*x", "0");
    const auto u = standing(tg, xg);
    const auto v = to_fos(u, p);
    const auto vt = dt_field(v), vx = dx_field(v);
    const auto rhs = fos_rhs(v, p);
    double err = 0.0;
    for (int i = 0; i < tg.size(); ++i) {
        for (int k = 2; k + 2 < xg.nodes(); ++k) {
            const double t = tg.node(i), x = xg.node(k), a = 1 + 0.5 * x * x;
            const double s = std::sin(2 * pi * t), c = std::cos(2 * pi * t);
            const double utt = -4 * pi * pi * (s * std::sin(pi * x / 2) + 0.3 * c * std::sin(1.5 * pi * x));
            const double uxx = -(pi * pi / 4) * s * std::sin(pi * x / 2) - 0.3 * 2.25 * pi * pi * c * std::sin(1.5 * pi * x);
            const double wave = utt - a * a * uxx;
            err = std::max(err, std::abs(vt(0, i, k) - a * vx(0, i, k) - (wave + rhs(0, i, k))));
            err = std::max(err, std::abs(vt(1, i, k) + a * vx(1, i, k) - (wave + rhs(1, i, k))));
        }
    }
    CHECK(err < 1e-5);
}

TEST_CASE("linearization split matches a finite-difference directional derivative") {
    const TimeGrid tg(16);
    const SpaceGrid xg(40);
    const auto p = SecondOrderProblem::from_strings("1 + 0.5*sin(x)", "0.4*sin(u) - 0.3*ut*ut + 0.2*u*ux + cos(pi*x)");
    const auto v = random_band_limited(5, 2, tg, xg);
    const auto w = random_band_limited(6, 2, tg, xg);
    const double h = 1e-6;
    const auto fd = (fos_rhs(v + h * w, p) - fos_rhs(v - h * w, p)) * (0.5 / h);
    const auto lin = fos_linearization_split(v, p);
    const auto analytic = lin.apply_B(w) + lin.apply_B_tilde(w) + lin.apply_integral(w);
    CHECK(diff(analytic, fd) < 1e-6);

    // No dependence on u: the integral part vanishes.
    const auto q = SecondOrderProblem::from_strings("1", "ut*ux");
    CHECK(fos_linearization_split(v, q).apply_integral(w).sup_norm() == 0.0);
}

TEST_CASE("damped wave: both weight fields equal -delta/2") {
    const TimeGrid tg(8);
    const SpaceGrid xg(8);
    const double delta = 0.1;
    const auto p = SecondOrderProblem::from_strings("3", "-0.1*ut");
    const auto lin = fos_linearization_split(random_band_limited(7, 2, tg, xg), p);
    for (double x : lin.diagonal.values()) CHECK(x == doctest::Approx(-delta / 2).epsilon(1e-14));
    for (double x : lin.off_diagonal.values()) CHECK(x == doctest::Approx(-delta / 2).epsilon(1e-14));
}

TEST_CASE("c coefficients of to_fos(u) are the b coefficients of u") {
    const TimeGrid tg(32);
    const SpaceGrid xg(200);
    const auto p = SecondOrderProblem::from_strings("1 + 0.5*x*x", "-0.3*ut*u + 0.2*ux*ut + u");
    const auto u = standing(tg, xg);
    CHECK(diff(c_coefficients(to_fos(u, p), p), b_coefficients(u, p)) < 1e-7);
}

TEST_CASE("C of the first-order system with constant speed and no source") {
    const TimeGrid tg(32);
    const SpaceGrid xg(32);
    const double a = 2.0;
    const auto p = SecondOrderProblem::from_strings("2", "0");
    const auto v = random_band_limited(8, 2, tg, xg);
    const auto w = random_band_limited(9, 2, tg, xg);
    const auto c = fos_apply_C(v, w, p);
    double err = 0.0;
    for (int i = 0; i < tg.size(); ++i) {
        for (int k = 0; k < xg.nodes(); ++k) {
            const double t = tg.node(i), x = xg.node(k);
            // v1 is constant along dx/dt = -a, v2 along dx/dt = a.
            err = std::max(err, std::abs(c(0, i, k) + eval_field(w, 1, t + x / a, 0.0)));
            err = std::max(err, std::abs(c(1, i, k) - eval_field(w, 0, t + (1 - x) / a, 1.0)));
        }
    }
    CHECK(err < 1e-12);
}

TEST_CASE("first-order system operators are the transport operators under substitution") {
    const TimeGrid tg(32);
    const SpaceGrid xg(40);
    const auto p = SecondOrderProblem::from_strings("1 + 0.5*x*x", "-0.3*ut*u + 0.2*ux + sin(u)");
    const auto q = FirstOrderProblem::from_strings("-(1 + 0.5*x*x)", "1 + 0.5*x*x", "0", "0", -1, 1);
    const auto v = random_band_limited(10, 2, tg, xg);
    const auto w = random_band_limited(11, 2, tg, xg);
    const TransportOperator op(TransportGeometry::for_problem(q, tg, xg), fos_linearization_split(v, p).diagonal);
    CHECK(diff(fos_apply_C(v, w, p), op.apply_C(w)) < 1e-12);
    CHECK(diff(fos_apply_D(v, w, p), op.apply_D(w)) < 1e-12);

    const auto d = fos_apply_D(v, w, p);
    const auto c = fos_apply_C(v, w, p);
    const int n = xg.intervals();
    for (int i = 0; i < tg.size(); ++i) {
        CHECK(d(0, i, 0) == 0.0);
        CHECK(d(1, i, n) == 0.0);
        CHECK(c(0, i, 0) == doctest::Approx(-w(1, i, 0)).epsilon(1e-12));
        CHECK(c(1, i, n) == doctest::Approx(w(0, i, n)).epsilon(1e-12));
    }
    // Solutions of the linear problem satisfy the boundary conditions of the system.
    const auto z = op.solve_linear(w);
    for (int i = 0; i < tg.size(); ++i) {
        CHECK(std::abs(z(0, i, 0) + z(1, i, 0)) < 1e-10);
        CHECK(std::abs(z(0, i, n) - z(1, i, n)) < 1e-10);
    }
}
