#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "perihyp/error.hpp"
#include "perihyp/nonresonance.hpp"
#include "perihyp/sampling.hpp"

using namespace perihyp;
using std::numbers::pi;

namespace {

const TimeGrid kT(32);
const SpaceGrid kX(40);

double min_distance(std::complex<double> z, const std::vector<std::complex<double>>& set) {
    double d = INFINITY;
    for (auto w : set) d = std::min(d, std::abs(z - w));
    return d;
}

}  // namespace

TEST_CASE("resonant constant-speed example violates both conditions") {
    const auto p = FirstOrderProblem::from_strings("4", "-4", "0", "0", 1, -1);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = check_first_order(random_band_limited(seed, 2, kT, kX), p);
        for (const auto& c : r) {
            CHECK(c.threshold == 0.0);
            CHECK(c.margin <= 1e-12);
            CHECK_FALSE(c.satisfied);
        }
    }
}

TEST_CASE("uncoupled diagonal gives margin |ln r1 r2|") {
    const auto p = FirstOrderProblem::from_strings("1 + x", "-2", "u2*u2", "sin(u1)", 0.5, 1.0);
    const auto r = check_first_order(random_band_limited(4, 2, kT, kX), p);
    for (const auto& c : r) {
        CHECK(c.margin == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(c.satisfied);
    }
}

TEST_CASE("no reflection means no resonance") {
    const auto p = FirstOrderProblem::from_strings("1", "-1", "u1", "u2", 0.0, 3.0);
    const auto r = check_first_order(random_band_limited(4, 2, kT, kX), p);
    CHECK(r[0].reflection_free);
    CHECK(r[0].satisfied);
    CHECK(std::isinf(r[1].margin));
}

TEST_CASE("time-independent states give identical conditions") {
    const auto p = FirstOrderProblem::from_strings("2 + sin(pi*x)", "-1 - x", "u1*u1 + u2", "x*u2*u2", 0.9, 0.6);
    const auto u = PeriodicField::sample(2, kT, kX, [](int c, double, double x) { return c == 0 ? std::cos(3 * x) : x * x; });
    const auto r = check_first_order(u, p);
    for (int i = 0; i < kT.size(); ++i) CHECK(std::abs(r[0].integral_values[i] - r[1].integral_values[i]) <= 1e-12);
    CHECK(std::abs(r[0].margin - r[1].margin) <= 1e-12);
}

TEST_CASE("margins track the boundary-trace gains and are shift invariant") {
    const auto p = FirstOrderProblem::from_strings("2 + sin(pi*x)", "-1 - x", "0.8*sin(u1) + u2", "0.3*u2*u2 + x*u1", 0.7, 0.8);
    const auto u = random_band_limited(9, 2, kT, kX);
    const auto r = check_first_order(u, p);
    const TransportOperator op(TransportGeometry::for_problem(p, kT, kX), diagonal_coefficients(u, p));
    const auto f = PeriodicField::zeros(2, kT, kX);
    const auto g0 = op.trace_equation_at_0(f).gain();
    const auto g1 = op.trace_equation_at_1(f).gain();
    // |gain(t)| = |r1 r2| exp(condition integral) at the matching time:
    // condition 1 at t + A_2(1), condition 2 at t - A_1(1).
    const auto geo = TransportGeometry::for_problem(p, kT, kX);
    const auto& travel = geo->travel();
    const auto c0 = shift_series(r[0].integral_values, travel.cumulative(1, 1.0));
    const auto c1 = shift_series(r[1].integral_values, -travel.cumulative(0, 1.0));
    const double rr = p.r1 * p.r2;
    for (int i = 0; i < kT.size(); ++i) {
        CHECK(std::abs(g0[i]) == doctest::Approx(rr * std::exp(c0[i])).epsilon(1e-7));
        CHECK(std::abs(g1[i]) == doctest::Approx(rr * std::exp(c1[i])).epsilon(1e-7));
    }

    const auto shifted = check_first_order(time_shift(u, 5.0 / kT.size()), p);
    CHECK(std::abs(shifted[0].margin - r[0].margin) <= 1e-12);
    CHECK(std::abs(shifted[1].margin - r[1].margin) <= 1e-12);
    const auto off_grid = check_first_order(time_shift(u, 0.0123), p);
    CHECK(std::abs(off_grid[0].margin - r[0].margin) <= 1e-2 * r[0].margin);
}

TEST_CASE("damped wave is non-resonant exactly when damped") {
    const auto u = random_band_limited(5, 1, kT, kX);
    for (double delta : {0.1, 0.0, -0.05}) {
        const auto p = SecondOrderProblem::from_strings("1 + x", std::to_string(-delta) + "*ut + sin(u)");
        const auto r = check_second_order(u, p);
        for (const auto& c : r.sum) {
            CHECK(std::abs(c.margin - 2 * std::abs(delta) * std::log(2.0)) <= 1e-10);
            CHECK(c.satisfied == (delta != 0.0));
        }
        // the difference form cannot see the damping at all
        for (const auto& c : r.as_printed) CHECK(c.margin <= 1e-12);
    }
}

TEST_CASE("telegraph equation reduces to the mean of beta1 / a") {
    const auto u = random_band_limited(6, 1, kT, kX);
    const char* betas[] = {"0", "(x - 0.5)", "1"};
    for (int n = 0; n < 3; ++n) {
        const auto p = SecondOrderProblem::from_strings("1", std::string(betas[n]) + "*ut + (0.3 + x)*ux + sin(u)");
        const auto r = check_second_order(u, p);
        CHECK(std::abs(r.sum[0].margin - r.sum[1].margin) <= 1e-10);
        if (n < 2) {
            CHECK(r.sum[0].margin <= 1e-10);
            CHECK_FALSE(r.sum[0].satisfied);
        } else {
            CHECK(r.sum[0].margin > 0.1);
            CHECK(r.sum[1].satisfied);
        }
    }
    // no dependence on u_t, u_x
    const auto r = check_second_order(u, SecondOrderProblem::from_strings("2", "u*u"));
    CHECK(r.sum[0].margin == 0.0);
    CHECK(r.sum[1].margin == 0.0);
}

TEST_CASE("stationary eigenvalues") {
    const auto p = FirstOrderProblem::from_strings("1", "-1", "0", "0", 0.5, 0.5);
    const StationaryProfile zero = [](double) { return std::array<double, 2>{0.0, 0.0}; };
    const auto formula = stationary_eigenvalues(p, zero, -5, 5);
    for (const auto& l : formula) CHECK(l.real() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    // spacing pi: the set {ln 2 + 2 k pi i} is every other eigenvalue
    CHECK(std::abs(formula[6].imag() - formula[5].imag()) == doctest::Approx(pi));

    const auto oracle = collocation_eigenvalues(p, zero, 64);
    for (const auto& l : formula) CHECK(min_distance(l, oracle) <= 1e-6);
    for (int k = -5; k <= 5; ++k) CHECK(min_distance({std::log(2.0), 2 * k * pi}, oracle) <= 1e-6);

    // unit modulus reflection and zero coupling: purely imaginary spectrum
    const auto q = FirstOrderProblem::from_strings("2", "-3", "0", "0", -1.0, 1.0);
    for (const auto& l : stationary_eigenvalues(q, zero, -3, 3)) CHECK(l.real() == 0.0);

    CHECK_THROWS_AS(stationary_eigenvalues(FirstOrderProblem::from_strings("1", "-1", "0", "0", 0.0, 1.0), zero, 0, 1),
                    DomainError);
    CHECK_THROWS_AS(
        stationary_eigenvalues(FirstOrderProblem::from_strings("1", "1", "0", "0", 1, 1), zero, 0, 1),
        DegenerateDenominator);
}

TEST_CASE("eigenvalue real parts agree with the condition margins on random stationary problems") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int n = 0; n < 50; ++n) {
        const double c1 = d(rng), c2 = d(rng), s = 1.5 + d(rng), r1 = 2 * d(rng), r2 = 2 * d(rng);
        const auto p = FirstOrderProblem::from_strings(std::to_string(s) + " + 0.5*sin(3*x)", "-1 - x",
                                                       std::to_string(c1) + "*u1*u1/2 + u2",
                                                       std::to_string(c2) + "*x*u2 + u1", r1, r2);
        const StationaryProfile prof = [](double x) { return std::array<double, 2>{std::cos(2 * x), x}; };
        const auto u = PeriodicField::sample(2, TimeGrid(8), SpaceGrid(40), [&](int c, double, double x) { return prof(x)[c]; });
        const auto r = check_first_order(u, p);
        const auto ev = stationary_eigenvalues(p, prof, 0, 0);
        // |Re lambda| * |int (1/a2 - 1/a1)| equals the margin
        const auto q = stationary_eigenvalues(p, prof, 1, 1);
        const double Dabs = 2 * pi / std::abs(q[0].imag() - ev[0].imag());
        CHECK(std::abs(std::abs(ev[0].real()) * Dabs - r[0].margin) <= 1e-7);
        CHECK((r[0].margin > 1e-8) == (std::abs(ev[0].real()) > 1e-8 / Dabs));
    }
}
