// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "manufactured.hpp"
#include "perihyp/diagnostics.hpp"
#include "perihyp/error.hpp"
#include "perihyp/identities.hpp"
#include "perihyp/nonresonance.hpp"
#include "perihyp/sampling.hpp"
#include "perihyp/solver.hpp"
#include "perihyp/wave2fos.hpp"

using namespace perihyp;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double diff(const PeriodicField& a, const PeriodicField& b) { return (a - b).sup_norm(); }

// 1. Consistency identities: small at (128,200), at least 8x smaller at (256,400).
// 2. (part) inversion error at (256,400); 3. factorization identity at (128,200).
struct Battery {
    double worst_coarse[3] = {0, 0, 0}, worst_fine[3] = {0, 0, 0}, worst_ratio_min[3] = {1e300, 1e300, 1e300};
    double inversion_fine = 0.0, factorization = 0.0, seconds = 0.0;
};

Battery run_battery() {
    const auto t0 = Clock::now();
    const auto p = identity_battery_problem();
    Battery b;
    for (int f = 0; f < 20; ++f) {
        const std::uint64_t su = 1000 + 2 * f, sv = su + 1;
        const TimeGrid tc(128), tf(256);
        const SpaceGrid xc(200), xf(400);
        const auto c = identity_defects(p, random_band_limited(su, 2, tc, xc), random_band_limited(sv, 2, tc, xc));
        const auto d = identity_defects(p, random_band_limited(su, 2, tf, xf), random_band_limited(sv, 2, tf, xf));
        const double cv[3] = {c.consistency_C, c.consistency_D, c.left_inverse};
        const double fv[3] = {d.consistency_C, d.consistency_D, d.left_inverse};
        for (int n = 0; n < 3; ++n) {
            b.worst_coarse[n] = std::max(b.worst_coarse[n], cv[n]);
            b.worst_fine[n] = std::max(b.worst_fine[n], fv[n]);
            b.worst_ratio_min[n] = std::min(b.worst_ratio_min[n], cv[n] / fv[n]);
        }
        b.inversion_fine = std::max(b.inversion_fine, d.inversion);
        b.factorization = std::max(b.factorization, c.factorization);
    }
    b.seconds = seconds_since(t0);
    return b;
}

Outcome criterion1(const Battery& b) {
    bool ok = b.seconds <= 60.0;
    std::string d;
    const char* names[3] = {"LC", "LD-I", "DL-(I-C)"};
    for (int n = 0; n < 3; ++n) {
        ok = ok && b.worst_coarse[n] <= 1e-5 && b.worst_ratio_min[n] >= 8.0;
        d += std::string(names[n]) + " " + fmt("%.2e", b.worst_coarse[n]) + "->" + fmt("%.2e", b.worst_fine[n]) +
             " (min ratio " + fmt("%.1f", b.worst_ratio_min[n]) + "); ";
    }
    return {ok, d + fmt("%.1f s", b.seconds)};
}

Outcome criterion2(const Battery& b) {
    const auto p = identity_battery_problem();
    const TimeGrid tg(256);
    const SpaceGrid xg(400);
    const auto u = random_band_limited(2001, 2, tg, xg);
    const auto g = random_band_limited(2002, 2, tg, xg);
    std::string branch = "neumann";
    double agree = 0.0;
    try {
        InversionInfo info;
        const auto a = solve_linear(u, g, p, ShiftMode::neumann, &info);
        const auto c = solve_linear(u, g, p, ShiftMode::dense);
        agree = diff(a, c);
    } catch (const ResonantGain&) {
        return {false, "Neumann branch not applicable on the test problem"};
    }
    const bool ok = b.inversion_fine <= 1e-4 && agree <= 1e-8;
    return {ok, "(A-B)(I-C)^-1 D g - g = " + fmt("%.2e", b.inversion_fine) + " at (256,400); neumann vs dense " +
                    fmt("%.2e", agree)};
}

Outcome criterion3(const Battery& b) {
    return {b.factorization <= 1e-8, "max defect over 20 fields at (128,200): " + fmt("%.2e", b.factorization)};
}

Outcome criterion4() {
    const auto p = FirstOrderProblem::from_strings("1", "-1", "0", "0", 0.5, 0.5);
    const StationaryProfile zero = [](double) { return std::array<double, 2>{0.0, 0.0}; };
    const auto formula = stationary_eigenvalues(p, zero, -10, 10);
    const auto oracle = collocation_eigenvalues(p, zero, 96);
    const double pi = std::numbers::pi, ln2 = std::log(2.0);
    double worst_formula = 0.0, worst_oracle = 0.0;
    for (int k = -5; k <= 5; ++k) {
        const std::complex<double> expected(ln2, 2 * pi * k);
        double df = 1e300, dorc = 1e300;
        for (const auto& z : formula) df = std::min(df, std::abs(z - expected));
        for (const auto& z : oracle) dorc = std::min(dorc, std::abs(z - expected));
        worst_formula = std::max(worst_formula, df);
        worst_oracle = std::max(worst_oracle, dorc);
    }
    return {worst_formula <= 1e-12 && worst_oracle <= 1e-6,
            "ln2 + 2k pi i, |k|<=5: closed form " + fmt("%.1e", worst_formula) + ", collocation oracle " +
                fmt("%.1e", worst_oracle)};
}

// Errors against the exact field for n_t = 8, 16, 32 (n_x = 400) and at (128,400).
struct Refinement {
    std::vector<double> errors;
    double main_error = 0.0;
    bool converged = true;
};

bool spectral_decay(const std::vector<double>& e, double floor) {
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        if (e[i + 1] <= floor) break;
        if (e[i] / e[i + 1] < 1e3) return false;
    }
    return true;
}

std::string describe(const Refinement& r) {
    std::string d = "err(128,400) " + fmt("%.2e", r.main_error) + "; n_t 8/16/32:";
    for (double e : r.errors) d += " " + fmt("%.2e", e);
    return d;
}

Outcome criterion5() {
    SolveOptions o;
    o.tol = 1e-11;
    o.max_iter = 400;
    const SpaceGrid xg(400);

    const auto fc = testing::first_order_case();
    Refinement first;
    for (int nt : {8, 16, 32, 128}) {
        const TimeGrid tg(nt);
        const auto rep = picard_solve(fc.problem, PeriodicField::zeros(2, tg, xg), o);
        first.converged = first.converged && rep.converged;
        const double e = diff(rep.solution, fc.sample(tg, xg));
        if (nt == 128) first.main_error = e;
        else first.errors.push_back(e);
    }
    const auto sc = testing::second_order_case();
    Refinement second;
    double round_trip = 0.0, coarse_round_trip = 0.0;
    for (int nt : {8, 16, 32, 128}) {
        const TimeGrid tg(nt);
        const auto rep = solve_second_order(sc.problem, PeriodicField::zeros(1, tg, xg), o);
        second.converged = second.converged && rep.fos.converged;
        const double e = diff(rep.u, sc.sample(tg, xg));
        if (nt == 128) {
            second.main_error = e;
            round_trip = rep.round_trip;
        } else {
            second.errors.push_back(e);
            if (nt == 8) coarse_round_trip = rep.round_trip;
        }
    }
    // Roundoff floor: ten times the error on the finest time grid (x-discretization dominated).
    const bool ok = first.converged && second.converged && first.main_error <= 1e-6 && second.main_error <= 1e-6 &&
                    spectral_decay(first.errors, 10 * first.main_error) &&
                    spectral_decay(second.errors, 10 * second.main_error) && round_trip <= 1e-9;
    return {ok, "first order " + describe(first) + " | second order " + describe(second) + "; round trip " +
                    fmt("%.1e", round_trip) + " at (128,400) (" + fmt("%.1e", coarse_round_trip) + " at n_t=8)"};
}

Outcome criterion6() {
    const TimeGrid tg(64);
    const SpaceGrid xg(100);
    const auto u = random_band_limited(3001, 1, tg, xg);
    const char* betas[3] = {"0", "(x - 0.5)", "1"};
    const bool zero_integral[3] = {true, true, false};
    bool ok = true;
    std::string d;
    for (int n = 0; n < 3; ++n) {
        const auto p = SecondOrderProblem::from_strings(
            "1", std::string(betas[n]) + "*ut + 0.3*ux + sin(2*pi*t)*x - 0.2*u^3");
        const auto r = check_second_order(u, p);
        const double m1 = r.sum[0].margin, m2 = r.sum[1].margin;
        const bool coincide = std::abs(m1 - m2) <= 1e-10;
        const bool vanish = zero_integral[n] ? m1 <= 1e-10 : m1 > 0.1;
        ok = ok && coincide && vanish;
        d += std::string("beta1=") + betas[n] + ": " + fmt("%.2e", m1) + "/" + fmt("%.2e", m2) + "; ";
    }
    return {ok, d};
}

Outcome criterion7() {
    const TimeGrid tg(64);
    const SpaceGrid xg(100);
    const auto u = random_band_limited(4001, 1, tg, xg);
    const auto damped = check_second_order(u, SecondOrderProblem::from_strings("1", "-0.1*ut + u^3 + sin(2*pi*t)"));
    const auto free = check_second_order(u, SecondOrderProblem::from_strings("1", "u^3 + sin(2*pi*t)"));
    const bool sat = damped.sum[0].satisfied || damped.sum[1].satisfied;
    const bool vio = !free.sum[0].satisfied && !free.sum[1].satisfied && free.sum[0].margin <= 1e-10 &&
                     free.sum[1].margin <= 1e-10;
    return {sat && vio, std::string("delta=0.1 ") + (sat ? "satisfied" : "violated") + " (margin " +
                            fmt("%.3f", std::max(damped.sum[0].margin, damped.sum[1].margin)) + "); delta=0 " +
                            (vio ? "violated" : "satisfied") + " (margin " + fmt("%.1e", free.sum[0].margin) + ")"};
}

Outcome criterion8() {
    // Margins of the resonant example vanish for arbitrary u.
    double margin = 0.0;
    const auto p = resonant_example();
    for (int s = 0; s < 5; ++s) {
        const auto r = check_first_order(random_band_limited(5000 + s, 2, TimeGrid(64), SpaceGrid(50)), p);
        margin = std::max({margin, std::abs(r[0].margin), std::abs(r[1].margin)});
    }
    std::vector<double> weak, classical;
    for (int nt : {64, 128, 256, 512}) {
        const auto ce = counterexample_field(PhiKind::triangle, TimeGrid(nt), SpaceGrid(50));
        weak.push_back(weak_residual(ce.u, ce.problem));
        classical.push_back(classical_residual(ce.u, ce.problem));
    }
    bool halving = true, stagnates = true;
    for (std::size_t i = 0; i + 1 < weak.size(); ++i) {
        halving = halving && weak[i] / weak[i + 1] >= 2.0;
        stagnates = stagnates && classical[i + 1] >= classical[i];
    }
    const std::vector<double> probes{0.0, 0.3, 0.77};
    const TimeGrid tg(512);
    const SpaceGrid xg(40);
    const double s_tri = regularity_estimate(counterexample_field(PhiKind::triangle, tg, xg).u, probes).exponent;
    const double s_spl =
        regularity_estimate(counterexample_field(PhiKind::quadratic_spline, tg, xg).u, probes).exponent;
    const bool ok = margin <= 1e-12 && halving && stagnates && std::abs(s_tri - 2) <= 0.3 && std::abs(s_spl - 3) <= 0.3;
    std::string d = "margins " + fmt("%.1e", margin) + "; weak";
    for (double w : weak) d += " " + fmt("%.2e", w);
    d += "; classical";
    for (double c : classical) d += " " + fmt("%.2f", c);
    return {ok, d + "; s(triangle) " + fmt("%.2f", s_tri) + ", s(spline) " + fmt("%.2f", s_spl)};
}

Outcome criterion9() {
    const auto p = FirstOrderProblem::from_strings("2 + sin(pi*x)", "-1 - x", "-u1 + 0.3*sin(u2) + 0.2*cos(pi*x)",
                                                   "-0.5*u2 + 0.2*u1^2 + x", 0.7, 0.8);
    const TimeGrid tg(128);
    const SpaceGrid xg(200);
    const auto u0 = random_band_limited(6001, 2, tg, xg);
    SolveOptions o;
    o.tol = 1e-12;
    const auto base = picard_solve(p, u0, o);
    if (!base.converged) return {false, "reference solve did not converge"};
    std::mt19937_64 rng(6002);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    bool all = true;
    for (int n = 0; n < 5; ++n) {
        const double phi = dist(rng);
        const auto moved = picard_solve(p, time_shift(u0, phi), o);
        all = all && moved.converged;
        worst = std::max(worst, diff(moved.solution, time_shift(base.solution, phi)));
    }
    return {all && worst <= 1e-8, "max |solve(S u0) - S solve(u0)| over 5 shifts: " + fmt("%.2e", worst)};
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    int failures = 0;
    auto report = [&](int n, const Outcome& o, double secs) {
        std::printf("criterion %2d: %s  %s  [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };
    auto timed = [&](int n, const std::function<Outcome()>& f) {
        const auto t = Clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        report(n, o, seconds_since(t));
    };

    Battery battery;
    try {
        battery = run_battery();
    } catch (const std::exception& e) {
        std::printf("identity battery failed: %s\n", e.what());
        battery.seconds = 1e300;
    }
    report(1, criterion1(battery), battery.seconds);
    timed(2, [&] { return criterion2(battery); });
    timed(3, [&] { return criterion3(battery); });
    timed(4, criterion4);
    timed(5, criterion5);
    timed(6, criterion6);
    timed(7, criterion7);
    timed(8, criterion8);
    timed(9, criterion9);
    const double total = seconds_since(t0);
    report(10, {total <= 300.0, "acceptance run at the criterion grids took " + fmt("%.1f s", total) + " (limit 300 s)"},
           total);
    return failures == 0 ? 0 : 1;
}
