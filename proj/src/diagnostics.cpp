#include "perihyp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "perihyp/error.hpp"
#include "perihyp/solver.hpp"
#include "perihyp/spectral.hpp"
#include "perihyp/transport.hpp"

namespace perihyp {

double weak_residual(const PeriodicField& u, const FirstOrderProblem& p) {
    return fixed_point_residual(u, p).sup_norm();
}

double classical_residual(const PeriodicField& u, const FirstOrderProblem& p) {
    return (apply_A(u, p) - superposition(u, p)).sup_norm();
}

double classical_residual(const PeriodicField& u, const SecondOrderProblem& p) {
    if (u.components() != 1) throw ConfigError("expected a scalar field");
    const auto ut = dt_field(u), ux = dx_field(u);
    const auto utt = dt_field(ut), uxx = dx_field(ux);
    const auto& tg = u.time_grid();
    const auto& xg = u.space_grid();
    double worst = 0.0;
    for (int k = 0; k < xg.nodes(); ++k) {
        const double x = xg.node(k), a = p.speed(x);
        for (int i = 0; i < tg.size(); ++i) {
            const double d = utt(0, i, k) - a * a * uxx(0, i, k) -
                             p.source(tg.node(i), x, u(0, i, k), ut(0, i, k), ux(0, i, k));
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

RegularityEstimate regularity_estimate(const PeriodicField& u, const std::vector<double>& x_probe) {
    const int n = u.time_grid().size();
    if (n < 64) throw ConfigError("regularity_estimate needs n_t >= 64");
    RegularityEstimate est;
    est.k_min = 4;
    est.k_max = n / 4;
    est.exponent = std::numeric_limits<double>::quiet_NaN();
    est.spectral_flag = true;
    std::vector<double> series(static_cast<std::size_t>(n));
    std::vector<spectral::Complex> c(spectral::coefficient_count(static_cast<std::size_t>(n)));
    for (int comp = 0; comp < u.components(); ++comp) {
        for (double x : x_probe) {
            const auto st = cubic_stencil(u.space_grid(), x);
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int m = 0; m < 4; ++m) s += st.weights[m] * u(comp, i, st.first + m);
                series[i] = s;
            }
            spectral::forward(series, c);
            FourierProfile prof;
            prof.component = comp;
            prof.x = x;
            for (const auto& z : c) prof.magnitude.push_back(std::abs(z));
            const double scale = *std::max_element(prof.magnitude.begin(), prof.magnitude.end());
            const double floor = 1e-12 * scale;
            // Spectral: every mode in the window beyond the first few is at roundoff.
            prof.spectral = scale == 0.0 || std::all_of(prof.magnitude.begin() + est.k_max / 2,
                                                        prof.magnitude.begin() + est.k_max + 1,
                                                        [&](double m) { return m < floor; });
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int count = 0;
            for (int k = est.k_min; k <= est.k_max; ++k) {
                if (prof.magnitude[k] < floor) continue;
                const double lx = std::log(k), ly = std::log(prof.magnitude[k]);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                ++count;
            }
            prof.exponent = count >= 2 ? -(count * sxy - sx * sy) / (count * sxx - sx * sx)
                                       : std::numeric_limits<double>::quiet_NaN();
            if (!prof.spectral) {
                est.spectral_flag = false;
                if (std::isnan(est.exponent) || prof.exponent < est.exponent) est.exponent = prof.exponent;
            }
            est.profiles.push_back(std::move(prof));
        }
    }
    return est;
}

void write_fourier_csv(std::ostream& out, const RegularityEstimate& est) {
    const auto old = out.precision(17);
    out << "x,k,magnitude,comp\n";
    for (const auto& p : est.profiles) {
        for (std::size_t k = 0; k < p.magnitude.size(); ++k)
            out << p.x << ',' << k << ',' << p.magnitude[k] << ',' << p.component + 1 << '\n';
    }
    out.precision(old);
}

PhiKind parse_phi_kind(const std::string& name) {
    if (name == "triangle") return PhiKind::triangle;
    if (name == "quadratic_spline") return PhiKind::quadratic_spline;
    if (name == "smooth_harmonic") return PhiKind::smooth_harmonic;
    throw ConfigError("unknown profile '" + name + "' (triangle | quadratic_spline | smooth_harmonic)");
}

std::string to_string(PhiKind kind) {
    switch (kind) {
        case PhiKind::triangle: return "triangle";
        case PhiKind::quadratic_spline: return "quadratic_spline";
        case PhiKind::smooth_harmonic: return "smooth_harmonic";
    }
    return "unknown";
}

double phi(PhiKind kind, double t) {
    const double s = t - std::floor(t);
    switch (kind) {
        case PhiKind::triangle: return 4.0 * std::abs(s - 0.5) - 1.0;
        case PhiKind::quadratic_spline: {
            if (s < 0.5) return 8.0 * s * (1.0 - 2.0 * s);
            const double r = s - 0.5;
            return -8.0 * r * (1.0 - 2.0 * r);
        }
        case PhiKind::smooth_harmonic: return std::sin(2.0 * std::numbers::pi * s);
    }
    return 0.0;
}

FirstOrderProblem resonant_example() { return FirstOrderProblem::from_strings("4", "-4", "0", "0", 1.0, -1.0); }

Counterexample counterexample_field(PhiKind kind, TimeGrid tgrid, SpaceGrid xgrid) {
    auto u = PeriodicField::sample(2, tgrid, xgrid, [kind](int c, double t, double x) {
        return c == 0 ? phi(kind, t - x / 4.0) : phi(kind, t + x / 4.0);
    });
    const int n = xgrid.intervals();
    for (int i = 0; i < tgrid.size(); ++i) {
        if (std::abs(u(0, i, 0) - u(1, i, 0)) > 1e-14 || std::abs(u(1, i, n) + u(0, i, n)) > 1e-14)
            throw Error("counterexample profile violates the boundary conditions");
    }
    return {std::move(u), resonant_example()};
}

}  // namespace perihyp
