#include "perihyp/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "perihyp/error.hpp"

namespace perihyp {

PeriodicField random_band_limited(std::uint64_t seed, int components, TimeGrid tgrid, SpaceGrid xgrid, int t_modes,
                                  int x_modes) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    struct Mode {
        int k, m;
        double a, b;
    };
    std::vector<std::vector<Mode>> modes(components);
    for (auto& list : modes) {
        for (int k = 0; k <= t_modes; ++k) {
            for (int m = 0; m <= x_modes; ++m) {
                const double s = 1.0 / ((1.0 + k + m) * (1.0 + k + m));
                list.push_back({k, m, s * dist(rng), k == 0 ? 0.0 : s * dist(rng)});
            }
        }
    }
    constexpr double pi = std::numbers::pi;
    return PeriodicField::sample(components, tgrid, xgrid, [&](int c, double t, double x) {
        double v = 0.0;
        for (const auto& md : modes[c]) {
            v += (md.a * std::cos(2 * pi * md.k * t) + md.b * std::sin(2 * pi * md.k * t)) * std::cos(md.m * pi * x);
        }
        return v;
    });
}

PeriodicField project_to_boundary(const PeriodicField& w, double r1, double r2) {
    if (w.components() != 2) throw ConfigError("expected a two-component field");
    const int nt = w.time_grid().size();
    const int n = w.space_grid().intervals();
    std::vector<double> out(w.values().begin(), w.values().end());
    for (int i = 0; i < nt; ++i) {
        const double d1 = r1 * w(1, i, 0) - w(0, i, 0);
        for (int k = 0; k <= n; ++k) out[w.index(0, i, k)] += (1.0 - w.space_grid().node(k)) * d1;
        const double d2 = r2 * out[w.index(0, i, n)] - w(1, i, n);
        for (int k = 0; k <= n; ++k) out[w.index(1, i, k)] += w.space_grid().node(k) * d2;
    }
    return PeriodicField(2, w.time_grid(), w.space_grid(), std::move(out));
}

}  // namespace perihyp
