#include "perihyp/wave2fos.hpp"

#include <vector>

#include "perihyp/error.hpp"
#include "perihyp/parallel.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

struct NodeSpeeds {
    std::vector<double> a, da;
};

NodeSpeeds node_speeds(const SecondOrderProblem& p, const SpaceGrid& xg) {
    NodeSpeeds s;
    for (int k = 0; k < xg.nodes(); ++k) {
        s.a.push_back(p.speed(xg.node(k)));
        s.da.push_back(p.speed_derivative(xg.node(k)));
    }
    return s;
}

void require_pair(const PeriodicField& v) {
    if (v.components() != 2) throw ConfigError("expected a two-component first-order field");
}

// Nonlocal arguments (Jv, Kv, Lv) at every grid point.
struct Arguments {
    PeriodicField J, K, L;
};

Arguments arguments(const PeriodicField& v, const SecondOrderProblem& p) {
    return {apply_J(v, p), apply_K(v), apply_L(v, p)};
}

}  // namespace

PeriodicField to_fos(const PeriodicField& u, const SecondOrderProblem& p) {
    if (u.components() != 1) throw ConfigError("to_fos expects a scalar field");
    const auto ut = dt_field(u);
    const auto ux = dx_field(u);
    const auto s = node_speeds(p, u.space_grid());
    return PeriodicField::zeros(2, u.time_grid(), u.space_grid()).map([&](int c, int i, int k, double) {
        const double au = s.a[k] * ux(0, i, k);
        return c == 0 ? ut(0, i, k) + au : ut(0, i, k) - au;
    });
}

PeriodicField apply_J(const PeriodicField& v, const SecondOrderProblem& p) {
    require_pair(v);
    const auto& xg = v.space_grid();
    const int nt = v.time_grid().size();
    const int n = xg.intervals();
    const GaussRule& g = gauss5();
    const int nq = static_cast<int>(g.nodes.size());
    // Quadrature of the piecewise-cubic interpolant of (v1 - v2) divided by 2a.
    std::vector<CubicStencil> st(static_cast<std::size_t>(n) * nq);
    std::vector<double> w(st.size());
    for (int k = 0; k < n; ++k) {
        for (int q = 0; q < nq; ++q) {
            const double y = xg.node(k) + xg.step() * g.nodes[q];
            st[k * nq + q] = cubic_stencil(xg, y);
            w[k * nq + q] = xg.step() * g.weights[q] / (2.0 * p.speed(y));
        }
    }
    std::vector<double> out(static_cast<std::size_t>(nt) * xg.nodes(), 0.0);
    parallel_for(0, static_cast<std::size_t>(nt), [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        double acc = 0.0;
        out[static_cast<std::size_t>(0) * nt + i] = 0.0;
        for (int k = 0; k < n; ++k) {
            for (int q = 0; q < nq; ++q) {
                const CubicStencil& s = st[k * nq + q];
                double d = 0.0;
                for (int m = 0; m < 4; ++m) d += s.weights[m] * (v(0, i, s.first + m) - v(1, i, s.first + m));
                acc += w[k * nq + q] * d;
            }
            out[static_cast<std::size_t>(k + 1) * nt + i] = acc;
        }
    });
    return PeriodicField(1, v.time_grid(), xg, std::move(out));
}

PeriodicField apply_K(const PeriodicField& v) {
    require_pair(v);
    return PeriodicField::zeros(1, v.time_grid(), v.space_grid()).map([&](int, int i, int k, double) {
        return 0.5 * (v(0, i, k) + v(1, i, k));
    });
}

PeriodicField apply_L(const PeriodicField& v, const SecondOrderProblem& p) {
    require_pair(v);
    const auto s = node_speeds(p, v.space_grid());
    return PeriodicField::zeros(1, v.time_grid(), v.space_grid()).map([&](int, int i, int k, double) {
        return (v(0, i, k) - v(1, i, k)) / (2.0 * s.a[k]);
    });
}

PeriodicField from_fos(const PeriodicField& v, const SecondOrderProblem& p) { return apply_J(v, p); }

PeriodicField fos_rhs(const PeriodicField& v, const SecondOrderProblem& p) {
    require_pair(v);
    const auto args = arguments(v, p);
    const auto s = node_speeds(p, v.space_grid());
    const auto& tg = v.time_grid();
    const auto& xg = v.space_grid();
    std::vector<double> common(static_cast<std::size_t>(tg.size()) * xg.nodes());
    parallel_for(0, static_cast<std::size_t>(xg.nodes()), [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        for (int i = 0; i < tg.size(); ++i) {
            common[static_cast<std::size_t>(k) * tg.size() + i] =
                p.source(tg.node(i), xg.node(k), args.J(0, i, k), args.K(0, i, k), args.L(0, i, k)) -
                0.5 * s.da[k] * (v(0, i, k) - v(1, i, k));
        }
    });
    std::vector<double> both(common);
    both.insert(both.end(), common.begin(), common.end());
    return PeriodicField(2, tg, xg, std::move(both));
}

PeriodicField b_coefficients(const PeriodicField& u, const SecondOrderProblem& p) {
    if (u.components() != 1) throw ConfigError("expected a scalar field");
    const auto ut = dt_field(u);
    const auto ux = dx_field(u);
    const auto s = node_speeds(p, u.space_grid());
    const auto& tg = u.time_grid();
    const auto& xg = u.space_grid();
    return PeriodicField::zeros(2, tg, xg).map([&](int c, int i, int k, double) {
        const auto d = p.source_partials(tg.node(i), xg.node(k), u(0, i, k), ut(0, i, k), ux(0, i, k));
        return c == 0 ? d.d[1] + d.d[2] / s.a[k] : d.d[1] - d.d[2] / s.a[k];
    });
}

PeriodicField c_coefficients(const PeriodicField& v, const SecondOrderProblem& p) {
    require_pair(v);
    const auto args = arguments(v, p);
    const auto s = node_speeds(p, v.space_grid());
    const auto& tg = v.time_grid();
    const auto& xg = v.space_grid();
    return PeriodicField::zeros(2, tg, xg).map([&](int c, int i, int k, double) {
        const auto d = p.source_partials(tg.node(i), xg.node(k), args.J(0, i, k), args.K(0, i, k), args.L(0, i, k));
        return c == 0 ? d.d[1] + d.d[2] / s.a[k] : d.d[1] - d.d[2] / s.a[k];
    });
}

FosLinearization fos_linearization_split(const PeriodicField& v, const SecondOrderProblem& p) {
    require_pair(v);
    const auto args = arguments(v, p);
    const auto s = node_speeds(p, v.space_grid());
    const auto& tg = v.time_grid();
    const auto& xg = v.space_grid();
    const std::size_t plane = static_cast<std::size_t>(tg.size()) * xg.nodes();
    std::vector<double> diag(2 * plane), off(2 * plane), d2(plane);
    parallel_for(0, static_cast<std::size_t>(xg.nodes()), [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        for (int i = 0; i < tg.size(); ++i) {
            const auto d =
                p.source_partials(tg.node(i), xg.node(k), args.J(0, i, k), args.K(0, i, k), args.L(0, i, k));
            const double cp = d.d[1] + d.d[2] / s.a[k];
            const double cm = d.d[1] - d.d[2] / s.a[k];
            const std::size_t at = static_cast<std::size_t>(k) * tg.size() + i;
            diag[at] = 0.5 * (cp - s.da[k]);
            diag[plane + at] = 0.5 * (cm + s.da[k]);
            off[at] = 0.5 * (cm + s.da[k]);
            off[plane + at] = 0.5 * (cp - s.da[k]);
            d2[at] = d.d[0];
        }
    });
    return FosLinearization{PeriodicField(2, tg, xg, std::move(diag)), PeriodicField(2, tg, xg, std::move(off)),
                            PeriodicField(1, tg, xg, std::move(d2)), p};
}

PeriodicField FosLinearization::apply_B(const PeriodicField& w) const {
    require_pair(w);
    return w.map([&](int c, int i, int k, double x) { return diagonal(c, i, k) * x; });
}

PeriodicField FosLinearization::apply_B_tilde(const PeriodicField& w) const {
    require_pair(w);
    return w.map([&](int c, int i, int k, double) { return off_diagonal(c, i, k) * w(1 - c, i, k); });
}

PeriodicField FosLinearization::apply_integral(const PeriodicField& w) const {
    const auto jw = apply_J(w, problem);
    return w.map([&](int, int i, int k, double) { return d2f(0, i, k) * jw(0, i, k); });
}

std::shared_ptr<const TransportGeometry> fos_geometry(const SecondOrderProblem& p, TimeGrid tgrid, SpaceGrid xgrid,
                                                      int refinement) {
    auto a = p.a;
    auto table = std::make_shared<const TravelTimeTable>(
        std::array<SpeedFunction, 2>{[a](double x) { return -a.eval(std::span<const double>(&x, 1)); },
                                     [a](double x) { return a.eval(std::span<const double>(&x, 1)); }},
        refinement * xgrid.intervals());
    return std::make_shared<const TransportGeometry>(table, -1.0, 1.0, tgrid, xgrid);
}

PeriodicField fos_apply_C(const PeriodicField& v, const PeriodicField& w, const SecondOrderProblem& p) {
    const TransportOperator op(fos_geometry(p, v.time_grid(), v.space_grid()), fos_linearization_split(v, p).diagonal);
    return op.apply_C(w);
}

PeriodicField fos_apply_D(const PeriodicField& v, const PeriodicField& w, const SecondOrderProblem& p) {
    const TransportOperator op(fos_geometry(p, v.time_grid(), v.space_grid()), fos_linearization_split(v, p).diagonal);
    return op.apply_D(w);
}

FosSystem::FosSystem(SecondOrderProblem p, TimeGrid tgrid, SpaceGrid xgrid, int refinement)
    : p_(std::move(p)), geo_(fos_geometry(p_, tgrid, xgrid, refinement)) {}

PeriodicField FosSystem::diagonal(const PeriodicField& v) const { return fos_linearization_split(v, p_).diagonal; }

PeriodicField FosSystem::forcing(const PeriodicField& v) const { return fos_rhs(v, p_); }

PeriodicField FosSystem::off_diagonal(const PeriodicField& v, const PeriodicField& w) const {
    const auto lin = fos_linearization_split(v, p_);
    return lin.apply_B_tilde(w) + lin.apply_integral(w);
}

}  // namespace perihyp
