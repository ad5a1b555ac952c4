#include "perihyp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "perihyp/error.hpp"
#include "perihyp/parallel.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

double sup(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// In-place trigonometric shift u(t) -> u(t + s) of one time series.
void shift_in_place(std::span<double> series, double s) {
    if (s == 0.0) return;
    thread_local std::vector<spectral::Complex> c;
    c.resize(spectral::coefficient_count(series.size()));
    spectral::forward(series, c);
    spectral::apply_shift(c, series.size(), s);
    spectral::inverse(c, series);
}

}  // namespace

ShiftMode parse_shift_mode(const std::string& name) {
    if (name == "auto") return ShiftMode::automatic;
    if (name == "neumann") return ShiftMode::neumann;
    if (name == "inverted") return ShiftMode::inverted;
    if (name == "dense") return ShiftMode::dense;
    throw ConfigError("unknown mode '" + name + "' (expected auto, neumann, inverted or dense)");
}

std::string to_string(ShiftMode mode) {
    switch (mode) {
        case ShiftMode::automatic: return "auto";
        case ShiftMode::neumann: return "neumann";
        case ShiftMode::inverted: return "inverted";
        case ShiftMode::dense: return "dense";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Shift equations

ShiftEquation ShiftEquation::simple(std::vector<double> gain, double theta, std::vector<double> rhs) {
    ShiftEquation eq;
    eq.steps.push_back(ShiftStep{std::move(gain), 0.0});
    eq.steps.push_back(ShiftStep{{}, theta});
    eq.rhs = std::move(rhs);
    return eq;
}

std::vector<double> ShiftEquation::apply(std::span<const double> v) const {
    std::vector<double> x(v.begin(), v.end());
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (!it->weight.empty()) {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] *= it->weight[i];
        } else {
            shift_in_place(x, it->shift);
        }
    }
    return x;
}

std::vector<double> ShiftEquation::gain() const {
    std::vector<double> g(rhs.size(), 1.0);
    double offset = 0.0;
    for (const auto& s : steps) {
        if (!s.weight.empty()) {
            const auto w = shift_series(s.weight, offset);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] *= w[i];
        } else {
            offset += s.shift;
        }
    }
    return g;
}

double ShiftEquation::total_shift() const {
    double theta = 0.0;
    for (const auto& s : steps) {
        if (s.weight.empty()) theta += s.shift;
    }
    return theta;
}

namespace {

std::vector<double> apply_inverse(const ShiftEquation& eq, std::span<const double> v) {
    std::vector<double> x(v.begin(), v.end());
    for (const auto& s : eq.steps) {
        if (!s.weight.empty()) {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] /= s.weight[i];
        } else {
            shift_in_place(x, -s.shift);
        }
    }
    return x;
}

int iteration_cap(double q, double tol) {
    if (q <= 0.0) return 4;
    return std::max(4, 10 * static_cast<int>(std::ceil(std::log(tol) / std::log(q))));
}

std::vector<double> neumann(const ShiftEquation& eq, double q, double tol, int& iterations) {
    std::vector<double> x = eq.rhs;
    const int cap = iteration_cap(q, tol);
    for (int it = 1; it <= cap; ++it) {
        auto next = eq.apply(x);
        double diff = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            next[i] += eq.rhs[i];
            diff = std::max(diff, std::abs(next[i] - x[i]));
        }
        x = std::move(next);
        ++iterations;
        if (diff <= tol * std::max(1.0, sup(x))) return x;
    }
    throw Error("shift equation: Neumann iteration did not converge within " + std::to_string(cap) + " steps");
}

// Solves e = M e + b through the approximate inverse: e = M^{-1}(e - b).
std::vector<double> inverted_pass(const ShiftEquation& eq, std::span<const double> b, double q, double tol,
                                  int& iterations) {
    std::vector<double> y(b.size(), 0.0), tmp(b.size());
    const int cap = iteration_cap(q, tol);
    for (int it = 1; it <= cap; ++it) {
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] - b[i];
        auto next = apply_inverse(eq, tmp);
        double diff = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) diff = std::max(diff, std::abs(next[i] - y[i]));
        y = std::move(next);
        ++iterations;
        if (diff <= tol * std::max(1.0, sup(y))) return y;
    }
    throw Error("shift equation: inverted iteration did not converge within " + std::to_string(cap) + " steps");
}

// Discrete shifts lose the Nyquist mode, so the reversed chain is only an
// approximate inverse; iterative refinement against the true operator
// recovers the exact discrete solution. On coarse grids the damaged Nyquist
// mode can make the refinement diverge; the caller then falls back to dense.
struct RefinementFailure : Error {
    using Error::Error;
};

std::vector<double> inverted(const ShiftEquation& eq, double q, double tol, int& iterations) {
    std::vector<double> x = inverted_pass(eq, eq.rhs, q, tol, iterations);
    double previous = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 50; ++pass) {
        auto r = eq.apply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += eq.rhs[i] - x[i];
        const double rn = sup(r);
        if (rn <= tol * std::max(1.0, sup(x))) return x;
        if (!(rn < previous)) break;
        previous = rn;
        const auto e = inverted_pass(eq, r, q, tol, iterations);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += e[i];
    }
    throw RefinementFailure("shift equation: refinement of the inverted branch did not converge");
}

// Largest grid for which the automatic mode assembles the shift equation densely.
constexpr std::size_t kDenseFallbackLimit = 1024;

std::vector<double> dense(const ShiftEquation& eq) {
    const int n = static_cast<int>(eq.rhs.size());
    Eigen::MatrixXd m(n, n);
    std::vector<double> unit(n, 0.0);
    for (int j = 0; j < n; ++j) {
        unit[j] = 1.0;
        const auto col = eq.apply(unit);
        unit[j] = 0.0;
        for (int i = 0; i < n; ++i) m(i, j) = (i == j ? 1.0 : 0.0) - col[i];
    }
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(eq.rhs.data(), n);
    const Eigen::VectorXd x = m.partialPivLu().solve(b);
    return std::vector<double>(x.data(), x.data() + n);
}

}  // namespace

std::vector<double> solve_shift_equation(const ShiftEquation& eq, ShiftMode mode, ShiftSolveInfo* info, double tol) {
    const auto g = eq.gain();
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (double v : g) {
        gmin = std::min(gmin, std::abs(v));
        gmax = std::max(gmax, std::abs(v));
    }
    ShiftSolveInfo local;
    ShiftSolveInfo& out = info ? *info : local;
    out = ShiftSolveInfo{};
    out.min_gain = gmin;
    out.max_gain = gmax;

    const bool contracting = gmax < 1.0 - kGainMargin;
    const bool expanding = gmin > 1.0 + kGainMargin;
    if (!contracting && !expanding) {
        throw ResonantGain("shift equation is resonant: |gain| ranges over [" + std::to_string(gmin) + ", " +
                               std::to_string(gmax) + "], which meets 1",
                           gmin, gmax);
    }
    if (mode == ShiftMode::neumann && !contracting) {
        throw ResonantGain("Neumann branch needs max|gain| < 1", gmin, gmax);
    }
    if (mode == ShiftMode::inverted && !expanding) {
        throw ResonantGain("inverted branch needs min|gain| > 1", gmin, gmax);
    }
    if (mode == ShiftMode::dense) {
        out.method = "dense";
        return dense(eq);
    }
    if (contracting && mode != ShiftMode::inverted) {
        out.method = "neumann";
        return neumann(eq, gmax, tol, out.iterations);
    }
    out.method = "inverted";
    if (mode == ShiftMode::inverted || eq.rhs.size() > kDenseFallbackLimit)
        return inverted(eq, 1.0 / gmin, tol, out.iterations);
    try {
        return inverted(eq, 1.0 / gmin, tol, out.iterations);
    } catch (const RefinementFailure&) {
        out.method = "dense";
        return dense(eq);
    }
}

// ---------------------------------------------------------------------------
// Geometry

TransportGeometry::TransportGeometry(std::shared_ptr<const TravelTimeTable> travel, double r1, double r2,
                                     TimeGrid tgrid, SpaceGrid xgrid, int subcells)
    : travel_(std::move(travel)), r1_(r1), r2_(r2), tgrid_(tgrid), xgrid_(xgrid) {
    if (subcells < 1) throw ConfigError("subcells must be positive");
    const GaussRule& g = gauss5();
    const int nq = static_cast<int>(g.nodes.size());
    quad_per_cell_ = nq * subcells;
    const int n = xgrid_.intervals();
    const double hs = xgrid_.step() / subcells;
    for (int j = 0; j < 2; ++j) {
        node_travel_[j].resize(xgrid_.nodes());
        for (int k = 0; k < xgrid_.nodes(); ++k) node_travel_[j][k] = travel_->cumulative(j, xgrid_.node(k));
    }
    for (int k = 0; k < n; ++k) {
        for (int s = 0; s < subcells; ++s) {
            const double left = xgrid_.node(k) + s * hs;
            for (int q = 0; q < nq; ++q) {
                quad_x_.push_back(left + hs * g.nodes[q]);
                quad_w_.push_back(hs * g.weights[q]);
            }
        }
    }
    for (int j = 0; j < 2; ++j) {
        quad_travel_[j].resize(quad_x_.size());
        quad_inv_speed_[j].resize(quad_x_.size());
        for (std::size_t m = 0; m < quad_x_.size(); ++m) {
            quad_travel_[j][m] = travel_->cumulative(j, quad_x_[m]);
            quad_inv_speed_[j][m] = 1.0 / travel_->speed(j, quad_x_[m]);
        }
    }
    quad_partial_.assign(nq, std::vector<double>(nq));
    for (int q = 0; q < nq; ++q) {
        for (int p = 0; p < nq; ++p) quad_partial_[q][p] = hs * g.partial[q][p];
    }
}

std::shared_ptr<const TransportGeometry> TransportGeometry::for_problem(const FirstOrderProblem& p, TimeGrid tgrid,
                                                                        SpaceGrid xgrid, int refinement) {
    auto table = std::make_shared<const TravelTimeTable>(TravelTimeTable::build(p, xgrid.intervals(), refinement));
    return std::make_shared<const TransportGeometry>(table, p.r1, p.r2, tgrid, xgrid);
}

// ---------------------------------------------------------------------------
// Operators

TransportOperator::TransportOperator(std::shared_ptr<const TransportGeometry> geometry, const PeriodicField& diagonal)
    : geometry_(std::move(geometry)), diagonal_(diagonal) {
    const auto& geo = *geometry_;
    if (diagonal.components() != 2 || !(diagonal.time_grid() == geo.time_grid()) ||
        !(diagonal.space_grid() == geo.space_grid())) {
        throw ConfigError("diagonal coefficient field must have two components on the operator grids");
    }
    nt_ = geo.time_grid().size();
    nodes_ = geo.space_grid().nodes();
    const int nq = geo.quad_size();
    const int per_cell = geo.quad_per_cell();
    const int npts = static_cast<int>(gauss5().nodes.size());
    const FieldSpectrum spectrum(diagonal);

    for (int j = 0; j < 2; ++j) {
        // integrand b_j(tau + A_j(y), y) / a_j(y) at every quadrature node
        std::vector<double> integrand(static_cast<std::size_t>(nq) * nt_);
        parallel_for(0, nq, [&](std::size_t m) {
            std::span<double> row(integrand.data() + m * nt_, nt_);
            spectrum.shifted_row(j, geo.quad_x(m), geo.quad_travel(j, m), row);
            const double inv = geo.quad_inv_speed(j, m);
            for (double& v : row) v *= inv;
        });

        auto& ne = node_exp_[j];
        auto& qk = quad_kernel_[j];
        ne.assign(static_cast<std::size_t>(nodes_) * nt_, 1.0);
        qk.assign(static_cast<std::size_t>(nq) * nt_, 0.0);
        std::vector<double> G(nt_, 0.0);
        for (int m0 = 0; m0 < nq; m0 += npts) {
            // one sub-cell of npts Gauss nodes
            for (int q = 0; q < npts; ++q) {
                const int m = m0 + q;
                for (int i = 0; i < nt_; ++i) {
                    double gi = G[i];
                    for (int p = 0; p < npts; ++p) gi += geo.quad_partial(q, p) * integrand[(m0 + p) * nt_ + i];
                    qk[static_cast<std::size_t>(m) * nt_ + i] =
                        std::exp(-gi) * geo.quad_inv_speed(j, m) * geo.quad_weight(m);
                }
            }
            for (int q = 0; q < npts; ++q) {
                const double w = geo.quad_weight(m0 + q);
                for (int i = 0; i < nt_; ++i) G[i] += w * integrand[(m0 + q) * nt_ + i];
            }
            if ((m0 + npts) % per_cell == 0) {
                const int k = (m0 + npts) / per_cell;
                for (int i = 0; i < nt_; ++i) ne[static_cast<std::size_t>(k) * nt_ + i] = std::exp(G[i]);
            }
        }
    }
}

void TransportOperator::fill_first_from_trace(std::span<const double> v2_at_0, std::vector<double>& out) const {
    const auto& geo = *geometry_;
    out.assign(static_cast<std::size_t>(nodes_) * nt_, 0.0);
    if (geo.r1() == 0.0) return;
    parallel_for(0, nodes_, [&](std::size_t k) {
        std::span<double> row(out.data() + k * nt_, nt_);
        const double* e = node_exp_[0].data() + k * nt_;
        for (int i = 0; i < nt_; ++i) row[i] = geo.r1() * e[i] * v2_at_0[i];
        shift_in_place(row, -geo.node_travel(0, static_cast<int>(k)));
    });
}

void TransportOperator::fill_second_from_trace(std::span<const double> v1_at_1, std::vector<double>& out) const {
    const auto& geo = *geometry_;
    out.assign(static_cast<std::size_t>(nodes_) * nt_, 0.0);
    if (geo.r2() == 0.0) return;
    std::vector<double> w(v1_at_1.begin(), v1_at_1.end());
    shift_in_place(w, geo.node_travel(1, nodes_ - 1));
    const double* last = node_exp_[1].data() + static_cast<std::size_t>(nodes_ - 1) * nt_;
    parallel_for(0, nodes_, [&](std::size_t k) {
        std::span<double> row(out.data() + k * nt_, nt_);
        const double* e = node_exp_[1].data() + k * nt_;
        for (int i = 0; i < nt_; ++i) row[i] = geo.r2() * (e[i] / last[i]) * w[i];
        shift_in_place(row, -geo.node_travel(1, static_cast<int>(k)));
    });
}

namespace {

PeriodicField assemble(const TransportGeometry& geo, std::vector<double> first, const std::vector<double>& second) {
    first.insert(first.end(), second.begin(), second.end());
    return PeriodicField(2, geo.time_grid(), geo.space_grid(), std::move(first));
}

void check_operand(const TransportGeometry& geo, const PeriodicField& v) {
    if (v.components() != 2 || !(v.time_grid() == geo.time_grid()) || !(v.space_grid() == geo.space_grid())) {
        throw ConfigError("operand must be a two-component field on the operator grids");
    }
}

}  // namespace

PeriodicField TransportOperator::apply_C(const PeriodicField& v) const {
    check_operand(*geometry_, v);
    std::vector<double> a, b;
    fill_first_from_trace(v.row(1, 0), a);
    fill_second_from_trace(v.row(0, nodes_ - 1), b);
    return assemble(*geometry_, std::move(a), b);
}

PeriodicField TransportOperator::apply_D(const PeriodicField& v) const {
    const auto& geo = *geometry_;
    check_operand(geo, v);
    const FieldSpectrum spectrum(v);
    const int nq = geo.quad_size();
    const int per_cell = geo.quad_per_cell();
    std::array<std::vector<double>, 2> rows;
    for (int j = 0; j < 2; ++j) {
        // cumulative H_j(tau, x_k) = int_0^{x_k} exp(-G_j) v_j(tau + A_j(y), y) / a_j dy
        std::vector<double> products(static_cast<std::size_t>(nq) * nt_);
        parallel_for(0, nq, [&](std::size_t m) {
            std::span<double> row(products.data() + m * nt_, nt_);
            spectrum.shifted_row(j, geo.quad_x(m), geo.quad_travel(j, m), row);
            const double* kern = quad_kernel_[j].data() + m * nt_;
            for (int i = 0; i < nt_; ++i) row[i] *= kern[i];
        });
        std::vector<double> H(static_cast<std::size_t>(nodes_) * nt_, 0.0);
        for (int k = 0; k + 1 < nodes_; ++k) {
            double* next = H.data() + static_cast<std::size_t>(k + 1) * nt_;
            const double* prev = H.data() + static_cast<std::size_t>(k) * nt_;
            for (int i = 0; i < nt_; ++i) next[i] = prev[i];
            for (int q = 0; q < per_cell; ++q) {
                const double* p = products.data() + static_cast<std::size_t>(k * per_cell + q) * nt_;
                for (int i = 0; i < nt_; ++i) next[i] += p[i];
            }
        }
        auto& out = rows[j];
        out.resize(H.size());
        const double* total = H.data() + static_cast<std::size_t>(nodes_ - 1) * nt_;
        parallel_for(0, nodes_, [&](std::size_t k) {
            std::span<double> row(out.data() + k * nt_, nt_);
            const double* e = node_exp_[j].data() + k * nt_;
            const double* h = H.data() + k * nt_;
            for (int i = 0; i < nt_; ++i) row[i] = j == 0 ? e[i] * h[i] : -e[i] * (total[i] - h[i]);
            shift_in_place(row, -geo.node_travel(j, static_cast<int>(k)));
        });
    }
    return assemble(geo, std::move(rows[0]), rows[1]);
}

PeriodicField TransportOperator::apply_B(const PeriodicField& v) const {
    check_operand(*geometry_, v);
    const auto b = diagonal_.values();
    return v.map([&](int c, int i, int k, double x) { return b[diagonal_.index(c, i, k)] * x; });
}

ShiftEquation TransportOperator::trace_equation_at_0(const PeriodicField& f) const {
    const auto& geo = *geometry_;
    const int n = nodes_ - 1;
    std::vector<double> pre(nt_), post(nt_);
    for (int i = 0; i < nt_; ++i) {
        pre[i] = geo.r1() * node_exp_[0][static_cast<std::size_t>(n) * nt_ + i];
        post[i] = geo.r2() * node_exp_[1][i] / node_exp_[1][static_cast<std::size_t>(n) * nt_ + i];
    }
    ShiftEquation eq;
    eq.steps = {ShiftStep{post, 0.0}, ShiftStep{{}, geo.node_travel(1, n)}, ShiftStep{{}, -geo.node_travel(0, n)},
                ShiftStep{pre, 0.0}};
    std::vector<double> f1(f.row(0, n).begin(), f.row(0, n).end());
    shift_in_place(f1, geo.node_travel(1, n));
    eq.rhs.resize(nt_);
    const auto f2 = f.row(1, 0);
    for (int i = 0; i < nt_; ++i) eq.rhs[i] = post[i] * f1[i] + f2[i];
    return eq;
}

ShiftEquation TransportOperator::trace_equation_at_1(const PeriodicField& f) const {
    const auto& geo = *geometry_;
    const int n = nodes_ - 1;
    std::vector<double> pre(nt_), post(nt_);
    for (int i = 0; i < nt_; ++i) {
        pre[i] = geo.r1() * node_exp_[0][static_cast<std::size_t>(n) * nt_ + i];
        post[i] = geo.r2() * node_exp_[1][i] / node_exp_[1][static_cast<std::size_t>(n) * nt_ + i];
    }
    ShiftEquation eq;
    std::vector<double> rhs(nt_);
    const auto f2 = f.row(1, 0);
    for (int i = 0; i < nt_; ++i) rhs[i] = pre[i] * f2[i];
    shift_in_place(rhs, -geo.node_travel(0, n));
    const auto f1 = f.row(0, n);
    for (int i = 0; i < nt_; ++i) rhs[i] += f1[i];
    eq.steps = {ShiftStep{{}, -geo.node_travel(0, n)}, ShiftStep{pre, 0.0}, ShiftStep{post, 0.0},
                ShiftStep{{}, geo.node_travel(1, n)}};
    eq.rhs = std::move(rhs);
    return eq;
}

PeriodicField TransportOperator::solve_I_minus_C(const PeriodicField& f, ShiftMode mode, InversionInfo* info) const {
    check_operand(*geometry_, f);
    InversionInfo local;
    InversionInfo& out = info ? *info : local;
    const int n = nodes_ - 1;

    auto add_f = [&](std::vector<double>& rows, int comp) {
        const auto fv = f.values();
        const std::size_t off = static_cast<std::size_t>(comp) * nodes_ * nt_;
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += fv[off + i];
    };

    std::vector<double> first, second;
    try {
        const auto trace = solve_shift_equation(trace_equation_at_0(f), mode, &out.shift);
        out.reduction = "trace_at_0";
        fill_first_from_trace(trace, first);
        add_f(first, 0);
        fill_second_from_trace(std::span<const double>(first.data() + static_cast<std::size_t>(n) * nt_, nt_),
                               second);
        add_f(second, 1);
    } catch (const ResonantGain& first_failure) {
        ShiftSolveInfo alt;
        std::vector<double> trace;
        try {
            trace = solve_shift_equation(trace_equation_at_1(f), mode, &alt);
        } catch (const ResonantGain& e) {
            throw ResonantGain(std::string("both boundary-trace reductions fail: ") + first_failure.what() + "; " +
                                   e.what(),
                               std::min(first_failure.min_gain(), e.min_gain()),
                               std::max(first_failure.max_gain(), e.max_gain()));
        }
        out.reduction = "trace_at_1";
        out.shift = alt;
        fill_second_from_trace(trace, second);
        add_f(second, 1);
        fill_first_from_trace(std::span<const double>(second.data(), nt_), first);
        add_f(first, 0);
    }
    return assemble(*geometry_, std::move(first), second);
}

PeriodicField TransportOperator::solve_linear(const PeriodicField& g, ShiftMode mode, InversionInfo* info) const {
    return solve_I_minus_C(apply_D(g), mode, info);
}

// ---------------------------------------------------------------------------
// Problem-level entry points

namespace {

void check_pair(const PeriodicField& u, const PeriodicField& v) {
    if (u.components() != 2 || v.components() != 2 || !u.same_grids(v)) {
        throw ConfigError("expected two-component fields on common grids");
    }
}

}  // namespace

PeriodicField diagonal_coefficients(const PeriodicField& u, const FirstOrderProblem& p) {
    if (u.components() != 2) throw ConfigError("expected a two-component field");
    std::vector<double> out(u.values().size());
    const int nt = u.time_grid().size();
    const int nodes = u.space_grid().nodes();
    parallel_for(0, static_cast<std::size_t>(nodes), [&](std::size_t k) {
        const double x = u.space_grid().node(static_cast<int>(k));
        for (int i = 0; i < nt; ++i) {
            const double t = u.time_grid().node(i);
            const double u1 = u(0, i, static_cast<int>(k)), u2 = u(1, i, static_cast<int>(k));
            for (int j = 0; j < 2; ++j) out[u.index(j, i, static_cast<int>(k))] = p.diagonal_partial(j, t, x, u1, u2);
        }
    });
    return PeriodicField(2, u.time_grid(), u.space_grid(), std::move(out));
}

PeriodicField apply_B_tilde(const PeriodicField& u, const PeriodicField& w, const FirstOrderProblem& p) {
    check_pair(u, w);
    std::vector<double> out(u.values().size());
    const int nt = u.time_grid().size();
    parallel_for(0, static_cast<std::size_t>(u.space_grid().nodes()), [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        const double x = u.space_grid().node(k);
        for (int i = 0; i < nt; ++i) {
            const double t = u.time_grid().node(i);
            const double u1 = u(0, i, k), u2 = u(1, i, k);
            out[u.index(0, i, k)] = p.partials(0, t, x, u1, u2)[1] * w(1, i, k);
            out[u.index(1, i, k)] = p.partials(1, t, x, u1, u2)[0] * w(0, i, k);
        }
    });
    return PeriodicField(2, u.time_grid(), u.space_grid(), std::move(out));
}

PeriodicField superposition(const PeriodicField& u, const FirstOrderProblem& p) {
    if (u.components() != 2) throw ConfigError("expected a two-component field");
    std::vector<double> out(u.values().size());
    const int nt = u.time_grid().size();
    parallel_for(0, static_cast<std::size_t>(u.space_grid().nodes()), [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        const double x = u.space_grid().node(k);
        for (int i = 0; i < nt; ++i) {
            const double t = u.time_grid().node(i);
            const double u1 = u(0, i, k), u2 = u(1, i, k);
            for (int j = 0; j < 2; ++j) out[u.index(j, i, k)] = p.source(j, t, x, u1, u2);
        }
    });
    return PeriodicField(2, u.time_grid(), u.space_grid(), std::move(out));
}

PeriodicField apply_A(const PeriodicField& v, const TravelTimeTable& speeds) {
    if (v.components() != 2) throw ConfigError("expected a two-component field");
    const PeriodicField vt = dt_field(v);
    const PeriodicField vx = dx_field(v);
    std::array<std::vector<double>, 2> a;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < v.space_grid().nodes(); ++k) a[j].push_back(speeds.speed(j, v.space_grid().node(k)));
    }
    return vt.map([&](int c, int i, int k, double value) { return value + a[c][k] * vx(c, i, k); });
}

PeriodicField apply_A(const PeriodicField& v, const FirstOrderProblem& p) {
    if (v.components() != 2) throw ConfigError("expected a two-component field");
    const PeriodicField vt = dt_field(v);
    const PeriodicField vx = dx_field(v);
    std::array<std::vector<double>, 2> a;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < v.space_grid().nodes(); ++k) a[j].push_back(p.speed(j, v.space_grid().node(k)));
    }
    return vt.map([&](int c, int i, int k, double value) { return value + a[c][k] * vx(c, i, k); });
}

PeriodicField apply_B(const PeriodicField& u, const PeriodicField& v, const FirstOrderProblem& p) {
    check_pair(u, v);
    const PeriodicField b = diagonal_coefficients(u, p);
    return v.map([&](int c, int i, int k, double x) { return b(c, i, k) * x; });
}

namespace {

TransportOperator operator_at(const PeriodicField& u, const FirstOrderProblem& p) {
    return TransportOperator(TransportGeometry::for_problem(p, u.time_grid(), u.space_grid()),
                             diagonal_coefficients(u, p));
}

}  // namespace

PeriodicField apply_C(const PeriodicField& u, const PeriodicField& v, const FirstOrderProblem& p) {
    check_pair(u, v);
    return operator_at(u, p).apply_C(v);
}

PeriodicField apply_D(const PeriodicField& u, const PeriodicField& v, const FirstOrderProblem& p) {
    check_pair(u, v);
    return operator_at(u, p).apply_D(v);
}

PeriodicField solve_I_minus_C(const PeriodicField& u, const PeriodicField& f, const FirstOrderProblem& p,
                              ShiftMode mode, InversionInfo* info) {
    check_pair(u, f);
    return operator_at(u, p).solve_I_minus_C(f, mode, info);
}

PeriodicField solve_linear(const PeriodicField& u, const PeriodicField& g, const FirstOrderProblem& p,
                           ShiftMode mode, InversionInfo* info) {
    check_pair(u, g);
    return operator_at(u, p).solve_linear(g, mode, info);
}

}  // namespace perihyp
