#include "perihyp/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "perihyp/error.hpp"
#include "perihyp/wave2fos.hpp"

namespace perihyp {

void SolveOptions::validate() const {
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("tol must be positive and finite");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) throw ConfigError("relaxation must lie in (0, 1]");
    if (check_resonance_every < 0) throw ConfigError("check_resonance_every must be non-negative");
    if (!(margin_tol >= 0.0)) throw ConfigError("margin_tol must be non-negative");
    if (inner_max_iter < 1) throw ConfigError("inner_max_iter must be at least 1");
    if (dense_limit < 0) throw ConfigError("dense_limit must be non-negative");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::resonant_iterate: return "resonant_iterate";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::resonant_gain: return "resonant_gain";
        case SolveStatus::inner_stagnation: return "inner_stagnation";
    }
    return "unknown";
}

FirstOrderSystem::FirstOrderSystem(FirstOrderProblem p, TimeGrid tgrid, SpaceGrid xgrid, int refinement)
    : p_(std::move(p)), geo_(TransportGeometry::for_problem(p_, tgrid, xgrid, refinement)) {}

PeriodicField FirstOrderSystem::diagonal(const PeriodicField& u) const { return diagonal_coefficients(u, p_); }

PeriodicField FirstOrderSystem::forcing(const PeriodicField& u) const { return superposition(u, p_); }

PeriodicField FirstOrderSystem::off_diagonal(const PeriodicField& u, const PeriodicField& w) const {
    return apply_B_tilde(u, w, p_);
}

namespace {

PeriodicField residual_with(const TransportOperator& op, const FixedPointSystem& sys, const PeriodicField& u) {
    const auto g = sys.forcing(u) - op.apply_B(u);
    return u - op.apply_C(u) - op.apply_D(g);
}

void check_grids(const FixedPointSystem& sys, const PeriodicField& u) {
    const auto& geo = *sys.geometry();
    if (u.components() != 2 || !(u.time_grid() == geo.time_grid()) || !(u.space_grid() == geo.space_grid()))
        throw ConfigError("iterate does not match the system grids");
}

PeriodicField from_vector(const PeriodicField& like, const Eigen::VectorXd& x) {
    return PeriodicField(like.components(), like.time_grid(), like.space_grid(),
                         std::vector<double>(x.data(), x.data() + x.size()));
}

Eigen::VectorXd to_vector(const PeriodicField& f) {
    const auto v = f.values();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// w = K w + q with K = (I-C)^{-1} D Bt; q = -(I-C)^{-1} R.
PeriodicField quasi_newton_direction(const FixedPointSystem& sys, const TransportOperator& op,
                                     const PeriodicField& u, const PeriodicField& r, const SolveOptions& opts,
                                     QuasiNewtonInfo* info) {
    QuasiNewtonInfo local;
    QuasiNewtonInfo& out = info ? *info : local;
    out = {};
    const auto q = -op.solve_I_minus_C(r, opts.mode, &out.inversion);
    const double qnorm = q.sup_norm();
    auto K = [&](const PeriodicField& w) { return op.solve_linear(sys.off_diagonal(u, w), opts.mode); };

    const double target = 0.1 * opts.tol;
    PeriodicField w = q;
    double last = std::numeric_limits<double>::infinity();
    double previous = last;
    for (int m = 1; m <= opts.inner_max_iter; ++m) {
        const auto next = K(w) + q;
        last = (next - w).sup_norm();
        w = next;
        out.inner_iterations = m;
        if (last <= target) return w;
        if (!std::isfinite(last) || (m > 3 && last > 0.95 * previous)) break;
        previous = last;
    }

    const auto n = static_cast<Eigen::Index>(q.values().size());
    if (n <= opts.dense_limit) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            e[static_cast<std::size_t>(j)] = 1.0;
            const PeriodicField ej(q.components(), q.time_grid(), q.space_grid(), e);
            M.col(j) -= to_vector(K(ej));
            e[static_cast<std::size_t>(j)] = 0.0;
        }
        out.dense = true;
        return from_vector(q, M.partialPivLu().solve(to_vector(q)));
    }
    if (std::isfinite(last) && last <= 1e-3 * std::max(qnorm, std::numeric_limits<double>::min())) return w;
    throw InnerSolveStagnation("inner quasi-Newton iteration stagnated after " +
                               std::to_string(out.inner_iterations) + " iterations");
}

}  // namespace

PeriodicField fixed_point_residual(const FixedPointSystem& sys, const PeriodicField& u) {
    check_grids(sys, u);
    const TransportOperator op(sys.geometry(), sys.diagonal(u));
    return residual_with(op, sys, u);
}

PeriodicField fixed_point_residual(const PeriodicField& u, const FirstOrderProblem& p) {
    return fixed_point_residual(FirstOrderSystem(p, u.time_grid(), u.space_grid()), u);
}

PeriodicField quasi_newton_step(const FixedPointSystem& sys, const PeriodicField& u, const SolveOptions& opts,
                                QuasiNewtonInfo* info) {
    opts.validate();
    check_grids(sys, u);
    const TransportOperator op(sys.geometry(), sys.diagonal(u));
    return u + quasi_newton_direction(sys, op, u, residual_with(op, sys, u), opts, info);
}

PeriodicField quasi_newton_step(const PeriodicField& u, const FirstOrderProblem& p, const SolveOptions& opts,
                                QuasiNewtonInfo* info) {
    return quasi_newton_step(FirstOrderSystem(p, u.time_grid(), u.space_grid()), u, opts, info);
}

SolveReport picard_solve(const FixedPointSystem& sys, PeriodicField u0, const SolveOptions& opts) {
    opts.validate();
    check_grids(sys, u0);
    SolveReport rep;
    rep.solution = u0;
    PeriodicField u = std::move(u0);
    double omega = opts.relaxation;
    double best = std::numeric_limits<double>::infinity();
    PeriodicField best_u = u, best_r = u;

    try {
        for (int it = 1; it <= opts.max_iter; ++it) {
            const auto diag = sys.diagonal(u);
            if (opts.check_resonance_every > 0 && (it - 1) % opts.check_resonance_every == 0) {
                rep.nonresonance = check_transport(*sys.geometry(), diag, opts.margin_tol);
                if (!(*rep.nonresonance)[0].satisfied && !(*rep.nonresonance)[1].satisfied) {
                    rep.status = SolveStatus::resonant_iterate;
                    rep.message = "both nonresonance conditions fail at iteration " + std::to_string(it);
                    rep.solution = u;
                    return rep;
                }
            }
            const TransportOperator op(sys.geometry(), diag);
            const auto r = residual_with(op, sys, u);
            const double rn = r.sup_norm();
            rep.iterations = it;
            rep.residual_history.push_back(rn);
            if (!std::isfinite(rn)) {
                rep.message = "non-finite residual";
                break;
            }
            if (rn < best) {
                best = rn;
                best_u = u;
                best_r = r;
                rep.solution = u;
                if (it > 1) omega = std::min(opts.relaxation, 2.0 * omega);
            } else {
                omega = std::max(0.5 * omega, 1.0 / 1048576.0);
            }
            if (rn <= opts.tol) {
                rep.status = SolveStatus::converged;
                rep.converged = true;
                rep.solution = u;
                return rep;
            }
            if (it == opts.max_iter) break;
            // Step from the best iterate so a rejected step is retried with smaller omega.
            const bool restart = rn > best;
            const PeriodicField& base = restart ? best_u : u;
            const PeriodicField& base_r = restart ? best_r : r;
            if (opts.accelerant == Accelerant::picard) {
                u = base - omega * base_r;
            } else {
                QuasiNewtonInfo info;
                if (restart) {
                    const TransportOperator bop(sys.geometry(), sys.diagonal(base));
                    u = base + omega * quasi_newton_direction(sys, bop, base, base_r, opts, &info);
                } else {
                    u = base + omega * quasi_newton_direction(sys, op, base, base_r, opts, &info);
                }
                rep.inner_iterations.push_back(info.inner_iterations);
                rep.reduction = info.inversion.reduction;
            }
        }
    } catch (const ResonantGain& e) {
        rep.status = SolveStatus::resonant_gain;
        rep.message = e.what();
        return rep;
    } catch (const InnerSolveStagnation& e) {
        rep.status = SolveStatus::inner_stagnation;
        rep.message = e.what();
        return rep;
    }
    rep.status = SolveStatus::max_iterations;
    if (rep.message.empty()) rep.message = "no convergence within " + std::to_string(opts.max_iter) + " iterations";
    return rep;
}

SolveReport picard_solve(const FirstOrderProblem& p, PeriodicField u0, const SolveOptions& opts) {
    const FirstOrderSystem sys(p, u0.time_grid(), u0.space_grid());
    return picard_solve(sys, std::move(u0), opts);
}

SecondOrderSolveReport solve_second_order(const SecondOrderProblem& p, const PeriodicField& u0,
                                          const SolveOptions& opts) {
    const FosSystem sys(p, u0.time_grid(), u0.space_grid());
    SolveOptions o = opts;
    o.accelerant = Accelerant::quasi_newton;
    SecondOrderSolveReport out;
    out.fos = picard_solve(sys, to_fos(u0, p), o);
    out.u = apply_J(out.fos.solution, p);
    out.round_trip = (apply_J(to_fos(out.u, p), p) - out.u).sup_norm();
    return out;
}

}  // namespace perihyp
