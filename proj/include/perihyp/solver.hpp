#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "perihyp/field.hpp"
#include "perihyp/nonresonance.hpp"
#include "perihyp/problem.hpp"
#include "perihyp/transport.hpp"

namespace perihyp {

enum class Accelerant { picard, quasi_newton };

struct SolveOptions {
    int max_iter = 200;
    double tol = 1e-10;       // sup-norm of the fixed-point residual
    double relaxation = 1.0;  // omega in (0,1]
    Accelerant accelerant = Accelerant::picard;
    int check_resonance_every = 10;  // 0 disables the check
    double margin_tol = kDefaultMarginTolerance;
    ShiftMode mode = ShiftMode::automatic;
    int inner_max_iter = 200;
    /// Dense assembly of the inner quasi-Newton operator is allowed up to this many unknowns.
    int dense_limit = 4000;

    void validate() const;
};

enum class SolveStatus { converged, resonant_iterate, max_iterations, resonant_gain, inner_stagnation };

std::string to_string(SolveStatus s);

struct SolveReport {
    SolveStatus status = SolveStatus::max_iterations;
    bool converged = false;
    int iterations = 0;  // residual evaluations
    std::vector<double> residual_history;
    std::vector<int> inner_iterations;  // quasi-Newton only
    std::optional<std::array<NonresonanceReport, 2>> nonresonance;  // at the last check
    std::string reduction;  // boundary-trace reduction used by the last inversion, if any
    std::string message;
    PeriodicField solution;  // converged iterate, or the best one seen
};

/// A problem written as the fixed-point equation u = C(u)u + D(u)(F(u) - B(u)u)
/// of a two-component reflection transport system.
class FixedPointSystem {
public:
    virtual ~FixedPointSystem() = default;

    virtual std::shared_ptr<const TransportGeometry> geometry() const = 0;
    /// Diagonal linearization coefficients (the field defining B(u), C(u), D(u)).
    virtual PeriodicField diagonal(const PeriodicField& u) const = 0;
    /// Superposition F(u).
    virtual PeriodicField forcing(const PeriodicField& u) const = 0;
    /// (F'(u) - B(u)) w: everything in the derivative except the diagonal.
    virtual PeriodicField off_diagonal(const PeriodicField& u, const PeriodicField& w) const = 0;
    /// False if the nonlinearity depends on t explicitly.
    virtual bool autonomous() const = 0;
};

class FirstOrderSystem final : public FixedPointSystem {
public:
    FirstOrderSystem(FirstOrderProblem p, TimeGrid tgrid, SpaceGrid xgrid, int refinement = 4);

    const FirstOrderProblem& problem() const noexcept { return p_; }
    std::shared_ptr<const TransportGeometry> geometry() const override { return geo_; }
    PeriodicField diagonal(const PeriodicField& u) const override;
    PeriodicField forcing(const PeriodicField& u) const override;
    PeriodicField off_diagonal(const PeriodicField& u, const PeriodicField& w) const override;
    bool autonomous() const override { return p_.autonomous(); }

private:
    FirstOrderProblem p_;
    std::shared_ptr<const TransportGeometry> geo_;
};

/// u - C(u)u - D(u)(F(u) - B(u)u).
PeriodicField fixed_point_residual(const FixedPointSystem& sys, const PeriodicField& u);
PeriodicField fixed_point_residual(const PeriodicField& u, const FirstOrderProblem& p);

struct QuasiNewtonInfo {
    int inner_iterations = 0;
    bool dense = false;
    InversionInfo inversion;
};

/// u + w with (I - (I-C)^{-1} D Bt) w = -(I-C)^{-1} R(u), C, D, B frozen at u and
/// Bt = F'(u) - B(u). Inner solve: fixed-point iteration on the compact part,
/// dense assembly when that stagnates and the system is small enough.
PeriodicField quasi_newton_step(const FixedPointSystem& sys, const PeriodicField& u, const SolveOptions& opts = {},
                                QuasiNewtonInfo* info = nullptr);
PeriodicField quasi_newton_step(const PeriodicField& u, const FirstOrderProblem& p, const SolveOptions& opts = {},
                                QuasiNewtonInfo* info = nullptr);

/// Relaxed iteration u <- u - omega R(u) (Picard) or u <- u + omega w (quasi-Newton).
/// omega halves whenever the residual grows. Every check_resonance_every
/// iterations (starting with the first) both conditions are evaluated at the
/// iterate and the solve stops if both fail.
SolveReport picard_solve(const FixedPointSystem& sys, PeriodicField u0, const SolveOptions& opts = {});
SolveReport picard_solve(const FirstOrderProblem& p, PeriodicField u0, const SolveOptions& opts = {});

struct SecondOrderSolveReport {
    SolveReport fos;       // the solve of the first-order system; solution is v
    PeriodicField u;       // J v
    double round_trip = 0; // sup |J(to_fos(u)) - u|
};

/// Transforms u0 to the first-order system, solves it, and maps back by J.
/// Always uses the quasi-Newton accelerant: with r1 r2 = -1 the plain
/// iteration is often not contractive.
SecondOrderSolveReport solve_second_order(const SecondOrderProblem& p, const PeriodicField& u0,
                                          const SolveOptions& opts = {});

}  // namespace perihyp
