#pragma once

#include <memory>
#include <string>
#include <vector>

#include "perihyp/characteristics.hpp"
#include "perihyp/field.hpp"
#include "perihyp/problem.hpp"

namespace perihyp {

enum class ShiftMode { automatic, neumann, inverted, dense };

ShiftMode parse_shift_mode(const std::string& name);
std::string to_string(ShiftMode mode);

/// One step of a shift chain: multiply by `weight` (if non-empty) or shift by `shift`.
struct ShiftStep {
    std::vector<double> weight;
    double shift = 0.0;
};

/// Scalar periodic equation  v = M v + rhs  on the time grid, where M applies
/// `steps` right to left (steps.back() first). The common case is
/// v(t) = gain(t) v(t + theta) + rhs(t): steps = {weight gain, shift theta}.
struct ShiftEquation {
    std::vector<ShiftStep> steps;
    std::vector<double> rhs;

    static ShiftEquation simple(std::vector<double> gain, double theta, std::vector<double> rhs);

    std::vector<double> apply(std::span<const double> v) const;
    /// Effective pointwise gain g with (M v)(t) = g(t) v(t + theta).
    std::vector<double> gain() const;
    double total_shift() const;
};

struct ShiftSolveInfo {
    std::string method;  // neumann | inverted | dense
    int iterations = 0;
    double min_gain = 0.0;  // min / max of |gain| over the grid
    double max_gain = 0.0;
};

/// Margin by which |gain| must stay away from 1.
inline constexpr double kGainMargin = 1e-8;

/// Throws ResonantGain when neither max|gain| < 1 - delta nor min|gain| > 1 + delta.
std::vector<double> solve_shift_equation(const ShiftEquation& eq, ShiftMode mode = ShiftMode::automatic,
                                         ShiftSolveInfo* info = nullptr, double tol = 1e-12);

/// Speeds, reflection constants, and per-grid quadrature data shared by every
/// transport operator on one pair of grids.
class TransportGeometry {
public:
    TransportGeometry(std::shared_ptr<const TravelTimeTable> travel, double r1, double r2, TimeGrid tgrid,
                      SpaceGrid xgrid, int subcells = 1);

    static std::shared_ptr<const TransportGeometry> for_problem(const FirstOrderProblem& p, TimeGrid tgrid,
                                                                SpaceGrid xgrid, int refinement = 4);

    const TravelTimeTable& travel() const noexcept { return *travel_; }
    double r1() const noexcept { return r1_; }
    double r2() const noexcept { return r2_; }
    const TimeGrid& time_grid() const noexcept { return tgrid_; }
    const SpaceGrid& space_grid() const noexcept { return xgrid_; }

    /// A_j at x-nodes.
    double node_travel(int j, int k) const { return node_travel_[j][k]; }

    // x-quadrature: Gauss-Legendre nodes (five per sub-cell) in increasing order.
    int quad_size() const noexcept { return static_cast<int>(quad_x_.size()); }
    int quad_per_cell() const noexcept { return quad_per_cell_; }
    double quad_x(int m) const { return quad_x_[m]; }
    double quad_weight(int m) const { return quad_w_[m]; }
    double quad_travel(int j, int m) const { return quad_travel_[j][m]; }
    double quad_inv_speed(int j, int m) const { return quad_inv_speed_[j][m]; }
    /// partial[q][p] scaled to the sub-cell: integral of the local interpolant up to node q.
    double quad_partial(int q, int p) const { return quad_partial_[q][p]; }

private:
    std::shared_ptr<const TravelTimeTable> travel_;
    double r1_, r2_;
    TimeGrid tgrid_;
    SpaceGrid xgrid_;
    int quad_per_cell_ = 0;
    std::array<std::vector<double>, 2> node_travel_;
    std::vector<double> quad_x_, quad_w_;
    std::array<std::vector<double>, 2> quad_travel_, quad_inv_speed_;
    std::vector<std::vector<double>> quad_partial_;
};

struct InversionInfo {
    std::string reduction;  // "trace_at_0": unknown v2(.,0); "trace_at_1": unknown v1(.,1)
    ShiftSolveInfo shift;
};

/// C and D for a fixed diagonal coefficient field b (two components, b_j the
/// coefficient of v_j in the linearized equation), on the geometry's grids.
///
///   [C v]_1(t,x) = r1 c_1(t,x,0) v_2(t + alpha_1(x,0), 0)
///   [C v]_2(t,x) = r2 c_2(t,x,1) v_1(t + alpha_2(x,1), 1)
///   [D v]_1(t,x) =  int_0^x c_1(t,x,y) v_1(t + alpha_1(x,y), y) / a_1(y) dy
///   [D v]_2(t,x) = -int_x^1 c_2(t,x,y) v_2(t + alpha_2(x,y), y) / a_2(y) dy
///
/// Everything is computed in characteristic time tau = t - A_j(x) on the
/// uniform grid and shifted back row by row spectrally.
class TransportOperator {
public:
    TransportOperator(std::shared_ptr<const TransportGeometry> geometry, const PeriodicField& diagonal);

    const TransportGeometry& geometry() const noexcept { return *geometry_; }
    const PeriodicField& diagonal() const noexcept { return diagonal_; }

    PeriodicField apply_C(const PeriodicField& v) const;
    PeriodicField apply_D(const PeriodicField& v) const;
    /// Diagonal multiplication b .* v.
    PeriodicField apply_B(const PeriodicField& v) const;

    /// v with v = C v + f, through the scalar shift equation for one boundary trace.
    PeriodicField solve_I_minus_C(const PeriodicField& f, ShiftMode mode = ShiftMode::automatic,
                                  InversionInfo* info = nullptr) const;

    /// (I - C)^{-1} D g: the solution of the linearized boundary value problem.
    PeriodicField solve_linear(const PeriodicField& g, ShiftMode mode = ShiftMode::automatic,
                               InversionInfo* info = nullptr) const;

    /// Shift equations for v2(.,0) and for v1(.,1), given the right-hand side f.
    ShiftEquation trace_equation_at_0(const PeriodicField& f) const;
    ShiftEquation trace_equation_at_1(const PeriodicField& f) const;

private:
    // Rows of C applied to known traces.
    void fill_first_from_trace(std::span<const double> v2_at_0, std::vector<double>& out) const;
    void fill_second_from_trace(std::span<const double> v1_at_1, std::vector<double>& out) const;

    std::shared_ptr<const TransportGeometry> geometry_;
    PeriodicField diagonal_;
    int nt_, nodes_;
    // exp(G_j(tau, x_k)) at x-nodes and exp(-G_j(tau, y_m)) / a_j(y_m) * weight at quadrature nodes.
    std::array<std::vector<double>, 2> node_exp_;
    std::array<std::vector<double>, 2> quad_kernel_;
};

// Problem-level entry points (build the geometry and the diagonal field from u).

/// b_j(t,x) = d f_j / d u_j (x, u(t,x)).
PeriodicField diagonal_coefficients(const PeriodicField& u, const FirstOrderProblem& p);
/// Off-diagonal part of F'(u): (d f_1/d u_2 w_2, d f_2/d u_1 w_1).
PeriodicField apply_B_tilde(const PeriodicField& u, const PeriodicField& w, const FirstOrderProblem& p);
/// [F(u)](t,x) = (f_1(x,u(t,x)), f_2(x,u(t,x))).
PeriodicField superposition(const PeriodicField& u, const FirstOrderProblem& p);

/// (d_t v_j + a_j d_x v_j)_j with spectral t- and fourth-order x-derivatives.
PeriodicField apply_A(const PeriodicField& v, const FirstOrderProblem& p);
PeriodicField apply_A(const PeriodicField& v, const TravelTimeTable& speeds);
PeriodicField apply_B(const PeriodicField& u, const PeriodicField& v, const FirstOrderProblem& p);
PeriodicField apply_C(const PeriodicField& u, const PeriodicField& v, const FirstOrderProblem& p);
PeriodicField apply_D(const PeriodicField& u, const PeriodicField& v, const FirstOrderProblem& p);
PeriodicField solve_I_minus_C(const PeriodicField& u, const PeriodicField& f, const FirstOrderProblem& p,
                              ShiftMode mode = ShiftMode::automatic, InversionInfo* info = nullptr);
PeriodicField solve_linear(const PeriodicField& u, const PeriodicField& g, const FirstOrderProblem& p,
                           ShiftMode mode = ShiftMode::automatic, InversionInfo* info = nullptr);

}  // namespace perihyp
