#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "perihyp/expr.hpp"

namespace perihyp {

/// u_j,t + a_j(x) u_j,x = f_j(x, u1, u2) on [0,1], periodic in t, with
/// u1(t,0) = r1 u2(t,0) and u2(t,1) = r2 u1(t,1).
///
/// f_j may also reference `t` (used for manufactured sources); such problems
/// are not autonomous and lose time-shift equivariance.
struct FirstOrderProblem {
    Expr a1, a2;  // over x
    Expr f1, f2;  // over x, u1, u2, t
    double r1 = 0.0;
    double r2 = 0.0;

    static const std::vector<std::string>& speed_variables();
    static const std::vector<std::string>& source_variables();

    static FirstOrderProblem from_strings(const std::string& a1, const std::string& a2, const std::string& f1,
                                          const std::string& f2, double r1, double r2);

    double speed(int j, double x) const;
    double source(int j, double t, double x, double u1, double u2) const;
    /// d f_j / d u_j.
    double diagonal_partial(int j, double t, double x, double u1, double u2) const;
    /// d f_j / d u1 and d f_j / d u2.
    std::array<double, 2> partials(int j, double t, double x, double u1, double u2) const;

    bool autonomous() const;
};

/// u_tt - a(x)^2 u_xx = f(x, u, u_t, u_x), u(t,0) = 0, u_x(t,1) = 0, periodic in t.
struct SecondOrderProblem {
    Expr a;  // over x
    Expr f;  // over x, u, ut, ux, t

    static const std::vector<std::string>& speed_variables();
    static const std::vector<std::string>& source_variables();

    static SecondOrderProblem from_strings(const std::string& a, const std::string& f);

    double speed(double x) const;
    /// a'(x) by forward-mode differentiation.
    double speed_derivative(double x) const;
    double source(double t, double x, double u, double ut, double ux) const;
    /// Value and partials with respect to u, ut, ux (the 2nd, 3rd, 4th arguments).
    Expr::Partials source_partials(double t, double x, double u, double ut, double ux) const;

    bool autonomous() const;
};

using Problem = std::variant<FirstOrderProblem, SecondOrderProblem>;

struct ValidationReport {
    bool passed = false;
    double min_abs_a1 = 0.0;  // second order: min |a|
    double min_abs_a2 = 0.0;  // first order only
    double min_gap = 0.0;     // first order only: min |a1 - a2|
    double margin_tolerance = 1e-10;
    std::vector<std::string> messages;
};

/// Samples the speeds on 1001 equally spaced points of [0,1]; heuristic.
ValidationReport validate_problem(const FirstOrderProblem& p, double tolerance = 1e-10);
ValidationReport validate_problem(const SecondOrderProblem& p, double tolerance = 1e-10);

/// JSON problem description: {"kind": "first_order", "a1", "a2", "f1", "f2", "r1", "r2"}
/// or {"kind": "second_order", "a", "f"}. Throws ConfigError / ParseError.
Problem parse_problem_json(const std::string& text);
Problem load_problem(const std::string& path);

}  // namespace perihyp
