#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "perihyp/field.hpp"
#include "perihyp/problem.hpp"
#include "perihyp/transport.hpp"

namespace perihyp {

inline constexpr double kDefaultMarginTolerance = 1e-8;

struct NonresonanceReport {
    std::string condition_id;            // first_order_1 | first_order_2 | second_order_1 | second_order_2
    std::string form;                    // "reflection", "sum" or "as_printed"
    std::vector<double> integral_values;  // left-hand side at every time node
    double threshold = 0.0;              // resonance value of the integral
    double margin = 0.0;                 // min_t |integral - threshold|; +inf if r1 r2 = 0
    bool satisfied = false;              // margin > tolerance
    bool reflection_free = false;        // r1 r2 = 0: satisfied without evaluating anything
    double tolerance = kDefaultMarginTolerance;
};

/// Both conditions for a transport system with diagonal coefficient field b:
///   condition 1: int_0^1 b_1(t - alpha_1(x,1), x)/a_1 - b_2(t - alpha_2(x,1), x)/a_2 dx
///   condition 2: the same with t + alpha_j(0,x).
/// Resonance happens where the integral equals -ln|r1 r2|, which is where the
/// gain of the corresponding boundary-trace equation has modulus one.
std::array<NonresonanceReport, 2> check_transport(const TransportGeometry& geo, const PeriodicField& diagonal,
                                                   double tol = kDefaultMarginTolerance);

std::array<NonresonanceReport, 2> check_first_order(const PeriodicField& u, const FirstOrderProblem& p,
                                                     double tol = kDefaultMarginTolerance);

struct SecondOrderNonresonance {
    std::array<NonresonanceReport, 2> sum;         // b_+ + b_- form; the verdict
    std::array<NonresonanceReport, 2> as_printed;  // b_+ - b_- form, for reference
};

/// b_+ = d_3 f + d_4 f / a and b_- = d_3 f - d_4 f / a evaluated along u:
///   condition 1: int_0^1 [b_+(t + alpha(x,1), x) + b_-(t - alpha(x,1), x)] / a dx,
///   condition 2: int_0^1 [b_+(t - alpha(0,x), x) + b_-(t + alpha(0,x), x)] / a dx,
/// both with threshold 0. u_t and u_x are taken spectrally / by finite differences.
SecondOrderNonresonance check_second_order(const PeriodicField& u, const SecondOrderProblem& p,
                                           double tol = kDefaultMarginTolerance);

/// Eigenvalues of a_j v_j' - b_j v_j = lambda v_j, v1(0) = r1 v2(0), v2(1) = r2 v1(1),
/// b_j(x) = d_{u_j} f_j(x, ustat(x)):
///   lambda_k = [ln|r1 r2| - int (b2/a2 - b1/a1)] / D + i (arg(r1 r2) + 2 pi k) / D,
///   D = int (1/a2 - 1/a1).
/// Throws DegenerateDenominator if D vanishes and DomainError if r1 r2 = 0.
using StationaryProfile = std::function<std::array<double, 2>(double)>;

std::vector<std::complex<double>> stationary_eigenvalues(const FirstOrderProblem& p, const StationaryProfile& ustat,
                                                         int k_min, int k_max);

/// Independent check: Chebyshev collocation of the same eigenproblem with the
/// boundary rows replaced, solved as a generalized eigenproblem. Returns the
/// finite eigenvalues sorted by |Im|.
std::vector<std::complex<double>> collocation_eigenvalues(const FirstOrderProblem& p, const StationaryProfile& ustat,
                                                          int points = 64);

}  // namespace perihyp
