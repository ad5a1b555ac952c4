#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "perihyp/field.hpp"
#include "perihyp/problem.hpp"

namespace perihyp {

/// Sup-norm of the fixed-point residual; needs no derivatives of u.
double weak_residual(const PeriodicField& u, const FirstOrderProblem& p);

/// Sup-norm over grid nodes of the pointwise PDE defect
/// (spectral t-derivatives, fourth-order x-derivatives).
double classical_residual(const PeriodicField& u, const FirstOrderProblem& p);
/// u_tt - a^2 u_xx - f(x, u, u_t, u_x) for a scalar u.
double classical_residual(const PeriodicField& u, const SecondOrderProblem& p);

struct FourierProfile {
    int component = 0;
    double x = 0.0;
    std::vector<double> magnitude;  // |c_k|, k = 0..n_t/2
    double exponent = 0.0;          // fitted s in |c_k| ~ k^-s; NaN if nothing to fit
    bool spectral = false;
};

struct RegularityEstimate {
    std::vector<FourierProfile> profiles;
    double exponent = 0.0;  // smallest fitted exponent over the profiles; NaN if all are spectral
    bool spectral_flag = false;
    int k_min = 4, k_max = 0;
};

/// Fourier magnitudes of t -> u_c(t, x) at every probe x and component, with a
/// least-squares fit of log|c_k| against log k over k in [4, n_t/4]. Modes
/// below 1e-12 times the profile scale are left out of the fit (this also
/// drops the even modes of anti-periodic data); a profile is spectral when
/// the magnitudes fall below that level before the end of the window.
RegularityEstimate regularity_estimate(const PeriodicField& u, const std::vector<double>& x_probe);

/// CSV `x,k,magnitude,comp` (components numbered from 1).
void write_fourier_csv(std::ostream& out, const RegularityEstimate& est);

enum class PhiKind { triangle, quadratic_spline, smooth_harmonic };

PhiKind parse_phi_kind(const std::string& name);
std::string to_string(PhiKind kind);

/// Anti-periodic profiles: phi(t + 1/2) = -phi(t).
///   triangle:          4 |t mod 1 - 1/2| - 1
///   quadratic_spline:  8 t (1 - 2t) on [0, 1/2], continued anti-periodically (C^1)
///   smooth_harmonic:   sin(2 pi t)
double phi(PhiKind kind, double t);

struct Counterexample {
    PeriodicField u;
    FirstOrderProblem problem;
};

/// u = (phi(t - x/4), phi(t + x/4)) on a1 = 4, a2 = -4, f = 0, r1 = 1, r2 = -1.
/// Every such u solves the weak problem; only smooth phi give classical solutions.
Counterexample counterexample_field(PhiKind kind, TimeGrid tgrid, SpaceGrid xgrid);

/// The resonant problem above.
FirstOrderProblem resonant_example();

}  // namespace perihyp
