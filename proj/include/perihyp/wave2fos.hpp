#pragma once

#include <memory>

#include "perihyp/field.hpp"
#include "perihyp/problem.hpp"
#include "perihyp/solver.hpp"
#include "perihyp/transport.hpp"

namespace perihyp {

// Riemann-invariant form of u_tt - a^2 u_xx = f(x, u, u_t, u_x):
//   v1 = u_t + a u_x,  v2 = u_t - a u_x,
//   v1_t - a v1_x = v2_t + a v2_x = f(x, Jv, Kv, Lv) - (a'/2)(v1 - v2),
//   v1(t,0) + v2(t,0) = v1(t,1) - v2(t,1) = 0,
// with Jv = int_0^x (v1 - v2)/(2a), Kv = (v1 + v2)/2, Lv = (v1 - v2)/(2a).

/// v from a scalar u (spectral u_t, fourth-order u_x).
PeriodicField to_fos(const PeriodicField& u, const SecondOrderProblem& p);

PeriodicField apply_J(const PeriodicField& v, const SecondOrderProblem& p);
PeriodicField apply_K(const PeriodicField& v);
PeriodicField apply_L(const PeriodicField& v, const SecondOrderProblem& p);

/// u = J v.
PeriodicField from_fos(const PeriodicField& v, const SecondOrderProblem& p);

/// Common right-hand side of both equations, as a two-component field with equal components.
PeriodicField fos_rhs(const PeriodicField& v, const SecondOrderProblem& p);

/// b_+ = d_3 f + d_4 f / a and b_- = d_3 f - d_4 f / a along a scalar u (components 0, 1).
PeriodicField b_coefficients(const PeriodicField& u, const SecondOrderProblem& p);
/// c_+(v) = b_+(Jv), c_-(v) = b_-(Jv) evaluated with the nonlocal arguments (Jv, Kv, Lv).
PeriodicField c_coefficients(const PeriodicField& v, const SecondOrderProblem& p);

/// F'(v) = B + Bt + Jop:
///   B  w = ( (c_+ - a')/2 w1, (c_- + a')/2 w2 )
///   Bt w = ( (c_- + a')/2 w2, (c_+ - a')/2 w1 )
///   Jop w = d_2 f Jw in both components.
struct FosLinearization {
    PeriodicField diagonal;      // weights of B
    PeriodicField off_diagonal;  // weights of Bt (component 0 multiplies w2)
    PeriodicField d2f;           // scalar
    SecondOrderProblem problem;

    PeriodicField apply_B(const PeriodicField& w) const;
    PeriodicField apply_B_tilde(const PeriodicField& w) const;
    PeriodicField apply_integral(const PeriodicField& w) const;
};

FosLinearization fos_linearization_split(const PeriodicField& v, const SecondOrderProblem& p);

/// Transport geometry of the first-order system: a1 = -a, a2 = a, r1 = -1, r2 = 1.
std::shared_ptr<const TransportGeometry> fos_geometry(const SecondOrderProblem& p, TimeGrid tgrid, SpaceGrid xgrid,
                                                      int refinement = 4);

/// C(v) and D(v) of the first-order system, by delegation to TransportOperator.
PeriodicField fos_apply_C(const PeriodicField& v, const PeriodicField& w, const SecondOrderProblem& p);
PeriodicField fos_apply_D(const PeriodicField& v, const PeriodicField& w, const SecondOrderProblem& p);

class FosSystem final : public FixedPointSystem {
public:
    FosSystem(SecondOrderProblem p, TimeGrid tgrid, SpaceGrid xgrid, int refinement = 4);

    const SecondOrderProblem& problem() const noexcept { return p_; }
    std::shared_ptr<const TransportGeometry> geometry() const override { return geo_; }
    PeriodicField diagonal(const PeriodicField& v) const override;
    PeriodicField forcing(const PeriodicField& v) const override;
    PeriodicField off_diagonal(const PeriodicField& v, const PeriodicField& w) const override;
    bool autonomous() const override { return p_.autonomous(); }

private:
    SecondOrderProblem p_;
    std::shared_ptr<const TransportGeometry> geo_;
};

}  // namespace perihyp
