#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perihyp/problem.hpp"
#include "perihyp/transport.hpp"

namespace perihyp {

/// Sup-norm defects of the operator identities for one pair (u, v), with L = A - B(u):
///   consistency_C:  L C v = 0
///   consistency_D:  L D v = v
///   left_inverse:   D L w = w - C w          (w: v projected onto the boundary conditions)
///   inversion:      L (I-C)^{-1} D v = v
///   factorization:  K^2 v = (I-C)^{-1} [(D Bt)^2 + D Bt C (I-C)^{-1} D Bt] v,  K = (I-C)^{-1} D Bt
/// The first four are discretization errors; the last one is algebraic.
struct IdentityDefects {
    double consistency_C = 0.0;
    double consistency_D = 0.0;
    double left_inverse = 0.0;
    double inversion = 0.0;
    double factorization = 0.0;

    static const std::vector<std::string>& names();
    std::vector<double> values() const;
};

IdentityDefects identity_defects(const FirstOrderProblem& p, const PeriodicField& u, const PeriodicField& v,
                                 ShiftMode mode = ShiftMode::automatic);

/// Worst defects over `fields` seeded random pairs (seeds seed + 2i, seed + 2i + 1).
IdentityDefects worst_identity_defects(const FirstOrderProblem& p, TimeGrid tgrid, SpaceGrid xgrid,
                                       std::uint64_t seed, int fields, ShiftMode mode = ShiftMode::automatic);

/// Nonconstant speeds with genuine coupling: the default problem of the battery.
FirstOrderProblem identity_battery_problem();

}  // namespace perihyp
