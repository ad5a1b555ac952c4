#pragma once

#include <cstdint>

#include "perihyp/field.hpp"

namespace perihyp {

/// Seeded random field sum_{k<=t_modes, m<=x_modes} (a cos 2pi k t + b sin 2pi k t) cos(m pi x) / (1+k+m)^2
/// with a, b uniform in [-1,1]; band-limited in t, smooth in x.
PeriodicField random_band_limited(std::uint64_t seed, int components, TimeGrid tgrid, SpaceGrid xgrid,
                                  int t_modes = 2, int x_modes = 3);

/// Adds linear-in-x corrections so that v1(t,0) = r1 v2(t,0) and v2(t,1) = r2 v1(t,1).
PeriodicField project_to_boundary(const PeriodicField& w, double r1, double r2);

}  // namespace perihyp
