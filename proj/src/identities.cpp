#include "perihyp/identities.hpp"

#include <algorithm>

#include "perihyp/sampling.hpp"

namespace perihyp {

const std::vector<std::string>& IdentityDefects::names() {
    static const std::vector<std::string> n{"consistency_C", "consistency_D", "left_inverse", "inversion",
                                            "factorization"};
    return n;
}

std::vector<double> IdentityDefects::values() const {
    return {consistency_C, consistency_D, left_inverse, inversion, factorization};
}

IdentityDefects identity_defects(const FirstOrderProblem& p, const PeriodicField& u, const PeriodicField& v,
                                 ShiftMode mode) {
    const auto geo = TransportGeometry::for_problem(p, u.time_grid(), u.space_grid());
    const TransportOperator op(geo, diagonal_coefficients(u, p));
    auto L = [&](const PeriodicField& w) { return apply_A(w, geo->travel()) - op.apply_B(w); };
    auto Bt = [&](const PeriodicField& w) { return apply_B_tilde(u, w, p); };
    auto inv = [&](const PeriodicField& w) { return op.solve_I_minus_C(w, mode); };

    IdentityDefects d;
    d.consistency_C = L(op.apply_C(v)).sup_norm();
    d.consistency_D = (L(op.apply_D(v)) - v).sup_norm();
    const auto w = project_to_boundary(v, p.r1, p.r2);
    d.left_inverse = (op.apply_D(L(w)) - (w - op.apply_C(w))).sup_norm();
    d.inversion = (L(op.solve_linear(v, mode)) - v).sup_norm();

    const auto dbv = op.apply_D(Bt(v));
    const auto kv = inv(dbv);
    const auto kkv = inv(op.apply_D(Bt(kv)));
    const auto rhs = inv(op.apply_D(Bt(dbv)) + op.apply_D(Bt(op.apply_C(kv))));
    d.factorization = (kkv - rhs).sup_norm();
    return d;
}

IdentityDefects worst_identity_defects(const FirstOrderProblem& p, TimeGrid tgrid, SpaceGrid xgrid,
                                       std::uint64_t seed, int fields, ShiftMode mode) {
    IdentityDefects worst;
    for (int i = 0; i < fields; ++i) {
        const auto u = random_band_limited(seed + 2 * i, 2, tgrid, xgrid);
        const auto v = random_band_limited(seed + 2 * i + 1, 2, tgrid, xgrid);
        const auto d = identity_defects(p, u, v, mode);
        worst.consistency_C = std::max(worst.consistency_C, d.consistency_C);
        worst.consistency_D = std::max(worst.consistency_D, d.consistency_D);
        worst.left_inverse = std::max(worst.left_inverse, d.left_inverse);
        worst.inversion = std::max(worst.inversion, d.inversion);
        worst.factorization = std::max(worst.factorization, d.factorization);
    }
    return worst;
}

FirstOrderProblem identity_battery_problem() {
    return FirstOrderProblem::from_strings("2 + sin(pi*x)", "-1 - x", "0.5*sin(u1) + 0.3*u2 + 0.2*cos(pi*x)",
                                           "0.25*u2*u2 + x*u1 - 0.1", 0.7, 0.8);
}

}  // namespace perihyp
