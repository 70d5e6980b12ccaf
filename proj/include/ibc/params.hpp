#pragma once

#include <cmath>
#include <complex>

#include "ibc/angular.hpp"
#include "ibc/errors.hpp"

namespace ibc {

/// Parameters of the coupled Hamiltonian family: creation strength g and the
/// real extension parameters a1..a4, constrained by
///
///   a1 a4 - a2 a3 = 4 B (1 + q).
///
/// vacuum_energy is an optional diagonal term on the 0-particle sector
/// (default 0, mirroring the decoupled block's E00 freedom).
struct IbcParams {
    cplx g{1.0, 0.0};
    double a1 = 1.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    double vacuum_energy = 0.0;

    /// The family member singled out by the simplest boundary condition:
    /// a = (1, 0, 0, 4B(1+q)).
    static IbcParams defaults(const CouplingConstants& c, cplx g = cplx(1.0, 0.0)) {
        IbcParams p;
        p.g = g;
        p.a4 = 4.0 * c.B * (1.0 + c.q);
        return p;
    }
};

/// Residual of the constraint a1 a4 - a2 a3 - 4B(1+q).
inline double constraint_residual(const IbcParams& p, const CouplingConstants& c) {
    return p.a1 * p.a4 - p.a2 * p.a3 - 4.0 * c.B * (1.0 + c.q);
}

inline void validate_ibc_params(const IbcParams& p, const CouplingConstants& c) {
    c.require_construction_window();
    if (p.g == cplx(0.0, 0.0))
        throw ZeroCoupling("g must be nonzero for a coupled Hamiltonian");
    if (p.a1 == 0.0 && p.a2 == 0.0)
        throw ConstraintViolated("(a1, a2) = (0, 0) leaves the boundary condition empty");
    const double target = 4.0 * c.B * (1.0 + c.q);
    const double res = constraint_residual(p, c);
    if (std::abs(res) > 1e-12 * (1.0 + target))
        throw ConstraintViolated("a1*a4 - a2*a3 - 4B(1+q) = " + std::to_string(res));
}

} // namespace ibc
