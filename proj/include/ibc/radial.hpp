#pragma once

#include <cmath>
#include <utility>

#include "ibc/angular.hpp"
#include "ibc/errors.hpp"
#include "ibc/grid.hpp"
#include "ibc/quadrature.hpp"

namespace ibc {

/// Outcome of the essential-self-adjointness classification of one radial
/// sector operator on compactly supported functions away from the origin.
enum class EsaVerdict {
    Unique,             ///< q^2 <= kappa^2 - 1/4: one self-adjoint extension
    MultipleExtensions, ///< kappa^2 - 1/4 < q^2 < kappa^2: extension freedom
    Overcritical        ///< q^2 >= kappa^2: outside the subcritical analysis
};

inline const char* to_string(EsaVerdict v) {
    switch (v) {
    case EsaVerdict::Unique:
        return "Unique";
    case EsaVerdict::MultipleExtensions:
        return "MultipleExtensions";
    case EsaVerdict::Overcritical:
        return "Overcritical";
    }
    return "?";
}

/// Closed-form classification of the sector (kappa, q).  The criterion is
/// exact; l2_integrability_check below is its independent numerical witness.
inline EsaVerdict classify_sector(int kappa, double q) {
    if (kappa == 0)
        throw InvalidSector("kappa must be nonzero");
    const double q2 = q * q;
    const double k2 = static_cast<double>(kappa) * kappa;
    if (q2 >= k2)
        return EsaVerdict::Overcritical;
    if (q2 <= k2 - 0.25)
        return EsaVerdict::Unique;
    return EsaVerdict::MultipleExtensions;
}

/// Indicial exponents (-s, +s) of the radial expression near r = 0, with
/// s = sqrt(kappa^2 - q^2).  A power solution r^s exists exactly for these
/// exponents; for |kappa| = 1 the positive one equals B = sqrt(1 - q^2).
inline std::pair<double, double> indicial_exponents(int kappa, double q) {
    if (kappa == 0)
        throw InvalidSector("kappa must be nonzero");
    const double k2 = static_cast<double>(kappa) * kappa;
    if (q * q >= k2)
        throw OvercriticalCoupling("q^2 >= kappa^2: indicial exponents turn complex");
    const double s = std::sqrt(k2 - q * q);
    return {-s, s};
}

/// Numerical witness that r^{-s} is square integrable near the origin iff
/// 2s < 1.  In the integrable case the graded quadrature of int_0^{r0}
/// r^{-2s} dr is compared against the closed form r0^{1-2s} / (1-2s).
inline bool l2_integrability_check(double s, double r0, double tol) {
    if (2.0 * s >= 1.0)
        return false;
    const auto integrand = [s](double r) { return cplx(std::pow(r, -2.0 * s), 0.0); };
    const cplx quad = integrate_piecewise(integrand, {r0}, true);
    const double closed = std::pow(r0, 1.0 - 2.0 * s) / (1.0 - 2.0 * s);
    return std::abs(quad.real() - closed) <= tol && std::abs(quad.imag()) <= tol;
}

namespace detail {

/// Weights of the 3-point Lagrange differentiation rule at point t.
struct Stencil3 {
    double w0, w1, w2;
};

inline Stencil3 derivative_weights(double x0, double x1, double x2, double t) {
    Stencil3 s;
    s.w0 = (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2));
    s.w1 = (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2));
    s.w2 = (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return s;
}

} // namespace detail

/// Apply the per-sector radial expression
///
///   h = [[ m + q/r,  -d/dr + kappa/r ],
///        [ d/dr + kappa/r,  -m + q/r ]]
///
/// to a sampled field, using second-order three-point stencils on the
/// (generally nonuniform) grid; the endpoints use one-sided stencils.
/// This discretization serves residual and convergence checks only; the
/// assembled Hamiltonian differentiates closed-form basis functions exactly.
inline RadialField apply_radial_dirac(const AngularSector& sector, const CouplingConstants& c,
                                      const PhysicalParams& p, const RadialField& f) {
    const int n = f.grid.n;
    if (n < 8)
        throw GridTooCoarse("apply_radial_dirac needs at least 8 nodes");
    if (p.mass < 0.0)
        throw InvalidConfig("mass must be nonnegative");

    const double kappa = sector.kappa;
    const double m = p.mass;
    const double q = c.q;
    const auto& x = f.grid.nodes;

    RadialField out(f.grid);
    for (int i = 0; i < n; ++i) {
        const int j = std::min(std::max(i, 1), n - 2); // stencil center
        const auto w = detail::derivative_weights(x[j - 1], x[j], x[j + 1], x[i]);
        const cplx dplus = w.w0 * f.values[j - 1].plus + w.w1 * f.values[j].plus +
                           w.w2 * f.values[j + 1].plus;
        const cplx dminus = w.w0 * f.values[j - 1].minus + w.w1 * f.values[j].minus +
                            w.w2 * f.values[j + 1].minus;
        const double r = x[i];
        const SectorVector& v = f.values[i];
        out.values[i].plus = (m + q / r) * v.plus + (-dminus + kappa / r * v.minus);
        out.values[i].minus = (dplus + kappa / r * v.plus) + (-m + q / r) * v.minus;
    }
    return out;
}

} // namespace ibc
