#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ibc/angular.hpp"
#include "ibc/cutoff.hpp"
#include "ibc/errors.hpp"
#include "ibc/grid.hpp"
#include "ibc/params.hpp"
#include "ibc/quadrature.hpp"

namespace ibc {

/// Coefficients of the r^{-B} and r^{+B} singular profiles in a field's
/// near-origin expansion.
struct ShortDistanceCoeffs {
    cplx c_minus{0.0, 0.0};
    cplx c_plus{0.0, 0.0};
};

/// Analytic test function phi(r) = [c- f- r^{-B} + c+ f+ r^{+B}] chi(r) in
/// the default coupled sector.  Everything downstream differentiates it in
/// closed form, so the symmetry-defect oracle never touches a grid.
struct TestFunctionSpec {
    ShortDistanceCoeffs coeffs;
    CutoffSpec cutoff;
};

namespace detail {

inline SectorVector beta_apply(const SectorVector& v) { return {v.plus, -v.minus}; }

/// Value of the test function at r.
inline SectorVector test_value(const TestFunctionSpec& spec, const CouplingConstants& c,
                               const BoundaryVectors& fb, double r) {
    const CutoffEval cut = eval_cutoff(spec.cutoff, r);
    if (cut.chi == 0.0)
        return {};
    const double rm = std::pow(r, -c.B);
    const double rp = std::pow(r, c.B);
    return cut.chi * (spec.coeffs.c_minus * rm * fb.f_minus + spec.coeffs.c_plus * rp * fb.f_plus);
}

/// (h phi)(r) in closed form.  Because f-+ r^{-+B} are exact null solutions
/// of the massless expression, h(chi r^s f) = m chi r^s beta f + chi' r^s J f
/// with J = [[0,-1],[1,0]]; no singular r^{s-1} remnant survives.
inline SectorVector test_h_value(const TestFunctionSpec& spec, const CouplingConstants& c,
                                 const PhysicalParams& p, const BoundaryVectors& fb, double r) {
    const CutoffEval cut = eval_cutoff(spec.cutoff, r);
    if (cut.chi == 0.0 && cut.dchi == 0.0)
        return {};
    const double rm = std::pow(r, -c.B);
    const double rp = std::pow(r, c.B);
    const SectorVector minus_part = spec.coeffs.c_minus * rm * fb.f_minus;
    const SectorVector plus_part = spec.coeffs.c_plus * rp * fb.f_plus;
    SectorVector out = (p.mass * cut.chi) * (beta_apply(minus_part) + beta_apply(plus_part));
    out += cut.dchi * (rot90(minus_part) + rot90(plus_part));
    return out;
}

} // namespace detail

/// Sample the analytic test function with prescribed short-distance
/// coefficients onto a radial grid.  Requires the construction window
/// sqrt(3)/2 < |q| < 1 so that both profiles are square integrable.
inline RadialField make_test_function(const CouplingConstants& c, const ShortDistanceCoeffs& coeffs,
                                      const CutoffSpec& cut, const RadialGrid& grid) {
    c.require_construction_window();
    cut.require_inside(grid);
    const BoundaryVectors fb = boundary_vectors(c);
    const TestFunctionSpec spec{coeffs, cut};
    RadialField out(grid);
    for (int i = 0; i < grid.n; ++i)
        out.values[i] = detail::test_value(spec, c, fb, grid.nodes[i]);
    return out;
}

/// Recover (c-, c+) from the first `window` nodal values by a weighted
/// least-squares fit against the two singular profiles.  The profiles are
/// linearly independent but not orthogonal, so the joint fit is solved as a
/// small dense least-squares problem; nodes are weighted by r^B to balance
/// the conditioning of the two columns.
inline ShortDistanceCoeffs extract_coeffs(const RadialField& f, const CouplingConstants& c,
                                          int window = 6) {
    if (window < 2 || window > f.grid.n)
        throw GridTooCoarse("extraction window must satisfy 2 <= window <= n");
    const BoundaryVectors fb = boundary_vectors(c);

    Eigen::MatrixXcd A(2 * window, 2);
    Eigen::VectorXcd y(2 * window);
    for (int k = 0; k < window; ++k) {
        const double r = f.grid.nodes[k];
        const double w = std::pow(r, c.B);
        const double rm = w * std::pow(r, -c.B); // = r^0, kept explicit
        const double rp = w * std::pow(r, c.B);
        A(2 * k, 0) = rm * fb.f_minus.plus;
        A(2 * k, 1) = rp * fb.f_plus.plus;
        A(2 * k + 1, 0) = rm * fb.f_minus.minus;
        A(2 * k + 1, 1) = rp * fb.f_plus.minus;
        y(2 * k) = w * f.values[k].plus;
        y(2 * k + 1) = w * f.values[k].minus;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(1) > 1e-12 * sv(0)))
        throw SingularFit("profile design matrix is numerically rank deficient");
    const Eigen::Vector2cd sol = svd.solve(y);
    return {sol(0), sol(1)};
}

/// Both inner products entering the symmetry defect, kept separate so tests
/// can form a cancellation scale.
struct DefectParts {
    cplx forward{};  ///< <phi, h psi>
    cplx backward{}; ///< <h phi, psi>

    cplx defect() const { return forward - backward; }
    double scale() const { return std::abs(forward) + std::abs(backward); }
};

/// Quadrature evaluation of <phi, h psi> - <h phi, psi> for two analytic
/// test functions.  The contract is the boundary-pairing identity
///
///   defect = (d+^* c- - d-^* c+) * 4B(1+q),
///
/// independent of the mass and of the cutoff shapes: the defect is a pure
/// r -> 0 surface term.
inline DefectParts symmetry_defect_parts(const TestFunctionSpec& phi, const TestFunctionSpec& psi,
                                         const CouplingConstants& c, const PhysicalParams& p,
                                         const QuadratureBudget& budget = {}) {
    c.require_construction_window();
    const BoundaryVectors fb = boundary_vectors(c);

    std::vector<double> breaks = {phi.cutoff.rho1, phi.cutoff.rho2, psi.cutoff.rho1,
                                  psi.cutoff.rho2};

    const auto forward = [&](double r) {
        return dot(detail::test_value(phi, c, fb, r), detail::test_h_value(psi, c, p, fb, r));
    };
    const auto backward = [&](double r) {
        return dot(detail::test_h_value(phi, c, p, fb, r), detail::test_value(psi, c, fb, r));
    };

    DefectParts parts;
    parts.forward = integrate_piecewise(forward, breaks, true, budget);
    parts.backward = integrate_piecewise(backward, breaks, true, budget);
    return parts;
}

inline cplx symmetry_defect(const TestFunctionSpec& phi, const TestFunctionSpec& psi,
                            const CouplingConstants& c, const PhysicalParams& p,
                            const QuadratureBudget& budget = {}) {
    return symmetry_defect_parts(phi, psi, c, p, budget).defect();
}

/// Symmetry defect of the full two-sector Hamiltonian on a pair of Fock
/// states (vacuum amplitude + analytic upper-sector test function).  The
/// 0-sector action is g^* (a3 c- + a4 c+) plus the optional vacuum energy.
/// When both states satisfy the interior-boundary condition
/// a1 c- + a2 c+ = g psi0, the result equals
///
///   (d+^* c- - d-^* c+) * (-a1 a4 + a2 a3 + 4B(1+q)),
///
/// which vanishes exactly on the constraint surface.
inline DefectParts fock_symmetry_defect_parts(cplx phi0, const TestFunctionSpec& phi, cplx psi0,
                                              const TestFunctionSpec& psi, const IbcParams& params,
                                              const CouplingConstants& c, const PhysicalParams& p,
                                              const QuadratureBudget& budget = {}) {
    DefectParts parts = symmetry_defect_parts(phi, psi, c, p, budget);
    const cplx gs = std::conj(params.g);
    const cplx act_psi =
        gs * (params.a3 * psi.coeffs.c_minus + params.a4 * psi.coeffs.c_plus) +
        params.vacuum_energy * psi0;
    const cplx act_phi =
        gs * (params.a3 * phi.coeffs.c_minus + params.a4 * phi.coeffs.c_plus) +
        params.vacuum_energy * phi0;
    parts.forward += std::conj(phi0) * act_psi;
    parts.backward += std::conj(act_phi) * psi0;
    return parts;
}

inline cplx fock_symmetry_defect(cplx phi0, const TestFunctionSpec& phi, cplx psi0,
                                 const TestFunctionSpec& psi, const IbcParams& params,
                                 const CouplingConstants& c, const PhysicalParams& p,
                                 const QuadratureBudget& budget = {}) {
    return fock_symmetry_defect_parts(phi0, phi, psi0, psi, params, c, p, budget).defect();
}

} // namespace ibc
