#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ibc/assembly.hpp"
#include "ibc/cutoff.hpp"
#include "ibc/errors.hpp"
#include "ibc/evolution.hpp"
#include "ibc/grid.hpp"
#include "ibc/quadrature.hpp"
#include "ibc/short_distance.hpp"

namespace ibc {

/// Parameters of the non-relativistic point-source model (pure source,
/// 2-parameter boundary family): creation strength g, creation energy E0,
/// particle mass and hbar.
struct NonRelParams {
    cplx g{1.0, 0.0};
    double E0 = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
};

/// Short-distance data of an s-wave function psi ~ c_{-1}/r + c_0 + o(1).
/// In the radial picture u(r) = r psi(r) these are the value and the slope
/// of u at the origin.
struct NonRelCoeffs {
    cplx c_minus1{0.0, 0.0};
    cplx c_0{0.0, 0.0};
};

/// Constant relating lim_{r->0} r psi^(1) to psi^(0) for a pure point
/// source: c_{-1} = -g m / (2 pi hbar^2) psi^(0).
inline cplx nr_ibc_constant(const NonRelParams& p) {
    return -p.g * p.mass / (2.0 * M_PI * p.hbar * p.hbar);
}

/// Analytic s-wave test state: vacuum amplitude plus u(r) = (c_{-1} + c_0 r) chi(r).
struct NrTestFunctionSpec {
    NonRelCoeffs coeffs;
    cplx vac{0.0, 0.0};
    CutoffSpec cutoff;
};

namespace detail {

inline cplx nr_u(const NrTestFunctionSpec& s, double r) {
    const CutoffEval ce = eval_cutoff(s.cutoff, r);
    if (ce.chi == 0.0)
        return 0.0;
    return ce.chi * (s.coeffs.c_minus1 + s.coeffs.c_0 * r);
}

inline cplx nr_Hu(const NrTestFunctionSpec& s, const NonRelParams& p, double r) {
    const CutoffEval ce = eval_cutoff(s.cutoff, r);
    const cplx lin = s.coeffs.c_minus1 + s.coeffs.c_0 * r;
    const cplx u = ce.chi * lin;
    const cplx upp = lin * ce.d2chi + 2.0 * s.coeffs.c_0 * ce.dchi;
    return p.E0 * u - 0.5 * p.hbar * p.hbar / p.mass * upp;
}

constexpr double four_pi = 4.0 * M_PI;

} // namespace detail

/// <Phi, H_nr Psi> - <H_nr Phi, Psi> for two analytic s-wave states.  The
/// 0-sector action is g^* c_0; the 1-sector operator E0 u - (hbar^2/2m) u''
/// acts through exact derivatives.  Green's identity on the sphere r = eps
/// gives the 1-sector boundary term
///
///   (2 pi hbar^2 / m) (d_{-1}^* c_0 - d_0^* c_{-1}),
///
/// which the constant -g m/(2 pi hbar^2) of the boundary condition cancels
/// exactly against the 0-sector terms.  The s-wave solid angle lives in the
/// inner product weight 4 pi dr.
inline DefectParts nr_symmetry_defect_parts(const NrTestFunctionSpec& phi,
                                            const NrTestFunctionSpec& psi, const NonRelParams& p,
                                            const QuadratureBudget& budget = {}) {
    std::vector<double> breaks = {phi.cutoff.rho1, phi.cutoff.rho2, psi.cutoff.rho1,
                                  psi.cutoff.rho2};
    const auto forward = [&](double r) {
        return std::conj(detail::nr_u(phi, r)) * detail::nr_Hu(psi, p, r);
    };
    const auto backward = [&](double r) {
        return std::conj(detail::nr_Hu(phi, p, r)) * detail::nr_u(psi, r);
    };
    DefectParts parts;
    parts.forward = detail::four_pi * integrate_piecewise(forward, breaks, true, budget) +
                    std::conj(phi.vac) * (std::conj(p.g) * psi.coeffs.c_0);
    parts.backward = detail::four_pi * integrate_piecewise(backward, breaks, true, budget) +
                     std::conj(std::conj(p.g) * phi.coeffs.c_0) * psi.vac;
    return parts;
}

inline cplx nr_symmetry_defect(const NrTestFunctionSpec& phi, const NrTestFunctionSpec& psi,
                               const NonRelParams& p, const QuadratureBudget& budget = {}) {
    return nr_symmetry_defect_parts(phi, psi, p, budget).defect();
}

namespace detail {

struct NrBasisElement {
    cplx vac{0.0, 0.0};
    cplx c_minus1{0.0, 0.0};
    cplx c_0{0.0, 0.0};
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> breaks;
    std::function<cplx(double)> u;
    std::function<cplx(double)> du;
    double norm = 1.0;
};

inline std::vector<double> nr_pair_breaks(const NrBasisElement& a, const NrBasisElement& b,
                                          double lo, double hi) {
    std::vector<double> breaks;
    if (lo > 0.0)
        breaks.push_back(lo);
    breaks.push_back(hi);
    for (const auto* e : {&a, &b})
        for (double x : e->breaks)
            if (x > lo && x < hi)
                breaks.push_back(x);
    return breaks;
}

} // namespace detail

/// Assemble the s-wave Galerkin pencil of the non-relativistic model over
/// B_bc = (1, kappa_nr chi), B_lin = (0, r chi) and hat functions.  The
/// kinetic matrix element is evaluated through summation by parts,
/// <u_a, -u_b''> = c_{-1}(a)^* c_0(b) + <u_a', u_b'>, which keeps hats
/// admissible and makes Hermiticity an identity on the boundary condition.
inline GalerkinSystem nr_build_system(const RadialGrid& grid, const NonRelParams& p,
                                      const CutoffSpec& cut, int n_hats,
                                      const QuadratureBudget& budget = {}) {
    if (p.g == cplx(0.0, 0.0))
        throw ZeroCoupling("g must be nonzero");
    if (!(p.mass > 0.0) || !(p.hbar > 0.0))
        throw InvalidConfig("need mass > 0 and hbar > 0");
    cut.require_inside(grid);
    if (n_hats < 1 || n_hats > grid.n - 2)
        throw GridTooCoarse("need 1 <= n_hats <= n - 2");

    using detail::NrBasisElement;
    const cplx knr = nr_ibc_constant(p);

    std::vector<NrBasisElement> elems;
    {
        NrBasisElement bc;
        bc.vac = 1.0;
        bc.c_minus1 = knr;
        bc.c_0 = 0.0;
        bc.lo = 0.0;
        bc.hi = cut.rho2;
        bc.breaks = {cut.rho1};
        bc.u = [=](double r) { return knr * eval_cutoff(cut, r).chi; };
        bc.du = [=](double r) { return knr * eval_cutoff(cut, r).dchi; };
        elems.push_back(bc);

        NrBasisElement lin;
        lin.vac = 0.0;
        lin.c_minus1 = 0.0;
        lin.c_0 = 1.0;
        lin.lo = 0.0;
        lin.hi = cut.rho2;
        lin.breaks = {cut.rho1};
        lin.u = [=](double r) {
            return cplx(r * eval_cutoff(cut, r).chi, 0.0);
        };
        lin.du = [=](double r) {
            const CutoffEval ce = eval_cutoff(cut, r);
            return cplx(ce.chi + r * ce.dchi, 0.0);
        };
        elems.push_back(lin);
    }

    std::vector<double> bp(n_hats + 2);
    for (int k = 0; k <= n_hats + 1; ++k) {
        const int idx =
            static_cast<int>(std::lround(k * double(grid.n - 1) / double(n_hats + 1)));
        bp[k] = grid.nodes[idx];
    }
    for (int k = 1; k <= n_hats; ++k) {
        const double xl = bp[k - 1], xc = bp[k], xr = bp[k + 1];
        NrBasisElement hat;
        hat.lo = xl;
        hat.hi = xr;
        hat.breaks = {xc};
        hat.u = [=](double r) -> cplx {
            if (r <= xl || r >= xr)
                return 0.0;
            return r <= xc ? (r - xl) / (xc - xl) : (xr - r) / (xr - xc);
        };
        hat.du = [=](double r) -> cplx {
            if (r <= xl || r >= xr)
                return 0.0;
            return r <= xc ? 1.0 / (xc - xl) : -1.0 / (xr - xc);
        };
        elems.push_back(hat);
    }

    for (auto& e : elems) {
        const auto density = [&e](double r) { return std::conj(e.u(r)) * e.u(r); };
        const cplx overlap = integrate_piecewise(
            density, detail::nr_pair_breaks(e, e, e.lo, e.hi), e.lo == 0.0, budget);
        const double nrm = std::sqrt(std::norm(e.vac) + detail::four_pi * overlap.real());
        e.vac /= nrm;
        e.c_minus1 /= nrm;
        e.c_0 /= nrm;
        e.norm = nrm;
        const auto u = e.u;
        const auto du = e.du;
        e.u = [u, nrm](double r) { return u(r) / nrm; };
        e.du = [du, nrm](double r) { return du(r) / nrm; };
    }

    const int n = static_cast<int>(elems.size());
    Eigen::MatrixXcd H(n, n), S(n, n);
    const cplx gs = std::conj(p.g);
    const double kin = 0.5 * p.hbar * p.hbar / p.mass;
    for (int a = 0; a < n; ++a) {
        const auto& ea = elems[a];
        for (int b = 0; b < n; ++b) {
            const auto& eb = elems[b];
            cplx mass_int = 0.0, stiff_int = 0.0;
            const double lo = std::max(ea.lo, eb.lo);
            const double hi = std::min(ea.hi, eb.hi);
            if (hi > lo) {
                const auto breaks = detail::nr_pair_breaks(ea, eb, lo, hi);
                const bool singular = (lo == 0.0);
                mass_int = integrate_piecewise(
                    [&](double r) { return std::conj(ea.u(r)) * eb.u(r); }, breaks, singular,
                    budget);
                stiff_int = integrate_piecewise(
                    [&](double r) { return std::conj(ea.du(r)) * eb.du(r); }, breaks, singular,
                    budget);
            }
            S(a, b) = std::conj(ea.vac) * eb.vac + detail::four_pi * mass_int;
            H(a, b) = std::conj(ea.vac) * gs * eb.c_0 +
                      detail::four_pi *
                          (p.E0 * mass_int + kin * (stiff_int + std::conj(ea.c_minus1) * eb.c_0));
        }
    }

    GalerkinSystem sys;
    const Eigen::MatrixXcd Hadj = H.adjoint();
    sys.pre_symmetrization_defect = (H - Hadj).cwiseAbs().maxCoeff();
    sys.H = 0.5 * (H + Hadj);
    const Eigen::MatrixXcd Sadj = S.adjoint();
    sys.S = 0.5 * (S + Sadj);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sys.S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw IllConditionedOverlap("overlap eigensolve failed");
    sys.overlap_min_eigenvalue = es.eigenvalues().minCoeff();
    if (!(sys.overlap_min_eigenvalue > 0.0))
        throw IllConditionedOverlap("overlap matrix is not positive definite");
    sys.overlap_condition = es.eigenvalues().maxCoeff() / sys.overlap_min_eigenvalue;
    if (sys.overlap_condition > 1e12)
        throw IllConditionedOverlap("overlap condition number exceeds 1e12");

    sys.vac.resize(n);
    sys.link_minus.resize(n);
    sys.link_plus.resize(n);
    for (int a = 0; a < n; ++a) {
        sys.vac(a) = elems[a].vac;
        sys.link_minus(a) = elems[a].c_minus1;
        sys.link_plus(a) = elems[a].c_0;
    }
    sys.g = p.g;
    return sys;
}

/// Full baseline pipeline: build the s-wave pencil, project the vacuum,
/// Crank-Nicolson evolve.  dt <= 0 selects the default step 0.1 / ||H||_est.
inline Trajectory nr_assemble_and_evolve(const RadialGrid& grid, const NonRelParams& p,
                                         const CutoffSpec& cut, int n_hats, double dt,
                                         int n_steps, const QuadratureBudget& budget = {}) {
    const GalerkinSystem sys = nr_build_system(grid, p, cut, n_hats, budget);
    const FockCoefficients init = project_vacuum(sys);
    if (dt <= 0.0)
        dt = suggest_timestep(sys, init);
    return evolve(sys, init, dt, n_steps);
}

} // namespace ibc
