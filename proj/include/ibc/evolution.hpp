#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ibc/assembly.hpp"
#include "ibc/errors.hpp"

namespace ibc {

/// Expansion coefficients of a Fock state over a Galerkin basis.
struct FockCoefficients {
    Eigen::VectorXcd coeffs;
};

/// Per-state observables: vacuum and excited populations, total norm, and
/// the reconstructed short-distance coefficients.
struct StateObservables {
    double P0 = 0.0;
    double P1 = 0.0;
    double norm2 = 0.0;
    cplx c_minus{0.0, 0.0};
    cplx c_plus{0.0, 0.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    std::vector<StateObservables> observables;
};

inline StateObservables observe_state(const GalerkinSystem& sys, const Eigen::VectorXcd& c) {
    StateObservables o;
    const cplx psi0 = sys.vac.conjugate().dot(c); // plain sum vac_a c_a
    o.norm2 = std::real(c.dot(sys.S * c));
    o.P0 = std::norm(psi0);
    o.P1 = o.norm2 - o.P0;
    o.c_minus = sys.link_minus.conjugate().dot(c);
    o.c_plus = sys.link_plus.conjugate().dot(c);
    return o;
}

/// Recompute the observable table of a trajectory from its stored states.
inline std::vector<StateObservables> observables(const Trajectory& traj,
                                                 const GalerkinSystem& sys) {
    std::vector<StateObservables> out;
    out.reserve(traj.states.size());
    for (const auto& c : traj.states)
        out.push_back(observe_state(sys, c));
    return out;
}

/// S-orthogonal projection of the bare vacuum (1, 0) onto the Galerkin
/// span, normalized to unit Fock norm.  The bare vacuum itself violates the
/// boundary condition (it forces c- = g psi0 != 0), so this is the closest
/// admissible initial state; it converges to the bare vacuum as |g| -> 0.
inline FockCoefficients project_vacuum(const GalerkinSystem& sys) {
    const Eigen::VectorXcd b = sys.vac.conjugate();
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(sys.S);
    if (ldlt.info() != Eigen::Success)
        throw IllConditionedOverlap("overlap factorization failed");
    Eigen::VectorXcd c = ldlt.solve(b);
    const double n2 = std::real(c.dot(sys.S * c));
    if (!(std::sqrt(std::max(n2, 0.0)) > 1e-6))
        throw DegenerateProjection("vacuum projection is numerically null");
    c /= std::sqrt(n2);
    return {c};
}

/// Magnitude of the top of the pencil spectrum reached from `seed`, via a
/// few power iterations of S^{-1} H.  Used for the default time step.
inline double estimate_energy_scale(const GalerkinSystem& sys, const Eigen::VectorXcd& seed,
                                    int iterations = 8) {
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(sys.S);
    if (ldlt.info() != Eigen::Success)
        throw IllConditionedOverlap("overlap factorization failed");
    Eigen::VectorXcd y = seed;
    double yn = std::sqrt(std::real(y.dot(sys.S * y)));
    if (!(yn > 0.0))
        return 1.0;
    y /= yn;
    double lambda = 1.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd z = ldlt.solve(sys.H * y);
        const double zn = std::sqrt(std::real(z.dot(sys.S * z)));
        if (!(zn > 0.0))
            break;
        lambda = zn;
        y = z / zn;
    }
    return lambda;
}

inline double suggest_timestep(const GalerkinSystem& sys, const FockCoefficients& init,
                               double safety = 0.1) {
    const double scale = estimate_energy_scale(sys, init.coeffs);
    return safety / std::max(scale, 1e-300);
}

/// Crank-Nicolson propagation of the pencil dynamics i S dc/dt = H c:
///
///   (S + i dt/2 H) c_{k+1} = (S - i dt/2 H) c_k.
///
/// The step map is exactly S-unitary for Hermitian H, so the Fock norm is
/// conserved to the linear-solve residual; each solve is LU plus iterative
/// refinement to a relative residual of solve_tol.  Negative dt runs the
/// reversed evolution (used by the time-reversal checks).
inline Trajectory evolve(const GalerkinSystem& sys, const FockCoefficients& init, double dt,
                         int n_steps, double solve_tol = 1e-12) {
    if (dt == 0.0)
        throw SolveFailed("dt must be nonzero");
    if (n_steps < 0)
        throw SolveFailed("n_steps must be nonnegative");
    if (init.coeffs.size() != sys.H.rows())
        throw SolveFailed("coefficient vector does not match the basis size");

    const cplx ihalf(0.0, 0.5 * dt);
    const Eigen::MatrixXcd A = sys.S + ihalf * sys.H;
    const Eigen::MatrixXcd B = sys.S - ihalf * sys.H;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);

    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.observables.reserve(n_steps + 1);

    Eigen::VectorXcd c = init.coeffs;
    traj.times.push_back(0.0);
    traj.states.push_back(c);
    traj.observables.push_back(observe_state(sys, c));

    for (int k = 1; k <= n_steps; ++k) {
        const Eigen::VectorXcd rhs = B * c;
        const double scale = std::max(rhs.norm(), 1e-300);
        Eigen::VectorXcd x = lu.solve(rhs);
        bool converged = false;
        for (int it = 0; it < 8; ++it) {
            const Eigen::VectorXcd r = rhs - A * x;
            if (r.norm() <= solve_tol * scale) {
                converged = true;
                break;
            }
            x += lu.solve(r);
        }
        if (!converged)
            throw SolveFailed("Crank-Nicolson solve did not reach the residual target");
        c = x;
        traj.times.push_back(k * dt);
        traj.states.push_back(c);
        traj.observables.push_back(observe_state(sys, c));
    }
    return traj;
}

} // namespace ibc
