#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <utility>

#include <Eigen/Dense>

#include "ibc/errors.hpp"

namespace ibc {

using cplx = std::complex<double>;

/// Label of one angular momentum block: the joint eigenspace of J^2, J_3 and
/// the spin-orbit operator K, spanned by the two spinors (Phi+, Phi-).
/// j is determined by kappa through j = |kappa| - 1/2, so only kappa and m_j
/// are stored; m_j is kept as the integer 2*m_j to stay exact.
struct AngularSector {
    int kappa = 1;
    int twice_m_j = 1;

    AngularSector() = default;

    AngularSector(int kappa_, int twice_m_j_) : kappa(kappa_), twice_m_j(twice_m_j_) {
        if (kappa == 0)
            throw InvalidSector("kappa must be a nonzero integer");
        if (twice_m_j % 2 == 0)
            throw InvalidSector("m_j must be a half-odd integer (2*m_j odd)");
        if (std::abs(twice_m_j) > twice_j())
            throw InvalidSector("|m_j| exceeds j = |kappa| - 1/2");
    }

    int twice_j() const { return 2 * std::abs(kappa) - 1; }
    double j() const { return 0.5 * twice_j(); }
    double m_j() const { return 0.5 * twice_m_j; }
};

/// Coulomb strength q together with the derived exponent B = sqrt(1 - q^2).
/// Requires |q| < 1.  The coupled construction additionally needs
/// sqrt(3)/2 < |q| < 1, which is exactly the window where 0 < B < 1/2 and
/// both singular profiles r^{+-B} are square integrable at the origin.
struct CouplingConstants {
    double q;
    double B;

    explicit CouplingConstants(double q_) : q(q_) {
        if (std::abs(q) >= 1.0)
            throw OvercriticalCoupling("|q| >= 1 leaves the subcritical regime");
        B = std::sqrt(1.0 - q * q);
    }

    static constexpr double window_lo = 0.86602540378443864676; // sqrt(3)/2

    bool in_construction_window() const { return std::abs(q) > window_lo; }

    void require_construction_window() const {
        if (!in_construction_window())
            throw CouplingOutsideWindow(
                "|q| <= sqrt(3)/2: sector is essentially self-adjoint, no boundary freedom");
    }
};

/// Coefficients of a sector element relative to the ordered basis (Phi+, Phi-).
struct SectorVector {
    cplx plus{0.0, 0.0};
    cplx minus{0.0, 0.0};

    SectorVector() = default;
    SectorVector(cplx p, cplx m) : plus(p), minus(m) {}

    SectorVector operator+(const SectorVector& o) const { return {plus + o.plus, minus + o.minus}; }
    SectorVector operator-(const SectorVector& o) const { return {plus - o.plus, minus - o.minus}; }
    SectorVector operator*(cplx s) const { return {plus * s, minus * s}; }
    SectorVector& operator+=(const SectorVector& o) {
        plus += o.plus;
        minus += o.minus;
        return *this;
    }

    double squared_norm() const { return std::norm(plus) + std::norm(minus); }
};

inline SectorVector operator*(cplx s, const SectorVector& v) { return v * s; }

/// Pointwise sector inner product, first slot conjugated.
inline cplx dot(const SectorVector& u, const SectorVector& v) {
    return std::conj(u.plus) * v.plus + std::conj(u.minus) * v.minus;
}

/// The boundary vectors f+ and f- multiplying the r^{+B} and r^{-B}
/// singular profiles.  Both have real coefficients and
/// boundary_pairing(f_minus, f_plus) = -4B(1+q).
struct BoundaryVectors {
    SectorVector f_plus;
    SectorVector f_minus;
};

/// The constant matrices of alpha_r and beta restricted to one angular
/// momentum sector, in the ordered basis (Phi+, Phi-):
///
///   alpha_r = [[0, -i], [i, 0]],   beta = [[1, 0], [0, -1]].
inline std::pair<Eigen::Matrix2cd, Eigen::Matrix2d> sector_matrices() {
    Eigen::Matrix2cd alpha_r;
    alpha_r << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    Eigen::Matrix2d beta;
    beta << 1.0, 0.0, 0.0, -1.0;
    return {alpha_r, beta};
}

/// Anti-Hermitian boundary form <u, i alpha_r v> = u+^* v- - u-^* v+.
/// This is the surface term surviving integration by parts of the radial
/// expression; it drives the whole symmetry analysis.
inline cplx boundary_pairing(const SectorVector& u, const SectorVector& v) {
    return std::conj(u.plus) * v.minus - std::conj(u.minus) * v.plus;
}

/// Boundary vectors for the default coupled sector (kappa = +1):
///   f+ = (1+q-B) Phi+ - (1+q+B) Phi-,
///   f- = (1+q+B) Phi+ - (1+q-B) Phi-.
/// They are the null vectors of the indicial matrix of the massless radial
/// expression at the exponents +B and -B respectively.
inline BoundaryVectors boundary_vectors(const CouplingConstants& c) {
    const double a = 1.0 + c.q;
    BoundaryVectors out;
    out.f_plus = SectorVector(cplx(a - c.B, 0.0), cplx(-(a + c.B), 0.0));
    out.f_minus = SectorVector(cplx(a + c.B, 0.0), cplx(-(a - c.B), 0.0));
    return out;
}

namespace detail {
/// J = [[0, -1], [1, 0]] acting on sector coefficients.  J intertwines the
/// kappa = +1 and kappa = -1 indicial matrices and preserves the boundary
/// pairing, so it maps null vectors to null vectors with the pairing intact.
inline SectorVector rot90(const SectorVector& v) { return {-v.minus, v.plus}; }
} // namespace detail

/// Indicial null vectors of the massless radial expression for |kappa| = 1,
/// normalized so that boundary_pairing(f_minus, f_plus) = -4B(1+q) with real
/// coefficients.  kappa = +1 reproduces boundary_vectors(); kappa = -1 is
/// obtained by the intertwining map J (rot90 above), re-derived from the
/// leading singular part rather than assumed.
inline BoundaryVectors indicial_null_vectors(const CouplingConstants& c, int kappa) {
    if (kappa == 1)
        return boundary_vectors(c);
    if (kappa == -1) {
        const BoundaryVectors base = boundary_vectors(c);
        return {detail::rot90(base.f_plus), detail::rot90(base.f_minus)};
    }
    throw InvalidSector("indicial null vectors exist only for |kappa| = 1");
}

} // namespace ibc
