#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ibc/angular.hpp"
#include "ibc/cutoff.hpp"
#include "ibc/errors.hpp"
#include "ibc/grid.hpp"
#include "ibc/params.hpp"
#include "ibc/quadrature.hpp"

namespace ibc {

/// One Fock basis element: a vacuum amplitude plus a closed-form radial
/// field.  The field is evaluated exactly, and h is applied to it through
/// exact derivatives; only the final inner products are quadratures.
/// Elements are normalized to unit Fock norm at construction (the divided
/// factor is kept in `norm`).
struct BasisElement {
    cplx vac{0.0, 0.0};
    cplx c_minus{0.0, 0.0}; ///< coefficient of the r^{-B} profile
    cplx c_plus{0.0, 0.0};  ///< coefficient of the r^{+B} profile
    double lo = 0.0;        ///< field support [lo, hi]; lo == 0 marks a singular tail
    double hi = 0.0;
    std::vector<double> breaks; ///< interior kinks of the field
    std::function<SectorVector(double)> value;
    std::function<SectorVector(double, double)> h_value; ///< (r, mass) -> (h field)(r)
    double norm = 1.0;
};

struct GalerkinBasis {
    std::vector<BasisElement> elements;
    RadialGrid grid;
    CutoffSpec cutoff;
    AngularSector sector{1, 1};
    double q = 0.0; ///< coupling strength the closures were built with

    int size() const { return static_cast<int>(elements.size()); }
};

namespace detail {

inline BasisElement make_tail_element(cplx w_minus, cplx w_plus, cplx vac,
                                      const CouplingConstants& c, const BoundaryVectors& fb,
                                      const CutoffSpec& cut) {
    BasisElement e;
    e.vac = vac;
    e.c_minus = w_minus;
    e.c_plus = w_plus;
    e.lo = 0.0;
    e.hi = cut.rho2;
    e.breaks = {cut.rho1};
    const double B = c.B;
    e.value = [=](double r) -> SectorVector {
        const CutoffEval ce = eval_cutoff(cut, r);
        if (ce.chi == 0.0)
            return {};
        return ce.chi *
               (w_minus * std::pow(r, -B) * fb.f_minus + w_plus * std::pow(r, B) * fb.f_plus);
    };
    // f-+ r^{-+B} solve the massless expression exactly, so
    // h(chi r^s f) = m chi r^s beta f + chi' r^s J f.
    e.h_value = [=](double r, double mass) -> SectorVector {
        const CutoffEval ce = eval_cutoff(cut, r);
        if (ce.chi == 0.0 && ce.dchi == 0.0)
            return {};
        const SectorVector combo =
            w_minus * std::pow(r, -B) * fb.f_minus + w_plus * std::pow(r, B) * fb.f_plus;
        SectorVector out{mass * ce.chi * combo.plus, -mass * ce.chi * combo.minus};
        out += ce.dchi * rot90(combo);
        return out;
    };
    return e;
}

inline BasisElement make_hat_element(double xl, double xc, double xr, int comp, double q,
                                     int kappa) {
    BasisElement e;
    e.lo = xl;
    e.hi = xr;
    e.breaks = {xc};
    auto w = [=](double r) -> double {
        if (r <= xl || r >= xr)
            return 0.0;
        return r <= xc ? (r - xl) / (xc - xl) : (xr - r) / (xr - xc);
    };
    auto dw = [=](double r) -> double {
        if (r <= xl || r >= xr)
            return 0.0;
        return r <= xc ? 1.0 / (xc - xl) : -1.0 / (xr - xc);
    };
    e.value = [=](double r) -> SectorVector {
        const double v = w(r);
        return comp == 0 ? SectorVector(v, 0.0) : SectorVector(0.0, v);
    };
    e.h_value = [=](double r, double mass) -> SectorVector {
        const double v = w(r);
        const double dv = dw(r);
        if (comp == 0)
            return {(mass + q / r) * v, dv + kappa * v / r};
        return {-dv + kappa * v / r, (-mass + q / r) * v};
    };
    return e;
}

inline std::vector<double> pair_breakpoints(const BasisElement& a, const BasisElement& b,
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

/// Galerkin basis inside the IBC domain: element 0 realizes the boundary
/// condition (vac = 1 with the linked singular tail), element 1 spans the
/// complementary singular direction, and the rest are piecewise-linear hats
/// per spin component on an evenly strided subset of interior grid nodes,
/// vanishing at r_max.  Every element satisfies a1 c- + a2 c+ = g vac.
inline GalerkinBasis build_basis(const RadialGrid& grid, const CouplingConstants& c,
                                 const IbcParams& params, const CutoffSpec& cut, int n_hats,
                                 const AngularSector& sector = AngularSector(1, 1),
                                 const QuadratureBudget& budget = {}) {
    validate_ibc_params(params, c);
    cut.require_inside(grid);
    if (std::abs(sector.kappa) != 1)
        throw InvalidSector("only the |kappa| = 1 sectors carry boundary freedom");
    if (n_hats < 1 || n_hats > grid.n - 2)
        throw GridTooCoarse("need 1 <= n_hats <= n - 2");

    const BoundaryVectors fb = indicial_null_vectors(c, sector.kappa);

    GalerkinBasis basis;
    basis.grid = grid;
    basis.cutoff = cut;
    basis.sector = sector;
    basis.q = c.q;

    // Linking coefficients: minimum-norm solution of a1 mu- + a2 mu+ = g for
    // the boundary element, and the orthogonal direction for the complement.
    const double a12 = params.a1 * params.a1 + params.a2 * params.a2;
    const cplx mu_minus = params.g * params.a1 / a12;
    const cplx mu_plus = params.g * params.a2 / a12;
    const double s12 = std::sqrt(a12);
    const cplx nu_minus(-params.a2 / s12, 0.0);
    const cplx nu_plus(params.a1 / s12, 0.0);

    basis.elements.push_back(detail::make_tail_element(mu_minus, mu_plus, 1.0, c, fb, cut));
    basis.elements.push_back(detail::make_tail_element(nu_minus, nu_plus, 0.0, c, fb, cut));

    std::vector<double> bp(n_hats + 2);
    for (int k = 0; k <= n_hats + 1; ++k) {
        const int idx =
            static_cast<int>(std::lround(k * double(grid.n - 1) / double(n_hats + 1)));
        bp[k] = grid.nodes[idx];
    }
    for (int k = 1; k <= n_hats; ++k)
        for (int comp : {0, 1})
            basis.elements.push_back(
                detail::make_hat_element(bp[k - 1], bp[k], bp[k + 1], comp, c.q, sector.kappa));

    for (auto& e : basis.elements) {
        const auto density = [&e](double r) { return dot(e.value(r), e.value(r)); };
        const cplx overlap = integrate_piecewise(
            density, detail::pair_breakpoints(e, e, e.lo, e.hi), e.lo == 0.0, budget);
        const double nrm = std::sqrt(std::norm(e.vac) + overlap.real());
        e.vac /= nrm;
        e.c_minus /= nrm;
        e.c_plus /= nrm;
        e.norm = nrm;
        const auto val = e.value;
        const auto hval = e.h_value;
        e.value = [val, nrm](double r) { return (1.0 / nrm) * val(r); };
        e.h_value = [hval, nrm](double r, double m) { return (1.0 / nrm) * hval(r, m); };
    }
    return basis;
}

/// Hermitian matrix pencil (H, S) of the coupled Hamiltonian over a
/// Galerkin basis, plus the element metadata the dynamics needs.
struct GalerkinSystem {
    Eigen::MatrixXcd H;
    Eigen::MatrixXcd S;
    Eigen::MatrixXcd H_raw;      ///< assembly before symmetrization, for diagnostics
    Eigen::VectorXcd vac;        ///< vacuum amplitude per element
    Eigen::VectorXcd link_minus; ///< singular coefficient per element
    Eigen::VectorXcd link_plus;  ///< regular coefficient per element
    cplx g{1.0, 0.0};
    double pre_symmetrization_defect = 0.0;
    double overlap_min_eigenvalue = 0.0;
    double overlap_condition = 0.0;
    GalerkinBasis basis;
    IbcParams params;
    std::optional<CouplingConstants> coupling;

    int size() const { return static_cast<int>(H.rows()); }
};

/// Assemble H_ab = <B_a, Hhat B_b> and S_ab = <B_a, B_b>.  The 0-sector
/// action is g^* (a3 c- + a4 c+) plus the optional vacuum energy; the
/// 1-sector action is the radial expression applied in closed form.  H is
/// symmetrized by averaging with its adjoint; the pre-symmetrization defect
/// is recorded (it vanishes up to quadrature error exactly when the
/// parameters satisfy the constraint the basis was built on).
inline GalerkinSystem assemble_operator(const GalerkinBasis& basis, const CouplingConstants& c,
                                        const PhysicalParams& p, const IbcParams& params,
                                        const QuadratureBudget& budget = {}) {
    if (basis.q != c.q)
        throw ConstraintViolated("coupling constants differ from the basis construction");
    if (p.mass < 0.0)
        throw InvalidConfig("mass must be nonnegative");

    const int n = basis.size();
    if (n < 1)
        throw GridTooCoarse("empty basis");

    Eigen::MatrixXcd H(n, n), S(n, n);
    const cplx gs = std::conj(params.g);
    for (int a = 0; a < n; ++a) {
        const BasisElement& ea = basis.elements[a];
        for (int b = 0; b < n; ++b) {
            const BasisElement& eb = basis.elements[b];
            cplx s_int = 0.0, h_int = 0.0;
            const double lo = std::max(ea.lo, eb.lo);
            const double hi = std::min(ea.hi, eb.hi);
            if (hi > lo) {
                const auto breaks = detail::pair_breakpoints(ea, eb, lo, hi);
                const bool singular = (lo == 0.0);
                s_int = integrate_piecewise(
                    [&](double r) { return dot(ea.value(r), eb.value(r)); }, breaks, singular,
                    budget);
                h_int = integrate_piecewise(
                    [&](double r) { return dot(ea.value(r), eb.h_value(r, p.mass)); }, breaks,
                    singular, budget);
            }
            S(a, b) = std::conj(ea.vac) * eb.vac + s_int;
            H(a, b) = std::conj(ea.vac) * (gs * (params.a3 * eb.c_minus + params.a4 * eb.c_plus) +
                                           params.vacuum_energy * eb.vac) +
                      h_int;
        }
    }

    GalerkinSystem sys;
    sys.H_raw = H;
    const Eigen::MatrixXcd Hadj = H.adjoint();
    sys.pre_symmetrization_defect = (H - Hadj).cwiseAbs().maxCoeff();
    sys.H = 0.5 * (H + Hadj);
    const Eigen::MatrixXcd Sadj = S.adjoint();
    sys.S = 0.5 * (S + Sadj);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sys.S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw IllConditionedOverlap("overlap eigensolve failed");
    sys.overlap_min_eigenvalue = es.eigenvalues().minCoeff();
    const double smax = es.eigenvalues().maxCoeff();
    if (!(sys.overlap_min_eigenvalue > 0.0))
        throw IllConditionedOverlap("overlap matrix is not positive definite");
    sys.overlap_condition = smax / sys.overlap_min_eigenvalue;
    if (sys.overlap_condition > 1e12)
        throw IllConditionedOverlap("overlap condition number exceeds 1e12");

    sys.vac.resize(n);
    sys.link_minus.resize(n);
    sys.link_plus.resize(n);
    for (int a = 0; a < n; ++a) {
        sys.vac(a) = basis.elements[a].vac;
        sys.link_minus(a) = basis.elements[a].c_minus;
        sys.link_plus(a) = basis.elements[a].c_plus;
    }
    sys.g = params.g;
    sys.basis = basis;
    sys.params = params;
    sys.coupling = c;
    return sys;
}

/// Eigenvalues of the Hermitian-definite pencil H v = E S v, ascending.
inline std::vector<double> spectrum(const GalerkinSystem& sys) {
    if (!(sys.overlap_min_eigenvalue > 0.0) || sys.overlap_condition > 1e12)
        throw IllConditionedOverlap("overlap matrix unfit for a definite pencil solve");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(
        sys.H, sys.S, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
        throw IllConditionedOverlap("generalized eigensolve failed");
    const auto& ev = ges.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

} // namespace ibc
