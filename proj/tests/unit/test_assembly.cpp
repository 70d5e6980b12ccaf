#include <catch2/catch.hpp>

#include <cmath>

#include "ibc/assembly.hpp"
#include "ibc/short_distance.hpp"

using namespace ibc;

namespace {

struct Setup {
    CouplingConstants c{0.9};
    PhysicalParams p;
    CutoffSpec cut{0.5, 2.0, 3};
    RadialGrid grid{1e-6, 20.0, 64};
    int n_hats = 24;
};

GalerkinSystem small_system(cplx g = cplx(1.0, 0.0), double vacuum_energy = 0.0) {
    Setup s;
    IbcParams params = IbcParams::defaults(s.c, g);
    params.vacuum_energy = vacuum_energy;
    const GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, s.n_hats);
    return assemble_operator(basis, s.c, s.p, params);
}

} // namespace

TEST_CASE("parameter validation") {
    const CouplingConstants c(0.9);
    const double four_b = 4.0 * c.B * (1.0 + c.q);

    CHECK_NOTHROW(validate_ibc_params(IbcParams::defaults(c), c));

    IbcParams scaled = IbcParams::defaults(c);
    scaled.a1 = 2.0;
    scaled.a4 = 0.5 * four_b; // product preserved
    CHECK_NOTHROW(validate_ibc_params(scaled, c));

    IbcParams bad = IbcParams::defaults(c);
    bad.a4 = 1.0;
    CHECK(constraint_residual(bad, c) == Approx(1.0 - 3.3127631).margin(1e-7));
    CHECK_THROWS_AS(validate_ibc_params(bad, c), ConstraintViolated);

    IbcParams zero_g = IbcParams::defaults(c);
    zero_g.g = 0.0;
    CHECK_THROWS_AS(validate_ibc_params(zero_g, c), ZeroCoupling);

    IbcParams no_bc = IbcParams::defaults(c);
    no_bc.a1 = no_bc.a2 = 0.0;
    CHECK_THROWS_AS(validate_ibc_params(no_bc, c), ConstraintViolated);

    CHECK_THROWS_AS(validate_ibc_params(IbcParams::defaults(c), CouplingConstants(0.5)),
                    CouplingOutsideWindow);
}

TEST_CASE("basis construction") {
    Setup s;
    const IbcParams params = IbcParams::defaults(s.c, cplx(0.8, 0.3));
    const GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, s.n_hats);

    SECTION("size and layout") {
        CHECK(basis.size() == 2 + 2 * s.n_hats);
        CHECK(basis.elements[0].vac != cplx(0.0, 0.0));
        for (int a = 1; a < basis.size(); ++a)
            CHECK(basis.elements[a].vac == cplx(0.0, 0.0));
    }

    SECTION("default parameters reduce the boundary element to g chi f- r^-B") {
        const BoundaryVectors fb = boundary_vectors(s.c);
        const BasisElement& bc = basis.elements[0];
        const double r = 0.01; // below rho1
        const SectorVector v = bc.value(r);
        const cplx expected_plus =
            params.g * std::pow(r, -s.c.B) * fb.f_minus.plus / bc.norm;
        CHECK(std::abs(v.plus - expected_plus) < 1e-12 * std::abs(expected_plus));
        CHECK(std::abs(bc.c_plus) == 0.0);
    }

    SECTION("every element obeys a1 c- + a2 c+ = g vac, checked by extraction") {
        // probe grid deep enough that the extraction window sits below every
        // hat support, where only the singular tails live
        const RadialGrid probe(1e-10, 10.0, 96);
        for (int a = 0; a < basis.size(); ++a) {
            const BasisElement& e = basis.elements[a];
            RadialField f(probe);
            for (int i = 0; i < probe.n; ++i)
                f.values[i] = e.value(probe.nodes[i]);
            const ShortDistanceCoeffs got = extract_coeffs(f, s.c);
            const cplx lhs = params.a1 * got.c_minus + params.a2 * got.c_plus;
            const cplx rhs = params.g * e.vac;
            CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(rhs)));
        }
    }

    SECTION("elements are unit normalized in the Fock norm") {
        const GalerkinSystem sys = assemble_operator(basis, s.c, s.p, params);
        for (int a = 0; a < sys.size(); ++a)
            CHECK(std::abs(sys.S(a, a) - 1.0) < 1e-9);
    }

    SECTION("guards") {
        CHECK_THROWS_AS(build_basis(s.grid, s.c, params, s.cut, 0), GridTooCoarse);
        CHECK_THROWS_AS(build_basis(s.grid, s.c, params, s.cut, s.grid.n - 1), GridTooCoarse);
        CHECK_THROWS_AS(build_basis(s.grid, s.c, params, s.cut, 8, AngularSector(2, 1)),
                        InvalidSector);
    }
}

TEST_CASE("assembled operator is Hermitian inside the domain") {
    const GalerkinSystem sys = small_system();
    const double hmax = sys.H.cwiseAbs().maxCoeff();

    CHECK(sys.pre_symmetrization_defect <= 1e-10 * hmax);
    CHECK(sys.overlap_min_eigenvalue > 0.0);
    CHECK(sys.overlap_condition < 1e12);

    // vacuum-excited coupling block present
    double coupling = 0.0;
    for (int a = 1; a < sys.size(); ++a)
        coupling = std::max(coupling, std::abs(sys.H(0, a)));
    CHECK(coupling > 1e-8);
}

TEST_CASE("five random constraint tuples assemble Hermitian, a violated one does not") {
    Setup s;
    const double four_b = 4.0 * s.c.B * (1.0 + s.c.q);
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> d(-1.0, 1.0);

    for (int t = 0; t < 5; ++t) {
        IbcParams params;
        params.g = cplx(d(rng) + 1.5, d(rng));
        params.a1 = d(rng) + 2.0;
        params.a2 = d(rng);
        params.a3 = d(rng);
        params.a4 = (four_b + params.a2 * params.a3) / params.a1;
        const GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, 12);
        const GalerkinSystem sys = assemble_operator(basis, s.c, s.p, params);
        CHECK(sys.pre_symmetrization_defect <= 1e-10 * sys.H.cwiseAbs().maxCoeff());
    }

    // violated action parameters on a valid basis: the defect is bounded away
    // from zero and matches the Fock defect prediction on the pair
    // (B_bc, B_plus).
    const IbcParams good = IbcParams::defaults(s.c, 1.0);
    const GalerkinBasis basis = build_basis(s.grid, s.c, good, s.cut, 12);
    IbcParams bad = good;
    bad.a4 = good.a4 + 1.0;

    const GalerkinSystem raw = assemble_operator(basis, s.c, s.p, bad);
    CHECK(raw.pre_symmetrization_defect > 1e-3);

    // <B_bc, H B_plus> - <H B_bc, B_plus> equals the Fock defect formula
    const BasisElement& ebc = basis.elements[0];
    const BasisElement& epl = basis.elements[1];
    const cplx predicted =
        std::conj(ebc.vac) * std::conj(bad.g) *
            (bad.a3 * epl.c_minus + bad.a4 * epl.c_plus) -
        std::conj(std::conj(bad.g) * (bad.a3 * ebc.c_minus + bad.a4 * ebc.c_plus)) * epl.vac +
        four_b * (std::conj(ebc.c_plus) * epl.c_minus - std::conj(ebc.c_minus) * epl.c_plus);
    const cplx measured = raw.H_raw(0, 1) - std::conj(raw.H_raw(1, 0));
    CHECK(std::abs(measured - predicted) < 1e-8 * (1.0 + std::abs(predicted)));
}

TEST_CASE("coupling entries scale linearly with g") {
    const GalerkinSystem s1 = small_system(cplx(0.5, 0.0));
    const GalerkinSystem s2 = small_system(cplx(1.0, 0.0));
    // undo the g-dependent normalization of the boundary element
    const double n1 = s1.basis.elements[0].norm;
    const double n2 = s2.basis.elements[0].norm;
    const cplx c1 = s1.H(0, 1) * n1;
    const cplx c2 = s2.H(0, 1) * n2;
    CHECK(std::abs(c2 / c1 - 2.0) < 1e-8);
}

TEST_CASE("spectrum of the Hermitian pencil") {
    const GalerkinSystem sys = small_system(cplx(1.0, 0.0), 0.25);
    const std::vector<double> ev = spectrum(sys);
    REQUIRE(static_cast<int>(ev.size()) == sys.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(std::isfinite(ev[i]));
        if (i > 0)
            CHECK(ev[i] >= ev[i - 1]);
    }
}

TEST_CASE("spectrum is invariant under a phase rotation of g") {
    Setup s;
    s.grid = RadialGrid(1e-3, 20.0, 64);
    const IbcParams p0 = IbcParams::defaults(s.c, cplx(0.7, 0.0));
    const IbcParams p1 = IbcParams::defaults(s.c, std::polar(0.7, 0.9));
    const GalerkinSystem sys0 =
        assemble_operator(build_basis(s.grid, s.c, p0, s.cut, s.n_hats), s.c, s.p, p0);
    const GalerkinSystem sys1 =
        assemble_operator(build_basis(s.grid, s.c, p1, s.cut, s.n_hats), s.c, s.p, p1);
    const auto ev0 = spectrum(sys0);
    const auto ev1 = spectrum(sys1);
    REQUIRE(ev0.size() == ev1.size());
    for (std::size_t i = 0; i < ev0.size(); ++i)
        CHECK(std::abs(ev0[i] - ev1[i]) <= 1e-10 * (1.0 + std::abs(ev0[i])));
}

TEST_CASE("small g decouples into vacuum energy plus the pure field problem") {
    Setup s;
    const double evac = 0.37;
    const GalerkinSystem sys = [&] {
        IbcParams params = IbcParams::defaults(s.c, cplx(1e-7, 0.0));
        params.vacuum_energy = evac;
        const GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, s.n_hats);
        return assemble_operator(basis, s.c, s.p, params);
    }();

    // reference: same basis with the boundary element dropped (pure 1-sector)
    const GalerkinSystem pure = [&] {
        IbcParams params = IbcParams::defaults(s.c, cplx(1e-7, 0.0));
        params.vacuum_energy = evac;
        GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, s.n_hats);
        basis.elements.erase(basis.elements.begin());
        return assemble_operator(basis, s.c, s.p, params);
    }();

    std::vector<double> expected = spectrum(pure);
    expected.push_back(evac);
    std::sort(expected.begin(), expected.end());
    const std::vector<double> got = spectrum(sys);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - expected[i]) < 1e-4 * (1.0 + std::abs(expected[i])));
}

TEST_CASE("variational monotonicity under nested hat refinement") {
    // nested log grids (n and 2n-1) with hats on every interior node give
    // nested Galerkin spaces, so the lowest pencil eigenvalue cannot rise
    Setup s;
    const IbcParams params = IbcParams::defaults(s.c, cplx(0.5, 0.0));

    const RadialGrid coarse(1e-4, 20.0, 33);
    const RadialGrid fine(1e-4, 20.0, 65);
    const GalerkinSystem sys_c = assemble_operator(
        build_basis(coarse, s.c, params, s.cut, coarse.n - 2), s.c, s.p, params);
    const GalerkinSystem sys_f =
        assemble_operator(build_basis(fine, s.c, params, s.cut, fine.n - 2), s.c, s.p, params);

    const double lo_c = spectrum(sys_c).front();
    const double lo_f = spectrum(sys_f).front();
    CHECK(lo_f <= lo_c + 1e-9 * (1.0 + std::abs(lo_c)));
}

TEST_CASE("the kappa = -1 sector assembles Hermitian with its own null vectors") {
    Setup s;
    const IbcParams params = IbcParams::defaults(s.c, cplx(0.7, 0.2));
    const AngularSector sector(-1, -1);
    const GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, 16, sector);
    const GalerkinSystem sys = assemble_operator(basis, s.c, s.p, params);

    CHECK(sys.pre_symmetrization_defect <= 1e-10 * sys.H.cwiseAbs().maxCoeff());
    CHECK(sys.overlap_min_eigenvalue > 0.0);
    double coupling = 0.0;
    for (int a = 1; a < sys.size(); ++a)
        coupling = std::max(coupling, std::abs(sys.H(0, a)));
    CHECK(coupling > 1e-8);
}

TEST_CASE("assemble rejects a mismatched coupling") {
    Setup s;
    const IbcParams params = IbcParams::defaults(s.c);
    const GalerkinBasis basis = build_basis(s.grid, s.c, params, s.cut, 8);
    CHECK_THROWS_AS(assemble_operator(basis, CouplingConstants(0.95), s.p, params),
                    ConstraintViolated);
}
