#include <catch2/catch.hpp>

#include <cmath>

#include "ibc/radial.hpp"

using namespace ibc;

namespace {

/// Residual of the discretized expression on the exact null solution
/// f_pm r^{+-B} of the massless kappa-sector operator.
double null_solution_residual(int kappa, double q, int n, bool plus_branch) {
    const CouplingConstants c(q);
    const BoundaryVectors fb = indicial_null_vectors(c, kappa);
    const RadialGrid grid(1e-4, 10.0, n);
    RadialField f(grid);
    for (int i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        f.values[i] = plus_branch ? std::pow(r, c.B) * fb.f_plus : std::pow(r, -c.B) * fb.f_minus;
    }
    PhysicalParams p;
    p.mass = 0.0;
    const RadialField hf = apply_radial_dirac(AngularSector(kappa, 1), c, p, f);

    // scale-relative: the -B branch grows like r^{-B-1} toward the origin
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double scale = std::pow(grid.nodes[i], (plus_branch ? c.B : -c.B) - 1.0);
        worst = std::max(worst, std::sqrt(hf.values[i].squared_norm()) / scale);
    }
    return worst;
}

} // namespace

TEST_CASE("constant field maps to (m + q/r, kappa/r)") {
    const CouplingConstants c(0.9);
    PhysicalParams p;
    p.mass = 0.7;
    const RadialGrid grid(1e-3, 5.0, 32);
    RadialField f(grid);
    for (auto& v : f.values)
        v = SectorVector(1.0, 0.0);

    for (int kappa : {1, -1, 2}) {
        const RadialField hf = apply_radial_dirac(AngularSector(kappa, 1), c, p, f);
        for (int i = 0; i < grid.n; ++i) {
            const double r = grid.nodes[i];
            CHECK(hf.values[i].plus.real() == Approx(p.mass + c.q / r).epsilon(1e-10));
            CHECK(std::abs(hf.values[i].plus.imag()) < 1e-12);
            CHECK(hf.values[i].minus.real() == Approx(kappa / r).epsilon(1e-9));
        }
    }
}

TEST_CASE("grid constructor rejects coarse or invalid grids") {
    CHECK_THROWS_AS(RadialGrid(1e-3, 1.0, 4), GridTooCoarse);
    CHECK_THROWS_AS(RadialGrid(-1.0, 1.0, 16), GridTooCoarse);
    CHECK_THROWS_AS(RadialGrid(2.0, 1.0, 16), GridTooCoarse);
    const RadialGrid g(1e-3, 1.0, 16);
    CHECK(g.nodes.front() == 1e-3);
    CHECK(g.nodes.back() == 1.0);
    for (int i = 1; i < g.n; ++i)
        CHECK(g.nodes[i] > g.nodes[i - 1]);
}

TEST_CASE("massless null solutions are annihilated at second order") {
    for (int kappa : {1, -1}) {
        for (bool plus_branch : {true, false}) {
            const double r1 = null_solution_residual(kappa, 0.9, 64, plus_branch);
            const double r2 = null_solution_residual(kappa, 0.9, 128, plus_branch);
            const double r3 = null_solution_residual(kappa, 0.9, 256, plus_branch);
            CHECK(r2 < r1 / 3.0); // O(h^2) in the log spacing
            CHECK(r3 < r2 / 3.0);
        }
    }
}

TEST_CASE("difference operator converges at second order on a smooth field") {
    const CouplingConstants c(0.9);
    PhysicalParams p;
    p.mass = 1.0;
    const AngularSector sector(1, 1);

    const auto bump = [](double r) { return std::exp(-(r - 2.0) * (r - 2.0)); };
    const auto dbump = [&](double r) { return -2.0 * (r - 2.0) * bump(r); };

    const auto residual = [&](int n) {
        const RadialGrid grid(0.5, 4.0, n);
        RadialField f(grid);
        for (int i = 0; i < n; ++i)
            f.values[i] = SectorVector(bump(grid.nodes[i]), 0.5 * bump(grid.nodes[i]));
        const RadialField hf = apply_radial_dirac(sector, c, p, f);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = grid.nodes[i];
            const double w = bump(r), dw = dbump(r);
            const cplx exact_plus = (p.mass + c.q / r) * w + (-0.5 * dw + 0.5 * w / r);
            const cplx exact_minus = (dw + w / r) + (-p.mass + c.q / r) * 0.5 * w;
            worst = std::max(worst, std::abs(hf.values[i].plus - exact_plus));
            worst = std::max(worst, std::abs(hf.values[i].minus - exact_minus));
        }
        return worst;
    };

    const double e1 = residual(64);
    const double e2 = residual(128);
    const double e3 = residual(256);
    CHECK(e2 < e1 / 3.0);
    CHECK(e3 < e2 / 3.0);
}

TEST_CASE("indicial exponents") {
    auto [lo, hi] = indicial_exponents(1, 0.9);
    CHECK(hi == Approx(0.4358899).margin(1e-7));
    CHECK(lo == Approx(-hi).margin(1e-15));

    CHECK(indicial_exponents(1, 0.0).second == Approx(1.0).margin(1e-15));
    CHECK(indicial_exponents(2, 0.9).second == Approx(1.7860571).margin(1e-7));
    CHECK(indicial_exponents(2, 0.9).second == Approx(std::sqrt(4.0 - 0.81)).epsilon(1e-14));

    CHECK_THROWS_AS(indicial_exponents(1, 1.2), OvercriticalCoupling);
    CHECK_THROWS_AS(indicial_exponents(0, 0.5), InvalidSector);
}

TEST_CASE("classifier reproduces the closed-form criterion") {
    CHECK(classify_sector(1, 0.9) == EsaVerdict::MultipleExtensions);
    CHECK(classify_sector(1, 0.8) == EsaVerdict::Unique);
    CHECK(classify_sector(2, 0.9) == EsaVerdict::Unique);
    CHECK(classify_sector(1, 1.2) == EsaVerdict::Overcritical);
    CHECK_THROWS_AS(classify_sector(0, 0.1), InvalidSector);

    // the kappa = +-1 boundary sits at |q| = sqrt(3)/2: sweep a fine grid
    // around it and compare against the exact inequality
    const double edge = std::sqrt(3.0) / 2.0;
    for (int k = -20; k <= 20; ++k) {
        const double q = edge + k * 1e-4;
        const EsaVerdict expected =
            q * q <= 0.75 ? EsaVerdict::Unique : EsaVerdict::MultipleExtensions;
        CHECK(classify_sector(1, q) == expected);
        CHECK(classify_sector(-1, q) == expected);
    }
    CHECK(classify_sector(1, edge - 1e-4) == EsaVerdict::Unique);
    CHECK(classify_sector(1, edge + 1e-4) == EsaVerdict::MultipleExtensions);
}

TEST_CASE("classifier agrees with the square-integrability witness") {
    for (int kappa : {1, -1, 2, 3}) {
        for (double q = 0.0; q < std::abs(kappa); q += 0.05) {
            const double s = std::sqrt(double(kappa) * kappa - q * q);
            const bool integrable = l2_integrability_check(s, 0.5, 1e-8);
            const EsaVerdict v = classify_sector(kappa, q);
            // unique extension <=> the r^{-s} solution fails to be L2 near 0
            CHECK((v == EsaVerdict::Unique) == !integrable);
        }
    }
}

TEST_CASE("square-integrability witness examples") {
    CHECK(l2_integrability_check(0.4, 1.0, 1e-10));
    CHECK_FALSE(l2_integrability_check(0.6, 1.0, 1e-10));
    CHECK(l2_integrability_check(0.4358898943540673, 1.0, 1e-10));
    // for |kappa| >= 2 both exponents exceed 1/2 on the whole subcritical range
    for (double q = 0.0; q < 1.0; q += 0.1)
        CHECK(std::sqrt(4.0 - q * q) > 0.5);
}
