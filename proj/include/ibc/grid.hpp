#pragma once

#include <cmath>
#include <vector>

#include "ibc/angular.hpp"
#include "ibc/errors.hpp"

namespace ibc {

/// Physical constants in units hbar = c = 1; masses and energies carry
/// inverse-length units.  E0 is the non-relativistic creation offset and is
/// consumed only by the baseline model.
struct PhysicalParams {
    double mass = 1.0;
    double hbar = 1.0;
    double c_light = 1.0;
    double E0 = 1.0;
};

/// Logarithmically spaced radial grid on [r_min, r_max].  Log spacing
/// resolves the r^{+-B} power behavior near the origin with few nodes.
struct RadialGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    int n = 0;
    std::vector<double> nodes;

    RadialGrid() = default;

    RadialGrid(double r_min_, double r_max_, int n_) : r_min(r_min_), r_max(r_max_), n(n_) {
        if (n < 8)
            throw GridTooCoarse("radial grid needs at least 8 nodes");
        if (!(r_min > 0.0) || !(r_max > r_min))
            throw GridTooCoarse("need 0 < r_min < r_max");
        nodes.resize(n);
        const double step = std::log(r_max / r_min) / (n - 1);
        for (int i = 0; i < n; ++i)
            nodes[i] = r_min * std::exp(i * step);
        nodes.front() = r_min;
        nodes.back() = r_max;
    }
};

/// Two-component complex function sampled on a radial grid, in the
/// r-multiplied picture (Upsi)(r) = r psi(r omega) restricted to one sector.
struct RadialField {
    RadialGrid grid;
    std::vector<SectorVector> values;

    RadialField() = default;

    explicit RadialField(RadialGrid g) : grid(std::move(g)), values(grid.nodes.size()) {}
};

} // namespace ibc
