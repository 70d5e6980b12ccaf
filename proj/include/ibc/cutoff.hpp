#pragma once

#include <cmath>
#include <vector>

#include "ibc/errors.hpp"
#include "ibc/grid.hpp"

namespace ibc {

/// Radial cutoff chi(r): identically 1 on (0, rho1], identically 0 on
/// [rho2, inf), bridged by the polynomial smoothstep of the given order,
/// which makes chi C^{order-1}.
struct CutoffSpec {
    double rho1 = 0.5;
    double rho2 = 2.0;
    int order = 3;

    CutoffSpec() = default;

    CutoffSpec(double rho1_, double rho2_, int order_ = 3)
        : rho1(rho1_), rho2(rho2_), order(order_) {
        if (!(0.0 < rho1 && rho1 < rho2))
            throw CutoffOutsideGrid("need 0 < rho1 < rho2");
        if (order < 2)
            throw CutoffOutsideGrid("smoothstep order must be >= 2");
    }

    void require_inside(const RadialGrid& grid) const {
        if (!(grid.r_min < rho1 && rho2 < grid.r_max))
            throw CutoffOutsideGrid("cutoff must satisfy r_min < rho1 < rho2 < r_max");
    }
};

/// chi and its first two radial derivatives at one point.
struct CutoffEval {
    double chi = 0.0;
    double dchi = 0.0;
    double d2chi = 0.0;
};

namespace detail {

/// Monomial coefficients of the smoothstep S_N on [0, 1] (S_N(0) = 0,
/// S_N(1) = 1, first N derivatives vanishing at both ends).
inline std::vector<double> smoothstep_coeffs(int N) {
    auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 0; i < b; ++i)
            r = r * (a - i) / (i + 1);
        return r;
    };
    std::vector<double> c(2 * N + 2, 0.0);
    double sign = 1.0;
    for (int k = 0; k <= N; ++k) {
        c[N + 1 + k] = sign * binom(N + k, k) * binom(2 * N + 1, N - k);
        sign = -sign;
    }
    return c;
}

} // namespace detail

inline CutoffEval eval_cutoff(const CutoffSpec& cut, double r) {
    if (r <= cut.rho1)
        return {1.0, 0.0, 0.0};
    if (r >= cut.rho2)
        return {0.0, 0.0, 0.0};

    const int N = cut.order - 1;
    static thread_local int cached_N = -1;
    static thread_local std::vector<double> coeffs;
    if (cached_N != N) {
        coeffs = detail::smoothstep_coeffs(N);
        cached_N = N;
    }

    const double width = cut.rho2 - cut.rho1;
    const double t = (r - cut.rho1) / width;
    double s = 0.0, ds = 0.0, d2s = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
        d2s = d2s * t + 2.0 * ds;
        ds = ds * t + s;
        s = s * t + coeffs[k];
    }
    CutoffEval out;
    out.chi = 1.0 - s;
    out.dchi = -ds / width;
    out.d2chi = -d2s / (width * width);
    return out;
}

} // namespace ibc
