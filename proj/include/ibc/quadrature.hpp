#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ibc/errors.hpp"

namespace ibc {

/// Tolerances for the composite Gauss-Legendre rules.  abs_tol bounds the
/// adaptive bisection error per interval; tail_cut stops the geometric
/// grading toward r = 0 once panel contributions fall below it.
struct QuadratureBudget {
    double abs_tol = 1e-11;
    double tail_cut = 1e-14;
    int max_depth = 28;
    int max_tail_panels = 4000;
};

namespace quad {

/// Gauss-Legendre nodes and weights on [-1, 1], computed once per order by
/// Newton iteration on the Legendre recurrence.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussRule(int n) : x(n), w(n) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15)
                    break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
    }
};

inline const GaussRule& rule20() {
    static const GaussRule r(20);
    return r;
}

using Integrand = std::function<std::complex<double>(double)>;

inline std::complex<double> panel(const Integrand& f, double a, double b) {
    const GaussRule& g = rule20();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i)
        acc += g.w[i] * f(mid + half * g.x[i]);
    return acc * half;
}

inline std::complex<double> bisect(const Integrand& f, double a, double b,
                                   std::complex<double> whole, double tol, int depth,
                                   const QuadratureBudget& budget) {
    const double mid = 0.5 * (a + b);
    const std::complex<double> left = panel(f, a, mid);
    const std::complex<double> right = panel(f, mid, b);
    const double err = std::abs(whole - left - right);
    // the relative floor keeps large-magnitude entries from demanding an
    // absolute accuracy below double roundoff
    const double floor = 4e-15 * (std::abs(left) + std::abs(right));
    if (err <= tol || err <= floor || depth >= budget.max_depth) {
        if (err > tol && err > floor)
            throw QuadratureNotConverged("adaptive bisection exhausted its depth budget");
        return left + right;
    }
    return bisect(f, a, mid, left, 0.5 * tol, depth + 1, budget) +
           bisect(f, mid, b, right, 0.5 * tol, depth + 1, budget);
}

} // namespace quad

/// Adaptive Gauss-Legendre integral of f over [a, b].
inline std::complex<double> integrate(const quad::Integrand& f, double a, double b,
                                      const QuadratureBudget& budget = {}) {
    if (!(b > a))
        return 0.0;
    return quad::bisect(f, a, b, quad::panel(f, a, b), budget.abs_tol, 0, budget);
}

/// Composite integral of f over (0, breakpoints.back()] when
/// singular_origin, else over [breakpoints.front(), breakpoints.back()].
/// Between breakpoints the adaptive rule is used; toward the origin the
/// panels are graded geometrically with ratio 2 until their contributions
/// drop below budget.tail_cut.  The integrand must be integrable at 0.
inline std::complex<double> integrate_piecewise(const quad::Integrand& f,
                                                std::vector<double> breakpoints,
                                                bool singular_origin,
                                                const QuadratureBudget& budget = {}) {
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    if (breakpoints.size() < 2 && !(singular_origin && breakpoints.size() == 1))
        return 0.0;

    std::complex<double> total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        total += integrate(f, breakpoints[i], breakpoints[i + 1], budget);

    if (singular_origin) {
        double hi = breakpoints.front();
        int quiet = 0;
        for (int k = 0; k < budget.max_tail_panels; ++k) {
            const double lo = 0.5 * hi;
            const std::complex<double> c = integrate(f, lo, hi, budget);
            total += c;
            quiet = (std::abs(c) < budget.tail_cut) ? quiet + 1 : 0;
            if (quiet >= 3)
                return total;
            hi = lo;
        }
        throw QuadratureNotConverged("geometric grading toward r = 0 did not decay");
    }
    return total;
}

} // namespace ibc
