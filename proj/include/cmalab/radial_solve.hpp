#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmalab/errors.hpp"
#include "cmalab/radial.hpp"

namespace cmalab {

struct RadialSolveResult {
    RadialFn phi;                 // recovered profile on the input mesh
    std::vector<double> dphi;     // phi' samples (dphi[0] is a one-sided proxy)
    double residual = 0.0;        // first-integral defect vs. trapezoid quadrature
    double boundary_value = 0.0;  // phi(S), pinned exactly
};

namespace detail {

/// Integral of g over one cell [s0, s1] by local power-law interpolation
/// g ~ c s^a through (s0, g0), (s1, g1): exact for pure powers, second
/// order for smooth g. Falls back to the trapezoid rule when values are
/// nonpositive or nearly equal. For the cell at s0 = 0 the exponent must
/// come from the caller (one-sided); a <= -1 means a divergent integral.
inline double powerlaw_cell(double s0, double s1, double g0, double g1) {
    if (g0 <= 0.0 || g1 <= 0.0 || s0 <= 0.0) return 0.5 * (g0 + g1) * (s1 - s0);
    const double a = std::log(g1 / g0) / std::log(s1 / s0);
    if (std::abs(a) < 1e-12 || !std::isfinite(a)) return 0.5 * (g0 + g1) * (s1 - s0);
    // c = g1 / s1^a; integral = c (s1^{a+1} - s0^{a+1})/(a+1)
    if (std::abs(a + 1.0) < 1e-12) return g1 * s1 * std::log(s1 / s0);
    return g1 / std::pow(s1, a) * (std::pow(s1, a + 1.0) - std::pow(s0, a + 1.0)) / (a + 1.0);
}

}  // namespace detail

/// Solve (s phi')^n = n * int_0^s sigma^{n-1} f(sigma) dsigma, then
/// integrate phi' inward from S with phi(S) = boundary_value. Exact first
/// integral; quadrature is power-law aware so pure power densities round
/// trip to machine precision. phi'(0) is never evaluated for singular f:
/// the first cell is integrated in closed form from its local exponent.
inline RadialSolveResult solve_radial(int n, const RadialFn& f, double boundary_value) {
    const int m = static_cast<int>(f.s.size());
    if (m < 4) throw std::invalid_argument("solve_radial: mesh too short");
    if (f.n != n) throw std::invalid_argument("solve_radial: density dimension mismatch");
    for (int i = 1; i < m; ++i)
        if (f.values[i] < 0.0) throw std::domain_error("solve_radial: density must be nonnegative");
    if (f.values[0] < 0.0 && std::isfinite(f.values[0]))
        throw std::domain_error("solve_radial: density must be nonnegative");

    const auto& s = f.s;
    auto g = [&](int i) { return f.values[i] * std::pow(s[i], n - 1); };

    // I(s_i) = int_0^{s_i} sigma^{n-1} f dsigma
    std::vector<double> I(m, 0.0);
    {
        // first cell: local exponent from the next two nodes
        const double g1 = g(1);
        double a = static_cast<double>(n - 1);
        if (m > 2 && g1 > 0.0 && g(2) > 0.0) a = std::log(g(2) / g1) / std::log(s[2] / s[1]);
        if (a <= -1.0)
            throw singular_data_error("solve_radial: density not integrable against s^{n-1} near 0 "
                                      "(local exponent " + std::to_string(a) + ")");
        I[1] = (g1 > 0.0) ? g1 * s[1] / (a + 1.0) : 0.0;
        for (int i = 2; i < m; ++i) I[i] = I[i - 1] + detail::powerlaw_cell(s[i - 1], s[i], g(i - 1), g(i));
        if (!std::isfinite(I[m - 1])) throw singular_data_error("solve_radial: divergent density quadrature");
    }

    RadialSolveResult r;
    r.phi = make_radial_mesh(n, s.back(), m);
    r.phi.s = s;  // preserve the exact input mesh
    r.dphi.assign(m, 0.0);
    for (int i = 1; i < m; ++i) r.dphi[i] = std::pow(n * I[i], 1.0 / n) / s[i];
    // phi'(0): limit value for continuous f (f(0)^{1/n}); for singular f a
    // finite one-sided proxy, unused by the inward integration below.
    r.dphi[0] = std::isfinite(f.values[0]) ? std::pow(std::max(f.values[0], 0.0), 1.0 / n) : r.dphi[1];

    // phi(s) = boundary_value - int_s^S phi'  (power-law aware cells again;
    // the first cell uses the closed-form integral of its local power)
    std::vector<double> cell(m, 0.0);
    for (int i = 2; i < m; ++i) cell[i] = detail::powerlaw_cell(s[i - 1], s[i], r.dphi[i - 1], r.dphi[i]);
    {
        const double d1 = r.dphi[1];
        double a = 0.0;
        if (m > 2 && d1 > 0.0 && r.dphi[2] > 0.0) a = std::log(r.dphi[2] / d1) / std::log(s[2] / s[1]);
        cell[1] = (a > -1.0 && d1 > 0.0) ? d1 * s[1] / (a + 1.0) : 0.5 * (r.dphi[0] + d1) * s[1];
    }
    r.phi.values[m - 1] = boundary_value;
    for (int i = m - 2; i >= 0; --i) r.phi.values[i] = r.phi.values[i + 1] - cell[i + 1];
    r.boundary_value = boundary_value;

    // residual of the identity against an independent trapezoid quadrature
    double worst = 0.0;
    double It = 0.0;
    for (int i = 1; i < m; ++i) {
        const double ga = std::isfinite(g(i - 1)) ? g(i - 1) : g(i);
        It += 0.5 * (ga + g(i)) * (s[i] - s[i - 1]);
        const double lhs = std::pow(s[i] * r.dphi[i], n);
        const double rhs = n * It;
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    r.residual = worst;
    return r;
}

}  // namespace cmalab
