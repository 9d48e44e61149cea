#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmalab/errors.hpp"
#include "cmalab/grid.hpp"

namespace cmalab {

struct PoissonParams {
    double omega = 1.9;          // SOR relaxation factor
    long max_iterations = 100000;
    double tolerance = 1e-9;     // sup-norm residual of the discrete operator
};

struct GridSolveResult {
    GridFn u;
    double residual = 0.0;
    long iterations = 0;
};

/// Dirichlet problem for Delta u = 4 f on a domain in C^1, 5-point stencil.
///
/// Interior points whose stencil arm exits the domain are closed by linear
/// interpolation along that arm between the boundary crossing (Dirichlet
/// value) and the opposite neighbor. The interpolation is first order at
/// those points and the scheme is second order globally; it is not exact
/// on quadratics, so convergence studies against |z|^2 measure a real rate.
///
/// Red-black SOR with a fixed sweep order; irregular rows are relaxed with
/// omega = 1 (their equations are not of Poisson type).
inline GridSolveResult solve_poisson_n1(const GridFn& f, const GridFn& phi, PoissonParams params = {}) {
    if (f.geom != phi.geom) throw shape_error("solve_poisson_n1: density and boundary data on different grids");
    const auto& g = *f.geom;
    if (g.dim != 2) throw std::invalid_argument("solve_poisson_n1: grid must be 2-dimensional (n = 1)");
    for (int i : g.interior)
        if (f.values[i] < 0.0 && !f.is_masked(i))
            throw std::domain_error("solve_poisson_n1: density must be nonnegative");

    const double h = g.h;

    // row data
    struct RegularRow {
        int self;
        long nb[4];      // flat neighbor indices (interior or boundary)
        double rhs;      // 4 f h^2
    };
    struct IrregularRow {
        int self;
        long opp;        // opposite neighbor (-1: use Dirichlet value only)
        double w_opp;    // d / (h + d)
        double w_bdy;    // h phi(b) / (h + d)   (precombined)
        double d;        // crossing distance
    };
    std::vector<RegularRow> regular;
    std::vector<IrregularRow> irregular;
    std::vector<char> color_of(static_cast<size_t>(g.total), 0);
    for (long i = 0; i < g.total; ++i)
        color_of[i] = static_cast<char>((g.axis_index(i, 0) + g.axis_index(i, 1)) & 1);

    // interpolate Dirichlet data at a boundary crossing from the two
    // nearest boundary samples
    auto phi_at = [&](std::span<const double> b) {
        size_t best1 = 0, best2 = 0;
        double d1 = INFINITY, d2 = INFINITY;
        for (size_t k = 0; k < g.boundary.size(); ++k) {
            const auto p = g.boundary_position(k);
            double dd = 0.0;
            for (int c = 0; c < g.dim; ++c) dd += (p[c] - b[c]) * (p[c] - b[c]);
            if (dd < d1) {
                d2 = d1; best2 = best1;
                d1 = dd; best1 = k;
            } else if (dd < d2) {
                d2 = dd; best2 = k;
            }
        }
        const auto p1 = g.boundary_position(best1);
        const auto p2 = g.boundary_position(best2);
        double seg2 = 0.0, proj = 0.0;
        for (int c = 0; c < g.dim; ++c) {
            seg2 += (p2[c] - p1[c]) * (p2[c] - p1[c]);
            proj += (b[c] - p1[c]) * (p2[c] - p1[c]);
        }
        const double t = (seg2 > 1e-300) ? std::clamp(proj / seg2, 0.0, 1.0) : 0.0;
        return (1.0 - t) * phi.values[g.boundary[best1]] + t * phi.values[g.boundary[best2]];
    };

    std::vector<double> pbuf(g.dim);
    // a stencil arm may only read values stored at lattice positions:
    // interior points and exactly-on-boundary points
    auto usable = [&](long j) { return j >= 0 && g.value_at_lattice(j); };
    for (int i : g.interior) {
        long nb[4];
        bool all_usable = true;
        int k = 0;
        for (int axis = 0; axis < 2; ++axis)
            for (int st : {-1, 1}) {
                const long j = g.neighbor(i, axis, st);
                nb[k++] = j;
                if (!usable(j)) all_usable = false;
            }
        if (all_usable) {
            regular.push_back({i, {nb[0], nb[1], nb[2], nb[3]}, 4.0 * f.values[i] * h * h});
            continue;
        }
        // pick the exiting arm with the smallest crossing distance
        for (int c = 0; c < g.dim; ++c) pbuf[c] = g.coord(i, c);
        double dmin = INFINITY;
        int axis_min = 0, sign_min = 1;
        int kk = 0;
        for (int axis = 0; axis < 2; ++axis)
            for (int st : {-1, 1}) {
                const long j = nb[kk++];
                if (usable(j)) continue;
                const double d = g.domain.boundary_crossing(pbuf, axis, st, h);
                if (d < dmin) {
                    dmin = d;
                    axis_min = axis;
                    sign_min = st;
                }
            }
        if (!(dmin <= h)) dmin = h;  // crossing must exist; clamp against roundoff
        std::vector<double> b(pbuf);
        b[axis_min] += sign_min * dmin;
        const double phib = phi_at(b);
        const long opp = g.neighbor(i, axis_min, -sign_min);
        const bool opp_ok = usable(opp);
        IrregularRow row;
        row.self = i;
        row.d = dmin;
        if (opp_ok) {
            row.opp = opp;
            row.w_opp = dmin / (h + dmin);
            row.w_bdy = h * phib / (h + dmin);
        } else {
            row.opp = -1;
            row.w_opp = 0.0;
            row.w_bdy = phib;  // sliver: transfer the Dirichlet value
        }
        irregular.push_back(row);
    }

    GridSolveResult res;
    res.u = phi;  // boundary values in place; interior starts at 0
    for (int i : g.interior) res.u.values[i] = 0.0;
    auto& u = res.u.values;

    auto sweep_color = [&](int color, double omega) {
        for (const auto& r : regular) {
            if (color_of[r.self] != color) continue;
            double s = 0.0;
            for (long j : r.nb) s += u[j];
            const double unew = 0.25 * (s - r.rhs);
            u[r.self] += omega * (unew - u[r.self]);
        }
        for (const auto& r : irregular) {
            if (color_of[r.self] != color) continue;
            const double unew = r.w_bdy + (r.opp >= 0 ? r.w_opp * u[r.opp] : 0.0);
            u[r.self] += unew - u[r.self];  // omega = 1 on interpolation rows
        }
    };

    auto residual = [&]() {
        double worst = 0.0;
        const double inv = 1.0 / (4.0 * h * h);
        for (const auto& r : regular) {
            double s = -4.0 * u[r.self] - r.rhs;
            for (long j : r.nb) s += u[j];
            worst = std::max(worst, std::abs(s) * inv);
        }
        for (const auto& r : irregular) {
            const double unew = r.w_bdy + (r.opp >= 0 ? r.w_opp * u[r.opp] : 0.0);
            worst = std::max(worst, std::abs(u[r.self] - unew) / (h * h));
        }
        return worst;
    };

    long it = 0;
    double resid = INFINITY;
    const long check_every = 8;
    while (it < params.max_iterations) {
        sweep_color(0, params.omega);
        sweep_color(1, params.omega);
        ++it;
        if (it % check_every == 0 || it == params.max_iterations) {
            resid = residual();
            if (resid <= params.tolerance) break;
        }
    }
    if (!(resid <= params.tolerance)) {
        resid = residual();
        if (resid > params.tolerance)
            throw solver_failure("solve_poisson_n1: SOR did not reach tolerance", resid, it);
    }
    res.residual = resid;
    res.iterations = it;
    return res;
}

struct ComparisonResult {
    bool pass = false;
    double worst_violation = 0.0;  // max over interior of (v - u)
};

/// Check v <= u + tolerance at every interior grid point (the grid-level
/// comparison-principle assertion; caller guarantees ordered densities and
/// ordered boundary data).
inline ComparisonResult comparison_check(const GridFn& u, const GridFn& v, double tolerance) {
    if (u.geom != v.geom) throw shape_error("comparison_check: functions on different grids");
    ComparisonResult r;
    double worst = -INFINITY;
    for (int i : u.geom->interior) worst = std::max(worst, v.values[i] - u.values[i]);
    r.worst_violation = std::max(worst, 0.0);
    r.pass = worst <= tolerance;
    return r;
}

}  // namespace cmalab
