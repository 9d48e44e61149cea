#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "cmalab/errors.hpp"
#include "cmalab/grid.hpp"
#include "cmalab/radial.hpp"

namespace cmalab {

/// Density f(z) = beta^{n+1} |z|^{2n(beta-1)} of the power profile, sampled
/// on an n = 1 grid. The cell containing the singular point z = 0 gets its
/// cell average (midpoint subsampling) instead of the infinite point value,
/// is masked out of quadrature, and the omitted point mass is the
/// integrable tail of the cell.
inline GridFn sample_power_density(std::shared_ptr<const GridGeometry> geom, double beta) {
    if (geom->dim != 2) throw std::invalid_argument("sample_power_density: n = 1 grids only");
    const int n = 1;
    const double c = std::pow(beta, n + 1);
    const double expo = n * (beta - 1.0);
    GridFn f;
    f.geom = geom;
    f.values.assign(geom->total, 0.0);
    const double h = geom->h;
    for (int i : geom->interior) {
        const double x = geom->coord(i, 0), y = geom->coord(i, 1);
        const double s = x * x + y * y;
        if (s > 1e-28) {
            f.values[i] = c * std::pow(s, expo);
        } else if (beta < 1.0) {
            const int M = 64;
            double acc = 0.0;
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) {
                    const double qx = (a + 0.5) / M * h - 0.5 * h;
                    const double qy = (b + 0.5) / M * h - 0.5 * h;
                    acc += c * std::pow(qx * qx + qy * qy, expo);
                }
            f.values[i] = acc / (M * M);
            f.masked.push_back(i);
        } else {
            f.values[i] = c;
        }
    }
    return f;
}

inline GridFn sample_constant_density(std::shared_ptr<const GridGeometry> geom, double value) {
    GridFn f;
    f.geom = geom;
    f.values.assign(geom->total, 0.0);
    for (int i : geom->interior) f.values[i] = value;
    return f;
}

/// Named boundary-data functions for problem files.
inline std::function<double(std::span<const double>)> boundary_function(const std::string& kind,
                                                                        double value = 0.0) {
    auto r2 = [](std::span<const double> p) {
        double s = 0.0;
        for (double x : p) s += x * x;
        return s;
    };
    if (kind == "abs2") return [r2](std::span<const double> p) { return r2(p); };
    if (kind == "abs") return [r2](std::span<const double> p) { return std::sqrt(r2(p)); };
    if (kind == "constant") return [value](std::span<const double>) { return value; };
    if (kind == "harmonic")  // Re(z^2) on C^1
        return [](std::span<const double> p) { return p[0] * p[0] - p[1] * p[1]; };
    if (kind == "holder")  // |z - e_1|^value, Holder with exponent `value`
        return [value](std::span<const double> p) {
            const double dx = p[0] - 1.0, dy = p[1];
            return std::pow(dx * dx + dy * dy, 0.5 * value);
        };
    if (kind == "power_trace")  // |z|^{2 beta} with beta = value
        return [r2, value](std::span<const double> p) { return std::pow(r2(p), value); };
    if (kind == "zero") return [](std::span<const double>) { return 0.0; };
    throw config_error("boundary_function: unknown kind '" + kind + "'");
}

}  // namespace cmalab
