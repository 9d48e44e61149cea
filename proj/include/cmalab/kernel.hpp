#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "cmalab/errors.hpp"

namespace cmalab {

enum class KernelKind { BallIndicator, SmoothBump, PlateauBump };

/// Surface area of the unit sphere in R^d for even d = 2n: 2 pi^n/(n-1)!.
inline double sphere_area(int d) {
    if (d % 2 != 0 || d < 2) throw std::invalid_argument("sphere_area: expected even dimension");
    const int n = d / 2;
    double v = 2.0;
    for (int k = 1; k <= n; ++k) v *= M_PI;
    for (int k = 1; k <= n - 1; ++k) v /= k;
    return v;
}

/// Radial regularization kernel eta(x) = norm_const * shape(|x|), supported
/// in the ball of radius R, with unit mass in dimension dim. The shapes are
/// nonincreasing in |x|:
///   BallIndicator: shape = 1 on [0, R]                (no plateau set)
///   SmoothBump:    shape = exp(-1/(1 - (r/R)^2))      (plateau B_{R/2})
///   PlateauBump:   shape = 1 on [0, R/2], smoothstep to 0 at R
/// The plateau descriptor (plateau_radius, delta) records an open ball on
/// which eta >= delta, as required by the dyadic regularity certificate.
struct Kernel {
    KernelKind kind = KernelKind::BallIndicator;
    double R = 1.0;          // support radius
    int dim = 2;             // ambient real dimension (2n)
    double norm_const = 0.0; // makes the mass 1
    double plateau_radius = 0.0;
    double delta = 0.0;      // lower bound of eta on the plateau

    static double shape_of(KernelKind kind, double r, double R) {
        switch (kind) {
            case KernelKind::BallIndicator:
                return r <= R ? 1.0 : 0.0;
            case KernelKind::SmoothBump: {
                if (r >= R) return 0.0;
                const double t = r / R;
                return std::exp(-1.0 / (1.0 - t * t));
            }
            case KernelKind::PlateauBump: {
                if (r >= R) return 0.0;
                if (r <= 0.5 * R) return 1.0;
                const double t = (R - r) / (0.5 * R);  // 1 at R/2, 0 at R
                return t * t * (3.0 - 2.0 * t);
            }
        }
        return 0.0;
    }

    static Kernel make(KernelKind kind, int dim, double R = 1.0) {
        if (R <= 0.0) throw std::invalid_argument("Kernel: support radius must be positive");
        Kernel k;
        k.kind = kind;
        k.R = R;
        k.dim = dim;
        // mass = norm_const * sphere_area * int_0^R shape(r) r^{d-1} dr
        const int m = 1 << 14;
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {  // midpoint rule, smooth integrand
            const double r = R * (i + 0.5) / m;
            acc += shape_of(kind, r, R) * std::pow(r, dim - 1);
        }
        acc *= R / m * sphere_area(dim);
        k.norm_const = 1.0 / acc;
        if (kind == KernelKind::BallIndicator) {
            k.plateau_radius = 0.0;  // treated as plateau-less; certificate rejects it
            k.delta = 0.0;
        } else {
            k.plateau_radius = 0.5 * R;
            k.delta = k.norm_const * shape_of(kind, 0.5 * R, R);
        }
        return k;
    }

    double shape(double r) const { return shape_of(kind, r, R); }

    /// eta at radius r (normalized).
    double eval_radial(double r) const { return norm_const * shape(r); }

    /// Mass recomputed by an independent trapezoid quadrature (invariant check).
    double mass(int samples = 20001) const {
        double acc = 0.0;
        for (int i = 1; i < samples; ++i) {
            const double r0 = R * (i - 1) / (samples - 1), r1 = R * i / (samples - 1);
            const double g0 = shape(r0) * std::pow(r0, dim - 1);
            const double g1 = shape(r1) * std::pow(r1, dim - 1);
            acc += 0.5 * (g0 + g1) * (r1 - r0);
        }
        return acc * sphere_area(dim) * norm_const;
    }
};

}  // namespace cmalab
