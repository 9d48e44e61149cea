#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmalab/errors.hpp"
#include "cmalab/grid.hpp"

namespace cmalab {

struct StabilityResult {
    double lhs = 0.0;       // sup over the interior of (v - u), clamped at 0
    double rhs_norm = 0.0;  // || max(v - u, 0) ||_{L^r}
    double ratio = 0.0;     // lhs / rhs_norm^gamma (0 when rhs vanishes)
    double gamma = 0.0, r = 1.0;
};

/// Two-sided data for the stability inequality sup(v-u) <= C ||(v-u)+||^gamma:
/// computes both sides and their ratio. The constant is existential, so only
/// boundedness of the ratio across an instance family is testable.
/// Preconditions: r >= 1, gamma in [0, r/(n p* + r)), v <= u at boundary samples.
inline StabilityResult stability_check(const GridFn& u, const GridFn& v, double r, double gamma,
                                       int n, double p) {
    if (u.geom != v.geom) throw shape_error("stability_check: functions on different grids");
    if (!(r >= 1.0)) throw std::invalid_argument("stability_check: requires r >= 1");
    if (!(p > 1.0)) throw std::invalid_argument("stability_check: requires p > 1");
    const double pstar = p / (p - 1.0);
    const double gamma_max = r / (n * pstar + r);
    if (!(gamma >= 0.0 && gamma < gamma_max))
        throw std::invalid_argument("stability_check: gamma outside [0, r/(n p* + r))");
    const auto& g = *u.geom;
    const double scale = 1.0 + norm(u, NormKind::Sup) + norm(v, NormKind::Sup);
    for (int b : g.boundary)
        if (v.values[b] > u.values[b] + 1e-12 * scale)
            throw std::invalid_argument("stability_check: precondition v <= u on the boundary fails");

    StabilityResult res;
    res.gamma = gamma;
    res.r = r;
    double sup = 0.0, acc = 0.0;
    for (int i : g.interior) {
        const double d = std::max(v.values[i] - u.values[i], 0.0);
        sup = std::max(sup, d);
        acc += std::pow(d, r);
    }
    res.lhs = sup;
    res.rhs_norm = std::pow(acc * g.cell_volume(), 1.0 / r);
    res.ratio = res.rhs_norm > 0.0 ? res.lhs / std::pow(res.rhs_norm, gamma) : 0.0;
    return res;
}

/// Instance family for the boundedness test: u = |z|^2 - 1 (density 1,
/// vanishing boundary data) against v = u + scale*(1 - |z|)^2, which matches
/// u on the boundary and bulges inside. Scaling the bulge traces the family.
inline std::vector<std::pair<GridFn, GridFn>> make_stability_family(
    std::shared_ptr<const GridGeometry> geom, std::span<const double> bump_scales) {
    std::vector<std::pair<GridFn, GridFn>> family;
    auto u = sample_function(geom, [](std::span<const double> pt) {
        double s = 0.0;
        for (double x : pt) s += x * x;
        return s - 1.0;
    });
    for (double c : bump_scales) {
        auto v = sample_function(geom, [c](std::span<const double> pt) {
            double s = 0.0;
            for (double x : pt) s += x * x;
            const double dist = 1.0 - std::sqrt(s);
            return (s - 1.0) + c * dist * dist;
        });
        family.emplace_back(u, std::move(v));
    }
    return family;
}

}  // namespace cmalab
