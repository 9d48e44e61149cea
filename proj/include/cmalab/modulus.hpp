#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmalab/errors.hpp"
#include "cmalab/fit.hpp"
#include "cmalab/grid.hpp"

namespace cmalab {

namespace detail {

/// Point cloud backing the pair scans: interior samples at lattice
/// positions plus boundary samples at their projected positions, each with
/// its value and distance to the boundary.
struct SampleCloud {
    int dim = 2;
    std::vector<double> pos;    // size count*dim
    std::vector<double> val;
    std::vector<double> bdist;  // 0 for boundary samples
    long count = 0;

    std::span<const double> at(long i) const { return {pos.data() + i * dim, static_cast<size_t>(dim)}; }
};

inline SampleCloud collect_samples(const GridFn& u) {
    const auto& g = *u.geom;
    SampleCloud c;
    c.dim = g.dim;
    c.count = static_cast<long>(g.interior.size() + g.boundary.size());
    c.pos.resize(c.count * g.dim);
    c.val.resize(c.count);
    c.bdist.resize(c.count);
    long w = 0;
    for (int i : g.interior) {
        for (int k = 0; k < g.dim; ++k) c.pos[w * g.dim + k] = g.coord(i, k);
        c.val[w] = u.values[i];
        c.bdist[w] = g.bdist[i];
        ++w;
    }
    for (size_t b = 0; b < g.boundary.size(); ++b) {
        const auto p = g.boundary_position(b);
        for (int k = 0; k < g.dim; ++k) c.pos[w * g.dim + k] = p[k];
        c.val[w] = u.values[g.boundary[b]];
        c.bdist[w] = 0.0;
        ++w;
    }
    return c;
}

inline double pair_dist(const SampleCloud& c, long i, long j) {
    double s = 0.0;
    for (int k = 0; k < c.dim; ++k) {
        const double d = c.pos[i * c.dim + k] - c.pos[j * c.dim + k];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Deepest dyadic level containing distance d: largest k with eps0/2^k >= d.
inline int deepest_level(double eps0, double d, int depth) {
    if (!(d > 0.0)) return depth;
    const int k = static_cast<int>(std::floor(std::log2(eps0 / d)));
    return std::clamp(k, -1, depth);
}

}  // namespace detail

enum class ModulusMode { Exhaustive, Sampled };

/// Sampled modulus of continuity over dyadic radii r_k = eps0/2^k.
struct ModulusCurve {
    double eps0 = 0.0;
    std::vector<double> radii;   // decreasing
    std::vector<double> omega;   // nondecreasing in r
    ModulusMode mode = ModulusMode::Exhaustive;
    long sample_pairs = 0;       // sampled mode only
    bool truncated = false;      // requested depth hit the grid scale
    int requested_depth = 0;
};

/// sup_{|x-y| <= r} |u(x)-u(y)| over grid samples, per dyadic radius.
/// Grids up to 128^2 points are scanned exhaustively; larger grids use
/// fixed-seed random pairs per level plus exhaustive local scans anchored
/// at the extreme-value samples (the sup lives at value extremes, which
/// uniform pair sampling would miss at small radii).
inline ModulusCurve modulus(const GridFn& u, double eps0, int depth, std::uint64_t seed = 1,
                            long pair_budget = 1'000'000) {
    if (!(eps0 > 0.0) || depth < 0) throw std::invalid_argument("modulus: bad eps0/depth");
    const auto& g = *u.geom;
    ModulusCurve curve;
    curve.eps0 = eps0;
    curve.requested_depth = depth;
    const double rmin = 2.0 * g.h;
    if (eps0 < rmin) throw std::invalid_argument("modulus: eps0 below grid resolution");
    int d_eff = depth;
    while (d_eff > 0 && eps0 / std::pow(2.0, d_eff) < rmin) --d_eff;
    curve.truncated = d_eff < depth;

    const auto cloud = detail::collect_samples(u);
    const long P = cloud.count;
    curve.radii.resize(d_eff + 1);
    for (int k = 0; k <= d_eff; ++k) curve.radii[k] = eps0 / std::pow(2.0, k);
    std::vector<double> binned(d_eff + 1, 0.0);

    auto feed = [&](long i, long j) {
        const double d = detail::pair_dist(cloud, i, j);
        if (d > eps0) return;
        const int k = detail::deepest_level(eps0, d, d_eff);
        if (k < 0) return;
        const double diff = std::abs(cloud.val[i] - cloud.val[j]);
        if (diff > binned[k]) binned[k] = diff;
    };

    if (P <= 16384) {
        curve.mode = ModulusMode::Exhaustive;
        for (long i = 0; i < P; ++i)
            for (long j = i + 1; j < P; ++j) feed(i, j);
    } else {
        curve.mode = ModulusMode::Sampled;
        curve.sample_pairs = pair_budget;
        if (g.dim > 8) throw std::invalid_argument("modulus: sampled mode supports dim <= 8");
        std::mt19937_64 rng(seed);
        // anchors: extreme-value samples get an exhaustive local scan
        std::vector<long> order(P);
        for (long i = 0; i < P; ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + 8, order.end(),
                          [&](long a, long b) { return cloud.val[a] < cloud.val[b]; });
        std::vector<long> anchors(order.begin(), order.begin() + 8);
        std::partial_sort(order.begin(), order.begin() + 8, order.end(),
                          [&](long a, long b) { return cloud.val[a] > cloud.val[b]; });
        anchors.insert(anchors.end(), order.begin(), order.begin() + 8);
        for (long a : anchors)
            for (long j = 0; j < P; ++j)
                if (j != a) feed(a, j);
        // random pairs per level: a random sample and a random offset at scale r_k
        const long per_level = pair_budget / (d_eff + 1);
        std::uniform_int_distribution<long> pick(0, P - 1);
        for (int k = 0; k <= d_eff; ++k) {
            const double rk = curve.radii[k];
            std::uniform_real_distribution<double> off(-rk, rk);
            long made = 0, tries = 0;
            while (made < per_level && tries < 4 * per_level) {
                ++tries;
                const long i = pick(rng);
                double q[8];
                for (int c = 0; c < cloud.dim; ++c) q[c] = cloud.pos[i * cloud.dim + c] + off(rng);
                // snap the offset target to the lattice and look it up
                long flat = 0;
                bool ok = true;
                for (int c = 0; c < cloud.dim; ++c) {
                    const double t = (q[c] - g.origin[c]) / g.h;
                    const long ix = std::lround(t);
                    if (ix < 0 || ix >= g.pts_per_axis) {
                        ok = false;
                        break;
                    }
                    flat += ix * g.strides[c];
                }
                if (!ok || g.cls[flat] != PointClass::Interior) continue;
                // interior lattice samples precede boundary ones in the cloud
                const long j = static_cast<long>(std::lower_bound(g.interior.begin(), g.interior.end(),
                                                                  static_cast<int>(flat)) -
                                                 g.interior.begin());
                feed(i, j);
                ++made;
            }
        }
    }

    curve.omega.resize(d_eff + 1);
    double suffix = 0.0;
    for (int k = d_eff; k >= 0; --k) {
        suffix = std::max(suffix, binned[k]);
        curve.omega[k] = suffix;
    }
    return curve;
}

struct ExponentFit {
    double alpha_hat = 0.0;
    double C_hat = 0.0;
    double residual = 0.0;  // max log-space residual
    bool degenerate = false;
};

/// Least-squares slope of log omega against log r over levels [k_lo, k_hi].
inline ExponentFit fit_exponent(const ModulusCurve& curve, int k_lo, int k_hi) {
    if (k_lo < 0 || k_hi >= static_cast<int>(curve.radii.size()) || k_hi - k_lo + 1 < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 levels in range");
    std::vector<double> xs, ys;
    for (int k = k_lo; k <= k_hi; ++k) {
        if (!(curve.omega[k] > 0.0))
            throw degenerate_fit_error("fit_exponent: zero modulus value in fit range");
        xs.push_back(std::log(curve.radii[k]));
        ys.push_back(std::log(curve.omega[k]));
    }
    const auto lf = fit_line(xs, ys);
    ExponentFit f;
    f.alpha_hat = lf.slope;
    f.C_hat = std::exp(lf.intercept);
    f.residual = lf.max_residual;
    return f;
}

/// Convenience: full-range fit with a degenerate-curve flag instead of a throw.
inline ExponentFit fit_exponent(const ModulusCurve& curve) {
    for (double w : curve.omega)
        if (!(w > 0.0)) return ExponentFit{0.0, 0.0, 0.0, true};
    return fit_exponent(curve, 0, static_cast<int>(curve.radii.size()) - 1);
}

}  // namespace cmalab
