#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmalab/grid.hpp"
#include "cmalab/kernel.hpp"

namespace cmalab {

namespace detail {

/// Lattice stencil for the discrete convolution at scale eps: integer
/// offsets within the support, with kernel weights. Weights are later
/// renormalized to unit sum, which keeps the discrete average exact on
/// affine functions (the offset set is symmetric through the center).
/// The sharp indicator edge is antialiased linearly over one cell so the
/// quadrature error stays O(h^2) uniformly in eps/h.
struct ConvStencil {
    std::vector<long> flat_offsets;
    std::vector<double> weights;  // unnormalized
    double weight_sum = 0.0;
    double reach = 0.0;           // largest |offset| with positive weight
    bool resolved = false;        // false: support below one grid cell
};

inline ConvStencil make_stencil(const GridGeometry& g, const Kernel& kernel, double eps) {
    ConvStencil st;
    const double support = kernel.R * eps;
    const double h = g.h;
    const int span = static_cast<int>(std::floor(support / h + 1.0));
    if (support < h) {
        st.flat_offsets.push_back(0);
        st.weights.push_back(1.0);
        st.weight_sum = 1.0;
        st.resolved = false;
        return st;
    }
    st.resolved = true;
    std::vector<int> off(g.dim, -span);
    const int d = g.dim;
    while (true) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) r2 += static_cast<double>(off[k]) * off[k];
        const double r = std::sqrt(r2) * h;
        double w;
        if (kernel.kind == KernelKind::BallIndicator) {
            // sharp edge antialiased over one cell (keeps the quadrature
            // O(h^2) uniformly in eps/h); extends the reach by up to h/2
            w = std::clamp(0.5 + (support - r) / h, 0.0, 1.0);
        } else {
            w = kernel.shape(r / eps);
        }
        if (w > 0.0) {
            long flat = 0;
            for (int k = 0; k < d; ++k) flat += static_cast<long>(off[k]) * g.strides[k];
            st.flat_offsets.push_back(flat);
            st.weights.push_back(w);
            st.weight_sum += w;
            st.reach = std::max(st.reach, r);
        }
        int k = 0;
        while (k < d && ++off[k] > span) off[k++] = -span;
        if (k == d) break;
    }
    return st;
}

}  // namespace detail

struct Mollified {
    GridFn fn;                  // values on `defined`, zero elsewhere
    std::vector<int> defined;   // flat indices of Omega_{R eps}, ascending
    double eps = 0.0;
    bool kernel_resolved = true;
};

/// Values of u * eta_eps at the given target points (each target must be at
/// boundary distance > R*eps so the stencil reads interior samples only).
inline std::vector<double> mollify_at(const GridFn& u, const Kernel& kernel, double eps,
                                      std::span<const int> targets) {
    const auto& g = *u.geom;
    const auto st = detail::make_stencil(g, kernel, eps);
    std::vector<double> out(targets.size());
    const double inv = 1.0 / st.weight_sum;
    for (size_t t = 0; t < targets.size(); ++t) {
        const long base = targets[t];
        double acc = 0.0;
        for (size_t k = 0; k < st.flat_offsets.size(); ++k)
            acc += st.weights[k] * u.values[base + st.flat_offsets[k]];
        out[t] = acc * inv;
    }
    return out;
}

/// Discrete convolution u_eps = u * eta_eps on the shrinking of the domain
/// by the stencil reach (R*eps, plus the one-cell antialias margin of the
/// sharp kernel). Only full-support points are produced; no truncated
/// kernels near the boundary. When eps does not resolve one grid cell the
/// input values are returned unchanged with kernel_resolved = false.
inline Mollified mollify(const GridFn& u, const Kernel& kernel, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("mollify: eps must be positive");
    const auto& g = *u.geom;
    Mollified m;
    m.eps = eps;
    const auto st = detail::make_stencil(g, kernel, eps);
    auto sh = shrink(u.geom, std::max(st.reach, kernel.R * eps));
    if (sh.indices.empty()) throw std::domain_error("mollify: shrunk domain is empty at this eps");
    m.defined = std::move(sh.indices);
    m.fn.geom = u.geom;
    m.fn.values.assign(g.total, 0.0);
    if (!st.resolved) {
        m.kernel_resolved = false;
        for (int i : m.defined) m.fn.values[i] = u.values[i];
        return m;
    }
    const double inv = 1.0 / st.weight_sum;
    for (int i : m.defined) {
        double acc = 0.0;
        for (size_t k = 0; k < st.flat_offsets.size(); ++k)
            acc += st.weights[k] * u.values[i + st.flat_offsets[k]];
        m.fn.values[i] = acc * inv;
    }
    return m;
}

struct SubmeanCheck {
    bool subharmonic = true;
    double worst_violation = 0.0;  // max over checked points of u - mean(neighbors)
};

/// Discrete sub-mean-value test at interior points whose axis neighbors are
/// all interior.
inline SubmeanCheck check_submean(const GridFn& u, double tol = 1e-9) {
    const auto& g = *u.geom;
    SubmeanCheck c;
    for (int i : g.interior) {
        double s = 0.0;
        bool ok = true;
        for (int axis = 0; axis < g.dim && ok; ++axis)
            for (int st : {-1, 1}) {
                const long j = g.neighbor(i, axis, st);
                if (j < 0 || g.cls[j] != PointClass::Interior) {
                    ok = false;
                    break;
                }
                s += u.values[j];
            }
        if (!ok) continue;
        const double v = u.values[i] - s / (2.0 * g.dim);
        c.worst_violation = std::max(c.worst_violation, v);
    }
    c.subharmonic = c.worst_violation <= tol;
    return c;
}

struct GapRow {
    double eps = 0.0;
    double sup_gap = 0.0;  // sup over Omega_{R eps} of (u_eps - u)
    double l1_gap = 0.0;   // L1 norm of |u_eps - u| over Omega_{R eps}
    long points = 0;
};

struct GapTable {
    std::vector<GapRow> rows;
    bool u_subharmonic = true;       // warning flag: gaps may go negative otherwise
    double submean_violation = 0.0;
};

inline GapTable subharmonic_gap(const GridFn& u, const Kernel& kernel, std::span<const double> eps_list) {
    GapTable t;
    const auto chk = check_submean(u, 1e-9 * (1.0 + norm(u, NormKind::Sup)));
    t.u_subharmonic = chk.subharmonic;
    t.submean_violation = chk.worst_violation;
    const double vol = u.geom->cell_volume();
    for (double eps : eps_list) {
        const auto m = mollify(u, kernel, eps);
        GapRow row;
        row.eps = eps;
        row.points = static_cast<long>(m.defined.size());
        double sup = -INFINITY, l1 = 0.0;
        for (int i : m.defined) {
            const double gap = m.fn.values[i] - u.values[i];
            sup = std::max(sup, gap);
            l1 += std::abs(gap);
        }
        row.sup_gap = sup;
        row.l1_gap = l1 * vol;
        t.rows.push_back(row);
    }
    return t;
}

struct KiselmanResult {
    std::vector<int> targets;          // flat indices (Omega_{R eps})
    std::vector<double> values;        // transformed function, aligned to targets
    std::vector<double> t_min;         // minimizing scale per target, in (0, eps]
    std::vector<double> t_grid;        // geometric scales, t_grid.back() == eps
    std::vector<double> lambda;        // d(u_t + K t^2)/d log t, size t_grid.size()*targets.size()
    double eps = 0.0, c = 0.0, K = 0.0;

    double lambda_at(size_t level, size_t target) const {
        return lambda[level * targets.size() + target];
    }
};

/// Scale-penalized infimum of the regularization family:
///   inf over t in (eps/2^10, eps] of  u_t + K t^2 - K eps^2 - c log(t/eps),
/// taken over a geometric t-grid. By construction the t = eps term gives
/// u_{c,eps} <= u_eps; for subharmonic u and K = 0 the family u_t majorizes
/// u, giving the lower sandwich bound u - K eps^2 <= u_{c,eps}.
inline KiselmanResult kiselman_transform(const GridFn& u, const Kernel& kernel, double eps, double c,
                                         double K, int t_grid_size = 32) {
    if (c <= 0.0) throw std::invalid_argument("kiselman_transform: level c must be positive");
    if (K < 0.0) throw std::invalid_argument("kiselman_transform: K must be nonnegative");
    if (t_grid_size < 16) throw std::invalid_argument("kiselman_transform: t_grid_size must be >= 16");

    KiselmanResult r;
    r.eps = eps;
    r.c = c;
    r.K = K;

    const double t_floor = eps / 1024.0;
    const int m = t_grid_size;
    r.t_grid.resize(m);
    for (int j = 0; j < m; ++j)
        r.t_grid[j] = t_floor * std::pow(eps / t_floor, static_cast<double>(j) / (m - 1));
    r.t_grid[m - 1] = eps;

    double max_reach = kernel.R * eps;
    for (double t : r.t_grid)
        max_reach = std::max(max_reach, detail::make_stencil(*u.geom, kernel, t).reach);
    auto sh = shrink(u.geom, max_reach);
    if (sh.indices.empty()) throw std::domain_error("kiselman_transform: shrunk domain empty at this eps");
    r.targets = std::move(sh.indices);

    const size_t nt = r.targets.size();
    std::vector<double> v(static_cast<size_t>(m) * nt);  // u_t + K t^2
    for (int j = 0; j < m; ++j) {
        const double t = r.t_grid[j];
        const auto ut = mollify_at(u, kernel, t, r.targets);
        for (size_t i = 0; i < nt; ++i) v[static_cast<size_t>(j) * nt + i] = ut[i] + K * t * t;
    }

    r.values.resize(nt);
    r.t_min.resize(nt);
    for (size_t i = 0; i < nt; ++i) {
        double best = INFINITY;
        int best_j = m - 1;
        for (int j = m - 1; j >= 0; --j) {  // prefer the larger scale on ties
            const double obj = v[static_cast<size_t>(j) * nt + i] - K * eps * eps -
                               c * std::log(r.t_grid[j] / eps);
            if (obj < best) {
                best = obj;
                best_j = j;
            }
        }
        r.values[i] = best;
        r.t_min[i] = r.t_grid[best_j];
    }

    r.lambda.resize(static_cast<size_t>(m) * nt);
    for (int j = 0; j < m; ++j) {
        const int jl = std::max(j - 1, 0), jr = std::min(j + 1, m - 1);
        const double dl = std::log(r.t_grid[jr]) - std::log(r.t_grid[jl]);
        for (size_t i = 0; i < nt; ++i)
            r.lambda[static_cast<size_t>(j) * nt + i] =
                (v[static_cast<size_t>(jr) * nt + i] - v[static_cast<size_t>(jl) * nt + i]) / dl;
    }
    return r;
}

struct MonotonicityResult {
    bool pass = true;
    double worst_violation = 0.0;
    long checked_points = 0;
};

/// Check that u_eps + K eps^2 is nondecreasing in eps at every grid point
/// shared by all levels (i.e. Omega_{R*max(eps)}).
inline MonotonicityResult monotonicity_check(const GridFn& u, const Kernel& kernel, double K,
                                             std::span<const double> eps_list, double tol = 1e-9) {
    std::vector<double> eps(eps_list.begin(), eps_list.end());
    std::sort(eps.begin(), eps.end());
    MonotonicityResult res;
    if (eps.empty()) return res;
    double max_reach = kernel.R * eps.back();
    for (double e : eps) max_reach = std::max(max_reach, detail::make_stencil(*u.geom, kernel, e).reach);
    auto sh = shrink(u.geom, max_reach);
    if (sh.indices.empty()) throw std::domain_error("monotonicity_check: shrunk domain empty at max eps");
    res.checked_points = static_cast<long>(sh.indices.size());
    std::vector<double> prev;
    for (size_t k = 0; k < eps.size(); ++k) {
        auto cur = mollify_at(u, kernel, eps[k], sh.indices);
        for (auto& vv : cur) vv += K * eps[k] * eps[k];
        if (k > 0)
            for (size_t i = 0; i < cur.size(); ++i)
                res.worst_violation = std::max(res.worst_violation, prev[i] - cur[i]);
        prev = std::move(cur);
    }
    res.pass = res.worst_violation <= tol;
    return res;
}

}  // namespace cmalab
