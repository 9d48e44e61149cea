#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cmalab/errors.hpp"
#include "cmalab/kernel.hpp"
#include "cmalab/modulus.hpp"
#include "cmalab/mollify.hpp"

namespace cmalab {

namespace detail {

/// Per-level pair sups split by the case analysis of the dyadic argument:
///   A:    a pair member lies within R_eff * r_k of the boundary
///   B:    both deep, and a reflected point 2x - y (either orientation)
///         stays deeper than R_eff * r_k
///   C:    deep pairs whose reflections leave that region -- the argument
///         does not cover them; they are counted and reported, not checked.
struct ClassifiedModulus {
    std::vector<double> radii;
    std::vector<double> full, a, b, c;  // sups per level (0 where class empty)
    std::vector<long> c_pairs;          // uncovered pairs per level
    ModulusMode mode = ModulusMode::Exhaustive;
};

inline ClassifiedModulus classified_modulus(const GridFn& u, double eps0, int depth, double R_eff,
                                            std::uint64_t seed, long pair_budget = 1'000'000) {
    const auto& g = *u.geom;
    const double rmin = 2.0 * g.h;
    int d_eff = depth;
    while (d_eff > 0 && eps0 / std::pow(2.0, d_eff) < rmin) --d_eff;

    const auto cloud = collect_samples(u);
    const long P = cloud.count;
    ClassifiedModulus cm;
    cm.radii.resize(d_eff + 1);
    for (int k = 0; k <= d_eff; ++k) cm.radii[k] = eps0 / std::pow(2.0, k);
    cm.full.assign(d_eff + 1, 0.0);
    cm.a.assign(d_eff + 1, 0.0);
    cm.b.assign(d_eff + 1, 0.0);
    cm.c.assign(d_eff + 1, 0.0);
    cm.c_pairs.assign(d_eff + 1, 0);

    // distance to the boundary of the reflected point 2x - y, by orientation
    auto refl_depth = [&](long i, long j) {
        double best = -INFINITY;
        std::vector<double> q(g.dim);
        for (int swap = 0; swap < 2; ++swap) {
            const long s = swap ? j : i, t = swap ? i : j;
            for (int k = 0; k < g.dim; ++k)
                q[k] = 2.0 * cloud.pos[s * g.dim + k] - cloud.pos[t * g.dim + k];
            best = std::max(best, g.domain.signed_boundary_distance(q));
        }
        return best;
    };

    auto feed = [&](long i, long j) {
        const double d = pair_dist(cloud, i, j);
        if (d > eps0 || !(d > 0.0)) return;
        const int kd = deepest_level(eps0, d, d_eff);
        if (kd < 0) return;
        const double diff = std::abs(cloud.val[i] - cloud.val[j]);
        const double m = std::min(cloud.bdist[i], cloud.bdist[j]);
        double rd = -1.0;
        bool rd_known = false;
        for (int k = 0; k <= kd; ++k) {
            const double thresh = R_eff * cm.radii[k];
            if (diff > cm.full[k]) cm.full[k] = diff;
            if (m <= thresh) {
                if (diff > cm.a[k]) cm.a[k] = diff;
            } else {
                if (!rd_known) {
                    rd = refl_depth(i, j);
                    rd_known = true;
                }
                if (rd > thresh) {
                    if (diff > cm.b[k]) cm.b[k] = diff;
                } else {
                    ++cm.c_pairs[k];
                    if (diff > cm.c[k]) cm.c[k] = diff;
                }
            }
        }
    };

    if (P <= 16384) {
        cm.mode = ModulusMode::Exhaustive;
        for (long i = 0; i < P; ++i)
            for (long j = i + 1; j < P; ++j) feed(i, j);
    } else {
        cm.mode = ModulusMode::Sampled;
        std::mt19937_64 rng(seed);
        std::vector<long> order(P);
        for (long i = 0; i < P; ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + 8, order.end(),
                          [&](long x, long y) { return cloud.val[x] < cloud.val[y]; });
        std::vector<long> anchors(order.begin(), order.begin() + 8);
        std::partial_sort(order.begin(), order.begin() + 8, order.end(),
                          [&](long x, long y) { return cloud.val[x] > cloud.val[y]; });
        anchors.insert(anchors.end(), order.begin(), order.begin() + 8);
        for (long a : anchors)
            for (long j = 0; j < P; ++j)
                if (j != a) feed(a, j);
        std::uniform_int_distribution<long> pick(0, P - 1);
        const long per_level = pair_budget / (d_eff + 1);
        for (int k = 0; k <= d_eff; ++k) {
            std::uniform_real_distribution<double> off(-cm.radii[k], cm.radii[k]);
            long made = 0, tries = 0;
            while (made < per_level && tries < 4 * per_level) {
                ++tries;
                const long i = pick(rng);
                long flat = 0;
                bool ok = true;
                for (int c = 0; c < g.dim; ++c) {
                    const double t = (cloud.pos[i * g.dim + c] + off(rng) - g.origin[c]) / g.h;
                    const long ix = std::lround(t);
                    if (ix < 0 || ix >= g.pts_per_axis) {
                        ok = false;
                        break;
                    }
                    flat += ix * g.strides[c];
                }
                if (!ok || g.cls[flat] != PointClass::Interior) continue;
                const long j = static_cast<long>(std::lower_bound(g.interior.begin(), g.interior.end(),
                                                                  static_cast<int>(flat)) -
                                                 g.interior.begin());
                feed(i, j);
                ++made;
            }
        }
    }
    // the full modulus is the running max down the cascade
    for (int k = d_eff - 1; k >= 0; --k) cm.full[k] = std::max(cm.full[k], cm.full[k + 1]);
    return cm;
}

}  // namespace detail

struct DyadicStep {
    double r = 0.0;
    double omega = 0.0;       // full modulus at r
    double omega_a = 0.0;     // near-boundary pairs
    double omega_b = 0.0;     // deep pairs with valid reflection
    double omega_c = 0.0;     // uncovered pairs (diagnostic only)
    long uncovered_pairs = 0;
    double bound_a = 0.0;     // 2 C1 (R+1)^alpha r^alpha
    double bound_b = 0.0;     // 2 C2 r^alpha + kappa omega(2r) + (1-2 kappa) omega(r)
    bool case_a_ok = true;
    bool case_b_ok = true;
    bool iterate_ok = true;   // omega(2r) <= C4 (2r)^a  =>  omega(r) <= C4 r^a
};

/// Certified dyadic Holder verification: measures the two hypotheses
/// (boundary Holder constant C1, regularization gap constant C2), assembles
/// the explicit constants C3, C4, C of the dyadic iteration, checks the
/// conclusion omega(r) <= C r^alpha on every resolvable dyadic radius, and
/// replays the iteration step by step on the measured moduli.
struct RegularityCertificate {
    // inputs
    double alpha = 0.0, eps0 = 0.0;
    double kernel_R = 0.0, diam = 0.0;
    // rescaling that places the kernel plateau over a ball of radius 3
    double scale_lambda = 0.0, R_eff = 0.0, eps0_eff = 0.0;
    // measured hypotheses and kernel constants
    double C1 = 0.0, C2 = 0.0, kappa = 0.0, delta_eff = 0.0;
    // assembled constants
    double C3 = 0.0, C4 = 0.0, C = 0.0;
    // checks
    std::vector<DyadicStep> steps;
    double worst_conclusion_ratio = 0.0;  // max over levels of omega/(C r^alpha)
    bool hypotheses_ok = false, conclusion_ok = false, iteration_ok = false, pass = false;
    std::string note;
};

inline RegularityCertificate verify_holder_certificate(const GridFn& u, const Kernel& kernel,
                                                       double alpha, double eps0, int depth = 8,
                                                       std::uint64_t seed = 1,
                                                       double slack = 1.05) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("verify_holder_certificate: alpha must lie in (0,1)");
    if (kernel.plateau_radius <= 0.0)
        throw kernel_inadmissible_error(
            "verify_holder_certificate: kernel has no plateau (kappa = 0); use the plateau-bump kernel");
    const auto& g = *u.geom;

    RegularityCertificate cert;
    cert.alpha = alpha;
    cert.eps0 = eps0;
    cert.kernel_R = kernel.R;
    cert.diam = g.domain.diameter();
    cert.scale_lambda = 3.0 / kernel.plateau_radius;
    cert.R_eff = cert.scale_lambda * kernel.R;
    cert.eps0_eff = eps0 / cert.scale_lambda;
    cert.note = "iteration replay restricted to pairs whose reflected point 2x - y stays at depth > R*r; "
                "uncovered pairs are counted per level";

    // hypothesis (1): boundary Holder constant
    double c1 = 0.0;
    {
        std::vector<double> p(g.dim);
        for (int i : g.interior) {
            for (int k = 0; k < g.dim; ++k) p[k] = g.coord(i, k);
            const double ui = u.values[i];
            for (size_t b = 0; b < g.boundary.size(); ++b) {
                const auto q = g.boundary_position(b);
                double d2 = 0.0;
                for (int k = 0; k < g.dim; ++k) d2 += (p[k] - q[k]) * (p[k] - q[k]);
                if (d2 <= 0.0) continue;
                const double ratio = std::abs(ui - u.values[g.boundary[b]]) / std::pow(d2, 0.5 * alpha);
                if (ratio > c1) c1 = ratio;
            }
        }
    }
    cert.C1 = c1;

    // hypothesis (2): regularization gap along the dyadic cascade, measured
    // for the rescaled kernel (mollification scale lambda * eps)
    double c2 = 0.0;
    int c2_levels = 0;
    for (int j = 0;; ++j) {
        const double eps = cert.eps0_eff / std::pow(2.0, j);
        const double support = kernel.R * cert.scale_lambda * eps;
        if (support < 2.0 * g.h) break;
        ShrunkDomain sh = shrink(u.geom, support);
        if (sh.indices.empty()) continue;
        const auto vals = mollify_at(u, kernel, cert.scale_lambda * eps, sh.indices);
        double worst = 0.0;
        for (size_t t = 0; t < sh.indices.size(); ++t)
            worst = std::max(worst, std::abs(vals[t] - u.values[sh.indices[t]]));
        c2 = std::max(c2, worst / std::pow(eps, alpha));
        ++c2_levels;
        if (j > 40) break;
    }
    cert.C2 = c2;
    cert.hypotheses_ok = std::isfinite(cert.C1) && std::isfinite(cert.C2) && c2_levels >= 1;

    // kernel constants after rescaling: g(z) = (1/2) inf_{B_1(z)} eta and
    // kappa = int g. The shapes are radially nonincreasing, so the infimum
    // over B_1(z) is the profile at |z| + 1 and kappa reduces to a 1-D
    // integral.
    {
        const int d = g.dim;
        const double lam = cert.scale_lambda;
        auto eta_scaled = [&](double r) { return std::pow(lam, -d) * kernel.eval_radial(r / lam); };
        const double upper = lam * kernel.R - 1.0;
        double acc = 0.0;
        const int m = 20000;
        for (int i = 0; i < m; ++i) {
            const double rho = upper * (i + 0.5) / m;
            acc += 0.5 * eta_scaled(rho + 1.0) * std::pow(rho, d - 1);
        }
        cert.kappa = acc * (upper / m) * sphere_area(d);
        cert.delta_eff = kernel.delta * std::pow(lam, -d);
    }
    if (!(cert.kappa > 0.0))
        throw kernel_inadmissible_error("verify_holder_certificate: kappa vanished for this kernel");

    cert.C3 = 2.0 * cert.C1 * std::pow(cert.R_eff + 1.0, alpha) * std::pow(cert.diam, alpha) /
              std::pow(cert.eps0_eff, alpha);
    cert.C4 = std::max(cert.C3, cert.C2 / ((1.0 - std::pow(2.0, alpha - 1.0)) * cert.kappa));
    cert.C = std::max(cert.C3, std::pow(2.0, alpha) * cert.C4);

    // measured moduli, split by the case analysis
    const auto cm = detail::classified_modulus(u, cert.eps0_eff, depth, cert.R_eff, seed);
    const int levels = static_cast<int>(cm.radii.size());
    cert.conclusion_ok = true;
    cert.iteration_ok = true;
    for (int k = 0; k < levels; ++k) {
        DyadicStep st;
        st.r = cm.radii[k];
        st.omega = cm.full[k];
        st.omega_a = cm.a[k];
        st.omega_b = cm.b[k];
        st.omega_c = cm.c[k];
        st.uncovered_pairs = cm.c_pairs[k];
        st.bound_a = 2.0 * cert.C1 * std::pow(cert.R_eff + 1.0, alpha) * std::pow(st.r, alpha);
        st.case_a_ok = st.omega_a <= slack * st.bound_a;
        if (k >= 1) {
            st.bound_b = 2.0 * cert.C2 * std::pow(st.r, alpha) + cert.kappa * cm.full[k - 1] +
                         (1.0 - 2.0 * cert.kappa) * cm.full[k];
            st.case_b_ok = st.omega_b <= slack * st.bound_b;
            const bool hyp = cm.full[k - 1] <= slack * cert.C4 * std::pow(cm.radii[k - 1], alpha);
            const bool conc = cm.full[k] <= slack * cert.C4 * std::pow(st.r, alpha);
            st.iterate_ok = !hyp || conc;
        } else {
            st.iterate_ok = cm.full[0] <= slack * cert.C4 * std::pow(cm.radii[0], alpha);
        }
        const double ratio = cm.full[k] / (cert.C * std::pow(st.r, alpha));
        cert.worst_conclusion_ratio = std::max(cert.worst_conclusion_ratio, ratio);
        if (ratio > slack) cert.conclusion_ok = false;
        if (!st.case_a_ok || !st.case_b_ok || !st.iterate_ok) cert.iteration_ok = false;
        cert.steps.push_back(st);
    }
    cert.pass = cert.hypotheses_ok && cert.conclusion_ok && cert.iteration_ok;
    return cert;
}

}  // namespace cmalab
