#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cmalab/budget.hpp"
#include "cmalab/domain.hpp"
#include "cmalab/errors.hpp"
#include "cmalab/grid.hpp"
#include "cmalab/linalg.hpp"

namespace cmalab {

/// Second-order boundary data of a defining function at a boundary point
/// moved to the origin: F(z) = sum Re(a_j z_j) + sum Re(b_ij z_i z_j)
///                            + sum c_ij z_i conj(z_j) + O(|z|^3),
/// with (c_ij) Hermitian positive definite (strict pseudoconvexity).
struct TaylorData {
    int n = 1;
    std::vector<cplx> a;
    CMatrix b, c;
    double r0 = 1.0;

    QuadraticDefining defining() const { return QuadraticDefining(n, 0.0, a, b, c); }

    /// Unit ball at the boundary point e_1 in shifted coordinates w = z - e_1:
    /// |w + e_1|^2 - 1 = 2 Re(w_1) + |w|^2.
    static TaylorData unit_ball_at_e1(int n = 1, double r0 = 1.0) {
        TaylorData t;
        t.n = n;
        t.a.assign(n, cplx{0, 0});
        t.a[0] = 2.0;
        t.b = CMatrix(n);
        t.c = CMatrix::identity(n);
        t.r0 = r0;
        return t;
    }
};

/// Extract TaylorData from a defining function sampled near 0 by
/// second-order central differences (Wirtinger second derivatives):
///   a_j  = F_x_j - i F_y_j
///   b_ij = (F_xx - F_yy)/4 - i (F_xy + F_yx)/4
///   c_ij = (F_xx + F_yy)/4 + i (F_xy - F_yx)/4    (x := x_i, y := y_j)
inline TaylorData taylor_from_function(int n, const std::function<double(std::span<const double>)>& F,
                                       double r0, double step = 1e-4) {
    const int d = 2 * n;
    auto eval = [&](std::vector<double> pt) { return F(pt); };
    std::vector<double> zero(d, 0.0);
    auto d1 = [&](int k) {
        auto p = zero, m = zero;
        p[k] += step;
        m[k] -= step;
        return (eval(p) - eval(m)) / (2.0 * step);
    };
    auto d2 = [&](int k, int l) {
        if (k == l) {
            auto p = zero, m = zero;
            p[k] += step;
            m[k] -= step;
            return (eval(p) - 2.0 * eval(zero) + eval(m)) / (step * step);
        }
        auto pp = zero, pm = zero, mp = zero, mm = zero;
        pp[k] += step; pp[l] += step;
        pm[k] += step; pm[l] -= step;
        mp[k] -= step; mp[l] += step;
        mm[k] -= step; mm[l] -= step;
        return (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * step * step);
    };
    TaylorData t;
    t.n = n;
    t.r0 = r0;
    t.a.resize(n);
    t.b = CMatrix(n);
    t.c = CMatrix(n);
    for (int j = 0; j < n; ++j) t.a[j] = cplx{d1(2 * j), -d1(2 * j + 1)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double fxx = d2(2 * i, 2 * j), fyy = d2(2 * i + 1, 2 * j + 1);
            const double fxy = d2(2 * i, 2 * j + 1), fyx = d2(2 * i + 1, 2 * j);
            t.b(i, j) = cplx{(fxx - fyy) / 4.0, -(fxy + fyx) / 4.0};
            t.c(i, j) = cplx{(fxx + fyy) / 4.0, (fxy - fyx) / 4.0};
        }
    return t;
}

/// The barrier rho(z) = -C ( sum Re(a_j z_j) - sum Re(b_ij z_i z_j)
///                           + sum (c_ij - eps_bar delta_ij) z_i conj(z_j) ).
/// -rho is plurisubharmonic iff (c - eps_bar I) is positive semidefinite;
/// the certificate stores that matrix's smallest eigenvalue.
struct Barrier {
    TaylorData data;
    double C_bar = 1.0;
    double eps_bar = 0.0;

    double operator()(std::span<const double> pt) const {
        const int n = data.n;
        std::vector<cplx> z(n);
        for (int j = 0; j < n; ++j) z[j] = cplx{pt[2 * j], pt[2 * j + 1]};
        cplx lin{0, 0}, bq{0, 0};
        double cq = 0.0, abs2 = 0.0;
        for (int j = 0; j < n; ++j) {
            lin += data.a[j] * z[j];
            abs2 += std::norm(z[j]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                bq += data.b(i, j) * z[i] * z[j];
                cq += (data.c(i, j) * z[i] * std::conj(z[j])).real();
            }
        return -C_bar * (lin.real() - bq.real() + cq - eps_bar * abs2);
    }
};

struct BarrierCertificate {
    double C_bar = 0.0, eps_bar = 0.0;
    double r0 = 0.0;            // radius at which the bound was verified
    double margin = 0.0;        // min over the sample of rho - |z|^2
    double min_eig_shifted = 0.0;  // smallest eigenvalue of c - eps_bar I
    long samples = 0;
    int ladder_steps = 0;
};

/// Choose eps_bar as half the smallest eigenvalue of (c_ij), then walk
/// C_bar over {1, 2, 4, ...} and r0 over {r0, r0/2, ...} until
/// rho >= |z|^2 holds with positive margin on a fixed-seed sample of the
/// domain piece {F < 0} inside B_{r0}.
inline std::pair<Barrier, BarrierCertificate> build_barrier(const TaylorData& data,
                                                            std::uint64_t seed = 1,
                                                            long target_samples = 10000) {
    const double cmin = hermitian_min_eigenvalue(data.c);
    if (!(cmin > 0.0))
        throw std::invalid_argument("build_barrier: (c_ij) must be positive definite");
    Barrier bar;
    bar.data = data;
    bar.eps_bar = 0.5 * cmin;

    const auto defining = data.defining();
    const int d = 2 * data.n;
    BarrierCertificate cert;
    cert.eps_bar = bar.eps_bar;
    cert.min_eig_shifted = [&] {
        CMatrix shifted = data.c;
        for (int i = 0; i < data.n; ++i) shifted(i, i) -= bar.eps_bar;
        return hermitian_min_eigenvalue(shifted);
    }();

    int steps = 0;
    for (double r0 = data.r0; r0 >= 1e-4; r0 *= 0.5) {
        // fixed-seed sample of Omega cap B_{r0}
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> pts;
        long kept = 0, tries = 0;
        std::vector<double> z(d);
        while (kept < target_samples && tries < 60 * target_samples) {
            ++tries;
            double nrm = 0.0;
            for (int k = 0; k < d; ++k) {
                z[k] = gauss(rng);
                nrm += z[k] * z[k];
            }
            nrm = std::sqrt(nrm);
            const double rad = r0 * std::pow(unif(rng), 1.0 / d);
            for (int k = 0; k < d; ++k) z[k] *= rad / nrm;
            if (defining.value(z) >= 0.0) continue;
            pts.insert(pts.end(), z.begin(), z.end());
            ++kept;
        }
        if (kept < target_samples / 4) {
            ++steps;
            continue;  // hardly any domain mass near 0: shrink and retry
        }
        for (double C = 1.0; C <= double(1 << 20); C *= 2.0) {
            ++steps;
            bar.C_bar = C;
            double margin = INFINITY;
            for (long i = 0; i < kept; ++i) {
                std::span<const double> p{pts.data() + i * d, static_cast<size_t>(d)};
                double abs2 = 0.0;
                for (int k = 0; k < d; ++k) abs2 += p[k] * p[k];
                margin = std::min(margin, bar(p) - abs2);
            }
            if (margin > 0.0) {
                cert.C_bar = C;
                cert.r0 = r0;
                cert.margin = margin;
                cert.samples = kept;
                cert.ladder_steps = steps;
                return {bar, cert};
            }
        }
    }
    throw barrier_construction_error(
        "build_barrier: ladder exhausted (C_bar > 2^20 or r0 < 1e-4); the origin is likely not a "
        "strictly pseudoconvex boundary point of {F < 0}");
}

struct ChainAddends {
    double data_term = 0.0;     // L r^alpha
    double barrier_term = 0.0;  // C_cmp (M/r^2) rho(x0)
    double bulk_term = 0.0;     // C_cmp |f|_p r^{2beta/(1-beta)}
};

struct ChainResult {
    bool applicable = true;
    std::string failed_condition;  // names the violated exponent constraint
    bool trivial_branch = false;
    double r = 0.0;
    double bound = 0.0;  // certified lower bound for u(x0)
    ChainAddends addends;
};

/// Lower bound for u at an interior point x0 near the boundary point 0,
/// assembled from the comparison chain: a boundary-data term L r^alpha with
/// r = |x0|^{(1-beta)/2}, the barrier term (M/r^2) rho(x0), and the bulk
/// term |f|_p r^{2 beta/(1-beta)}. Requires beta <= alpha/(2+alpha) (each
/// addend is then a beta-power of |x0|); beta < gamma_0 holds by budget
/// construction. Beyond r0 the trivial sup-bound branch applies.
inline ChainResult boundary_chain(std::span<const double> x0, const HolderBudget& bud,
                                  const Barrier& bar, double M, double L, double f_norm,
                                  double C_cmp = 1.0) {
    ChainResult res;
    const double beta = bud.beta;
    const double a_ratio = bud.alpha / (2.0 + bud.alpha);
    if (beta > a_ratio + 1e-15) {
        res.applicable = false;
        res.failed_condition = "beta must not exceed alpha/(2+alpha)";
        return res;
    }
    if (!(beta < bud.gamma0)) {
        res.applicable = false;
        res.failed_condition = "beta must stay below gamma_0";
        return res;
    }
    double abs_x0 = 0.0;
    for (double v : x0) abs_x0 += v * v;
    abs_x0 = std::sqrt(abs_x0);
    res.r = std::pow(abs_x0, 0.5 * (1.0 - beta));
    const double bulk_pow = 2.0 * beta / (1.0 - beta);
    if (res.r > bar.data.r0) {
        res.trivial_branch = true;
        res.bound = -M * std::pow(bar.data.r0, -bulk_pow) * std::pow(abs_x0, beta);
        return res;
    }
    res.addends.data_term = L * std::pow(res.r, bud.alpha);
    res.addends.barrier_term = C_cmp * (M / (res.r * res.r)) * bar(x0);
    res.addends.bulk_term = C_cmp * f_norm * std::pow(res.r, bulk_pow);
    res.bound = -(res.addends.data_term + res.addends.barrier_term + res.addends.bulk_term);
    return res;
}

struct LinftyResult {
    double lhs = 0.0;         // |inf u|
    double inf_phi = 0.0;     // |inf of the boundary data|
    double fnorm_term = 0.0;  // |f|_p^{1/n} |Omega|^delta
    double rhs = 0.0;         // inf_phi + C_chk * fnorm_term
    double volume = 0.0;
    bool pass = false;
};

/// Check |inf u| <= |inf phi| + C_chk |f|_{L^p}^{1/n} |Omega|^delta for a
/// configured constant C_chk, with 0 < delta < 1/(n p*).
inline LinftyResult linfty_check(const GridFn& u, const GridFn& phi, const GridFn& f, double p,
                                 double delta, double C_chk) {
    if (!(p > 1.0)) throw std::invalid_argument("linfty_check: p must exceed 1");
    const double pstar = p / (p - 1.0);
    const int n = u.geom->dim / 2;
    if (!(delta > 0.0 && delta < 1.0 / (n * pstar)))
        throw std::invalid_argument("linfty_check: delta must lie in (0, 1/(n p*))");
    const auto& g = *u.geom;
    LinftyResult res;
    double inf_u = INFINITY, inf_phi = INFINITY;
    for (int i : g.interior) inf_u = std::min(inf_u, u.values[i]);
    for (int b : g.boundary) {
        inf_u = std::min(inf_u, u.values[b]);
        inf_phi = std::min(inf_phi, phi.values[b]);
    }
    res.lhs = std::abs(inf_u);
    res.inf_phi = std::abs(inf_phi);
    res.volume = static_cast<double>(g.interior.size()) * g.cell_volume();
    res.fnorm_term = std::pow(norm(f, NormKind::Lp, p), 1.0 / n) * std::pow(res.volume, delta);
    res.rhs = res.inf_phi + C_chk * res.fnorm_term;
    res.pass = res.lhs <= res.rhs * (1.0 + 1e-12);
    return res;
}

}  // namespace cmalab
