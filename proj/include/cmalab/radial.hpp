#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmalab/errors.hpp"
#include "cmalab/grid.hpp"

namespace cmalab {

/// Factorial-free volume of the unit ball in R^{2n}: pi^n / n!.
inline double unit_ball_volume_2n(int n) {
    double v = 1.0;
    for (int k = 1; k <= n; ++k) v *= M_PI / k;
    return v;
}

/// Function on a radial mesh in s = |z|^2, s in [0, S], uniform spacing.
/// Radial profiles of functions on the ball B_{sqrt(S)} in C^n.
struct RadialFn {
    int n = 1;                   // complex dimension
    std::vector<double> s;       // strictly increasing, s[0] = 0
    std::vector<double> values;

    double S() const { return s.back(); }
    double spacing() const { return s.size() > 1 ? s[1] - s[0] : 0.0; }
};

inline RadialFn make_radial_mesh(int n, double S, int mesh_size) {
    if (mesh_size < 2 || S <= 0.0) throw std::invalid_argument("make_radial_mesh: bad mesh");
    RadialFn f;
    f.n = n;
    f.s.resize(mesh_size);
    f.values.assign(mesh_size, 0.0);
    for (int i = 0; i < mesh_size; ++i) f.s[i] = S * static_cast<double>(i) / (mesh_size - 1);
    return f;
}

/// L^p integration against Lebesgue measure on C^n: for radial g(s),
/// int_{B_sqrt(S)} g dmu = (pi^n/(n-1)!) * int_0^S g(s) s^{n-1} ds.
/// The dimensional constant pi^n/(n-1)! is included so radial and grid
/// norms agree. The first cell may contain an integrable singularity; it
/// is handled by local power-law extrapolation from the next cells.
inline double radial_norm(const RadialFn& f, NormKind kind, double p = 2.0) {
    const int m = static_cast<int>(f.s.size());
    if (kind == NormKind::Sup) {
        double mx = 0.0;
        for (int i = (std::isfinite(f.values[0]) ? 0 : 1); i < m; ++i)
            mx = std::max(mx, std::abs(f.values[i]));
        return mx;
    }
    if (kind == NormKind::Lp && !(p > 1.0)) throw std::invalid_argument("radial_norm: Lp requires p > 1");
    const double q = (kind == NormKind::L1) ? 1.0 : p;
    const int n = f.n;
    double dimc = 1.0;  // pi^n / (n-1)!
    for (int k = 1; k <= n; ++k) dimc *= M_PI;
    for (int k = 1; k <= n - 1; ++k) dimc /= k;
    auto g = [&](int i) { return std::pow(std::abs(f.values[i]), q) * std::pow(f.s[i], n - 1); };
    double acc = 0.0;
    for (int i = 1; i < m; ++i) {
        if (i == 1) {
            // cell [0, s1]: extrapolate g ~ c s^a from the next two nodes
            double a = n - 1.0;
            const double g1 = g(1);
            if (m > 2) {
                const double g2 = g(2);
                if (g1 > 0.0 && g2 > 0.0) a = std::log(g2 / g1) / std::log(f.s[2] / f.s[1]);
            }
            if (a <= -1.0)
                throw singular_data_error("radial_norm: non-integrable singularity at s = 0 (local exponent " +
                                          std::to_string(a) + ")");
            acc += g1 * f.s[1] / (a + 1.0);
        } else {
            acc += 0.5 * (g(i - 1) + g(i)) * (f.s[i] - f.s[i - 1]);
        }
    }
    acc *= dimc;
    return (kind == NormKind::L1) ? acc : std::pow(acc, 1.0 / q);
}

enum class ProfileKind { Power, Quadratic, Tabulated };

/// Radial plurisubharmonic test profile u(z) = phi(|z|^2) on the unit ball:
/// Power{beta}: phi(s) = s^beta; Quadratic: phi(s) = s; Tabulated: sampled
/// phi with finite-difference derivatives (one-sided at s = 0).
struct RadialProfile {
    int n = 1;
    ProfileKind kind = ProfileKind::Quadratic;
    double beta = 1.0;              // Power only, in (0, 1]
    RadialFn tab_phi;               // Tabulated only
    std::vector<double> tab_dphi;   // Tabulated only

    static RadialProfile power(int n, double beta) {
        if (!(beta > 0.0 && beta <= 1.0))
            throw inadmissible_profile_error("RadialProfile: Power exponent must lie in (0, 1]");
        RadialProfile p;
        p.n = n;
        p.kind = ProfileKind::Power;
        p.beta = beta;
        return p;
    }

    static RadialProfile quadratic(int n) {
        RadialProfile p;
        p.n = n;
        p.kind = ProfileKind::Quadratic;
        return p;
    }

    static RadialProfile tabulated(int n, RadialFn phi) {
        RadialProfile p;
        p.n = n;
        p.kind = ProfileKind::Tabulated;
        p.tab_phi = std::move(phi);
        const int m = static_cast<int>(p.tab_phi.s.size());
        if (m < 4) throw inadmissible_profile_error("RadialProfile: tabulated mesh too short");
        p.tab_dphi.resize(m);
        const auto& s = p.tab_phi.s;
        const auto& v = p.tab_phi.values;
        const double h = s[1] - s[0];
        // second-order one-sided stencils at the ends, centered inside;
        // never difference across s = 0
        p.tab_dphi[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        p.tab_dphi[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
        for (int i = 1; i < m - 1; ++i) p.tab_dphi[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        for (int i = 0; i < m; ++i)
            if (p.tab_dphi[i] < -1e-9)
                throw inadmissible_profile_error("RadialProfile: tabulated phi' < 0 (not plurisubharmonic)");
        return p;
    }

    double phi(double s) const {
        switch (kind) {
            case ProfileKind::Power: return std::pow(s, beta);
            case ProfileKind::Quadratic: return s;
            default: break;
        }
        return interp(tab_phi.s, tab_phi.values, s);
    }

    double dphi(double s) const {
        switch (kind) {
            case ProfileKind::Power: return s > 0.0 ? beta * std::pow(s, beta - 1.0) : (beta < 1.0 ? INFINITY : 1.0);
            case ProfileKind::Quadratic: return 1.0;
            default: break;
        }
        return interp(tab_phi.s, tab_dphi, s);
    }

  private:
    static double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
        const int m = static_cast<int>(xs.size());
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const double t = (x - xs.front()) / (xs[1] - xs[0]);
        const int i = std::min(m - 2, static_cast<int>(t));
        const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - w) * ys[i] + w * ys[i + 1];
    }
};

/// Conversion between the det(u_{j kbar}) = f normalization used throughout
/// and the (dd^c u)^n = f dmu convention: the two densities differ by the
/// dimensional factor 4^n n!. Applied in report text only; Holder exponents
/// are invariant under constant rescaling of f.
inline double det_to_ddc_factor(int n) {
    double v = 1.0;
    for (int k = 1; k <= n; ++k) v *= 4.0 * k;
    return v;
}

/// Density in the det(u_{j kbar}) = f normalization:
/// f(s) = phi'(s)^{n-1} (phi'(s) + s phi''(s)).
/// For Power{beta} this is beta^{n+1} s^{n(beta-1)} in closed form.
inline RadialFn ma_density(const RadialProfile& profile, double S = 1.0, int mesh_size = 4097) {
    RadialFn f = make_radial_mesh(profile.n, S, mesh_size);
    const int n = profile.n;
    if (profile.kind == ProfileKind::Power) {
        const double b = profile.beta;
        const double c = std::pow(b, n + 1);
        for (size_t i = 0; i < f.s.size(); ++i) {
            const double s = f.s[i];
            f.values[i] = (s > 0.0) ? c * std::pow(s, n * (b - 1.0)) : (b < 1.0 ? INFINITY : c);
        }
        return f;
    }
    if (profile.kind == ProfileKind::Quadratic) {
        f.values.assign(f.s.size(), 1.0);
        return f;
    }
    // tabulated: interpolate phi' onto the output mesh, then difference
    const int m = static_cast<int>(f.s.size());
    std::vector<double> dp(m);
    for (int i = 0; i < m; ++i) dp[i] = profile.dphi(f.s[i]);
    const double h = f.s[1] - f.s[0];
    for (int i = 0; i < m; ++i) {
        double ddp;
        if (i == 0)
            ddp = (dp[1] - dp[0]) / h;
        else if (i == m - 1)
            ddp = (dp[m - 1] - dp[m - 2]) / h;
        else
            ddp = (dp[i + 1] - dp[i - 1]) / (2.0 * h);
        f.values[i] = std::pow(std::max(dp[i], 0.0), n - 1) * (dp[i] + f.s[i] * ddp);
    }
    return f;
}

struct LpMembership {
    bool in_lp = false;
    double critical_p = INFINITY;
};

/// For Power{beta} in dimension n on the unit ball, the density
/// beta^{n+1} s^{n(beta-1)} lies in L^p iff p < 1/(1-beta).
inline LpMembership lp_membership(const RadialProfile& profile, double p) {
    if (profile.kind != ProfileKind::Power)
        throw std::invalid_argument("lp_membership: only Power profiles have a closed-form answer");
    if (!(p > 1.0)) throw std::invalid_argument("lp_membership: requires p > 1");
    LpMembership r;
    r.critical_p = (profile.beta >= 1.0) ? INFINITY : 1.0 / (1.0 - profile.beta);
    r.in_lp = p < r.critical_p;
    return r;
}

struct HolderExponent {
    double exponent = 0.0;
    bool lipschitz_saturated = false;
};

/// Exact Holder exponent of |z|^{2 beta} on the closed unit ball:
/// 2*beta, capped at 1 (Lipschitz) with a saturation flag.
inline HolderExponent true_holder_exponent(const RadialProfile& profile) {
    if (profile.kind != ProfileKind::Power)
        throw std::invalid_argument("true_holder_exponent: Power profiles only");
    HolderExponent e;
    const double two_beta = 2.0 * profile.beta;
    e.lipschitz_saturated = two_beta > 1.0;
    e.exponent = std::min(two_beta, 1.0);
    return e;
}

}  // namespace cmalab
