#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cmalab/linalg.hpp"

namespace cmalab {

/// Real quadratic defining function on C^n == R^{2n},
///   F(z) = c0 + sum_j Re(a_j z_j) + sum_{ij} Re(b_ij z_i z_j) + sum_{ij} c_ij z_i conj(z_j),
/// with b symmetric and c Hermitian (so F is real-valued).
struct QuadraticDefining {
    int n = 1;  // complex dimension
    double c0 = 0.0;
    std::vector<cplx> a;  // size n
    CMatrix b;            // n x n, symmetric
    CMatrix c;            // n x n, Hermitian

    QuadraticDefining() : a(1, cplx{0, 0}), b(1), c(CMatrix::identity(1)) {}
    QuadraticDefining(int dim, double constant, std::vector<cplx> lin, CMatrix quad_b, CMatrix quad_c)
        : n(dim), c0(constant), a(std::move(lin)), b(std::move(quad_b)), c(std::move(quad_c)) {
        if (static_cast<int>(a.size()) != n || b.n != n || c.n != n)
            throw std::invalid_argument("QuadraticDefining: coefficient sizes do not match dimension");
        if (!b.is_symmetric(1e-9)) throw std::invalid_argument("QuadraticDefining: b must be symmetric");
        if (!c.is_hermitian(1e-9)) throw std::invalid_argument("QuadraticDefining: c must be Hermitian");
    }

    /// Unit-ball defining function |z|^2 - 1 in complex dimension n.
    static QuadraticDefining unit_ball(int dim) {
        return QuadraticDefining(dim, -1.0, std::vector<cplx>(dim, cplx{0, 0}), CMatrix(dim),
                                 CMatrix::identity(dim));
    }

    std::vector<cplx> to_complex(std::span<const double> pt) const {
        std::vector<cplx> z(n);
        for (int j = 0; j < n; ++j) z[j] = cplx{pt[2 * j], pt[2 * j + 1]};
        return z;
    }

    double value(std::span<const double> pt) const {
        const auto z = to_complex(pt);
        double v = c0;
        cplx lin{0, 0}, bq{0, 0}, cq{0, 0};
        for (int j = 0; j < n; ++j) lin += a[j] * z[j];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                bq += b(i, j) * z[i] * z[j];
                cq += c(i, j) * z[i] * std::conj(z[j]);
            }
        v += lin.real() + bq.real() + cq.real();
        return v;
    }

    /// Real gradient in R^{2n} coordinates (x_1, y_1, ..., x_n, y_n),
    /// via dF/dx_j = 2 Re(dF/dz_j), dF/dy_j = -2 Im(dF/dz_j).
    std::vector<double> gradient(std::span<const double> pt) const {
        const auto z = to_complex(pt);
        std::vector<double> g(2 * n, 0.0);
        for (int j = 0; j < n; ++j) {
            cplx dz = 0.5 * a[j];
            for (int i = 0; i < n; ++i) dz += b(i, j) * z[i];
            for (int i = 0; i < n; ++i) dz += c(j, i) * std::conj(z[i]);
            g[2 * j] = 2.0 * dz.real();
            g[2 * j + 1] = -2.0 * dz.imag();
        }
        return g;
    }
};

struct BallShape {
    std::vector<double> center;  // size 2n
    double radius = 1.0;
};

struct TaylorShape {
    QuadraticDefining f;
    std::vector<double> box_min, box_max;  // bounding box, size 2n each
};

/// Bounded domain in C^n (viewed as R^{2n}): a ball, or the sublevel set
/// {F < 0} of a quadratic defining function restricted to a bounding box.
struct Domain {
    int n = 1;  // complex dimension
    std::variant<BallShape, TaylorShape> shape;

    static Domain ball(std::vector<double> center, double radius) {
        if (radius <= 0.0) throw std::invalid_argument("Domain::ball: radius must be positive");
        Domain d;
        d.n = static_cast<int>(center.size()) / 2;
        if (center.size() % 2 != 0 || d.n < 1)
            throw std::invalid_argument("Domain::ball: center must have even dimension >= 2");
        d.shape = BallShape{std::move(center), radius};
        return d;
    }

    static Domain unit_ball(int complex_dim) {
        return ball(std::vector<double>(2 * complex_dim, 0.0), 1.0);
    }

    static Domain taylor(QuadraticDefining f, std::vector<double> box_min, std::vector<double> box_max) {
        Domain d;
        d.n = f.n;
        if (static_cast<int>(box_min.size()) != 2 * d.n || static_cast<int>(box_max.size()) != 2 * d.n)
            throw std::invalid_argument("Domain::taylor: bounding box dimension mismatch");
        for (size_t k = 0; k < box_min.size(); ++k)
            if (!(box_min[k] < box_max[k]))
                throw std::invalid_argument("Domain::taylor: degenerate bounding box");
        d.shape = TaylorShape{std::move(f), std::move(box_min), std::move(box_max)};
        return d;
    }

    int real_dim() const { return 2 * n; }
    bool is_ball() const { return std::holds_alternative<BallShape>(shape); }

    std::vector<double> box_min() const {
        if (const auto* b = std::get_if<BallShape>(&shape)) {
            std::vector<double> lo(b->center);
            for (auto& v : lo) v -= b->radius;
            return lo;
        }
        return std::get<TaylorShape>(shape).box_min;
    }

    std::vector<double> box_max() const {
        if (const auto* b = std::get_if<BallShape>(&shape)) {
            std::vector<double> hi(b->center);
            for (auto& v : hi) v += b->radius;
            return hi;
        }
        return std::get<TaylorShape>(shape).box_max;
    }

    double diameter() const {
        const auto lo = box_min();
        const auto hi = box_max();
        double s = 0.0;
        for (size_t k = 0; k < lo.size(); ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
        return std::sqrt(s);
    }

    /// Signed distance to the boundary: positive inside, exact for balls.
    /// For Taylor domains, inside values are a certified lower bound
    /// (-F/|grad F| when F is convex, else -F/G with G a global gradient
    /// bound over the box); outside values are a negative proxy of the
    /// same form, used only for sign tests.
    double signed_boundary_distance(std::span<const double> pt) const {
        if (const auto* b = std::get_if<BallShape>(&shape)) {
            double r2 = 0.0;
            for (size_t k = 0; k < b->center.size(); ++k) {
                const double d = pt[k] - b->center[k];
                r2 += d * d;
            }
            return b->radius - std::sqrt(r2);
        }
        const auto& t = std::get<TaylorShape>(shape);
        const double f = t.f.value(pt);
        const auto g = t.f.gradient(pt);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        const double G = taylor_gradient_bound();
        double est;
        if (taylor_is_convex() && gn > 1e-14) {
            est = -f / gn;  // first-order lower bound, valid for convex F
        } else {
            est = -f / std::max(G, 1e-14);
        }
        return est;
    }

    /// Nearest boundary point (exact radial projection for balls; a few
    /// Newton steps along the gradient for Taylor domains).
    std::vector<double> project_to_boundary(std::span<const double> pt) const {
        if (const auto* b = std::get_if<BallShape>(&shape)) {
            std::vector<double> q(pt.begin(), pt.end());
            double r = 0.0;
            for (size_t k = 0; k < q.size(); ++k) {
                q[k] -= b->center[k];
                r += q[k] * q[k];
            }
            r = std::sqrt(r);
            if (r < 1e-300) {  // center: pick the first axis direction
                std::vector<double> out(b->center);
                out[0] += b->radius;
                return out;
            }
            for (size_t k = 0; k < q.size(); ++k) q[k] = b->center[k] + q[k] * (b->radius / r);
            return q;
        }
        const auto& t = std::get<TaylorShape>(shape);
        std::vector<double> q(pt.begin(), pt.end());
        for (int it = 0; it < 4; ++it) {
            const double f = t.f.value(q);
            const auto g = t.f.gradient(q);
            double gn2 = 0.0;
            for (double v : g) gn2 += v * v;
            if (gn2 < 1e-28) break;
            for (size_t k = 0; k < q.size(); ++k) q[k] -= f * g[k] / gn2;
        }
        return q;
    }

    /// First boundary crossing along pt + t*e_axis*sign for t in (0, tmax];
    /// returns tmax+1 if the segment stays on one side. Exact root of the
    /// quadratic restriction.
    double boundary_crossing(std::span<const double> pt, int axis, double sign, double tmax) const {
        auto at = [&](double t) {
            std::vector<double> q(pt.begin(), pt.end());
            q[axis] += sign * t;
            return q;
        };
        if (const auto* b = std::get_if<BallShape>(&shape)) {
            // |p + t s e - c|^2 = R^2:  t^2 + 2 t s (p-c)_axis + |p-c|^2 - R^2 = 0
            double A = 1.0, B = 0.0, C = -b->radius * b->radius;
            for (size_t k = 0; k < b->center.size(); ++k) {
                const double d = pt[k] - b->center[k];
                C += d * d;
                if (static_cast<int>(k) == axis) B = 2.0 * sign * d;
            }
            const double disc = B * B - 4.0 * A * C;
            if (disc < 0.0) return tmax + 1.0;
            const double sq = std::sqrt(disc);
            const double t1 = (-B - sq) / 2.0, t2 = (-B + sq) / 2.0;
            for (double t : {t1, t2})
                if (t > 0.0 && t <= tmax) return t;
            return tmax + 1.0;
        }
        const auto& t = std::get<TaylorShape>(shape);
        // restriction of a quadratic along a line is quadratic: fit by 3 samples
        const double f0 = t.f.value(at(0.0));
        const double f1 = t.f.value(at(tmax / 2.0));
        const double f2 = t.f.value(at(tmax));
        // f(s) = f0 + p s + q s^2 with s in units of tmax
        const double q = 2.0 * (f2 - 2.0 * f1 + f0);
        const double p = f2 - f0 - q;
        double best = tmax + 1.0;
        if (std::abs(q) < 1e-14 * (std::abs(p) + 1.0)) {
            if (std::abs(p) > 1e-300) {
                const double s = -f0 / p;
                if (s > 0.0 && s <= 1.0) best = s * tmax;
            }
        } else {
            const double disc = p * p - 4.0 * q * f0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                for (double s : {(-p - sq) / (2.0 * q), (-p + sq) / (2.0 * q)})
                    if (s > 0.0 && s <= 1.0 && s * tmax < best) best = s * tmax;
            }
        }
        return best;
    }

  private:
    bool taylor_is_convex() const {
        const auto& t = std::get<TaylorShape>(shape);
        if (convex_cache_ >= 0) return convex_cache_ == 1;
        // Real Hessian of F as a 2n x 2n constant matrix, assembled by
        // finite differences of the (exact) gradient of the quadratic.
        const int d = 2 * t.f.n;
        std::vector<double> base(d, 0.0);
        std::vector<double> H(static_cast<size_t>(d) * d, 0.0);
        const double step = 1.0;
        for (int k = 0; k < d; ++k) {
            std::vector<double> q(base);
            q[k] += step;
            const auto gp = t.f.gradient(q);
            q[k] -= 2.0 * step;
            const auto gm = t.f.gradient(q);
            for (int i = 0; i < d; ++i) H[static_cast<size_t>(i) * d + k] = (gp[i] - gm[i]) / (2.0 * step);
        }
        const auto ev = symmetric_eigenvalues(std::move(H), d);
        double mn = ev[0];
        for (double v : ev) mn = std::min(mn, v);
        convex_cache_ = (mn >= -1e-10) ? 1 : 0;
        return convex_cache_ == 1;
    }

    double taylor_gradient_bound() const {
        const auto& t = std::get<TaylorShape>(shape);
        if (gbound_cache_ > 0.0) return gbound_cache_;
        double amax = 0.0, bmax = 0.0, cmax = 0.0, rad = 0.0;
        for (const auto& v : t.f.a) amax = std::max(amax, std::abs(v));
        for (const auto& v : t.f.b.a) bmax = std::max(bmax, std::abs(v));
        for (const auto& v : t.f.c.a) cmax = std::max(cmax, std::abs(v));
        for (size_t k = 0; k < t.box_min.size(); ++k)
            rad = std::max(rad, std::max(std::abs(t.box_min[k]), std::abs(t.box_max[k])));
        rad *= std::sqrt(static_cast<double>(2 * t.f.n));
        gbound_cache_ = t.f.n * (amax + 2.0 * t.f.n * (bmax + cmax) * rad) + 1e-14;
        return gbound_cache_;
    }

    mutable int convex_cache_ = -1;
    mutable double gbound_cache_ = 0.0;
};

/// Distance from an interior point to the boundary. Exact for balls; a
/// certified lower bound for Taylor domains. Throws for exterior points.
inline double dist_to_boundary(const Domain& dom, std::span<const double> pt) {
    const double d = dom.signed_boundary_distance(pt);
    if (d < 0.0) throw std::domain_error("dist_to_boundary: point lies outside the domain");
    return d;
}

}  // namespace cmalab
