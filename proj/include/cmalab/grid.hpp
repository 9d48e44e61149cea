#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmalab/domain.hpp"
#include "cmalab/errors.hpp"

namespace cmalab {

enum class PointClass : std::uint8_t { Interior = 0, Boundary = 1, Exterior = 2 };

/// Uniform lattice over the domain's bounding box. Points land on
/// box_min + i*h per axis, i = 0..resolution, so boundary-touching points
/// of a ball (e.g. the axis crossings of the circumscribed box) are grid
/// points and get classified Boundary exactly.
struct GridGeometry {
    Domain domain;
    int resolution = 0;   // cells per axis
    int pts_per_axis = 0; // resolution + 1
    double h = 0.0;       // spacing, identical on every axis (cubic box)
    int dim = 0;          // 2n
    std::vector<double> origin;        // box_min
    std::vector<long> strides;         // flat index strides per axis
    long total = 0;
    std::vector<PointClass> cls;       // per point
    std::vector<double> bdist;         // signed boundary distance (all points)
    std::vector<int> interior;         // flat indices, ascending
    std::vector<int> boundary;         // flat indices of boundary-adjacent points
    std::vector<double> boundary_pos;  // projected boundary position per boundary[] entry (dim each)
    double snap = 0.0;                 // |distance| below this counts as exactly on the boundary

    /// True when the stored sample value sits at the lattice position itself:
    /// interior points, and boundary points lying exactly on the boundary.
    /// (Outside boundary-adjacent points carry data at their projection.)
    bool value_at_lattice(long flat) const {
        if (cls[flat] == PointClass::Interior) return true;
        return cls[flat] == PointClass::Boundary && bdist[flat] >= -snap;
    }

    double coord(long flat, int axis) const {
        return origin[axis] + h * static_cast<double>((flat / strides[axis]) % pts_per_axis);
    }

    std::vector<double> point(long flat) const {
        std::vector<double> p(dim);
        for (int k = 0; k < dim; ++k) p[k] = coord(flat, k);
        return p;
    }

    long axis_index(long flat, int axis) const { return (flat / strides[axis]) % pts_per_axis; }

    /// Flat index of the axis neighbor, or -1 outside the lattice.
    long neighbor(long flat, int axis, int step) const {
        const long i = axis_index(flat, axis) + step;
        if (i < 0 || i >= pts_per_axis) return -1;
        return flat + static_cast<long>(step) * strides[axis];
    }

    double cell_volume() const { return std::pow(h, dim); }

    std::span<const double> boundary_position(size_t b) const {
        return {boundary_pos.data() + b * dim, static_cast<size_t>(dim)};
    }
};

/// Scalar function sampled on a grid: values at Interior points live at the
/// lattice position, values at Boundary points at the projected boundary
/// position. Quadrature may exclude a masked cell (singular integrands).
struct GridFn {
    std::shared_ptr<const GridGeometry> geom;
    std::vector<double> values;   // size geom->total; meaningful at Interior/Boundary
    std::vector<int> masked;      // flat indices excluded from quadrature, sorted

    bool is_masked(long flat) const {
        return std::binary_search(masked.begin(), masked.end(), static_cast<int>(flat));
    }
};

inline std::shared_ptr<const GridGeometry> make_grid_geometry(const Domain& dom, int resolution) {
    if (resolution < 8) throw config_error("build_grid: resolution must be at least 8");
    auto g = std::make_shared<GridGeometry>();
    g->domain = dom;
    g->resolution = resolution;
    g->pts_per_axis = resolution + 1;
    g->dim = dom.real_dim();
    g->origin = dom.box_min();
    const auto hi = dom.box_max();
    g->h = (hi[0] - g->origin[0]) / resolution;
    for (int k = 1; k < g->dim; ++k) {
        const double hk = (hi[k] - g->origin[k]) / resolution;
        if (std::abs(hk - g->h) > 1e-12 * std::abs(g->h))
            throw config_error("build_grid: bounding box must be a cube (equal spacing per axis)");
    }
    g->strides.resize(g->dim);
    long s = 1;
    for (int k = 0; k < g->dim; ++k) {
        g->strides[k] = s;
        s *= g->pts_per_axis;
    }
    g->total = s;
    if (g->total > 80'000'000L) throw config_error("build_grid: grid too large");

    g->cls.assign(g->total, PointClass::Exterior);
    g->bdist.assign(g->total, 0.0);
    const double snap = 1e-12 * (1.0 + std::abs(g->h) * resolution);
    g->snap = snap;
    std::vector<double> p(g->dim);
    for (long i = 0; i < g->total; ++i) {
        for (int k = 0; k < g->dim; ++k) p[k] = g->coord(i, k);
        const double d = dom.signed_boundary_distance(p);
        g->bdist[i] = d;
        if (d > snap)
            g->cls[i] = PointClass::Interior;
        else if (d >= -snap)
            g->cls[i] = PointClass::Boundary;  // exactly on the boundary
    }
    // exterior points adjacent (along an axis) to an interior point carry
    // Dirichlet data too
    for (long i = 0; i < g->total; ++i) {
        if (g->cls[i] != PointClass::Exterior) continue;
        for (int k = 0; k < g->dim && g->cls[i] == PointClass::Exterior; ++k) {
            for (int st : {-1, 1}) {
                const long j = g->neighbor(i, k, st);
                if (j >= 0 && g->cls[j] == PointClass::Interior) {
                    g->cls[i] = PointClass::Boundary;
                    break;
                }
            }
        }
    }
    for (long i = 0; i < g->total; ++i) {
        if (g->cls[i] == PointClass::Interior) g->interior.push_back(static_cast<int>(i));
        if (g->cls[i] == PointClass::Boundary) g->boundary.push_back(static_cast<int>(i));
    }
    g->boundary_pos.resize(g->boundary.size() * g->dim);
    for (size_t b = 0; b < g->boundary.size(); ++b) {
        for (int k = 0; k < g->dim; ++k) p[k] = g->coord(g->boundary[b], k);
        const auto q = dom.project_to_boundary(p);
        std::copy(q.begin(), q.end(), g->boundary_pos.begin() + b * g->dim);
    }
    return g;
}

/// Grid skeleton with empty samples.
inline GridFn build_grid(const Domain& dom, int resolution) {
    GridFn f;
    f.geom = make_grid_geometry(dom, resolution);
    f.values.assign(f.geom->total, 0.0);
    return f;
}

/// Sample a function: interior points at their lattice position, boundary
/// points at their projected boundary position.
inline GridFn sample_function(std::shared_ptr<const GridGeometry> geom,
                              const std::function<double(std::span<const double>)>& fn) {
    GridFn f;
    f.geom = geom;
    f.values.assign(geom->total, 0.0);
    std::vector<double> p(geom->dim);
    for (int i : geom->interior) {
        for (int k = 0; k < geom->dim; ++k) p[k] = geom->coord(i, k);
        f.values[i] = fn(p);
    }
    for (size_t b = 0; b < geom->boundary.size(); ++b)
        f.values[geom->boundary[b]] = fn(geom->boundary_position(b));
    return f;
}

/// Dirichlet data: values only at boundary-adjacent points (projected positions).
inline GridFn sample_boundary_data(std::shared_ptr<const GridGeometry> geom,
                                   const std::function<double(std::span<const double>)>& fn) {
    GridFn f;
    f.geom = geom;
    f.values.assign(geom->total, 0.0);
    for (size_t b = 0; b < geom->boundary.size(); ++b)
        f.values[geom->boundary[b]] = fn(geom->boundary_position(b));
    return f;
}

enum class NormKind { Sup, L1, Lp };

/// Quadrature by cell volume h^{2n} over interior points, skipping masked
/// cells (the omitted mass is the caller-documented singular cell).
inline double norm(const GridFn& f, NormKind kind, double p = 2.0) {
    const auto& g = *f.geom;
    if (kind == NormKind::Sup) {
        double m = 0.0;
        for (int i : g.interior)
            if (!f.is_masked(i)) m = std::max(m, std::abs(f.values[i]));
        return m;
    }
    if (kind == NormKind::Lp && !(p > 1.0)) throw std::invalid_argument("norm: Lp requires p > 1");
    const double q = (kind == NormKind::L1) ? 1.0 : p;
    double acc = 0.0;
    for (int i : g.interior)
        if (!f.is_masked(i)) acc += std::pow(std::abs(f.values[i]), q);
    acc *= g.cell_volume();
    return (kind == NormKind::L1) ? acc : std::pow(acc, 1.0 / q);
}

/// Interior grid points at boundary distance > eps (the shrinking of the
/// domain by eps). Nested exactly as point sets when eps grows.
struct ShrunkDomain {
    std::shared_ptr<const GridGeometry> geom;
    double eps = 0.0;
    std::vector<int> indices;  // ascending flat indices

    bool contains(long flat) const {
        return std::binary_search(indices.begin(), indices.end(), static_cast<int>(flat));
    }
};

inline ShrunkDomain shrink(std::shared_ptr<const GridGeometry> geom, double eps) {
    ShrunkDomain s;
    s.geom = geom;
    s.eps = eps;
    for (int i : geom->interior)
        if (geom->bdist[i] > eps) s.indices.push_back(i);
    return s;
}

}  // namespace cmalab
