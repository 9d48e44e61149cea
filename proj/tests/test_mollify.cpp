#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cmalab/mollify.hpp"
#include "oracles.hpp"

using namespace cmalab;

namespace {

double value_at_origin(const GridFn& f) {
    const auto& g = *f.geom;
    long flat = 0;
    for (int k = 0; k < g.dim; ++k) flat += (g.resolution / 2) * g.strides[k];
    return f.values[flat];
}

GridFn abs2_sample(std::shared_ptr<const GridGeometry> geom) {
    return sample_function(geom, [](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1]; });
}

GridFn abs_sample(std::shared_ptr<const GridGeometry> geom) {
    return sample_function(geom, [](std::span<const double> p) { return std::hypot(p[0], p[1]); });
}

GridFn affine_sample(std::shared_ptr<const GridGeometry> geom) {
    return sample_function(geom, [](std::span<const double> p) { return 0.3 * p[0] - 0.7 * p[1] + 0.1; });
}

}  // namespace

TEST_CASE("kernel mass is one in dimensions 2 and 4") {
    for (int dim : {2, 4})
        for (auto kind : {KernelKind::BallIndicator, KernelKind::SmoothBump, KernelKind::PlateauBump}) {
            auto k = Kernel::make(kind, dim);
            CHECK(k.mass() == Catch::Approx(1.0).margin(1e-6));
        }
}

TEST_CASE("plateau descriptors") {
    auto pb = Kernel::make(KernelKind::PlateauBump, 2);
    CHECK(pb.plateau_radius == Catch::Approx(0.5));
    CHECK(pb.delta == Catch::Approx(pb.norm_const));
    CHECK(Kernel::make(KernelKind::BallIndicator, 2).plateau_radius == 0.0);
}

TEST_CASE("ball average of |x|^2 adds eps^2/2") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 256);
    auto u = abs2_sample(geom);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    const double tol = 3.0 * geom->h * geom->h;
    for (double eps : {0.2, 0.1, 0.05}) {
        auto m = mollify(u, kernel, eps);
        for (int i : m.defined)
            CHECK(std::abs(m.fn.values[i] - u.values[i] - 0.5 * eps * eps) <= tol);
    }
}

TEST_CASE("affine functions are fixed points of mollification") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto u = affine_sample(geom);
    for (auto kind : {KernelKind::BallIndicator, KernelKind::PlateauBump}) {
        auto m = mollify(u, Kernel::make(kind, 2), 0.15);
        for (int i : m.defined) CHECK(std::abs(m.fn.values[i] - u.values[i]) <= 1e-9);
    }
}

TEST_CASE("ball average of |z| at the origin") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 256);
    auto u = abs_sample(geom);
    auto m = mollify(u, Kernel::make(KernelKind::BallIndicator, 2), 0.1);
    // mean of |y| over B_eps is 2 eps / 3
    const double expect = oracles::disk_mean([](double r) { return r; }, 0.1);
    CHECK(expect == Catch::Approx(2.0 * 0.1 / 3.0).epsilon(1e-6));
    CHECK(value_at_origin(m.fn) == Catch::Approx(expect).margin(1e-3));
}

TEST_CASE("gap table of |x|^2 follows eps^2/2 and |z| has unit slope") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 256);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    const std::vector<double> eps = {0.2, 0.1, 0.05};
    SECTION("quadratic") {
        auto t = subharmonic_gap(abs2_sample(geom), kernel, eps);
        CHECK(t.u_subharmonic);
        const double tol = 3.0 * geom->h * geom->h;
        for (size_t i = 0; i < eps.size(); ++i)
            CHECK(t.rows[i].sup_gap == Catch::Approx(0.5 * eps[i] * eps[i]).margin(tol));
    }
    SECTION("cone") {
        auto t = subharmonic_gap(abs_sample(geom), kernel, eps);
        std::vector<double> gaps;
        for (const auto& row : t.rows) gaps.push_back(row.sup_gap);
        CHECK(oracles::loglog_slope(eps, gaps) == Catch::Approx(1.0).margin(0.05));
    }
    SECTION("affine gaps vanish") {
        auto t = subharmonic_gap(affine_sample(geom), kernel, eps);
        for (const auto& row : t.rows) CHECK(std::abs(row.sup_gap) <= 1e-9);
    }
    SECTION("superharmonic input raises the warning flag, not an error") {
        auto u = sample_function(geom, [](std::span<const double> p) {
            return -(p[0] * p[0] + p[1] * p[1]);
        });
        auto t = subharmonic_gap(u, kernel, eps);
        CHECK_FALSE(t.u_subharmonic);
        CHECK(t.submean_violation > 0.0);
        for (const auto& row : t.rows) CHECK(row.sup_gap < 0.0);  // averages fall below u
    }
}

TEST_CASE("mollification commutes with constants and preserves order") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto u = abs_sample(geom);
    auto kernel = Kernel::make(KernelKind::PlateauBump, 2);
    SECTION("u + c") {
        GridFn shifted = u;
        for (auto& v : shifted.values) v += 2.5;
        auto a = mollify(u, kernel, 0.2);
        auto b = mollify(shifted, kernel, 0.2);
        for (int i : a.defined) CHECK(b.fn.values[i] - a.fn.values[i] == Catch::Approx(2.5).margin(1e-12));
    }
    SECTION("u <= v pointwise implies ordered averages") {
        GridFn v = u;
        for (long i = 0; i < geom->total; ++i)
            v.values[i] += 0.1 * (1.0 + std::sin(3.0 * geom->coord(i, 0)));
        auto a = mollify(u, kernel, 0.2);
        auto b = mollify(v, kernel, 0.2);
        for (int i : a.defined) CHECK(a.fn.values[i] <= b.fn.values[i] + 1e-12);
    }
}

TEST_CASE("unresolved kernels return the input with a warning") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto u = abs2_sample(geom);
    auto m = mollify(u, Kernel::make(KernelKind::BallIndicator, 2), 0.2 * geom->h);
    CHECK_FALSE(m.kernel_resolved);
    for (int i : m.defined) CHECK(m.fn.values[i] == u.values[i]);
}

TEST_CASE("mollify domain errors") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto u = abs2_sample(geom);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    CHECK_THROWS_AS(mollify(u, kernel, 1.5), std::domain_error);   // empty shrunk domain
    CHECK_THROWS_AS(mollify(u, kernel, -0.1), std::invalid_argument);
}

TEST_CASE("scale-penalized infimum: analytic minimizer for affine inputs") {
    auto geom = make_grid_geometry(Domain::ball({0.0, 0.0}, 2.5), 160);
    auto u = affine_sample(geom);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    SECTION("interior minimizer beyond eps clips to eps") {
        // K = 1, eps = 0.1, c = 1: t* = sqrt(c/2K) ~ 0.707 > eps
        auto r = kiselman_transform(u, kernel, 0.1, 1.0, 1.0);
        for (size_t i = 0; i < r.targets.size(); ++i) {
            CHECK(r.t_min[i] == r.eps);
            CHECK(r.values[i] == Catch::Approx(u.values[r.targets[i]]).margin(1e-9));
        }
    }
    SECTION("interior minimizer t* = 0.1 within one grid step") {
        // K = 1, eps = 1, c = 0.02: t* = 0.1,
        // value = u + K(t*^2 - eps^2) - c log(t*/eps) = u - 0.99 + 0.046
        auto r = kiselman_transform(u, kernel, 1.0, 0.02, 1.0, 48);
        const double tstar = 0.1;
        const double q = std::pow(1024.0, 1.0 / 47.0);  // grid ratio
        const double analytic = -0.99 - 0.02 * std::log(0.1);
        for (size_t i = 0; i < r.targets.size(); ++i) {
            CHECK(std::abs(std::log(r.t_min[i] / tstar)) <= std::log(q) + 1e-12);
            CHECK(r.values[i] - u.values[r.targets[i]] == Catch::Approx(analytic).margin(1e-3));
        }
    }
    SECTION("large c forces t_min = eps") {
        auto r = kiselman_transform(u, kernel, 0.2, 1e6, 0.0, 32);
        auto m = mollify(u, kernel, 0.2);
        for (size_t i = 0; i < r.targets.size(); ++i) {
            CHECK(r.t_min[i] == r.eps);
            CHECK(r.values[i] == Catch::Approx(m.fn.values[r.targets[i]]).margin(1e-12));
        }
    }
}

TEST_CASE("scale-penalized infimum: sandwich bounds") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    for (const GridFn& u : {abs2_sample(geom), abs_sample(geom), affine_sample(geom)}) {
        for (double K : {0.0, 1.0}) {
            const double eps = 0.15;
            auto r = kiselman_transform(u, kernel, eps, 0.05, K);
            auto upper = mollify(u, kernel, eps);
            for (size_t i = 0; i < r.targets.size(); ++i) {
                const int idx = r.targets[i];
                CHECK(r.values[i] <= upper.fn.values[idx] + 1e-9);
                CHECK(r.values[i] >= u.values[idx] - K * eps * eps - 1e-9);
                CHECK(r.t_min[i] > 0.0);
                CHECK(r.t_min[i] <= eps);
            }
        }
    }
}

TEST_CASE("scale-penalized infimum: parameter validation") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto u = abs2_sample(geom);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    CHECK_THROWS_AS(kiselman_transform(u, kernel, 0.1, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kiselman_transform(u, kernel, 0.1, 1.0, 0.0, 8), std::invalid_argument);
}

TEST_CASE("lambda is nonnegative for subharmonic inputs with K = 0") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto u = abs2_sample(geom);
    auto r = kiselman_transform(u, Kernel::make(KernelKind::BallIndicator, 2), 0.15, 0.1, 0.0);
    for (size_t lvl = 0; lvl < r.t_grid.size(); ++lvl)
        for (size_t i = 0; i < r.targets.size(); ++i) CHECK(r.lambda_at(lvl, i) >= -1e-9);
}

TEST_CASE("averages grow with the radius for subharmonic inputs") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    const std::vector<double> eps = {0.05, 0.1, 0.2};
    SECTION("strictly for |x|^2") {
        auto r = monotonicity_check(abs2_sample(geom), kernel, 0.0, eps);
        CHECK(r.pass);
    }
    SECTION("with equality for affine") {
        auto r = monotonicity_check(affine_sample(geom), kernel, 0.0, eps);
        CHECK(r.pass);
        CHECK(r.worst_violation <= 1e-12);
    }
    SECTION("for the truncated logarithmic pole") {
        auto u = sample_function(geom, [](std::span<const double> p) {
            const double d = std::hypot(p[0] - 0.4, p[1]);
            return std::max(std::log(d), -6.0);
        });
        auto r = monotonicity_check(u, kernel, 0.0, eps, 5e-3);
        CHECK(r.pass);
    }
}
