#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cmalab/instances.hpp"
#include "cmalab/mollify.hpp"
#include "cmalab/poisson.hpp"
#include "cmalab/radial_solve.hpp"

using namespace cmalab;

TEST_CASE("radial solver on the quadratic instance") {
    RadialFn f = make_radial_mesh(1, 1.0, 10001);
    f.values.assign(f.s.size(), 1.0);
    auto sol = solve_radial(1, f, 1.0);
    double worst = 0.0;
    for (size_t i = 0; i < sol.phi.s.size(); ++i)
        worst = std::max(worst, std::abs(sol.phi.values[i] - sol.phi.s[i]));
    CHECK(worst <= 1e-10);
    CHECK(sol.residual <= 1e-10);
    CHECK(sol.phi.values.back() == 1.0);
}

TEST_CASE("radial solver inverts power densities") {
    SECTION("n = 2, beta = 3/4") {
        auto f = ma_density(RadialProfile::power(2, 0.75), 1.0, 100001);
        auto sol = solve_radial(2, f, 1.0);
        double worst = 0.0;
        for (size_t i = 0; i < sol.phi.s.size(); ++i)
            worst = std::max(worst, std::abs(sol.phi.values[i] - std::pow(sol.phi.s[i], 0.75)));
        CHECK(worst <= 1e-4);
    }
    SECTION("n = 1, beta = 1/2") {
        auto f = ma_density(RadialProfile::power(1, 0.5), 1.0, 100001);
        auto sol = solve_radial(1, f, 1.0);
        double worst = 0.0;
        for (size_t i = 0; i < sol.phi.s.size(); ++i)
            worst = std::max(worst, std::abs(sol.phi.values[i] - std::sqrt(sol.phi.s[i])));
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("radial solver rejects bad densities") {
    RadialFn f = make_radial_mesh(1, 1.0, 1001);
    f.values.assign(f.s.size(), -1.0);
    CHECK_THROWS_AS(solve_radial(1, f, 1.0), std::domain_error);

    RadialFn g = make_radial_mesh(1, 1.0, 1001);
    for (size_t i = 1; i < g.s.size(); ++i) g.values[i] = std::pow(g.s[i], -1.2);
    g.values[0] = INFINITY;
    CHECK_THROWS_AS(solve_radial(1, g, 1.0), singular_data_error);
}

TEST_CASE("radial plurisubharmonicity of the recovered profile") {
    auto f = ma_density(RadialProfile::power(1, 0.5), 1.0, 10001);
    auto sol = solve_radial(1, f, 1.0);
    for (double dp : sol.dphi) CHECK(dp >= -1e-12);
}

TEST_CASE("Poisson solver on the quadratic instance") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto f = sample_constant_density(geom, 1.0);
    auto phi = sample_boundary_data(geom, boundary_function("abs2"));
    auto sol = solve_poisson_n1(f, phi);
    CHECK(sol.residual <= 1e-9);
    double worst = 0.0;
    for (int i : geom->interior) {
        const auto p = geom->point(i);
        worst = std::max(worst, std::abs(sol.u.values[i] - (p[0] * p[0] + p[1] * p[1])));
    }
    CHECK(worst <= 5e-4);

    SECTION("solution is discretely subharmonic (f >= 0)") {
        auto chk = check_submean(sol.u, 1e-8);
        CHECK(chk.subharmonic);
    }
}

TEST_CASE("Poisson convergence order on the quadratic instance") {
    std::vector<double> errs;
    for (int res : {64, 128}) {
        auto geom = make_grid_geometry(Domain::unit_ball(1), res);
        auto f = sample_constant_density(geom, 1.0);
        auto phi = sample_boundary_data(geom, boundary_function("abs2"));
        auto sol = solve_poisson_n1(f, phi);
        double worst = 0.0;
        for (int i : geom->interior) {
            const auto p = geom->point(i);
            worst = std::max(worst, std::abs(sol.u.values[i] - (p[0] * p[0] + p[1] * p[1])));
        }
        errs.push_back(worst);
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
}

TEST_CASE("harmonic extension of a constant is exact") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto f = sample_constant_density(geom, 0.0);
    auto phi = sample_boundary_data(geom, boundary_function("constant", 3.0));
    auto sol = solve_poisson_n1(f, phi);
    for (int i : geom->interior) CHECK(sol.u.values[i] == Catch::Approx(3.0).margin(1e-8));
}

TEST_CASE("singular power density reproduces |z|") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 256);
    auto f = sample_power_density(geom, 0.5);
    auto phi = sample_boundary_data(geom, boundary_function("abs"));
    auto sol = solve_poisson_n1(f, phi);
    double worst = 0.0;
    for (int i : geom->interior) {
        const auto p = geom->point(i);
        worst = std::max(worst, std::abs(sol.u.values[i] - std::sqrt(p[0] * p[0] + p[1] * p[1])));
    }
    CHECK(worst <= 2e-2);

    SECTION("discrete maximum principle: the max lives on the boundary") {
        double interior_max = -INFINITY, boundary_max = -INFINITY;
        for (int i : geom->interior) interior_max = std::max(interior_max, sol.u.values[i]);
        for (int b : geom->boundary) boundary_max = std::max(boundary_max, sol.u.values[b]);
        CHECK(interior_max <= boundary_max + 1e-6);
    }
}

TEST_CASE("solver errors") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto phi = sample_boundary_data(geom, boundary_function("zero"));
    SECTION("negative density") {
        auto f = sample_constant_density(geom, -1.0);
        CHECK_THROWS_AS(solve_poisson_n1(f, phi), std::domain_error);
    }
    SECTION("iteration cap reached") {
        auto f = sample_constant_density(geom, 1.0);
        PoissonParams params;
        params.max_iterations = 2;
        try {
            solve_poisson_n1(f, phi, params);
            FAIL("expected solver_failure");
        } catch (const solver_failure& e) {
            CHECK(e.residual > params.tolerance);
            CHECK(e.iterations == 2);
        }
    }
    SECTION("mismatched grids") {
        auto other = make_grid_geometry(Domain::unit_ball(1), 32);
        auto f = sample_constant_density(other, 1.0);
        CHECK_THROWS_AS(solve_poisson_n1(f, phi), shape_error);
    }
}

TEST_CASE("comparison principle on solved instances") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto phi0 = sample_boundary_data(geom, boundary_function("zero"));
    auto u = solve_poisson_n1(sample_constant_density(geom, 1.0), phi0).u;
    auto v = solve_poisson_n1(sample_constant_density(geom, 2.0), phi0).u;
    SECTION("more mass pushes the solution down") {
        auto r = comparison_check(u, v, 1e-8);
        CHECK(r.pass);
    }
    SECTION("reflexivity") {
        auto r = comparison_check(u, u, 0.0);
        CHECK(r.pass);
        CHECK(r.worst_violation == 0.0);
    }
    SECTION("boundary shift propagates") {
        const double shift = 0.01;
        auto phi_lower = sample_boundary_data(geom, [&](std::span<const double>) { return -shift; });
        auto w = solve_poisson_n1(sample_constant_density(geom, 1.0), phi_lower).u;
        auto r = comparison_check(u, w, 1e-8);
        CHECK(r.pass);
    }
    SECTION("mismatched grids are a shape error") {
        auto other = make_grid_geometry(Domain::unit_ball(1), 32);
        auto w = sample_function(other, [](std::span<const double>) { return 0.0; });
        CHECK_THROWS_AS(comparison_check(u, w, 0.0), shape_error);
    }
}
