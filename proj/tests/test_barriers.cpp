#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cmalab/barrier.hpp"
#include "cmalab/instances.hpp"
#include "cmalab/poisson.hpp"
#include "oracles.hpp"

using namespace cmalab;

TEST_CASE("budget arithmetic on pinned instances") {
    SECTION("n = 1, p = 2: both critical exponents are 1/3") {
        auto b = budget(1.0, 2.0, 1, 0.3, 0.3, 0.3);
        CHECK(b.pstar == Catch::Approx(2.0));
        CHECK(b.gamma0 == Catch::Approx(1.0 / 3.0));
        CHECK(b.gamma_n == Catch::Approx(1.0 / 3.0));
        CHECK(b.beta == Catch::Approx(0.3));
        CHECK(b.alpha_prime == Catch::Approx(0.3));
    }
    SECTION("alpha = 0.5, n = 2, p = 2: the ratio regime") {
        auto b = budget(0.5, 2.0, 2, 0.19, 0.19, 0.3);
        CHECK(b.gamma0 == Catch::Approx(1.0 / 3.0));
        CHECK(b.gamma_n == Catch::Approx(0.2));
        CHECK(b.regime == BudgetRegime::AlphaRatio);
        CHECK(b.beta == Catch::Approx(0.2));
        CHECK(b.alpha_prime == Catch::Approx(0.2));
    }
    SECTION("open intervals: endpoints are rejected") {
        CHECK_THROWS_AS(budget(1.0, 2.0, 1, 1.0 / 3.0, 0.3, 0.3), std::invalid_argument);
        CHECK_THROWS_AS(budget(1.0, 2.0, 1, 0.3, 1.0 / 3.0, 0.3), std::invalid_argument);
        CHECK_THROWS_AS(budget(1.0, 2.0, 1, 0.3, 0.3, 1.0 / 3.0), std::invalid_argument);
        CHECK_THROWS_AS(budget(1.1, 2.0, 1, 0.3, 0.3, 0.3), std::invalid_argument);
        CHECK_THROWS_AS(budget(0.5, 1.0, 1, 0.1, 0.1, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(budget(0.5, 2.0, 1, 0.0, 0.1, 0.1), std::invalid_argument);
    }
}

TEST_CASE("budget sweep invariants") {
    for (double alpha : {0.3, 0.7, 1.0})
        for (double p : {1.5, 2.0, 4.0})
            for (int n : {1, 2, 3}) {
                const double g0 = (p - 1.0) / (2.0 * p - 1.0);
                const double gn = 1.0 / (n * p / (p - 1.0) + 1.0);
                for (int i = 1; i <= 5; ++i)
                    for (int j = 1; j <= 5; ++j) {
                        const double gamma = gn * i / 6.0;
                        const double gp = gn * j / 6.0;
                        const double gpp = g0 * j / 6.0;
                        auto b = budget(alpha, p, n, gamma, gp, gpp);
                        CHECK(b.beta < b.gamma0);
                        CHECK(b.alpha_prime <= b.beta);
                        CHECK(b.beta <= 1.0);
                        // monotone in alpha and gamma
                        if (alpha < 1.0) {
                            auto b2 = budget(alpha + 0.01, p, n, gamma, gp, gpp);
                            CHECK(b2.alpha_prime >= b.alpha_prime - 1e-15);
                        }
                        auto b3 = budget(alpha, p, n, std::min(gamma * 1.05, gn * 0.999), gp, gpp);
                        CHECK(b3.alpha_prime >= b.alpha_prime - 1e-15);
                    }
            }
}

TEST_CASE("achievable alpha' approaches 1/3 for n = 1, p = 2, alpha = 1") {
    double best = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double g = (1.0 / 3.0) * i / 401.0;
        auto b = budget(1.0, 2.0, 1, g, g, g);
        best = std::max(best, b.alpha_prime);
    }
    CHECK(best <= 1.0 / 3.0);
    CHECK(best >= 1.0 / 3.0 - 0.01);
}

TEST_CASE("hermitian eigenvalues on a known 2x2") {
    CMatrix h(2);
    h(0, 0) = 2.0;
    h(1, 1) = 3.0;
    h(0, 1) = cplx{0.0, 1.0};
    h(1, 0) = cplx{0.0, -1.0};
    // eigenvalues of [[2, i], [-i, 3]] are (5 +- sqrt(5))/2
    auto ev = hermitian_eigenvalues(h);
    CHECK(ev[0] == Catch::Approx((5.0 - std::sqrt(5.0)) / 2.0).margin(1e-10));
    CHECK(ev[1] == Catch::Approx((5.0 + std::sqrt(5.0)) / 2.0).margin(1e-10));
}

TEST_CASE("barrier construction on the unit ball at e1") {
    auto data = TaylorData::unit_ball_at_e1(1);
    auto [bar, cert] = build_barrier(data);
    CHECK(cert.margin > 0.0);
    CHECK(cert.min_eig_shifted > 0.0);
    CHECK(cert.eps_bar == Catch::Approx(0.5));
    CHECK(cert.C_bar <= 8.0);
    CHECK(cert.samples >= 2500);
    // rho vanishes at the origin and dominates |z|^2 on the inward normal
    CHECK(bar(std::vector<double>{0.0, 0.0}) == 0.0);
    const std::vector<double> inward{-0.1, 0.0};
    CHECK(bar(inward) >= 0.01);
}

TEST_CASE("barrier fails without a linear term") {
    TaylorData data;
    data.n = 1;
    data.a = {cplx{0.0, 0.0}};
    data.b = CMatrix(1);
    data.c = CMatrix::identity(1);
    data.r0 = 1.0;
    CHECK_THROWS_AS(build_barrier(data), barrier_construction_error);
}

TEST_CASE("barrier requires positive definite c") {
    TaylorData data = TaylorData::unit_ball_at_e1(1);
    data.c(0, 0) = -1.0;
    CHECK_THROWS_AS(build_barrier(data), std::invalid_argument);
}

TEST_CASE("barrier on the ellipsoid 2|z1|^2 + |z2|^2 < 1 at (0, 1)") {
    // shifted by w2 = z2 - 1: 2|w1|^2 + 2 Re(w2) + |w2|^2
    TaylorData data;
    data.n = 2;
    data.a = {cplx{0.0, 0.0}, cplx{2.0, 0.0}};
    data.b = CMatrix(2);
    data.c = CMatrix(2);
    data.c(0, 0) = 2.0;
    data.c(1, 1) = 1.0;
    data.r0 = 1.0;
    auto [bar, cert] = build_barrier(data);
    CHECK(cert.margin > 0.0);
    CHECK(cert.min_eig_shifted > 0.0);
    CHECK(cert.eps_bar == Catch::Approx(0.5));  // half the smallest eigenvalue of diag(2,1)
}

TEST_CASE("Taylor data extraction from a sampled defining function") {
    // unit ball at e1: F(w) = 2 Re(w1) + |w|^2
    auto F = [](std::span<const double> p) { return 2.0 * p[0] + p[0] * p[0] + p[1] * p[1]; };
    auto t = taylor_from_function(1, F, 1.0);
    CHECK(t.a[0].real() == Catch::Approx(2.0).margin(1e-7));
    CHECK(t.a[0].imag() == Catch::Approx(0.0).margin(1e-7));
    CHECK(std::abs(t.b(0, 0)) == Catch::Approx(0.0).margin(1e-6));
    CHECK(t.c(0, 0).real() == Catch::Approx(1.0).margin(1e-6));
    auto [bar, cert] = build_barrier(t);
    CHECK(cert.margin > 0.0);
}

TEST_CASE("boundary chain addends scale like |x0|^beta") {
    // the ratio regime at alpha = 1/2: beta = alpha/(2+alpha) = 0.2
    auto bud = budget(0.5, 2.0, 2, 0.19, 0.19, 0.3);
    REQUIRE(bud.beta == Catch::Approx(0.2));
    auto [bar, cert] = build_barrier(TaylorData::unit_ball_at_e1(2));
    std::vector<double> xs, a1, a2, a3;
    for (int k = 3; k <= 8; ++k) {
        const double d = std::pow(2.0, -k);
        const std::vector<double> x0{-d, 0.0, 0.0, 0.0};
        auto res = boundary_chain(x0, bud, bar, 1.0, 1.0, 1.0);
        REQUIRE(res.applicable);
        REQUIRE_FALSE(res.trivial_branch);
        xs.push_back(d);
        a1.push_back(res.addends.data_term);
        a2.push_back(res.addends.barrier_term);
        a3.push_back(res.addends.bulk_term);
        CHECK(res.bound < 0.0);
    }
    CHECK(oracles::loglog_slope(xs, a1) == Catch::Approx(0.2).margin(0.02));
    CHECK(oracles::loglog_slope(xs, a2) == Catch::Approx(0.2).margin(0.02));
    CHECK(oracles::loglog_slope(xs, a3) == Catch::Approx(0.2).margin(0.02));
}

TEST_CASE("boundary chain branches") {
    auto bud = budget(0.5, 2.0, 2, 0.19, 0.19, 0.3);
    SECTION("far points fall back to the trivial bound") {
        TaylorData small = TaylorData::unit_ball_at_e1(2);
        small.r0 = 0.05;
        auto [bar, cert] = build_barrier(small);
        const std::vector<double> x0{-0.5, 0.0, 0.0, 0.0};
        auto res = boundary_chain(x0, bud, bar, 2.0, 1.0, 1.0);
        CHECK(res.trivial_branch);
        const double expect = -2.0 * std::pow(0.05, -2.0 * 0.2 / 0.8) * std::pow(0.5, 0.2);
        CHECK(res.bound == Catch::Approx(expect));
    }
    SECTION("beta above the ratio is reported inapplicable") {
        // alpha = 0.2: alpha/(2+alpha) ~ 0.0909 < beta = 0.1 (via gamma'' >= 0.1, alpha/2 = 0.1)
        auto bad = budget(0.2, 2.0, 1, 0.1, 0.12, 0.3);
        REQUIRE(bad.beta > 0.2 / 2.2);
        auto [bar, cert] = build_barrier(TaylorData::unit_ball_at_e1(1));
        auto res = boundary_chain(std::vector<double>{-0.1, 0.0}, bad, bar, 1.0, 1.0, 1.0);
        CHECK_FALSE(res.applicable);
        CHECK(res.failed_condition.find("alpha/(2+alpha)") != std::string::npos);
    }
}

TEST_CASE("sup-norm bound check") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 96);
    SECTION("explicit instance u = |z|^2 - 1") {
        auto u = sample_function(geom, [](std::span<const double> p) {
            return p[0] * p[0] + p[1] * p[1] - 1.0;
        });
        auto phi = sample_boundary_data(geom, boundary_function("zero"));
        auto f = sample_constant_density(geom, 1.0);
        const double p = 2.0, delta = 0.2;  // delta < 1/(n p*) = 1/2
        // C large enough by the closed forms: |inf u| = 1, |f|_2 = sqrt(pi), |O|^d = pi^d
        const double c_min = 1.0 / (std::sqrt(M_PI) * std::pow(M_PI, delta));
        auto r = linfty_check(u, phi, f, p, delta, c_min * 1.05);
        CHECK(r.lhs == Catch::Approx(1.0).margin(1e-6));
        CHECK(r.pass);
        auto r2 = linfty_check(u, phi, f, p, delta, c_min * 0.95);
        CHECK_FALSE(r2.pass);
    }
    SECTION("zero data") {
        auto u = sample_function(geom, [](std::span<const double>) { return 0.0; });
        auto phi = sample_boundary_data(geom, boundary_function("zero"));
        auto f = sample_constant_density(geom, 0.0);
        auto r = linfty_check(u, phi, f, 2.0, 0.2, 1.0);
        CHECK(r.pass);
        CHECK(r.lhs == 0.0);
    }
    SECTION("solved power instance with the family constant") {
        auto f = sample_power_density(geom, 0.5);
        auto phi = sample_boundary_data(geom, boundary_function("abs"));
        auto u = solve_poisson_n1(f, phi).u;
        for (auto& vv : u.values) vv -= 1.0;  // shift data to inf phi = 0 form
        GridFn phi0 = phi;
        for (auto& vv : phi0.values) vv -= 1.0;
        auto r = linfty_check(u, phi0, f, 1.5, 0.2, 5.0);
        CHECK(r.pass);
    }
    SECTION("delta range enforced") {
        auto u = sample_function(geom, [](std::span<const double>) { return 0.0; });
        auto f = sample_constant_density(geom, 1.0);
        CHECK_THROWS_AS(linfty_check(u, u, f, 2.0, 0.5, 1.0), std::invalid_argument);
    }
}
