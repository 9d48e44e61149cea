#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cmalab/certificate.hpp"

using namespace cmalab;

namespace {

GridFn sqrt_abs_sample(std::shared_ptr<const GridGeometry> geom) {
    return sample_function(geom, [](std::span<const double> p) {
        return std::pow(p[0] * p[0] + p[1] * p[1], 0.25);  // |x|^{1/2}
    });
}

}  // namespace

TEST_CASE("certificate passes for |x|^{1/2} with the plateau-bump kernel") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 128);
    auto u = sqrt_abs_sample(geom);
    auto kernel = Kernel::make(KernelKind::PlateauBump, 2);
    auto cert = verify_holder_certificate(u, kernel, 0.5, 2.0, 8);

    CHECK(cert.hypotheses_ok);
    CHECK(cert.C1 == Catch::Approx(1.0).epsilon(0.05));
    CHECK(cert.C2 > 0.0);
    CHECK(cert.kappa > 0.0);
    CHECK(cert.kappa <= 0.5);
    CHECK(cert.scale_lambda == Catch::Approx(6.0));
    CHECK(cert.R_eff == Catch::Approx(6.0));
    // assembled exactly as max-combinations of the measured constants
    CHECK(cert.C3 == Catch::Approx(2.0 * cert.C1 * std::pow(cert.R_eff + 1.0, 0.5) *
                                   std::pow(cert.diam, 0.5) / std::pow(cert.eps0_eff, 0.5)));
    CHECK(cert.C4 == Catch::Approx(std::max(
                         cert.C3, cert.C2 / ((1.0 - std::pow(2.0, -0.5)) * cert.kappa))));
    CHECK(cert.C == Catch::Approx(std::max(cert.C3, std::pow(2.0, 0.5) * cert.C4)));
    CHECK(cert.conclusion_ok);
    CHECK(cert.iteration_ok);
    CHECK(cert.pass);
    CHECK(cert.steps.size() >= 3);
    for (const auto& st : cert.steps) {
        CHECK(st.case_a_ok);
        CHECK(st.case_b_ok);
        CHECK(st.iterate_ok);
    }
}

TEST_CASE("certificate on a mollification-invariant function: C2 vanishes") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 96);
    auto u = sample_function(geom, [](std::span<const double> p) { return 0.4 * p[0] - 0.2 * p[1]; });
    auto kernel = Kernel::make(KernelKind::PlateauBump, 2);
    auto cert = verify_holder_certificate(u, kernel, 0.9, 2.0, 6);
    CHECK(cert.C2 <= 1e-8);
    CHECK(cert.C4 == Catch::Approx(cert.C3));  // the gap term never dominates
    CHECK(cert.pass);
}

TEST_CASE("indicator kernel is rejected as plateau-less") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto u = sqrt_abs_sample(geom);
    auto kernel = Kernel::make(KernelKind::BallIndicator, 2);
    CHECK_THROWS_AS(verify_holder_certificate(u, kernel, 0.5, 1.0), kernel_inadmissible_error);
}

TEST_CASE("alpha must stay inside (0,1)") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 64);
    auto u = sqrt_abs_sample(geom);
    auto kernel = Kernel::make(KernelKind::PlateauBump, 2);
    CHECK_THROWS_AS(verify_holder_certificate(u, kernel, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(verify_holder_certificate(u, kernel, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("certificate records the reflection restriction") {
    auto geom = make_grid_geometry(Domain::unit_ball(1), 96);
    auto u = sqrt_abs_sample(geom);
    auto cert = verify_holder_certificate(u, Kernel::make(KernelKind::PlateauBump, 2), 0.5, 2.0, 6);
    CHECK(cert.note.find("reflected") != std::string::npos);
}
