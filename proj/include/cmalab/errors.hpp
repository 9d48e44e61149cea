#pragma once

#include <stdexcept>
#include <string>

namespace cmalab {

// Error kinds that callers need to distinguish programmatically.
// Everything else uses std::invalid_argument / std::domain_error directly.

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct solver_failure : std::runtime_error {
    double residual;
    long iterations;
    solver_failure(const std::string& msg, double res, long iters)
        : std::runtime_error(msg), residual(res), iterations(iters) {}
};

struct singular_data_error : std::runtime_error {
    explicit singular_data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct inadmissible_profile_error : std::runtime_error {
    explicit inadmissible_profile_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct kernel_inadmissible_error : std::runtime_error {
    explicit kernel_inadmissible_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct barrier_construction_error : std::runtime_error {
    explicit barrier_construction_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct degenerate_fit_error : std::runtime_error {
    explicit degenerate_fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cmalab
