// Command-line front end: solve instances, regularize, estimate exponents,
// verify certificates, and run the end-to-end pipeline.
//
// Exit codes: 0 success, 1 a predicted inequality failed beyond tolerance,
// 2 usage or configuration error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmalab/certificate.hpp"
#include "cmalab/instances.hpp"
#include "cmalab/pipeline.hpp"
#include "cmalab/radial_solve.hpp"
#include "cmalab/serialize.hpp"

namespace fs = std::filesystem;
using namespace cmalab;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    long seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--config", c.config_path, "flat key-value config file");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--seed", c.seed, "random seed for sampled estimators");
}

ExperimentConfig load_experiment(const CommonOpts& c) {
    ExperimentConfig e;
    if (!c.config_path.empty()) e = experiment_from_config(ConfigFile::parse(read_text_file(c.config_path)));
    e.seed = static_cast<std::uint64_t>(c.seed);
    if (c.out_dir != "out" || e.out_dir.empty()) e.out_dir = c.out_dir;
    return e;
}

std::string out_path(const CommonOpts& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return (fs::path(c.out_dir) / name).string();
}

int cmd_solve(const CommonOpts& c, const std::string& problem_path) {
    const json prob = json::parse(read_text_file(problem_path));
    const json dj = prob.at("domain");
    const ExperimentConfig defaults = load_experiment(c);
    PoissonParams params;
    params.omega = prob.value("solver", json::object()).value("omega", defaults.omega);
    params.max_iterations = prob.value("solver", json::object()).value("max_iterations", defaults.max_iterations);
    params.tolerance = prob.value("solver", json::object()).value("tolerance", defaults.tolerance);

    if (dj.value("kind", "ball") == "radial") {
        const int n = prob.value("n", 1);
        const double S = dj.value("S", 1.0);
        const int mesh = prob.value("mesh_size", 100000);
        const json den = prob.at("density");
        RadialFn f;
        if (den.at("kind") == "power")
            f = ma_density(RadialProfile::power(n, den.at("beta")), S, mesh);
        else if (den.at("kind") == "quadratic")
            f = ma_density(RadialProfile::quadratic(n), S, mesh);
        else if (den.at("kind") == "constant") {
            f = make_radial_mesh(n, S, mesh);
            f.values.assign(f.s.size(), den.value("value", 1.0));
        } else
            throw config_error("solve: unknown radial density kind");
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = solve_radial(n, f, prob.value("boundary_value", 1.0));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_text_file(out_path(c, "solution.csv"), radial_to_csv(sol.phi));
        write_text_file(out_path(c, "solution.json"), radial_meta_to_json(sol.phi).dump(2) + "\n");
        write_text_file(out_path(c, "report.json"),
                        json{{"residual", sol.residual}, {"iterations", 0}, {"runtime_seconds", secs}}
                                .dump(2) +
                            "\n");
        std::printf("radial solve: residual %s, %zu mesh points\n", format_double(sol.residual).c_str(),
                    sol.phi.s.size());
        return 0;
    }

    const Domain dom = domain_from_json(dj);
    auto geom = make_grid_geometry(dom, prob.value("resolution", defaults.resolution));
    const json den = prob.at("density");
    GridFn f;
    if (den.at("kind") == "power")
        f = sample_power_density(geom, den.at("beta"));
    else if (den.at("kind") == "constant")
        f = sample_constant_density(geom, den.value("value", 1.0));
    else if (den.at("kind") == "zero")
        f = sample_constant_density(geom, 0.0);
    else
        throw config_error("solve: unknown density kind");
    const json bj = prob.at("boundary");
    auto phi = sample_boundary_data(geom, boundary_function(bj.at("kind"), bj.value("value", 0.0)));
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_poisson_n1(f, phi, params);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_grid_fn(sol.u, out_path(c, "solution.csv"), out_path(c, "solution.json"));
    write_text_file(out_path(c, "report.json"),
                    json{{"residual", sol.residual},
                         {"iterations", sol.iterations},
                         {"runtime_seconds", secs}}
                            .dump(2) +
                        "\n");
    std::printf("solve: residual %s in %ld iterations (%.2fs)\n", format_double(sol.residual).c_str(),
                sol.iterations, secs);
    return 0;
}

int cmd_mollify(const CommonOpts& c, const std::string& sol_csv, const std::string& sol_meta,
                const std::string& kernel_path, const std::string& eps_csv) {
    const GridFn u = read_grid_fn(sol_csv, sol_meta);
    const Kernel kernel = kernel_from_json(json::parse(read_text_file(kernel_path)));
    std::vector<double> eps;
    size_t pos = 0;
    while (pos < eps_csv.size()) {
        size_t comma = eps_csv.find(',', pos);
        if (comma == std::string::npos) comma = eps_csv.size();
        eps.push_back(parse_double(ConfigFile::trim(eps_csv.substr(pos, comma - pos))));
        pos = comma + 1;
    }
    if (eps.empty()) throw config_error("mollify: empty eps list");
    const auto table = subharmonic_gap(u, kernel, eps);
    write_text_file(out_path(c, "gaps.csv"), detail::gap_table_csv(table));
    json j{{"u_subharmonic", table.u_subharmonic}, {"submean_violation", table.submean_violation}};
    bool positive = !table.rows.empty();
    for (const auto& row : table.rows)
        if (!(row.sup_gap > 1e-12 && row.l1_gap > 1e-14)) positive = false;
    if (positive && table.rows.size() >= 2) {
        std::vector<double> lx, ls, ll;
        for (const auto& row : table.rows) {
            lx.push_back(std::log(row.eps));
            ls.push_back(std::log(row.sup_gap));
            ll.push_back(std::log(row.l1_gap));
        }
        j["sup_slope"] = fit_line(lx, ls).slope;
        j["l1_slope"] = fit_line(lx, ll).slope;
    }
    write_text_file(out_path(c, "gaps.json"), j.dump(2) + "\n");
    std::printf("gap table written: %zu levels, subharmonic=%s\n", table.rows.size(),
                table.u_subharmonic ? "yes" : "no (warning)");
    return 0;
}

int cmd_estimate(const CommonOpts& c, const std::string& sol_csv, const std::string& sol_meta,
                 double eps0, int depth) {
    const GridFn u = read_grid_fn(sol_csv, sol_meta);
    const auto curve = modulus(u, eps0, depth, static_cast<std::uint64_t>(c.seed));
    std::string csv = "r,omega\n";
    for (size_t k = 0; k < curve.radii.size(); ++k)
        csv += format_double(curve.radii[k]) + "," + format_double(curve.omega[k]) + "\n";
    write_text_file(out_path(c, "modulus.csv"), csv);
    const auto fit = fit_exponent(curve);
    write_text_file(out_path(c, "fit.json"),
                    json{{"alpha_hat", fit.alpha_hat},
                         {"C_hat", fit.C_hat},
                         {"residual", fit.residual},
                         {"degenerate", fit.degenerate},
                         {"mode", curve.mode == ModulusMode::Exhaustive ? "exhaustive" : "sampled"},
                         {"truncated", curve.truncated}}
                            .dump(2) +
                        "\n");
    std::printf("fitted exponent %s (constant %s)\n", format_double(fit.alpha_hat).c_str(),
                format_double(fit.C_hat).c_str());
    return 0;
}

int cmd_verify(const CommonOpts& c, const std::string& sol_csv, const std::string& sol_meta,
               const std::string& kernel_path, double alpha, double eps0, int depth) {
    const GridFn u = read_grid_fn(sol_csv, sol_meta);
    const Kernel kernel = kernel_from_json(json::parse(read_text_file(kernel_path)));
    const auto cert = verify_holder_certificate(u, kernel, alpha, eps0, depth,
                                                static_cast<std::uint64_t>(c.seed));
    write_text_file(out_path(c, "certificate.json"), detail::certificate_to_json(cert).dump(2) + "\n");
    std::printf("certificate: %s (C1=%s C2=%s C=%s)\n", cert.pass ? "pass" : "FAIL",
                format_double(cert.C1).c_str(), format_double(cert.C2).c_str(),
                format_double(cert.C).c_str());
    return cert.pass ? 0 : 1;
}

int cmd_budget(const CommonOpts& c, double alpha, double p, int n, double gamma, double gamma_prime,
               double gamma_dblprime, bool write_files) {
    const auto b = budget(alpha, p, n, gamma, gamma_prime, gamma_dblprime);
    const json j = detail::budget_to_json(b);
    std::cout << j.dump(2) << "\n" << detail::budget_to_text(b);
    if (write_files) write_text_file(out_path(c, "budget.json"), j.dump(2) + "\n");
    return 0;
}

int cmd_barrier(const CommonOpts& c, const std::string& data_path) {
    const TaylorData data = taylor_data_from_json(json::parse(read_text_file(data_path)));
    const auto [bar, cert] = build_barrier(data, static_cast<std::uint64_t>(c.seed));
    const json j{{"C_bar", cert.C_bar},
                 {"eps_bar", cert.eps_bar},
                 {"r0", cert.r0},
                 {"margin", cert.margin},
                 {"min_eig_shifted", cert.min_eig_shifted},
                 {"samples", cert.samples},
                 {"ladder_steps", cert.ladder_steps}};
    write_text_file(out_path(c, "barrier.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_pipeline(const CommonOpts& c) {
    ExperimentConfig cfg = load_experiment(c);
    const auto rep = run_pipeline(cfg);
    std::cout << read_text_file((fs::path(cfg.out_dir) / "summary.txt").string());
    if (!rep.failed_stage.empty()) {
        std::cerr << "pipeline failed at stage " << rep.failed_stage << "\n";
        return 1;
    }
    return rep.all_assertions_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for Dirichlet problems of the complex Monge-Ampere equation"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string problem_path, sol_csv, sol_meta, kernel_path, eps_csv, data_path;
    double alpha = 0.5, p = 2.0, gamma = 0.2, gamma_prime = 0.2, gamma_dblprime = 0.2;
    double eps0 = 0.5;
    int n = 1, depth = 8;

    auto* solve = app.add_subcommand("solve", "solve a problem file (grid Poisson or radial)");
    add_common(solve, common);
    solve->add_option("problem", problem_path, "problem JSON file")->required();

    auto* moll = app.add_subcommand("mollify", "gap table of the regularization against the solution");
    add_common(moll, common);
    moll->add_option("--solution", sol_csv, "solution CSV")->required();
    moll->add_option("--meta", sol_meta, "solution JSON header")->required();
    moll->add_option("--kernel", kernel_path, "kernel spec JSON")->required();
    moll->add_option("--eps", eps_csv, "comma-separated scale list")->required();

    auto* est = app.add_subcommand("estimate-exponent", "modulus of continuity and fitted exponent");
    add_common(est, common);
    est->add_option("--solution", sol_csv)->required();
    est->add_option("--meta", sol_meta)->required();
    est->add_option("--eps0", eps0, "largest modulus radius");
    est->add_option("--depth", depth, "dyadic depth");

    auto* ver = app.add_subcommand("verify-lemma21", "dyadic regularity certificate for a solution");
    add_common(ver, common);
    ver->add_option("--solution", sol_csv)->required();
    ver->add_option("--meta", sol_meta)->required();
    ver->add_option("--kernel", kernel_path)->required();
    ver->add_option("--alpha", alpha, "Holder exponent to certify")->required();
    ver->add_option("--eps0", eps0, "top scale of the dyadic cascade");
    ver->add_option("--depth", depth, "dyadic depth");

    auto* bud = app.add_subcommand("budget", "exponent bookkeeping table");
    add_common(bud, common);
    bud->add_option("--alpha", alpha)->required();
    bud->add_option("--p", p)->required();
    bud->add_option("--n", n)->required();
    bud->add_option("--gamma", gamma)->required();
    bud->add_option("--gamma-prime", gamma_prime)->required();
    bud->add_option("--gamma-dblprime", gamma_dblprime)->required();
    bool budget_write = false;
    bud->add_flag("--write", budget_write, "also write budget.json to the output directory");

    auto* bar = app.add_subcommand("barrier", "build and certify the boundary barrier");
    add_common(bar, common);
    bar->add_option("--data", data_path, "TaylorData JSON")->required();

    auto* pipe = app.add_subcommand("pipeline", "end-to-end reproducible experiment");
    add_common(pipe, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(common, problem_path);
        if (moll->parsed()) return cmd_mollify(common, sol_csv, sol_meta, kernel_path, eps_csv);
        if (est->parsed()) return cmd_estimate(common, sol_csv, sol_meta, eps0, depth);
        if (ver->parsed()) return cmd_verify(common, sol_csv, sol_meta, kernel_path, alpha, eps0, depth);
        if (bud->parsed())
            return cmd_budget(common, alpha, p, n, gamma, gamma_prime, gamma_dblprime, budget_write);
        if (bar->parsed()) return cmd_barrier(common, data_path);
        if (pipe->parsed()) return cmd_pipeline(common);
    } catch (const config_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const json::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const kernel_inadmissible_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const inadmissible_profile_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const singular_data_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const barrier_construction_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::domain_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
