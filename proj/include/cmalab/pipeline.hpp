#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cmalab/budget.hpp"
#include "cmalab/certificate.hpp"
#include "cmalab/config.hpp"
#include "cmalab/instances.hpp"
#include "cmalab/mollify.hpp"
#include "cmalab/poisson.hpp"
#include "cmalab/serialize.hpp"

namespace cmalab {

/// Reproducible end-to-end experiment: every field has a default, so an
/// empty config runs the reference instance (n = 1, p = 1.5, beta = 1/2
/// power density, Lipschitz boundary data, resolution 256).
struct ExperimentConfig {
    std::string name = "default";
    std::uint64_t seed = 1;
    // instance
    std::string density_kind = "power";  // power | constant | zero
    double beta = 0.5;
    double density_value = 1.0;          // constant density
    std::string boundary_kind = "power_trace";  // see boundary_function()
    double boundary_value = 0.5;               // parameter of the boundary kind
    double boundary_alpha = 1.0;                // Holder exponent of the data
    double p = 1.5;
    int resolution = 256;
    // budget
    double gamma = 0.24, gamma_prime = 0.24, gamma_dblprime = 0.24;
    // regularization
    std::string kernel_kind = "ball";           // gap-table kernel
    std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.025};
    // solver
    double omega = 1.9;
    long max_iterations = 100000;
    double tolerance = 1e-9;
    // analysis
    double modulus_eps0 = 0.5;
    int modulus_depth = 8;
    double cert_eps0 = 2.0;
    int cert_depth = 8;
    std::string out_dir = "out";
};

inline ExperimentConfig experiment_from_config(const ConfigFile& cf) {
    static const std::set<std::pair<std::string, std::string>> known = {
        {"experiment", "name"},       {"experiment", "seed"},       {"experiment", "out_dir"},
        {"instance", "density"},      {"instance", "beta"},         {"instance", "density_value"},
        {"instance", "boundary"},     {"instance", "boundary_value"}, {"instance", "boundary_alpha"},
        {"instance", "p"},            {"instance", "resolution"},
        {"budget", "gamma"},          {"budget", "gamma_prime"},    {"budget", "gamma_dblprime"},
        {"regularization", "kernel"}, {"regularization", "eps_list"},
        {"solver", "omega"},          {"solver", "max_iterations"}, {"solver", "tolerance"},
        {"analysis", "modulus_eps0"}, {"analysis", "modulus_depth"},
        {"analysis", "cert_eps0"},    {"analysis", "cert_depth"},
    };
    for (const auto& [sec, kv] : cf.sections)
        for (const auto& [key, val] : kv)
            if (!known.count({sec, key}))
                throw config_error("config: unknown key '" + sec + "." + key + "'");

    ExperimentConfig e;
    e.name = cf.get("experiment", "name", e.name);
    e.seed = static_cast<std::uint64_t>(cf.get_long("experiment", "seed", static_cast<long>(e.seed)));
    e.out_dir = cf.get("experiment", "out_dir", e.out_dir);
    e.density_kind = cf.get("instance", "density", e.density_kind);
    e.beta = cf.get_double("instance", "beta", e.beta);
    e.density_value = cf.get_double("instance", "density_value", e.density_value);
    e.boundary_kind = cf.get("instance", "boundary", e.boundary_kind);
    e.boundary_value = cf.get_double("instance", "boundary_value", e.beta);
    e.boundary_alpha = cf.get_double("instance", "boundary_alpha", e.boundary_alpha);
    e.p = cf.get_double("instance", "p", e.p);
    e.resolution = static_cast<int>(cf.get_long("instance", "resolution", e.resolution));
    e.gamma = cf.get_double("budget", "gamma", e.gamma);
    e.gamma_prime = cf.get_double("budget", "gamma_prime", e.gamma_prime);
    e.gamma_dblprime = cf.get_double("budget", "gamma_dblprime", e.gamma_dblprime);
    e.kernel_kind = cf.get("regularization", "kernel", e.kernel_kind);
    if (cf.has("regularization", "eps_list")) {
        e.eps_list.clear();
        std::string v = cf.get("regularization", "eps_list", "");
        size_t pos = 0;
        while (pos < v.size()) {
            size_t comma = v.find(',', pos);
            if (comma == std::string::npos) comma = v.size();
            const std::string tok = ConfigFile::trim(v.substr(pos, comma - pos));
            if (!tok.empty()) e.eps_list.push_back(parse_double(tok));
            pos = comma + 1;
        }
        if (e.eps_list.empty()) throw config_error("config: empty regularization.eps_list");
    }
    e.omega = cf.get_double("solver", "omega", e.omega);
    e.max_iterations = cf.get_long("solver", "max_iterations", e.max_iterations);
    e.tolerance = cf.get_double("solver", "tolerance", e.tolerance);
    e.modulus_eps0 = cf.get_double("analysis", "modulus_eps0", e.modulus_eps0);
    e.modulus_depth = static_cast<int>(cf.get_long("analysis", "modulus_depth", e.modulus_depth));
    e.cert_eps0 = cf.get_double("analysis", "cert_eps0", e.cert_eps0);
    e.cert_depth = static_cast<int>(cf.get_long("analysis", "cert_depth", e.cert_depth));
    return e;
}

struct PipelineAssertion {
    std::string name;
    double measured = 0.0, required = 0.0;
    bool pass = false;
};

struct PipelineReport {
    ExperimentConfig config;
    HolderBudget bud;
    double solve_residual = 0.0;
    long solve_iterations = 0;
    double solve_seconds = 0.0;
    double exact_sup_error = -1.0;  // vs. closed-form solution, when known
    GapTable gaps;
    double sup_slope = 0.0, l1_slope = 0.0;
    bool gaps_fitted = false;
    ModulusCurve curve;
    ExponentFit fit;
    RegularityCertificate cert;
    std::vector<PipelineAssertion> assertions;
    std::string failed_stage;  // empty on full success

    bool all_assertions_pass() const {
        for (const auto& a : assertions)
            if (!a.pass) return false;
        return failed_stage.empty();
    }
};

namespace detail {

/// Gap table rows with the local dyadic slope between consecutive scales
/// (log-ratio in the gap over log-ratio in eps; empty on the first row).
inline std::string gap_table_csv(const GapTable& t) {
    std::string csv = "eps,sup_gap,l1_gap,sup_slope,l1_slope,points\n";
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        csv += format_double(row.eps) + "," + format_double(row.sup_gap) + "," +
               format_double(row.l1_gap) + ",";
        if (i > 0) {
            const auto& prev = t.rows[i - 1];
            const double dl = std::log(row.eps / prev.eps);
            if (row.sup_gap > 0.0 && prev.sup_gap > 0.0)
                csv += format_double(std::log(row.sup_gap / prev.sup_gap) / dl);
            csv += ",";
            if (row.l1_gap > 0.0 && prev.l1_gap > 0.0)
                csv += format_double(std::log(row.l1_gap / prev.l1_gap) / dl);
        } else {
            csv += ",";
        }
        csv += "," + std::to_string(row.points) + "\n";
    }
    return csv;
}

inline json gaps_to_json(const PipelineReport& r) {
    json rows = json::array();
    for (const auto& row : r.gaps.rows)
        rows.push_back({{"eps", row.eps},
                        {"sup_gap", row.sup_gap},
                        {"l1_gap", row.l1_gap},
                        {"points", row.points}});
    json j{{"rows", rows},
           {"u_subharmonic", r.gaps.u_subharmonic},
           {"submean_violation", r.gaps.submean_violation}};
    if (r.gaps_fitted) {
        j["sup_slope"] = r.sup_slope;
        j["l1_slope"] = r.l1_slope;
    }
    return j;
}

inline json certificate_to_json(const RegularityCertificate& c) {
    json steps = json::array();
    for (const auto& s : c.steps)
        steps.push_back({{"r", s.r},
                         {"omega", s.omega},
                         {"omega_near_boundary", s.omega_a},
                         {"omega_deep", s.omega_b},
                         {"omega_uncovered", s.omega_c},
                         {"uncovered_pairs", s.uncovered_pairs},
                         {"bound_near_boundary", s.bound_a},
                         {"bound_deep", s.bound_b},
                         {"near_boundary_ok", s.case_a_ok},
                         {"deep_ok", s.case_b_ok},
                         {"iterate_ok", s.iterate_ok}});
    return json{{"alpha", c.alpha},
                {"eps0", c.eps0},
                {"kernel_support", c.kernel_R},
                {"diameter", c.diam},
                {"scale_lambda", c.scale_lambda},
                {"R_eff", c.R_eff},
                {"eps0_eff", c.eps0_eff},
                {"C1", c.C1},
                {"C2", c.C2},
                {"kappa", c.kappa},
                {"delta_eff", c.delta_eff},
                {"C3", c.C3},
                {"C4", c.C4},
                {"C", c.C},
                {"worst_conclusion_ratio", c.worst_conclusion_ratio},
                {"hypotheses_ok", c.hypotheses_ok},
                {"conclusion_ok", c.conclusion_ok},
                {"iteration_ok", c.iteration_ok},
                {"pass", c.pass},
                {"note", c.note},
                {"steps", steps}};
}

inline json budget_to_json(const HolderBudget& b) {
    return json{{"alpha", b.alpha},
                {"p", b.p},
                {"p_star", b.pstar},
                {"n", b.n},
                {"gamma0", b.gamma0},
                {"gamma_n", b.gamma_n},
                {"gamma", b.gamma},
                {"gamma_prime", b.gamma_prime},
                {"gamma_dblprime", b.gamma_dblprime},
                {"beta", b.beta},
                {"alpha_prime", b.alpha_prime},
                {"regime", to_string(b.regime)}};
}

inline std::string budget_to_text(const HolderBudget& b) {
    auto line = [](const std::string& k, double v) {
        std::string s = "  " + k;
        s.resize(20, ' ');
        return s + format_double(v) + "\n";
    };
    std::string out = "holder budget\n";
    out += line("alpha", b.alpha);
    out += line("p", b.p);
    out += line("p*", b.pstar);
    out += line("n", b.n);
    out += line("gamma0", b.gamma0);
    out += line("gamma_n", b.gamma_n);
    out += line("gamma", b.gamma);
    out += line("gamma'", b.gamma_prime);
    out += line("gamma''", b.gamma_dblprime);
    out += line("beta", b.beta);
    out += line("alpha'", b.alpha_prime);
    out += "  regime            " + std::string(to_string(b.regime)) + "\n";
    return out;
}

}  // namespace detail

/// solve -> mollification gap table -> modulus curve -> regularity
/// certificate -> exponent-budget comparison. Emits CSV/JSON artifacts and
/// a traceability map under out_dir; partial bundles name the failed stage.
inline PipelineReport run_pipeline(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    PipelineReport rep;
    rep.config = cfg;
    fs::create_directories(cfg.out_dir);
    const auto out = [&](const std::string& f) { return (fs::path(cfg.out_dir) / f).string(); };

    // exponent budget (pure arithmetic, cannot fail for validated configs)
    rep.bud = budget(cfg.boundary_alpha, cfg.p, 1, cfg.gamma, cfg.gamma_prime, cfg.gamma_dblprime);

    GridFn u;
    bool density_nonzero = true;
    std::optional<std::function<double(std::span<const double>)>> exact;
    std::string stage = "solve";
    try {
        auto geom = make_grid_geometry(Domain::unit_ball(1), cfg.resolution);
        GridFn f;
        if (cfg.density_kind == "power") {
            f = sample_power_density(geom, cfg.beta);
            const double tb = 2.0 * cfg.beta;
            exact = [tb](std::span<const double> q) {
                return std::pow(q[0] * q[0] + q[1] * q[1], 0.5 * tb);
            };
        } else if (cfg.density_kind == "constant") {
            f = sample_constant_density(geom, cfg.density_value);
            if (cfg.density_value == 0.0) density_nonzero = false;
        } else if (cfg.density_kind == "zero") {
            f = sample_constant_density(geom, 0.0);
            density_nonzero = false;
        } else {
            throw config_error("pipeline: unknown density kind '" + cfg.density_kind + "'");
        }
        auto phi = sample_boundary_data(geom, boundary_function(cfg.boundary_kind, cfg.boundary_value));
        if (cfg.density_kind == "constant" && cfg.density_value == 1.0 && cfg.boundary_kind == "abs2")
            exact = [](std::span<const double> q) { return q[0] * q[0] + q[1] * q[1]; };
        if (!density_nonzero && cfg.boundary_kind == "harmonic")
            exact = [](std::span<const double> q) { return q[0] * q[0] - q[1] * q[1]; };

        const auto t0 = std::chrono::steady_clock::now();
        auto sol = solve_poisson_n1(f, phi, {cfg.omega, cfg.max_iterations, cfg.tolerance});
        rep.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.solve_residual = sol.residual;
        rep.solve_iterations = sol.iterations;
        u = std::move(sol.u);
        if (exact) {
            double worst = 0.0;
            for (int i : geom->interior) {
                const auto pt = geom->point(i);
                worst = std::max(worst, std::abs(u.values[i] - (*exact)(pt)));
            }
            rep.exact_sup_error = worst;
        }
        write_grid_fn(u, out("solution.csv"), out("solution.json"));
        write_text_file(out("report.json"),
                        json{{"residual", rep.solve_residual},
                             {"iterations", rep.solve_iterations},
                             {"runtime_seconds", rep.solve_seconds},
                             {"exact_sup_error", rep.exact_sup_error}}
                                .dump(2) +
                            "\n");

        stage = "mollify";
        Kernel gap_kernel = Kernel::make(cfg.kernel_kind == "ball"          ? KernelKind::BallIndicator
                                         : cfg.kernel_kind == "smooth_bump" ? KernelKind::SmoothBump
                                                                            : KernelKind::PlateauBump,
                                         2);
        rep.gaps = subharmonic_gap(u, gap_kernel, cfg.eps_list);
        {
            bool positive = !rep.gaps.rows.empty();
            for (const auto& row : rep.gaps.rows)
                if (!(row.sup_gap > 1e-12 && row.l1_gap > 1e-14)) positive = false;
            if (positive) {
                std::vector<double> lx, ls, ll;
                for (const auto& row : rep.gaps.rows) {
                    lx.push_back(std::log(row.eps));
                    ls.push_back(std::log(row.sup_gap));
                    ll.push_back(std::log(row.l1_gap));
                }
                rep.sup_slope = fit_line(lx, ls).slope;
                rep.l1_slope = fit_line(lx, ll).slope;
                rep.gaps_fitted = true;
            }
            write_text_file(out("gaps.csv"), detail::gap_table_csv(rep.gaps));
            write_text_file(out("gaps.json"), detail::gaps_to_json(rep).dump(2) + "\n");
        }

        stage = "modulus";
        rep.curve = modulus(u, cfg.modulus_eps0, cfg.modulus_depth, cfg.seed);
        rep.fit = fit_exponent(rep.curve);
        {
            std::string csv = "r,omega\n";
            for (size_t k = 0; k < rep.curve.radii.size(); ++k)
                csv += format_double(rep.curve.radii[k]) + "," + format_double(rep.curve.omega[k]) + "\n";
            write_text_file(out("modulus.csv"), csv);
            write_text_file(out("fit.json"),
                            json{{"alpha_hat", rep.fit.alpha_hat},
                                 {"C_hat", rep.fit.C_hat},
                                 {"residual", rep.fit.residual},
                                 {"degenerate", rep.fit.degenerate},
                                 {"mode", rep.curve.mode == ModulusMode::Exhaustive ? "exhaustive" : "sampled"},
                                 {"sample_pairs", rep.curve.sample_pairs}}
                                    .dump(2) +
                                "\n");
        }

        stage = "certificate";
        Kernel cert_kernel = Kernel::make(KernelKind::PlateauBump, 2);
        rep.cert = verify_holder_certificate(u, cert_kernel, rep.bud.alpha_prime, cfg.cert_eps0,
                                             cfg.cert_depth, cfg.seed);
        write_text_file(out("certificate.json"), detail::certificate_to_json(rep.cert).dump(2) + "\n");

        stage = "budget";
        write_text_file(out("budget.json"), detail::budget_to_json(rep.bud).dump(2) + "\n");
        stage = "";
    } catch (const std::exception& ex) {
        rep.failed_stage = stage + ": " + ex.what();
    }

    // predicted inequalities, asserted at pinned tolerances
    if (rep.failed_stage.empty()) {
        auto push = [&](const std::string& name, double measured, double required, bool pass) {
            rep.assertions.push_back({name, measured, required, pass});
        };
        push("global-exponent-at-least-alpha-prime", rep.fit.alpha_hat, rep.bud.alpha_prime - 0.05,
             !rep.fit.degenerate && rep.fit.alpha_hat >= rep.bud.alpha_prime - 0.05);
        if (density_nonzero && rep.gaps_fitted) {
            push("l1-gap-slope-at-least-one-plus-beta", rep.l1_slope, 1.0 + rep.bud.beta - 0.1,
                 rep.l1_slope >= 1.0 + rep.bud.beta - 0.1);
            push("sup-gap-slope-at-least-alpha-prime", rep.sup_slope, rep.bud.alpha_prime - 0.1,
                 rep.sup_slope >= rep.bud.alpha_prime - 0.1);
        }
        push("regularity-certificate-passes", rep.cert.pass ? 1.0 : 0.0, 1.0, rep.cert.pass);
    }

    // traceability: every reported number carries a stable quantity anchor
    {
        json t;
        auto put = [&](const std::string& key, double value, const std::string& anchor) {
            t[key] = {{"value", value}, {"anchor", anchor}};
        };
        put("normalization.det_to_ddc", det_to_ddc_factor(1), "density-normalization-constant");
        put("budget.gamma0", rep.bud.gamma0, "critical-exponent-gamma0");
        put("budget.gamma_n", rep.bud.gamma_n, "critical-exponent-gamma-n");
        put("budget.beta", rep.bud.beta, "boundary-holder-exponent");
        put("budget.alpha_prime", rep.bud.alpha_prime, "global-holder-exponent");
        put("solve.residual", rep.solve_residual, "discrete-operator-residual");
        if (rep.gaps_fitted) {
            put("gaps.sup_slope", rep.sup_slope, "sup-gap-rate-vs-global-exponent");
            put("gaps.l1_slope", rep.l1_slope, "l1-gap-rate-one-plus-beta");
        }
        put("fit.alpha_hat", rep.fit.alpha_hat, "measured-global-exponent");
        put("certificate.C1", rep.cert.C1, "boundary-holder-constant");
        put("certificate.C2", rep.cert.C2, "regularization-gap-constant");
        put("certificate.kappa", rep.cert.kappa, "kernel-plateau-mass");
        put("certificate.C", rep.cert.C, "dyadic-iteration-constant");
        write_text_file(out("traceability.json"), t.dump(2) + "\n");
    }

    // plain-text summary
    {
        std::string s = "experiment: " + cfg.name + "\n";
        s += detail::budget_to_text(rep.bud);
        s += "solve: residual " + format_double(rep.solve_residual) + ", iterations " +
             std::to_string(rep.solve_iterations) + "\n";
        if (rep.exact_sup_error >= 0.0)
            s += "sup error vs closed form: " + format_double(rep.exact_sup_error) + "\n";
        if (rep.gaps_fitted)
            s += "gap slopes: sup " + format_double(rep.sup_slope) + ", L1 " + format_double(rep.l1_slope) +
                 "\n";
        s += "measured exponent: " + format_double(rep.fit.alpha_hat) + "\n";
        s += "certificate: " + std::string(rep.cert.pass ? "pass" : "FAIL") + "\n";
        for (const auto& a : rep.assertions)
            s += std::string(a.pass ? "[ok]   " : "[FAIL] ") + a.name + ": " + format_double(a.measured) +
                 " vs " + format_double(a.required) + "\n";
        if (!rep.failed_stage.empty()) s += "failed stage: " + rep.failed_stage + "\n";
        write_text_file(out("summary.txt"), s);
    }
    return rep;
}

}  // namespace cmalab
