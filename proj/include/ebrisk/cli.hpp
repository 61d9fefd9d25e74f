#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ebrisk/bounds.hpp"
#include "ebrisk/errors.hpp"
#include "ebrisk/io.hpp"
#include "ebrisk/prior.hpp"
#include "ebrisk/risk.hpp"
#include "ebrisk/search.hpp"

namespace ebrisk {

// Exit-code contract: 0 success, 1 violated bound (bounds subcommand only),
// 2 invalid input of any kind.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitBadInput = 2;

// The CLI refuses noise levels below this; the library itself only requires
// sigma > 0, but quadrature outputs stop being trustworthy well above the
// underflow scale.
inline constexpr double kSigmaFloor = 1e-6;

namespace detail {

inline double parse_positive_sigma(double sigma) {
    if (!(sigma >= kSigmaFloor) || !std::isfinite(sigma))
        throw InvalidSigma("sigma: must be a finite real >= 1e-6 (got " + fmt_double(sigma) +
                           ")");
    return sigma;
}

inline std::vector<double> parse_grid(const std::string& csv, const char* field) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = std::min(csv.find(',', pos), csv.size());
        const std::string tok = csv.substr(pos, comma - pos);
        if (tok.empty())
            throw InvalidSpec(std::string(field) + ": empty entry in grid '" + csv + "'");
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidSpec(std::string(field) + ": '" + tok + "' is not a number");
        }
        pos = comma + 1;
    }
    for (double v : out) (void)parse_positive_sigma(v);
    return out;
}

inline void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw InvalidSpec("output: cannot open '" + output_path + "' for writing");
    out << text;
    if (!out) throw InvalidSpec("output: failed writing '" + output_path + "'");
}

struct SpecOptions {
    QuadratureSpec spec;

    void attach(CLI::App* cmd) {
        cmd->add_option("--nodes", spec.gh_nodes, "Gauss-Hermite node count")
            ->capture_default_str();
        cmd->add_option("--theta-nodes", spec.theta_nodes,
                        "outer nodes per Gaussian-mixture component")
            ->capture_default_str();
        cmd->add_option("--samples", spec.mc_samples, "Monte Carlo sample count")
            ->capture_default_str();
        cmd->add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
    }
};

}  // namespace detail

// Parse arguments, run one subcommand, write the report. Never throws; all
// diagnostics go to stderr and the exit-code contract above applies.
inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Disagreement risk of posterior-mean rules under Gaussian noise"};
    app.require_subcommand(1);

    // --- risk ---------------------------------------------------------------
    auto* risk_cmd = app.add_subcommand("risk", "R and M for one (g0, g1, sigma)");
    std::string risk_g0, risk_g1, risk_out;
    double risk_sigma = 1.0;
    std::string risk_method = "quad";
    detail::SpecOptions risk_spec;
    risk_cmd->add_option("--g0", risk_g0, "path to g0 prior JSON")->required();
    risk_cmd->add_option("--g1", risk_g1, "path to g1 prior JSON")->required();
    risk_cmd->add_option("--sigma", risk_sigma, "noise standard deviation")->required();
    risk_cmd->add_option("--method", risk_method, "quad or mc")->capture_default_str();
    risk_cmd->add_option("--output", risk_out, "write report here instead of stdout");
    risk_spec.attach(risk_cmd);

    // --- bounds -------------------------------------------------------------
    auto* bounds_cmd = app.add_subcommand("bounds", "verify every named inequality");
    std::string bounds_g0, bounds_g1, bounds_out;
    double bounds_sigma = 1.0;
    std::optional<double> bounds_tail_k, bounds_tail_c;
    detail::SpecOptions bounds_spec;
    bounds_cmd->add_option("--g1", bounds_g1, "path to g1 prior JSON")->required();
    bounds_cmd->add_option("--g0", bounds_g0, "path to g0 prior JSON (defaults to g1)");
    bounds_cmd->add_option("--sigma", bounds_sigma, "noise standard deviation")->required();
    bounds_cmd->add_option("--tail-k", bounds_tail_k, "tail exponent k > 2");
    bounds_cmd->add_option("--tail-c", bounds_tail_c, "tail constant c > 0");
    bounds_cmd->add_option("--output", bounds_out, "write report here instead of stdout");
    bounds_spec.attach(bounds_cmd);

    // --- sweep --------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "R and M across a sigma grid");
    std::string sweep_g0, sweep_g1, sweep_out, sweep_sigmas, sweep_format = "csv";
    detail::SpecOptions sweep_spec;
    sweep_cmd->add_option("--g0", sweep_g0, "path to g0 prior JSON")->required();
    sweep_cmd->add_option("--g1", sweep_g1, "path to g1 prior JSON")->required();
    sweep_cmd->add_option("--sigmas", sweep_sigmas, "comma-separated sigma grid")->required();
    sweep_cmd->add_option("--format", sweep_format, "csv or json")->capture_default_str();
    sweep_cmd->add_option("--output", sweep_out, "write report here instead of stdout");
    sweep_spec.attach(sweep_cmd);

    // --- search -------------------------------------------------------------
    auto* search_cmd =
        app.add_subcommand("search", "maximize R over constrained discrete priors");
    SearchConfig search_cfg;
    std::string search_out, search_sigmas = "0.125,0.25,0.5,1,2,4,8";
    detail::SpecOptions search_spec;
    search_cmd->add_option("--atoms-g0", search_cfg.n_atoms_g0, "atom budget for g0")
        ->capture_default_str();
    search_cmd->add_option("--atoms-g1", search_cfg.n_atoms_g1, "atom budget for g1")
        ->capture_default_str();
    search_cmd->add_option("--var-cap", search_cfg.var_cap, "variance cap V")
        ->capture_default_str();
    search_cmd->add_option("--sigmas", search_sigmas, "comma-separated sigma grid")
        ->capture_default_str();
    search_cmd->add_option("--restarts", search_cfg.restarts, "number of restarts")
        ->capture_default_str();
    search_cmd->add_option("--iters", search_cfg.iters, "iterations per restart")
        ->capture_default_str();
    search_cmd->add_option("--search-seed", search_cfg.seed, "search RNG seed")
        ->capture_default_str();
    std::optional<double> search_tail_k, search_tail_c;
    search_cmd->add_option("--tail-k", search_tail_k, "tail exponent k > 2 for g1");
    search_cmd->add_option("--tail-c", search_tail_c, "tail constant c > 0 for g1");
    search_cmd->add_option("--output", search_out, "write report here instead of stdout");
    search_spec.attach(search_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    try {
        if (risk_cmd->parsed()) {
            detail::parse_positive_sigma(risk_sigma);
            if (risk_method != "quad" && risk_method != "mc")
                throw InvalidSpec("method: must be 'quad' or 'mc' (got '" + risk_method + "')");
            const Prior g0 = load_prior(risk_g0);
            const Prior g1 = load_prior(risk_g1);
            const RiskReport rep = risk_method == "quad"
                                       ? risk_quadrature(g0, g1, risk_sigma, risk_spec.spec)
                                       : risk_monte_carlo(g0, g1, risk_sigma, risk_spec.spec);
            json j{{"command", "risk"},
                   {"spec", spec_to_json(risk_spec.spec)},
                   {"report", report_to_json(rep)}};
            detail::emit(j.dump(2) + "\n", risk_out);
            return kExitOk;
        }

        if (bounds_cmd->parsed()) {
            detail::parse_positive_sigma(bounds_sigma);
            if (bounds_tail_k.has_value() != bounds_tail_c.has_value())
                throw InvalidSpec("tail-k and tail-c must be given together");
            const Prior g1 = load_prior(bounds_g1);
            const Prior g0 = bounds_g0.empty() ? g1 : load_prior(bounds_g0);
            std::optional<TailCondition> tc;
            if (bounds_tail_k) tc.emplace(*bounds_tail_k, *bounds_tail_c);
            const auto reports = check_all_bounds(g0, g1, bounds_sigma, bounds_spec.spec, tc);
            json arr = json::array();
            bool all_ok = true;
            for (const BoundReport& r : reports) {
                arr.push_back(report_to_json(r));
                all_ok = all_ok && r.satisfied;
            }
            json j{{"command", "bounds"},
                   {"spec", spec_to_json(bounds_spec.spec)},
                   {"all_satisfied", all_ok},
                   {"reports", arr}};
            detail::emit(j.dump(2) + "\n", bounds_out);
            return all_ok ? kExitOk : kExitViolated;
        }

        if (sweep_cmd->parsed()) {
            if (sweep_format != "csv" && sweep_format != "json")
                throw InvalidSpec("format: must be 'csv' or 'json' (got '" + sweep_format +
                                  "')");
            const Prior g0 = load_prior(sweep_g0);
            const Prior g1 = load_prior(sweep_g1);
            const auto grid = detail::parse_grid(sweep_sigmas, "sigmas");
            const auto reports = sweep_sigma(g0, g1, grid, sweep_spec.spec);
            if (sweep_format == "csv") {
                detail::emit(sweep_to_csv(reports, sweep_spec.spec), sweep_out);
            } else {
                json arr = json::array();
                for (const RiskReport& r : reports) arr.push_back(report_to_json(r));
                json j{{"command", "sweep"},
                       {"spec", spec_to_json(sweep_spec.spec)},
                       {"reports", arr}};
                detail::emit(j.dump(2) + "\n", sweep_out);
            }
            return kExitOk;
        }

        // search
        search_cfg.sigma_grid = detail::parse_grid(search_sigmas, "sigmas");
        if (search_tail_k.has_value() != search_tail_c.has_value())
            throw InvalidSpec("tail-k and tail-c must be given together");
        search_cfg.tail_k = search_tail_k;
        search_cfg.tail_c = search_tail_c;
        const SearchResult result = maximize_risk(search_cfg, search_spec.spec);
        json j{{"command", "search"},
               {"spec", spec_to_json(search_spec.spec)},
               {"config",
                {{"n_atoms_g0", search_cfg.n_atoms_g0},
                 {"n_atoms_g1", search_cfg.n_atoms_g1},
                 {"var_cap", search_cfg.var_cap},
                 {"sigma_grid", search_cfg.sigma_grid},
                 {"restarts", search_cfg.restarts},
                 {"iters", search_cfg.iters},
                 {"seed", search_cfg.seed}}},
               {"result", search_result_to_json(result)}};
        if (search_cfg.tail_k) {
            j["config"]["tail_k"] = *search_cfg.tail_k;
            j["config"]["tail_c"] = *search_cfg.tail_c;
        }
        detail::emit(j.dump(2) + "\n", search_out);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

}  // namespace ebrisk
