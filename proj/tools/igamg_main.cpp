#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "igamg/bench.hpp"

namespace {

bool parse_sigma(const std::string& text, igamg::SigmaMode& mode, double& scale) {
    if (text == "theory") {
        mode = igamg::SigmaMode::theory;
        return true;
    }
    if (text == "preset") {
        mode = igamg::SigmaMode::preset;
        return true;
    }
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size() || !(v > 0.0)) return false;
        mode = igamg::SigmaMode::explicit_value;
        scale = v;
        return true;
    } catch (...) {
        return false;
    }
}

bool parse_range(const std::string& text, int& lo, int& hi) {
    const auto sep = text.find("..");
    try {
        if (sep == std::string::npos) {
            lo = hi = std::stoi(text);
        } else {
            lo = std::stoi(text.substr(0, sep));
            hi = std::stoi(text.substr(sep + 2));
        }
        return true;
    } catch (...) {
        return false;
    }
}

const std::map<std::string, igamg::CycleType> cycle_names{
    {"twogrid", igamg::CycleType::two_grid},
    {"v", igamg::CycleType::v_cycle},
    {"w", igamg::CycleType::w_cycle}};

const std::map<std::string, igamg::SolverKind> solver_names{{"mg", igamg::SolverKind::mg},
                                                            {"pcg", igamg::SolverKind::pcg}};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-free multigrid solver for tensor-product B-spline discretizations of "
                 "-lap(u) + u = f on (0,1)^d"};
    app.require_subcommand(1);

    igamg::RunConfig cfg;
    std::string sigma_text = "preset";
    std::string output_format = "json";
    int smoothing_steps = -1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--dim", cfg.d, "space dimension d")->check(CLI::PositiveNumber);
        cmd->add_option("--degree", cfg.p, "spline degree p")->check(CLI::PositiveNumber);
        cmd->add_option("--cycle", cfg.cycle, "cycle type")
            ->transform(CLI::CheckedTransformer(cycle_names, CLI::ignore_case));
        cmd->add_option("--solver", cfg.solver, "solver")
            ->transform(CLI::CheckedTransformer(solver_names, CLI::ignore_case));
        cmd->add_option("--smoothing-steps", smoothing_steps, "pre- and post-smoothing steps");
        cmd->add_option("--nu-pre", cfg.nu_pre, "pre-smoothing steps");
        cmd->add_option("--nu-post", cfg.nu_post, "post-smoothing steps");
        cmd->add_option("--tau", cfg.tau, "smoother damping parameter");
        cmd->add_option("--sigma", sigma_text, "sigma rule: theory | preset | <coefficient of 1/h^2>");
        cmd->add_option("--tol", cfg.tol, "relative residual reduction");
        cmd->add_option("--max-iter", cfg.max_iter, "iteration limit");
        cmd->add_option("--seed", cfg.seed, "seed for randomized checks");
    };

    CLI::App* solve = app.add_subcommand("solve", "run one solve of the model problem");
    add_common(solve);
    solve->add_option("--level", cfg.level, "refinement level (m = 2^level spans per axis)")
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--output", output_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* table = app.add_subcommand("table", "sweep (level, degree) cells and print a CSV table");
    add_common(table);
    std::string levels_text = "5..8", degrees_text = "2..10", json_out;
    table->add_option("--levels", levels_text, "level range a..b");
    table->add_option("--degrees", degrees_text, "degree range a..b");
    table->add_option("--json-out", json_out, "write full run records to this JSON file");

    CLI::App* check = app.add_subcommand("check", "run invariant check suites");
    std::string suite = "all";
    igamg::CheckOptions copts;
    check->add_option("--suite", suite, "splitting | smoother | kron | coarse-approx | all");
    check->add_option("--max-p", copts.max_p, "largest spline degree to check");
    check->add_option("--max-level", copts.max_level, "largest refinement level to check");
    check->add_option("--seed", copts.seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!parse_sigma(sigma_text, cfg.sigma_mode, cfg.sigma_scale)) {
        std::cerr << "invalid --sigma value: " << sigma_text << '\n';
        return 2;
    }
    if (smoothing_steps >= 0) cfg.nu_pre = cfg.nu_post = smoothing_steps;
    if (cfg.nu_pre + cfg.nu_post < 1) {
        std::cerr << "at least one smoothing step is required\n";
        return 2;
    }

    try {
        if (solve->parsed()) {
            const igamg::RunRecord rec = igamg::run_single(cfg);
            if (output_format == "csv")
                std::cout << igamg::record_csv_header() << '\n' << igamg::record_csv_row(rec) << '\n';
            else
                std::cout << igamg::record_json(rec) << '\n';
            return rec.converged ? 0 : 3;
        }
        if (table->parsed()) {
            int llo = 0, lhi = 0, plo = 0, phi = 0;
            if (!parse_range(levels_text, llo, lhi) || !parse_range(degrees_text, plo, phi)) {
                std::cerr << "invalid range (expected a..b)\n";
                return 2;
            }
            const igamg::TableResult result = igamg::run_table(cfg, llo, lhi, plo, phi);
            std::cout << igamg::table_csv(result);
            if (!json_out.empty()) {
                std::ofstream os(json_out);
                if (!os) {
                    std::cerr << "cannot write " << json_out << '\n';
                    return 2;
                }
                os << igamg::table_json(result) << '\n';
            }
            return 0;
        }
        if (check->parsed()) return igamg::run_check_suite(suite, copts, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
