#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "stspgl/experiments.hpp"
#include "stspgl/io.hpp"

using namespace stspgl;

namespace {

struct SolveArgs {
    std::string method = "bp";
    double time_limit = 3600.0;
    double gap = 0.02;
    std::uint64_t seed = 1;
    std::optional<double> alpha, theta, rho;
    std::string dual_mode = "fast";
    bool minimality_cuts = false;
    bool original_bp = false;
};

void add_solve_options(CLI::App* cmd, SolveArgs& a, bool with_method = true) {
    if (with_method)
        cmd->add_option("--method", a.method, "mip | bp | heuristic | hybrid | deterministic")
            ->check(CLI::IsMember({"mip", "bp", "heuristic", "hybrid", "deterministic"}));
    cmd->add_option("--time-limit", a.time_limit, "seconds per solve")->check(CLI::PositiveNumber);
    cmd->add_option("--gap", a.gap, "relative gap target")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--seed", a.seed);
    cmd->add_option("--alpha", a.alpha, "override the instance's alpha")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--theta", a.theta, "override the instance's service level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--rho", a.rho, "override the instance's violation share")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--dual-mode", a.dual_mode, "Benders subproblem duals")->check(CLI::IsMember({"fast", "lp"}));
    cmd->add_flag("--minimality-cuts", a.minimality_cuts, "add cover minimality cuts to pricing");
    cmd->add_flag("--original-bp", a.original_bp, "experimental: price to convergence before each evaluation");
}

SearchConfig config_from(const SolveArgs& a) {
    SearchConfig cfg;
    cfg.time_limit_total = a.time_limit;
    cfg.rmp_time_limit = std::min(cfg.rmp_time_limit, a.time_limit);
    cfg.pricing_time_limit = std::min(cfg.pricing_time_limit, a.time_limit);
    cfg.gap_target = a.gap;
    cfg.seed = a.seed;
    cfg.dual_mode = a.dual_mode == "lp" ? DualMode::Lp : DualMode::Fast;
    cfg.minimality_cuts = a.minimality_cuts;
    cfg.original_bp = a.original_bp;
    cfg.validate();
    return cfg;
}

Instance load(const std::string& path, const SolveArgs& a) {
    auto inst = read_instance(path);
    if (!a.alpha && !a.theta && !a.rho) return inst;
    auto p = inst.params();
    if (a.alpha) p.alpha = *a.alpha;
    if (a.theta) p.theta = *a.theta;
    if (a.rho) p.rho = *a.rho;
    return inst.with_parameters(p);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text(path, text);
}

int exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Infeasible: return 2;
        case SolveStatus::TimeLimit: return 3;
        default: return 0;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic TSP with generalized latency: solvers and experiments"};
    app.require_subcommand(1);

    GeneratorOptions gen;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "write a random instance");
    generate->add_option("--nodes", gen.nodes)->check(CLI::Range(2, 100000));
    generate->add_option("--requests", gen.requests)->check(CLI::PositiveNumber);
    generate->add_option("--scenarios", gen.scenarios)->check(CLI::PositiveNumber);
    generate->add_option("--theta", gen.theta)->check(CLI::Range(0.0, 1.0));
    generate->add_option("--rho", gen.rho)->check(CLI::Range(0.0, 0.999999));
    generate->add_option("--alpha", gen.alpha)->check(CLI::Range(0.0, 1.0));
    generate->add_option("--seed", gen.seed);
    generate->add_option("--compulsory", gen.compulsory, "compulsory stops (0 = 20% of nodes)");
    generate->add_option("--p-present", gen.p_present, "chance a request has demand in a scenario");
    std::string gen_tsplib;
    generate->add_option("--tsplib", gen_tsplib, "take coordinates from an EUC_2D TSPLIB file")
        ->check(CLI::ExistingFile);
    generate->add_option("-o,--output", gen_out, "instance JSON (default stdout)");

    SolveArgs solve_args;
    std::string solve_file, solve_out, trace_out, cg_log_out, cut_log_out;
    auto* solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("file", solve_file)->required()->check(CLI::ExistingFile);
    add_solve_options(solve, solve_args);
    solve->add_option("--trace", trace_out, "bound trace CSV");
    solve->add_option("--cg-log", cg_log_out, "column generation log CSV");
    solve->add_option("--cut-log", cut_log_out, "Benders cut log");
    solve->add_option("-o,--output", solve_out, "result JSON (default stdout)");

    SolveArgs vss_args;
    std::string vss_file, vss_out;
    auto* vss = app.add_subcommand("vss", "mean-demand plan versus stochastic plan");
    vss->add_option("file", vss_file)->required()->check(CLI::ExistingFile);
    add_solve_options(vss, vss_args, false);
    vss->add_option("--method", vss_args.method)->check(CLI::IsMember({"mip", "bp", "heuristic", "hybrid"}));
    vss->add_option("-o,--output", vss_out, "comparison CSV (default stdout)");

    SolveArgs sweep_args;
    std::string sweep_file, sweep_dir;
    std::vector<double> theta_grid, rho_grid;
    auto* sw = app.add_subcommand("sweep", "design cost and tour size over a theta x rho grid");
    sw->add_option("file", sweep_file)->required()->check(CLI::ExistingFile);
    sw->add_option("--theta-grid", theta_grid)->required()->delimiter(',');
    sw->add_option("--rho-grid", rho_grid)->required()->delimiter(',');
    add_solve_options(sw, sweep_args);
    sw->add_option("--out-dir", sweep_dir, "writes design_cost.csv and nodes.csv (default stdout)");

    std::string bench_spec, bench_dir;
    auto* bn = app.add_subcommand("bench", "run a benchmark spec and write its table");
    bn->add_option("spec", bench_spec)->required()->check(CLI::ExistingFile);
    bn->add_option("--output-dir", bench_dir, "override the spec's output_dir");

    std::vector<std::string> agg_files;
    auto* agg = app.add_subcommand("aggregate", "rebuild a benchmark table from per-run JSON files");
    agg->add_option("files", agg_files)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            const auto inst = gen_tsplib.empty() ? generate_instance(gen)
                                                 : generate_instance(gen, read_tsplib(gen_tsplib).points);
            emit(gen_out, instance_to_json(inst));
            return 0;
        }
        if (*solve) {
            const auto inst = load(solve_file, solve_args);
            auto cfg = config_from(solve_args);
            std::unique_ptr<std::ofstream> cg_log, cut_log;
            if (!cg_log_out.empty()) {
                cg_log = std::make_unique<std::ofstream>(cg_log_out);
                cfg.cg_log = cg_log.get();
            }
            if (!cut_log_out.empty()) {
                cut_log = std::make_unique<std::ofstream>(cut_log_out);
                cfg.cut_log = cut_log.get();
            }
            const auto result = run_method(inst, solve_args.method, cfg);
            emit(solve_out, result_to_json(inst, result));
            if (!trace_out.empty()) write_trace_csv(trace_out, result.trace);
            std::cerr << solve_args.method << ": " << to_string(result.status) << " ub "
                      << format_number(result.upper_bound) << " lb " << format_number(result.lower_bound) << '\n';
            return exit_code(result.status);
        }
        if (*vss) {
            const auto inst = load(vss_file, vss_args);
            const auto row = vss_experiment(inst, vss_args.method, config_from(vss_args));
            emit(vss_out, comparison_csv_header() + "\n" + comparison_csv_row(row) + "\n");
            return 0;
        }
        if (*sw) {
            const auto inst = load(sweep_file, sweep_args);
            const auto res = sweep(inst, theta_grid, rho_grid, sweep_args.method, config_from(sweep_args));
            if (sweep_dir.empty()) {
                std::cout << "# design_cost\n" << sweep_matrix_csv(res, "design_cost");
                std::cout << "# nodes\n" << sweep_matrix_csv(res, "nodes");
            } else {
                std::filesystem::create_directories(sweep_dir);
                write_text(sweep_dir + "/design_cost.csv", sweep_matrix_csv(res, "design_cost"));
                write_text(sweep_dir + "/nodes.csv", sweep_matrix_csv(res, "nodes"));
            }
            return 0;
        }
        if (*bn) {
            auto spec = read_experiment_spec(bench_spec);
            if (!bench_dir.empty()) spec.output_dir = bench_dir;
            std::cout << bench_csv_header() << '\n';
            for (const auto& r : bench(spec)) std::cout << bench_csv_row(r) << '\n';
            return 0;
        }
        if (*agg) {
            std::cout << bench_csv_header() << '\n';
            for (const auto& r : aggregate_results(agg_files)) std::cout << bench_csv_row(r) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
