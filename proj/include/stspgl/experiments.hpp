#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stspgl/model.hpp"
#include "stspgl/orchestrate.hpp"
#include "stspgl/scenarios.hpp"

namespace stspgl {

/// Deterministic (mean demand) plan versus stochastic plan, both scored on
/// the original scenarios.
struct ComparisonRow {
    SolveStatus deterministic_status = SolveStatus::Infeasible;
    SolveStatus stochastic_status = SolveStatus::Infeasible;
    std::optional<MetricsRow> deterministic;
    std::optional<MetricsRow> stochastic;
    /// Set when either side has no solution.
    bool flagged = false;
};

ComparisonRow vss_experiment(const Instance& inst, const std::string& method, const SearchConfig& cfg);

std::string comparison_csv_header();
std::string comparison_csv_row(const ComparisonRow& row);

struct SweepCell {
    double theta = 0.0;
    double rho = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    bool solved = false;
    double design_cost = 0.0;
    int nodes_in_tour = 0;
};

struct SweepResult {
    std::vector<double> thetas;
    std::vector<double> rhos;
    std::vector<std::vector<SweepCell>> cells;  // [theta][rho]
};

/// Solves every (theta, rho) cell of one instance with the same method and
/// budget.
SweepResult sweep(const Instance& inst, const std::vector<double>& theta_grid, const std::vector<double>& rho_grid,
                  const std::string& method, const SearchConfig& cfg);

/// One matrix: rows theta, columns rho; `field` is "design_cost" or
/// "nodes". Unsolved cells read "NA".
std::string sweep_matrix_csv(const SweepResult& result, const std::string& field);

/// Benchmark description, read from JSON:
///   instances: ["file.json" | {"file": ..., "label": ...}
///               | {"generate": {...}, "label": ...}
///               | {"tsplib": "file.tsp", "generate": {...}, "label": ...}]
///   methods: ["mip", "bp", ...], seeds: [1, ...], theta_grid, rho_grid,
///   time_limit, gap, output_dir
/// Sources sharing a label are averaged into one table row. Relative paths
/// are taken from the spec file's directory.
struct ExperimentSpec {
    struct Source {
        std::string label;
        std::string file;     // instance JSON
        std::string tsplib;   // TSPLIB coordinates plus `generator`
        std::optional<GeneratorOptions> generator;
    };
    std::vector<Source> instances;
    std::vector<std::string> methods;
    std::vector<std::uint64_t> seeds{1};
    /// Each (theta, rho) pair is run separately; empty keeps the instance's own.
    std::vector<double> theta_grid;
    std::vector<double> rho_grid;
    double time_limit = 3600.0;
    double gap = 0.02;
    std::string output_dir = "bench_out";

    void validate() const;
};

/// Relative paths in `text` resolve against `base_dir`.
ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& base_dir);
ExperimentSpec read_experiment_spec(const std::string& path);

/// Aggregate of one instance x method cell over seeds.
struct BenchRow {
    std::string instance;
    std::string method;
    double theta = 0.0;
    double rho = 0.0;
    int runs = 0;
    int failures = 0;
    int no_ub = 0;
    double ub_mean = 0.0;
    double lb_mean = 0.0;
    double gap_mean = 0.0;
};

/// Instance for a spec source and seed (generated sources use the seed).
Instance load_source(const ExperimentSpec::Source& src, std::uint64_t seed);

/// Runs every instance x method x seed, persists one result JSON per run
/// under output_dir, writes output_dir/table.csv and returns its rows.
/// Failed runs are recorded and skipped.
std::vector<BenchRow> bench(const ExperimentSpec& spec);

/// Recomputes the table from persisted per-run JSON results.
std::vector<BenchRow> aggregate_results(const std::vector<std::string>& result_files);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

}  // namespace stspgl
