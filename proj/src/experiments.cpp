#include "stspgl/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "stspgl/io.hpp"

namespace stspgl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kMethods{"mip", "bp", "heuristic", "hybrid", "deterministic"};

bool known_method(const std::string& m) {
    for (const auto& k : kMethods)
        if (k == m) return true;
    return false;
}

void check_grid(const std::vector<double>& grid, const char* name, bool open_top) {
    for (double v : grid) {
        if (!(v >= 0.0 && (open_top ? v < 1.0 : v <= 1.0)))
            throw ParameterError(std::string(name) + " grid value out of range: " + format_number(v));
    }
}

Instance with_levels(const Instance& inst, double theta, double rho) {
    auto p = inst.params();
    p.theta = theta;
    p.rho = rho;
    return inst.with_parameters(p);
}

GeneratorOptions generator_from(const json& g) {
    GeneratorOptions o;
    o.nodes = g.value("nodes", o.nodes);
    o.requests = g.value("requests", o.requests);
    o.scenarios = g.value("scenarios", o.scenarios);
    o.theta = g.value("theta", o.theta);
    o.rho = g.value("rho", o.rho);
    o.alpha = g.value("alpha", o.alpha);
    o.seed = g.value("seed", o.seed);
    o.p_present = g.value("p_present", o.p_present);
    o.demand_low = g.value("demand_low", o.demand_low);
    o.demand_high = g.value("demand_high", o.demand_high);
    o.coord_max = g.value("coord_max", o.coord_max);
    o.compulsory = g.value("compulsory", o.compulsory);
    return o;
}

std::string resolve(const std::string& path, const std::string& base) {
    if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base) / path).string();
}

std::string file_safe(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
    return out;
}

json row_key(const std::string& instance, const std::string& method, double theta, double rho) {
    return {{"instance", instance}, {"method", method}, {"theta", theta}, {"rho", rho}};
}

std::string run_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run%05d", i);
    return buf;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string cell(double v) { return std::isnan(v) ? "NA" : format_number(v); }

std::string metrics_cells(const std::optional<MetricsRow>& m) {
    if (!m) return "NA,NA,NA,NA,NA,NA";
    std::ostringstream os;
    os << m->nodes << ',' << format_number(m->design_cost) << ',' << format_number(m->nbar) << ','
       << format_number(m->dbar) << ',' << format_number(m->rhobar) << ',' << (m->infeasible ? 1 : 0);
    return os.str();
}

}  // namespace

ComparisonRow vss_experiment(const Instance& inst, const std::string& method, const SearchConfig& cfg) {
    if (!known_method(method) || method == "deterministic")
        throw ParameterError("vss needs one of mip, bp, heuristic, hybrid; got '" + method + "'");
    ComparisonRow row;
    const auto det = run_method(mean_scenario(inst), method, cfg);
    const auto sto = run_method(inst, method, cfg);
    row.deterministic_status = det.status;
    row.stochastic_status = sto.status;
    // Both plans are scored against the original scenarios.
    if (det.incumbent) row.deterministic = evaluate_metrics(inst, *det.incumbent);
    if (sto.incumbent) row.stochastic = evaluate_metrics(inst, *sto.incumbent);
    row.flagged = !row.deterministic || !row.stochastic;
    return row;
}

std::string comparison_csv_header() {
    return "det_status,det_nodes,det_design_cost,det_nbar,det_dbar,det_rhobar,det_inf,"
           "sto_status,sto_nodes,sto_design_cost,sto_nbar,sto_dbar,sto_rhobar,sto_inf,flagged";
}

std::string comparison_csv_row(const ComparisonRow& row) {
    std::ostringstream os;
    os << to_string(row.deterministic_status) << ',' << metrics_cells(row.deterministic) << ','
       << to_string(row.stochastic_status) << ',' << metrics_cells(row.stochastic) << ',' << (row.flagged ? 1 : 0);
    return os.str();
}

SweepResult sweep(const Instance& inst, const std::vector<double>& theta_grid, const std::vector<double>& rho_grid,
                  const std::string& method, const SearchConfig& cfg) {
    if (theta_grid.empty() || rho_grid.empty()) throw ParameterError("sweep grids must be nonempty");
    check_grid(theta_grid, "theta", false);
    check_grid(rho_grid, "rho", true);
    if (!known_method(method)) throw ParameterError("unknown method '" + method + "'");
    SweepResult out;
    out.thetas = theta_grid;
    out.rhos = rho_grid;
    for (double theta : theta_grid) {
        auto& line = out.cells.emplace_back();
        for (double rho : rho_grid) {
            SweepCell c;
            c.theta = theta;
            c.rho = rho;
            const auto r = run_method(with_levels(inst, theta, rho), method, cfg);
            c.status = r.status;
            if (r.incumbent) {
                c.solved = true;
                c.design_cost = r.incumbent->design_cost;
                c.nodes_in_tour = static_cast<int>(r.incumbent->tour.size());
            }
            line.push_back(c);
        }
    }
    return out;
}

std::string sweep_matrix_csv(const SweepResult& result, const std::string& field) {
    if (field != "design_cost" && field != "nodes") throw ParameterError("unknown sweep field '" + field + "'");
    std::ostringstream os;
    os << "theta\\rho";
    for (double rho : result.rhos) os << ',' << format_number(rho);
    os << '\n';
    for (std::size_t i = 0; i < result.thetas.size(); ++i) {
        os << format_number(result.thetas[i]);
        for (const auto& c : result.cells[i]) {
            os << ',';
            if (!c.solved) os << "NA";
            else if (field == "nodes") os << c.nodes_in_tour;
            else os << format_number(c.design_cost);
        }
        os << '\n';
    }
    return os.str();
}

void ExperimentSpec::validate() const {
    if (instances.empty()) throw ParameterError("experiment spec lists no instances");
    if (methods.empty()) throw ParameterError("experiment spec lists no methods");
    if (seeds.empty()) throw ParameterError("experiment spec lists no seeds");
    for (const auto& m : methods)
        if (!known_method(m)) throw ParameterError("unknown method '" + m + "'");
    check_grid(theta_grid, "theta", false);
    check_grid(rho_grid, "rho", true);
    if (!(time_limit > 0.0)) throw ParameterError("time_limit must be positive");
    if (!(gap >= 0.0 && gap < 1.0)) throw ParameterError("gap must lie in [0, 1)");
    for (const auto& s : instances) {
        if (s.file.empty() && !s.generator) throw ParameterError("instance source needs a file or generator");
        if (!s.tsplib.empty() && !s.generator) throw ParameterError("tsplib source needs generator settings");
    }
}

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& base_dir) {
    ExperimentSpec spec;
    try {
        const auto j = json::parse(text);
        for (const auto& item : j.at("instances")) {
            ExperimentSpec::Source src;
            if (item.is_string()) {
                src.file = resolve(item.get<std::string>(), base_dir);
            } else {
                if (item.contains("file")) src.file = resolve(item.at("file").get<std::string>(), base_dir);
                if (item.contains("tsplib")) src.tsplib = resolve(item.at("tsplib").get<std::string>(), base_dir);
                if (item.contains("generate")) src.generator = generator_from(item.at("generate"));
                else if (!src.tsplib.empty()) src.generator = GeneratorOptions{};
                src.label = item.value("label", std::string{});
            }
            if (src.label.empty()) {
                if (!src.tsplib.empty()) src.label = fs::path(src.tsplib).stem().string();
                else if (!src.file.empty()) src.label = fs::path(src.file).stem().string();
                else
                    src.label = "gen-n" + std::to_string(src.generator->nodes) + "-s" +
                                std::to_string(src.generator->scenarios);
            }
            spec.instances.push_back(std::move(src));
        }
        spec.methods = j.at("methods").get<std::vector<std::string>>();
        spec.seeds = j.value("seeds", spec.seeds);
        spec.theta_grid = j.value("theta_grid", spec.theta_grid);
        spec.rho_grid = j.value("rho_grid", spec.rho_grid);
        spec.time_limit = j.value("time_limit", spec.time_limit);
        spec.gap = j.value("gap", spec.gap);
        spec.output_dir = resolve(j.value("output_dir", spec.output_dir), base_dir);
    } catch (const json::exception& e) {
        throw StructuralError(std::string("experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec read_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_experiment_spec(os.str(), fs::path(path).parent_path().string());
}

Instance load_source(const ExperimentSpec::Source& src, std::uint64_t seed) {
    if (!src.tsplib.empty()) {
        auto g = *src.generator;
        g.seed = seed;
        return generate_instance(g, read_tsplib(src.tsplib).points);
    }
    if (!src.file.empty()) return read_instance(src.file);
    auto g = *src.generator;
    g.seed = seed;
    return generate_instance(g);
}

std::vector<BenchRow> bench(const ExperimentSpec& spec) {
    spec.validate();
    fs::create_directories(spec.output_dir);
    std::vector<std::string> files;
    std::ofstream failures(fs::path(spec.output_dir) / "failures.log");
    int run = 0;
    for (std::size_t si = 0; si < spec.instances.size(); ++si) {
        const auto& src = spec.instances[si];
        for (std::uint64_t seed : spec.seeds) {
            std::optional<Instance> base;
            std::string load_error;
            try {
                base = load_source(src, seed);
            } catch (const std::exception& e) {
                load_error = e.what();
            }
            const auto thetas = spec.theta_grid.empty() && base ? std::vector<double>{base->theta()} : spec.theta_grid;
            const auto rhos = spec.rho_grid.empty() && base ? std::vector<double>{base->rho()} : spec.rho_grid;
            for (double theta : thetas.empty() ? std::vector<double>{std::nan("")} : thetas) {
                for (double rho : rhos.empty() ? std::vector<double>{std::nan("")} : rhos) {
                    for (const auto& method : spec.methods) {
                        json record = row_key(src.label, method, theta, rho);
                        record["seed"] = seed;
                        record["source"] = si;
                        try {
                            if (!base) throw Error(load_error);
                            const auto inst = with_levels(*base, theta, rho);
                            SearchConfig cfg;
                            cfg.time_limit_total = spec.time_limit;
                            cfg.rmp_time_limit = std::min(cfg.rmp_time_limit, spec.time_limit);
                            cfg.pricing_time_limit = std::min(cfg.pricing_time_limit, spec.time_limit);
                            cfg.gap_target = spec.gap;
                            cfg.seed = seed;
                            const auto result = run_method(inst, method, cfg);
                            record["result"] = json::parse(result_to_json(inst, result));
                        } catch (const std::exception& e) {
                            record["error"] = e.what();
                            failures << src.label << ' ' << method << " seed " << seed << ": " << e.what() << '\n';
                        }
                        const auto path = (fs::path(spec.output_dir) /
                                           (run_name(run++) + "_" + file_safe(src.label) + "_" +
                                            method + "_s" + std::to_string(seed) + ".json"))
                                              .string();
                        write_text(path, record.dump(2) + "\n");
                        files.push_back(path);
                    }
                }
            }
        }
    }
    auto rows = aggregate_results(files);
    std::ostringstream table;
    table << bench_csv_header() << '\n';
    for (const auto& r : rows) table << bench_csv_row(r) << '\n';
    write_text((fs::path(spec.output_dir) / "table.csv").string(), table.str());
    return rows;
}

std::vector<BenchRow> aggregate_results(const std::vector<std::string>& result_files) {
    struct Acc {
        BenchRow row;
        std::vector<double> ub, lb, gap;
    };
    std::vector<Acc> accs;
    std::map<std::string, std::size_t> index;
    for (const auto& path : result_files) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open " + path);
        json record;
        try {
            record = json::parse(in);
        } catch (const json::exception& e) {
            throw StructuralError(path + ": " + e.what());
        }
        const auto theta = record.at("theta").is_number() ? record.at("theta").get<double>() : std::nan("");
        const auto rho = record.at("rho").is_number() ? record.at("rho").get<double>() : std::nan("");
        const auto key = row_key(record.at("instance"), record.at("method"), theta, rho).dump();
        auto [it, fresh] = index.emplace(key, accs.size());
        if (fresh) {
            Acc a;
            a.row.instance = record.at("instance");
            a.row.method = record.at("method");
            a.row.theta = theta;
            a.row.rho = rho;
            accs.push_back(std::move(a));
        }
        auto& acc = accs[it->second];
        if (record.contains("error")) {
            ++acc.row.failures;
            continue;
        }
        ++acc.row.runs;
        const auto& res = record.at("result");
        if (res.at("upper_bound").is_null()) {
            ++acc.row.no_ub;
            continue;
        }
        acc.ub.push_back(res.at("upper_bound").get<double>());
        if (!res.at("lower_bound").is_null()) acc.lb.push_back(res.at("lower_bound").get<double>());
        if (!res.at("gap").is_null()) acc.gap.push_back(res.at("gap").get<double>());
    }
    std::vector<BenchRow> rows;
    for (auto& a : accs) {
        a.row.ub_mean = mean(a.ub);
        a.row.lb_mean = mean(a.lb);
        a.row.gap_mean = mean(a.gap);
        rows.push_back(a.row);
    }
    return rows;
}

std::string bench_csv_header() { return "instance,method,theta,rho,runs,failures,ub_mean,lb_mean,gap_mean,no_ub"; }

std::string bench_csv_row(const BenchRow& row) {
    std::ostringstream os;
    os << row.instance << ',' << row.method << ',' << cell(row.theta) << ',' << cell(row.rho) << ',' << row.runs << ','
       << row.failures << ',' << cell(row.ub_mean) << ',' << cell(row.lb_mean) << ',' << cell(row.gap_mean) << ','
       << row.no_ub;
    return os.str();
}

}  // namespace stspgl
