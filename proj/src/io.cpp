#include "stspgl/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

namespace stspgl {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

SquareMatrix matrix_from(const json& rows) {
    const int n = static_cast<int>(rows.size());
    SquareMatrix m(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (rows[i].size() != static_cast<std::size_t>(n)) throw StructuralError("distance matrix is not square");
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

json matrix_to(const SquareMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Instance parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw StructuralError(std::string("instance JSON: ") + e.what());
    }
    try {
        Rounding rounding = Rounding::Exact;
        if (j.contains("rounding")) {
            const auto r = j.at("rounding").get<std::string>();
            if (r == "euc2d") rounding = Rounding::Euc2d;
            else if (r != "exact") throw StructuralError("unknown rounding '" + r + "'");
        }
        std::vector<Point> coords;
        if (j.contains("nodes")) {
            const auto& nodes = j.at("nodes");
            coords.resize(nodes.size());
            std::vector<char> filled(nodes.size(), 0);
            for (const auto& node : nodes) {
                const int id = node.at("id").get<int>();
                if (id < 0 || id >= static_cast<int>(nodes.size()) || filled[id])
                    throw StructuralError("node ids must be 0..n-1 without repeats");
                filled[id] = 1;
                coords[id] = Point{node.at("x").get<double>(), node.at("y").get<double>()};
            }
        }
        SquareMatrix design;
        if (j.contains("dist")) {
            design = matrix_from(j.at("dist"));
        } else if (!coords.empty()) {
            design = distance_matrix(coords, rounding);
        } else {
            throw StructuralError("instance needs nodes or dist");
        }
        SquareMatrix travel;
        if (j.contains("time")) travel = matrix_from(j.at("time"));

        std::vector<Request> requests;
        std::vector<std::vector<double>> demand;
        for (const auto& r : j.at("requests")) {
            requests.push_back({r.at("h").get<int>(), r.at("k").get<int>()});
            demand.push_back(r.at("demand").get<std::vector<double>>());
        }
        Parameters p;
        p.theta = j.value("theta", p.theta);
        p.rho = j.value("rho", p.rho);
        p.alpha = j.value("alpha", p.alpha);
        return Instance(std::move(design), std::move(travel), j.value("compulsory", std::vector<int>{}),
                        std::move(requests), std::move(demand), p, rounding, std::move(coords));
    } catch (const json::exception& e) {
        throw StructuralError(std::string("instance JSON: ") + e.what());
    }
}

Instance read_instance(const std::string& path) { return parse_instance(slurp(path)); }

std::string instance_to_json(const Instance& inst) {
    json j;
    const auto& coords = inst.coordinates();
    if (!coords.empty()) {
        json nodes = json::array();
        for (std::size_t i = 0; i < coords.size(); ++i)
            nodes.push_back({{"id", i}, {"x", coords[i].x}, {"y", coords[i].y}});
        j["nodes"] = std::move(nodes);
        // Coordinates alone fix the metric unless it was given explicitly.
        if (distance_matrix(coords, inst.rounding()) != inst.design_matrix()) j["dist"] = matrix_to(inst.design_matrix());
    } else {
        j["dist"] = matrix_to(inst.design_matrix());
    }
    if (inst.separate_travel_times()) j["time"] = matrix_to(inst.travel_matrix());
    j["compulsory"] = inst.compulsory();
    json reqs = json::array();
    for (int r = 0; r < inst.num_requests(); ++r) {
        reqs.push_back({{"h", inst.request(r).origin},
                        {"k", inst.request(r).destination},
                        {"demand", inst.scenarios().request_demands(r)}});
    }
    j["requests"] = std::move(reqs);
    j["theta"] = inst.theta();
    j["rho"] = inst.rho();
    j["alpha"] = inst.alpha();
    j["rounding"] = inst.rounding() == Rounding::Euc2d ? "euc2d" : "exact";
    return j.dump(2) + "\n";
}

void write_instance(const Instance& inst, const std::string& path) { write_text(path, instance_to_json(inst)); }

TsplibData parse_tsplib(std::istream& in) {
    TsplibData data;
    std::string line;
    int dimension = -1;
    bool coords = false;
    std::map<int, Point> by_id;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        if (coords) {
            std::string first;
            if (!(ls >> first)) continue;
            if (first == "EOF") break;
            int id = 0;
            Point p;
            try {
                id = std::stoi(first);
            } catch (const std::exception&) {
                break;  // next section
            }
            if (!(ls >> p.x >> p.y)) throw StructuralError("bad TSPLIB coordinate line: " + line);
            by_id[id] = p;
            continue;
        }
        const auto colon = line.find(':');
        std::string key = line.substr(0, colon);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::string value = colon == std::string::npos ? "" : line.substr(colon + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t") + 1);
        if (key == "NAME") data.name = value;
        else if (key == "DIMENSION") dimension = std::stoi(value);
        else if (key == "EDGE_WEIGHT_TYPE" && value != "EUC_2D")
            throw ParameterError("only EUC_2D TSPLIB files are supported, got " + value);
        else if (key == "NODE_COORD_SECTION") coords = true;
    }
    for (const auto& [id, p] : by_id) data.points.push_back(p);
    if (dimension >= 0 && static_cast<int>(data.points.size()) != dimension)
        throw StructuralError("TSPLIB DIMENSION does not match the coordinate count");
    if (data.points.empty()) throw StructuralError("TSPLIB file has no coordinates");
    return data;
}

TsplibData read_tsplib(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_tsplib(in);
}

std::string result_to_json(const Instance& inst, const StspGlResult& result) {
    json j;
    j["method"] = result.method;
    j["status"] = to_string(result.status);
    j["upper_bound"] = finite_or_null(result.upper_bound);
    j["lower_bound"] = finite_or_null(result.lower_bound);
    j["gap"] = finite_or_null(result.gap);
    if (result.cover) {
        json cover = json::array();
        for (int r : *result.cover) cover.push_back({inst.request(r).origin, inst.request(r).destination});
        j["cover"] = std::move(cover);
    } else {
        j["cover"] = nullptr;
    }
    if (result.incumbent) {
        const auto& sol = *result.incumbent;
        j["tour"] = sol.tour;
        json served = json::array();
        for (int r : sol.served) served.push_back({inst.request(r).origin, inst.request(r).destination});
        j["served"] = std::move(served);
        j["design_cost"] = sol.design_cost;
        j["routing_cost"] = sol.routing_cost;
        j["objective"] = sol.objective;
        const auto m = evaluate_metrics(inst, sol);
        j["metrics"] = {{"nodes", m.nodes},   {"theta", m.theta},   {"rho", m.rho},
                        {"design_cost", m.design_cost}, {"nbar", m.nbar}, {"dbar", m.dbar},
                        {"rhobar", m.rhobar}, {"infeasible", m.infeasible}};
    } else {
        j["tour"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(12) << value;
    return os.str();
}

std::string trace_csv_header() { return "t_seconds,event,ub,lb,cover_size,nodes_visited"; }

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
    out << trace_csv_header() << '\n';
    for (const auto& e : trace.events) {
        out << format_number(e.t_seconds) << ',' << e.event << ',' << format_number(e.upper_bound) << ','
            << format_number(e.lower_bound) << ',' << e.cover_size << ',' << e.nodes_visited << '\n';
    }
}

void write_trace_csv(const std::string& path, const SolveTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    write_text(path, os.str());
}

std::string metrics_csv_header() { return "nodes,theta,rho,design_cost,nbar,dbar,rhobar,infeasible"; }

std::string metrics_csv_row(const MetricsRow& row) {
    std::ostringstream os;
    os << row.nodes << ',' << format_number(row.theta) << ',' << format_number(row.rho) << ','
       << format_number(row.design_cost) << ',' << format_number(row.nbar) << ',' << format_number(row.dbar) << ','
       << format_number(row.rhobar) << ',' << (row.infeasible ? 1 : 0);
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("failed writing " + path);
}

}  // namespace stspgl
