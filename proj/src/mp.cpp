#include "stspgl/mp.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "highs_backend.hpp"

namespace stspgl::mp {

int LinearModel::add_variable(double lower, double upper, double cost, bool integer, std::string name) {
    vars_.push_back(Variable{lower, upper, cost, integer, std::move(name)});
    return static_cast<int>(vars_.size()) - 1;
}

int LinearModel::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
    return add_constraint(Constraint{std::move(terms), sense, rhs, std::move(name)});
}

int LinearModel::add_constraint(Constraint c) {
    for (const auto& t : c.terms) {
        if (t.var < 0 || t.var >= num_variables()) throw std::out_of_range("constraint references unknown variable");
        if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite constraint coefficient");
    }
    rows_.push_back(std::move(c));
    return static_cast<int>(rows_.size()) - 1;
}

int LinearModel::add_column(double lower, double upper, double cost, const std::vector<Term>& rows, bool integer,
                            std::string name) {
    const int var = add_variable(lower, upper, cost, integer, std::move(name));
    // Term::var carries the row index here.
    for (const auto& t : rows) rows_.at(static_cast<std::size_t>(t.var)).terms.push_back({var, t.coef});
    return var;
}

void LinearModel::set_bounds(int var, double lower, double upper) {
    vars_.at(static_cast<std::size_t>(var)).lower = lower;
    vars_.at(static_cast<std::size_t>(var)).upper = upper;
}

void LinearModel::set_cost(int var, double cost) { vars_.at(static_cast<std::size_t>(var)).cost = cost; }

bool LinearModel::has_integers() const {
    for (const auto& v : vars_) {
        if (v.integer) return true;
    }
    return false;
}

double LinearModel::activity(int row, const std::vector<double>& values) const {
    double acc = 0.0;
    for (const auto& t : rows_[row].terms) acc += t.coef * values[t.var];
    return acc;
}

double LinearModel::objective_value(const std::vector<double>& values) const {
    double acc = offset_;
    for (std::size_t j = 0; j < vars_.size(); ++j) acc += vars_[j].cost * values[j];
    return acc;
}

std::string to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Feasible: return "feasible";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::TimeLimit: return "time_limit";
        case Status::Error: return "error";
    }
    return "unknown";
}

std::unique_ptr<Backend> make_backend(std::string_view name) {
    std::string chosen(name);
    if (chosen.empty()) {
        if (const char* env = std::getenv("STSPGL_MP_BACKEND")) chosen = env;
    }
    if (chosen.empty() || chosen == "highs") return std::make_unique<HighsBackend>();
    throw std::invalid_argument("unknown mp_backend '" + chosen + "'");
}

SolveOutcome solve_lp(const LinearModel& model, double time_limit) {
    auto backend = make_backend();
    return backend->solve(model, SolveOptions{time_limit, 0.0}, true);
}

SolveOutcome solve_mip(const LinearModel& model, double time_limit, double gap_limit) {
    auto backend = make_backend();
    return backend->solve(model, SolveOptions{time_limit, gap_limit}, false);
}

SolveOutcome resolve_with_cuts(LinearModel& model, const CutSource& cuts, int max_rounds, const SolveOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto backend = make_backend();
    SolveOptions round_opts = opts;
    int rounds = 0;
    for (;;) {
        SolveOutcome out = backend->solve(model, round_opts, false);
        out.cut_rounds = rounds;
        if (out.status != Status::Optimal && out.status != Status::Feasible) return out;
        auto violated = cuts(out.primal);
        if (violated.empty()) return out;
        if (rounds >= max_rounds) {
            out.cut_incomplete = true;
            return out;
        }
        for (auto& c : violated) model.add_constraint(std::move(c));
        ++rounds;
        if (std::isfinite(opts.time_limit)) {
            const double used = std::chrono::duration<double>(clock::now() - start).count();
            round_opts.time_limit = opts.time_limit - used;
            if (round_opts.time_limit <= 0.0) {
                out.status = Status::TimeLimit;
                out.cut_incomplete = true;
                return out;
            }
        }
    }
}

void write_lp(const LinearModel& model, const std::string& path) { make_backend()->write(model, path); }

}  // namespace stspgl::mp
