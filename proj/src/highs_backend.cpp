#include "highs_backend.hpp"

#include <Highs.h>

#include <cmath>
#include <stdexcept>

namespace stspgl::mp {

namespace {

HighsModel to_highs(const LinearModel& model, bool relax) {
    HighsModel hm;
    HighsLp& lp = hm.lp_;
    const int nv = model.num_variables();
    const int nr = model.num_constraints();
    lp.num_col_ = nv;
    lp.num_row_ = nr;
    lp.sense_ = model.objective_sense() == ObjectiveSense::Minimize ? ObjSense::kMinimize : ObjSense::kMaximize;
    lp.offset_ = model.objective_offset();
    lp.col_cost_.resize(nv);
    lp.col_lower_.resize(nv);
    lp.col_upper_.resize(nv);
    bool any_integer = false;
    std::vector<HighsVarType> integrality(static_cast<std::size_t>(nv), HighsVarType::kContinuous);
    for (int j = 0; j < nv; ++j) {
        const auto& v = model.variable(j);
        lp.col_cost_[j] = v.cost;
        lp.col_lower_[j] = v.lower;
        lp.col_upper_[j] = v.upper;
        if (v.integer && !relax) {
            integrality[j] = HighsVarType::kInteger;
            any_integer = true;
        }
    }
    if (any_integer) lp.integrality_ = std::move(integrality);

    lp.row_lower_.resize(nr);
    lp.row_upper_.resize(nr);
    std::vector<HighsInt> count(static_cast<std::size_t>(nv) + 1, 0);
    for (int i = 0; i < nr; ++i) {
        const auto& c = model.constraint(i);
        switch (c.sense) {
            case Sense::LessEqual:
                lp.row_lower_[i] = -kHighsInf;
                lp.row_upper_[i] = c.rhs;
                break;
            case Sense::GreaterEqual:
                lp.row_lower_[i] = c.rhs;
                lp.row_upper_[i] = kHighsInf;
                break;
            case Sense::Equal:
                lp.row_lower_[i] = c.rhs;
                lp.row_upper_[i] = c.rhs;
                break;
        }
        for (const auto& t : c.terms) ++count[t.var + 1];
    }
    auto& a = lp.a_matrix_;
    a.format_ = MatrixFormat::kColwise;
    a.num_col_ = nv;
    a.num_row_ = nr;
    a.start_.assign(static_cast<std::size_t>(nv) + 1, 0);
    for (int j = 0; j < nv; ++j) a.start_[j + 1] = a.start_[j] + count[j + 1];
    a.index_.resize(static_cast<std::size_t>(a.start_[nv]));
    a.value_.resize(static_cast<std::size_t>(a.start_[nv]));
    std::vector<HighsInt> fill(a.start_.begin(), a.start_.end() - 1);
    // Duplicate (row, var) entries are merged so HiGHS accepts the matrix.
    std::vector<HighsInt> last_row(static_cast<std::size_t>(nv), -1);
    std::vector<HighsInt> last_pos(static_cast<std::size_t>(nv), -1);
    for (int i = 0; i < nr; ++i) {
        for (const auto& t : model.constraint(i).terms) {
            if (last_row[t.var] == i) {
                a.value_[last_pos[t.var]] += t.coef;
                continue;
            }
            const HighsInt pos = fill[t.var]++;
            a.index_[pos] = i;
            a.value_[pos] = t.coef;
            last_row[t.var] = i;
            last_pos[t.var] = pos;
        }
    }
    // Compact columns that lost entries to merging.
    HighsInt write = 0;
    std::vector<HighsInt> new_start(static_cast<std::size_t>(nv) + 1, 0);
    for (int j = 0; j < nv; ++j) {
        new_start[j] = write;
        for (HighsInt p = a.start_[j]; p < fill[j]; ++p) {
            a.index_[write] = a.index_[p];
            a.value_[write] = a.value_[p];
            ++write;
        }
    }
    new_start[nv] = write;
    a.start_ = std::move(new_start);
    a.index_.resize(static_cast<std::size_t>(write));
    a.value_.resize(static_cast<std::size_t>(write));
    return hm;
}

void configure(Highs& h, const SolveOptions& opts) {
    h.setOptionValue("output_flag", false);
    h.setOptionValue("random_seed", 0);
    h.setOptionValue("mip_feasibility_tolerance", kFeasibilityTol);
    if (std::isfinite(opts.time_limit)) h.setOptionValue("time_limit", std::max(opts.time_limit, 1e-3));
    h.setOptionValue("mip_rel_gap", std::max(opts.gap_limit, 0.0));
    h.setOptionValue("mip_abs_gap", 1e-9);
}

}  // namespace

SolveOutcome HighsBackend::solve(const LinearModel& model, const SolveOptions& opts, bool relax) {
    SolveOutcome out;
    const bool is_mip = !relax && model.has_integers();
    Highs h;
    configure(h, opts);
    if (h.passModel(to_highs(model, relax)) == HighsStatus::kError) {
        out.status = Status::Error;
        return out;
    }
    h.run();
    HighsModelStatus ms = h.getModelStatus();
    if (ms == HighsModelStatus::kUnboundedOrInfeasible) {
        h.setOptionValue("presolve", "off");
        h.clearSolver();
        h.run();
        ms = h.getModelStatus();
    }
    const auto& info = h.getInfo();
    const auto& sol = h.getSolution();
    const bool primal_ok = info.primal_solution_status == kSolutionStatusFeasible;

    switch (ms) {
        case HighsModelStatus::kOptimal: out.status = Status::Optimal; break;
        case HighsModelStatus::kInfeasible: out.status = Status::Infeasible; break;
        case HighsModelStatus::kUnbounded:
        case HighsModelStatus::kUnboundedOrInfeasible: out.status = Status::Unbounded; break;
        case HighsModelStatus::kTimeLimit:
        case HighsModelStatus::kIterationLimit:
        case HighsModelStatus::kSolutionLimit:
        case HighsModelStatus::kInterrupt: out.status = Status::TimeLimit; break;
        default: out.status = primal_ok ? Status::Feasible : Status::Error; break;
    }
    if (primal_ok && sol.value_valid) {
        out.primal.assign(sol.col_value.begin(), sol.col_value.end());
        out.objective = info.objective_function_value;
    }
    if (is_mip) {
        out.best_bound = info.mip_dual_bound;
    } else if (out.status == Status::Optimal && sol.dual_valid) {
        out.duals.assign(sol.row_dual.begin(), sol.row_dual.end());
        out.reduced_costs.assign(sol.col_dual.begin(), sol.col_dual.end());
    }
    return out;
}

void HighsBackend::write(const LinearModel& model, const std::string& path) {
    Highs h;
    h.setOptionValue("output_flag", false);
    if (h.passModel(to_highs(model, false)) == HighsStatus::kError || h.writeModel(path) == HighsStatus::kError) {
        throw std::runtime_error("could not write model to " + path);
    }
}

}  // namespace stspgl::mp
