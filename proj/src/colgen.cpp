#include "stspgl/colgen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace stspgl {

double reduced_cost(const Instance& inst, const RequestSet& cover, const DualPrices& duals) {
    double rc = -duals.beta;
    for (int i : cover_nodes(inst, cover)) rc += 2.0 * duals.iota[i];
    for (int r : cover) rc += duals.eps_origin[r] - duals.eps_destination[r];
    return rc;
}

int ColumnPool::add(const Instance& inst, RequestSet cover) {
    std::sort(cover.begin(), cover.end());
    cover.erase(std::unique(cover.begin(), cover.end()), cover.end());
    if (index_.count(cover)) return -1;
    const int id = static_cast<int>(columns_.size());
    index_[cover] = id;
    columns_.push_back(make_cover(inst, std::move(cover)));
    return id;
}

int ColumnPool::index_of(const RequestSet& cover) const {
    auto it = index_.find(cover);
    return it == index_.end() ? -1 : it->second;
}

bool ColumnPool::branch(const RequestSet& cover) {
    if (!branched_set_.insert(cover).second) return false;
    branched_.push_back(cover);
    return true;
}

RestrictedMaster::RestrictedMaster(const Instance& inst, const RoutingCostTable& qtilde) : inst_(&inst) {
    const int n = inst.num_nodes();
    const int nr = inst.num_requests();
    const double alpha = inst.alpha();

    double max_design = 0.0;
    double max_travel = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            max_design = std::max(max_design, inst.design_cost(i, j));
            max_travel = std::max(max_travel, inst.travel_time(i, j));
        }
    }
    double weight_sum = 0.0;
    for (double w : qtilde.weights()) weight_sum += w;
    // Any tour over all nodes costs at most this much, so the artificial
    // column never beats a real one.
    big_m_ = 10.0 * ((1.0 - alpha) * n * max_design + alpha * weight_sum * n * max_travel) + 1.0;

    convexity_ = model_.add_constraint({}, mp::Sense::Equal, 1.0, "convexity");
    artificial_ = model_.add_column(0.0, mp::kInf, big_m_, {{convexity_, 1.0}}, false, "artificial");

    design_rows_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) design_rows_[i] = model_.add_constraint({}, mp::Sense::Equal, 0.0);
    flow_rows_.assign(static_cast<std::size_t>(nr), std::vector<int>(static_cast<std::size_t>(n)));
    for (int r = 0; r < nr; ++r)
        for (int i = 0; i < n; ++i) flow_rows_[r][i] = model_.add_constraint({}, mp::Sense::Equal, 0.0);

    const auto& comp = inst.compulsory();
    std::vector<std::vector<int>> x(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // A two-node tour uses its edge twice; only possible when the
            // edge holds every compulsory stop.
            const bool doubled = std::all_of(comp.begin(), comp.end(), [&](int c) { return c == i || c == j; });
            x[i][j] = x[j][i] = model_.add_column(0.0, doubled ? 2.0 : 1.0, (1.0 - alpha) * inst.design_cost(i, j),
                                                  {{design_rows_[i], 1.0}, {design_rows_[j], 1.0}});
        }
    }
    for (int r = 0; r < nr; ++r) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const int f = model_.add_column(0.0, mp::kInf, alpha * qtilde(i, j, r),
                                                {{flow_rows_[r][i], 1.0}, {flow_rows_[r][j], -1.0}});
                model_.add_constraint({{f, 1.0}, {x[i][j], -1.0}}, mp::Sense::LessEqual, 0.0);
            }
        }
    }
}

void RestrictedMaster::sync(const ColumnPool& pool) {
    const auto& cols = pool.columns();
    for (std::size_t c = chi_.size(); c < cols.size(); ++c) {
        const auto& cover = cols[c];
        std::vector<mp::Term> rows{{convexity_, 1.0}};
        for (int i : cover.nodes) rows.push_back({design_rows_[i], -2.0});
        for (int r : cover.requests) {
            const auto& req = inst_->request(r);
            rows.push_back({flow_rows_[r][req.origin], -1.0});
            rows.push_back({flow_rows_[r][req.destination], 1.0});
        }
        chi_.push_back(model_.add_column(0.0, mp::kInf, 0.0, rows));
        covers_.push_back(cover.requests);
    }
    for (std::size_t c = 0; c < chi_.size(); ++c) {
        if (pool.is_branched(covers_[c])) model_.set_bounds(chi_[c], 0.0, 0.0);
    }
}

RmpSolution RestrictedMaster::solve(double time_limit) const {
    const auto res = mp::solve_lp(model_, time_limit);
    RmpSolution out;
    out.status = res.status;
    if (res.status != mp::Status::Optimal) return out;
    out.objective = res.objective;
    out.artificial = res.primal[artificial_];
    for (int v : chi_) {
        out.chi.push_back(res.primal[v]);
        out.reduced_costs.push_back(res.reduced_costs[v]);
    }
    const int n = inst_->num_nodes();
    const int nr = inst_->num_requests();
    auto& d = out.duals;
    d.beta = res.duals[convexity_];
    d.iota.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.iota[i] = res.duals[design_rows_[i]];
    d.eps_origin.resize(static_cast<std::size_t>(nr));
    d.eps_destination.resize(static_cast<std::size_t>(nr));
    for (int r = 0; r < nr; ++r) {
        const auto& req = inst_->request(r);
        d.eps_origin[r] = res.duals[flow_rows_[r][req.origin]];
        d.eps_destination[r] = res.duals[flow_rows_[r][req.destination]];
    }
    return out;
}

RestrictedMaster build_rmp(const Instance& inst, const ColumnPool& pool, const RoutingCostTable& qtilde) {
    RestrictedMaster rmp(inst, qtilde);
    rmp.sync(pool);
    return rmp;
}

PricingResult solve_pricing(const Instance& inst, const DualPrices& duals, const ColumnPool& pool,
                            const PricingOptions& opts) {
    const int n = inst.num_nodes();
    const int nr = inst.num_requests();
    const int ns = inst.num_scenarios();
    mp::LinearModel model;
    model.set_objective_offset(-duals.beta);
    std::vector<int> l(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) l[i] = model.add_variable(inst.is_compulsory(i) ? 1.0 : 0.0, 1.0, 2.0 * duals.iota[i], true);
    std::vector<int> r(static_cast<std::size_t>(nr));
    for (int q = 0; q < nr; ++q) {
        const auto& req = inst.request(q);
        r[q] = model.add_variable(0.0, 1.0, duals.eps_origin[q] - duals.eps_destination[q], true);
        model.add_constraint({{r[q], 1.0}, {l[req.origin], -1.0}}, mp::Sense::LessEqual, 0.0);
        model.add_constraint({{r[q], 1.0}, {l[req.destination], -1.0}}, mp::Sense::LessEqual, 0.0);
    }
    if (opts.link_nodes) {
        for (int i = 0; i < n; ++i) {
            if (inst.is_compulsory(i)) continue;
            std::vector<mp::Term> terms{{l[i], 1.0}};
            for (int q = 0; q < nr; ++q) {
                const auto& req = inst.request(q);
                if (req.origin == i || req.destination == i) terms.push_back({r[q], -1.0});
            }
            model.add_constraint(std::move(terms), mp::Sense::LessEqual, 0.0);
        }
    }
    std::vector<mp::Term> gamma_sum;
    for (int s = 0; s < ns; ++s) {
        const int g = model.add_variable(0.0, 1.0, 0.0, true);
        std::vector<mp::Term> terms{{g, -inst.theta() * inst.scenarios().total(s)}};
        for (int q = 0; q < nr; ++q) terms.push_back({r[q], inst.demand(s, q)});
        model.add_constraint(std::move(terms), mp::Sense::GreaterEqual, -kSatisfactionTolerance);
        gamma_sum.push_back({g, 1.0});
    }
    model.add_constraint(std::move(gamma_sum), mp::Sense::GreaterEqual,
                         static_cast<double>(required_scenario_count(ns, inst.rho())));
    for (const auto& phi : pool.branched()) {
        std::vector<mp::Term> terms;
        for (int q : phi) terms.push_back({r[q], 1.0});
        model.add_constraint(std::move(terms), mp::Sense::LessEqual, static_cast<double>(phi.size()) - 1.0);
    }

    auto chosen = [&](const std::vector<double>& primal) {
        RequestSet cover;
        for (int q = 0; q < nr; ++q)
            if (primal[r[q]] > 0.5) cover.push_back(q);
        return cover;
    };
    mp::SolveOptions so{opts.time_limit, opts.gap};
    mp::SolveOutcome res;
    if (opts.minimality_cuts) {
        mp::CutSource source = [&](const std::vector<double>& primal) {
            std::vector<mp::Constraint> cuts;
            const auto cover = chosen(primal);
            if (!is_minimal(inst, cover)) {
                mp::Constraint c{{}, mp::Sense::LessEqual, static_cast<double>(cover.size()) - 1.0, "minimality"};
                for (int q : cover) c.terms.push_back({r[q], 1.0});
                cuts.push_back(std::move(c));
            }
            return cuts;
        };
        res = mp::resolve_with_cuts(model, source, 100000, so);
    } else {
        res = mp::make_backend()->solve(model, so, false);
    }

    PricingResult out;
    if (res.status == mp::Status::Infeasible) {
        out.infeasible = true;
        out.objective = mp::kInf;
        out.bound = mp::kInf;
        return out;
    }
    if (res.status != mp::Status::Optimal || res.cut_incomplete || !res.has_primal()) {
        out.timed_out = true;
        out.objective = -mp::kInf;
        out.bound = -mp::kInf;
        return out;
    }
    out.objective = res.objective;
    out.bound = std::min(res.objective, res.best_bound.value_or(res.objective));
    if (out.objective >= mp::kReducedCostTol) return out;

    const RequestSet raw = chosen(res.primal);
    if (!is_feasibility_cover(inst, raw)) return out;
    RequestSet candidate = opts.minimality_cuts ? raw : minimal_feasibility_cover(inst, raw);
    if (pool.contains(candidate) || pool.is_branched(candidate)) candidate = raw;
    if (pool.contains(candidate) || pool.is_branched(candidate)) return out;
    out.cover = std::move(candidate);
    return out;
}

double lagrangian_lower_bound(double rmp_obj, double pricing_obj) {
    if (std::isnan(rmp_obj) || std::isnan(pricing_obj)) return -mp::kInf;
    if (pricing_obj == -mp::kInf || rmp_obj == -mp::kInf) return -mp::kInf;
    return rmp_obj + pricing_obj;
}

void add_branching_cut(ColumnPool& pool, const RequestSet& cover) { pool.branch(cover); }

std::string iteration_log_header() { return "iter,rmp_obj,pricing_obj,lb,columns,phi"; }

std::string iteration_log_line(int iter, double rmp_obj, double pricing_obj, double lb, int columns, int phi) {
    std::ostringstream os;
    os << std::setprecision(12) << iter << ',' << rmp_obj << ',' << pricing_obj << ',' << lb << ',' << columns << ','
       << phi;
    return os.str();
}

}  // namespace stspgl
