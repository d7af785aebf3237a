#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stspgl/covers.hpp"
#include "stspgl/model.hpp"
#include "stspgl/mp.hpp"
#include "stspgl/scenarios.hpp"

namespace stspgl {

/// Duals of an optimal restricted master: iota per node (design rows),
/// eps at the origin and destination flow rows of every request, beta for
/// the convexity row.
struct DualPrices {
    std::vector<double> iota;
    std::vector<double> eps_origin;
    std::vector<double> eps_destination;
    double beta = 0.0;
};

/// 2 sum_i iota_i l_Q(i) + sum_{r in Q} (eps_h^r - eps_k^r) - beta.
double reduced_cost(const Instance& inst, const RequestSet& cover, const DualPrices& duals);

/// Cover columns plus the branched set Phi (covers whose chi is fixed to 0).
class ColumnPool {
public:
    /// Index of the new column, or -1 when the cover is already present.
    int add(const Instance& inst, RequestSet cover);
    bool contains(const RequestSet& cover) const { return index_.count(cover) != 0; }
    int index_of(const RequestSet& cover) const;

    /// Adds `cover` to Phi; false when it was already there.
    bool branch(const RequestSet& cover);
    bool is_branched(const RequestSet& cover) const { return branched_set_.count(cover) != 0; }

    const std::vector<FeasibilityCover>& columns() const { return columns_; }
    const std::vector<RequestSet>& branched() const { return branched_; }
    int size() const { return static_cast<int>(columns_.size()); }

private:
    std::vector<FeasibilityCover> columns_;
    std::map<RequestSet, int> index_;
    std::vector<RequestSet> branched_;
    std::set<RequestSet> branched_set_;
};

struct RmpSolution {
    mp::Status status = mp::Status::Error;
    double objective = 0.0;
    std::vector<double> chi;  // per pool column
    double artificial = 0.0;
    DualPrices duals;
    std::vector<double> reduced_costs;  // backend value per pool column
};

/// LP relaxation of the cover reformulation over the pool columns, with an
/// artificial convexity column priced at a big-M so the LP stays feasible
/// once every real column is branched away.
class RestrictedMaster {
public:
    RestrictedMaster(const Instance& inst, const RoutingCostTable& qtilde);

    /// Appends missing pool columns and applies Phi as chi upper bounds of 0.
    void sync(const ColumnPool& pool);
    RmpSolution solve(double time_limit = mp::kInf) const;

    const mp::LinearModel& model() const { return model_; }
    int chi_var(int column) const { return chi_[column]; }
    double big_m() const { return big_m_; }

private:
    const Instance* inst_;
    mp::LinearModel model_;
    int convexity_ = -1;
    std::vector<int> design_rows_;
    std::vector<std::vector<int>> flow_rows_;  // [request][node]
    std::vector<int> chi_;
    std::vector<RequestSet> covers_;
    int artificial_ = -1;
    double big_m_ = 0.0;
};

RestrictedMaster build_rmp(const Instance& inst, const ColumnPool& pool, const RoutingCostTable& qtilde);

struct PricingOptions {
    double time_limit = mp::kInf;
    double gap = 0.0;
    /// Lazy cuts excluding non-minimal covers instead of post-minimalization.
    bool minimality_cuts = false;
    /// Ties l_i to the selected requests at non-compulsory nodes. Keeps
    /// l = l_Q for the chosen cover; without it negative iota can pull in
    /// idle nodes and weaken the bound.
    bool link_nodes = true;
};

struct PricingResult {
    std::optional<RequestSet> cover;
    /// Incumbent pricing objective; +inf when the pricing IP is infeasible.
    double objective = 0.0;
    /// Proven lower bound on the pricing optimum; -inf when unavailable.
    double bound = 0.0;
    bool timed_out = false;
    bool infeasible = false;
};

/// Minimum reduced-cost cover over feasibility covers not containing any
/// branched cover. Negative optima (below -1e-6) return a column: the
/// minimalized cover when it is new to the pool, else the raw cover.
PricingResult solve_pricing(const Instance& inst, const DualPrices& duals, const ColumnPool& pool,
                            const PricingOptions& opts = {});

/// rmp_obj + pricing_obj; -inf when either is unavailable.
double lagrangian_lower_bound(double rmp_obj, double pricing_obj);

/// Fixes chi_Q = 0 and excludes Q (and its supersets) from pricing.
/// Duplicate covers are a no-op.
void add_branching_cut(ColumnPool& pool, const RequestSet& cover);

/// `iter,rmp_obj,pricing_obj,lb,columns,phi`
std::string iteration_log_header();
std::string iteration_log_line(int iter, double rmp_obj, double pricing_obj, double lb, int columns, int phi);

}  // namespace stspgl
