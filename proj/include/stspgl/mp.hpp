#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stspgl::mp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-5;
inline constexpr double kReducedCostTol = -1e-6;

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class ObjectiveSense { Minimize, Maximize };

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Variable {
    double lower = 0.0;
    double upper = kInf;
    double cost = 0.0;
    bool integer = false;
    std::string name;
};

struct Constraint {
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// Engine-independent linear (mixed-integer) model. Variable and constraint
/// ids are dense indices in insertion order.
class LinearModel {
public:
    int add_variable(double lower, double upper, double cost, bool integer = false, std::string name = {});
    int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});
    int add_constraint(Constraint c);
    /// Appends a variable together with its coefficients in existing rows.
    int add_column(double lower, double upper, double cost, const std::vector<Term>& rows, bool integer = false,
                   std::string name = {});

    void set_bounds(int var, double lower, double upper);
    void set_cost(int var, double cost);
    void set_objective_sense(ObjectiveSense sense) { sense_ = sense; }
    void set_objective_offset(double offset) { offset_ = offset; }

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }
    const Variable& variable(int id) const { return vars_[id]; }
    const Constraint& constraint(int id) const { return rows_[id]; }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    ObjectiveSense objective_sense() const { return sense_; }
    double objective_offset() const { return offset_; }
    bool has_integers() const;

    /// Left-hand side of a constraint at `values`.
    double activity(int row, const std::vector<double>& values) const;
    double objective_value(const std::vector<double>& values) const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    ObjectiveSense sense_ = ObjectiveSense::Minimize;
    double offset_ = 0.0;
};

enum class Status { Optimal, Feasible, Infeasible, Unbounded, TimeLimit, Error };

std::string to_string(Status status);

struct SolveOutcome {
    Status status = Status::Error;
    double objective = 0.0;
    std::vector<double> primal;
    /// Row duals, LP solves only. For a minimisation they satisfy
    /// reduced_cost = c - A^T duals.
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    /// Best proven bound, MIP solves only.
    std::optional<double> best_bound;
    bool cut_incomplete = false;
    int cut_rounds = 0;

    bool has_primal() const { return !primal.empty(); }
};

struct SolveOptions {
    double time_limit = kInf;
    /// Relative MIP gap at which to stop.
    double gap_limit = 1e-9;
};

/// LP/MIP engine. Handles are single-owner; independent handles may be used
/// from different threads.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    /// Solves `model`; integrality is ignored when `relax` is set.
    virtual SolveOutcome solve(const LinearModel& model, const SolveOptions& opts, bool relax) = 0;
    /// Writes the model in the engine's text format (`.lp` / `.mps` by extension).
    virtual void write(const LinearModel& model, const std::string& path) = 0;
};

/// Engine by name; empty selects the `mp_backend` setting from the
/// STSPGL_MP_BACKEND environment variable, falling back to "highs".
std::unique_ptr<Backend> make_backend(std::string_view name = {});

/// Continuous solve; duals are present iff the status is Optimal.
SolveOutcome solve_lp(const LinearModel& model, double time_limit = kInf);
SolveOutcome solve_mip(const LinearModel& model, double time_limit = kInf, double gap_limit = 1e-9);

/// Maps an integer solution to violated cuts (empty when none).
using CutSource = std::function<std::vector<Constraint>(const std::vector<double>& primal)>;

/// Lazy-constraint loop: solve, separate, append cuts, re-solve. Cuts stay in
/// `model`. When `max_rounds` cut rounds were added and the source still
/// reports violations, the last outcome comes back with cut_incomplete set.
SolveOutcome resolve_with_cuts(LinearModel& model, const CutSource& cuts, int max_rounds,
                               const SolveOptions& opts = {});

void write_lp(const LinearModel& model, const std::string& path);

}  // namespace stspgl::mp
