#pragma once

#include "stspgl/mp.hpp"

namespace stspgl::mp {

/// Backend on top of the HiGHS simplex and branch-and-cut solvers.
class HighsBackend final : public Backend {
public:
    std::string name() const override { return "highs"; }
    SolveOutcome solve(const LinearModel& model, const SolveOptions& opts, bool relax) override;
    void write(const LinearModel& model, const std::string& path) override;
};

}  // namespace stspgl::mp
