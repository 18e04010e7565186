#pragma once

#include "blendrp/lp_model.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace blendrp {

/// Solver configuration. One handle serves one solve at a time.
struct SolverHandle {
    std::string backend = "highs";
    double tolerance = 1e-8;
    std::optional<double> time_limit_seconds;
};

/// Solves `model` with the handle's backend. Never throws for solver-side
/// failures; those are reported through Solution::status and ::failure.
Solution solve(const LpModel& model, const SolverHandle& handle = {});

/// Reads an LP file with the backend's own parser and solves it.
Solution solve_lp_file(const std::filesystem::path& path, const SolverHandle& handle = {});

/// Writes `model` in CPLEX LP text format. Output is a pure function of the
/// model, so identical models give identical bytes.
void write_lp_file(const LpModel& model, const std::filesystem::path& path);
std::string lp_text(const LpModel& model);

} // namespace blendrp
