#pragma once

// Best-bound branch and bound. Node relaxations are solved in floating point;
// every pruning decision rests on an exactly computed dual bound or Farkas
// certificate, and incumbents are checked in integer arithmetic. Nodes where
// the floating-point solve is inconclusive are re-solved with the exact
// rational simplex. All variables and objective coefficients are integers,
// so a node is pruned once floor(bound) cannot beat the incumbent.

#include "costforge/simplex.hpp"

#include <functional>
#include <optional>

namespace costforge {

enum class IpStatus { Optimal, Infeasible, TimedOut };

struct IpSolution {
    IpStatus status = IpStatus::Infeasible;
    std::vector<Cost> assignment;  // empty when no feasible point is known
    std::optional<Cost> objective_value;
    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
    std::size_t exact_fallbacks = 0;

    bool has_solution() const { return !assignment.empty() || objective_value.has_value(); }
};

// Maps an LP relaxation point to a candidate integer assignment. Candidates
// are checked for feasibility before use.
using RoundingHeuristic =
    std::function<std::optional<std::vector<Cost>>(std::span<const double> lp_values)>;

struct SolveOptions {
    Deadline deadline = Deadline::never();
    std::vector<std::vector<Cost>> seeds;  // infeasible seeds are ignored
    RoundingHeuristic heuristic;
    std::size_t node_limit = 0;  // 0 for no limit; hitting it counts as a timeout
};

IpSolution solve_ip(const IntegerProgram &ip, std::span<const Cost> objective,
                    const SolveOptions &options = {});

}  // namespace costforge
