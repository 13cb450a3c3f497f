#pragma once

// Two-phase lexicographic cost learning: enumerate alternatives, encode,
// maximize the number of optimal input plans, then minimize total cost (or
// total deviation from the prior) with that number fixed.

#include "costforge/branch_and_bound.hpp"
#include "costforge/encode.hpp"
#include "costforge/enumerate.hpp"
#include "costforge/formats.hpp"

#include <optional>
#include <vector>

namespace costforge {

struct LearnOptions {
    PlanLimit k = std::nullopt;
    Deadline deadline = Deadline::never();
    std::optional<Cost> y_max;               // default_y_max when absent
    std::size_t enumeration_node_limit = 10'000'000;
    std::size_t solver_node_limit = 0;       // 0 for no limit
};

enum class LearnStatus { Optimal, TimedOut };

struct LearnDiagnostics {
    PlanLimit k_used;
    std::vector<bool> exhausted;             // per instance
    std::vector<std::size_t> alternatives;   // per instance
    std::vector<ActionId> relevant;
    Cost y_max = 0;
    std::size_t variables = 0;
    std::size_t constraints = 0;
    std::size_t phase1_nodes = 0;
    std::size_t phase2_nodes = 0;
    double enumerate_ms = 0.0;
    double phase1_ms = 0.0;
    double phase2_ms = 0.0;
    double total_ms = 0.0;

    bool all_exhausted() const;
};

struct LearnResult {
    CostFunction costs;  // total over the domain
    std::size_t q = 0;
    Cost secondary_value = 0;
    std::vector<int> x;  // per instance
    LearnStatus status = LearnStatus::Optimal;
    LearnDiagnostics diagnostics;
};

// Throws MissingPrior, or NoSolution if the deadline leaves no incumbent.
LearnResult lacfip(const CflTask &cfl, const LearnOptions &options = {});

// All-ones costs, or the prior verbatim for refinement concepts. q is the
// number of input plans optimal under those costs, found by re-planning
// (strictly optimal for strict concepts).
LearnResult baseline(const CflTask &cfl, Deadline deadline = Deadline::never());

}  // namespace costforge
