#pragma once

// Simple-plan enumeration (the alternative-plan oracle) and an optimal
// uniform-cost planner used for validation.

#include "costforge/deadline.hpp"
#include "costforge/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace costforge {

// nullopt stands for k = infinity.
using PlanLimit = std::optional<std::size_t>;

struct EnumerationLimits {
    Deadline deadline = Deadline::never();
    std::size_t node_limit = 10'000'000;
    // Above this many reachable states the exact distance heuristic is not
    // precomputed and the search runs blind.
    std::size_t heuristic_state_limit = 200'000;
};

struct AlternativeSet {
    std::vector<Plan> plans;
    // The whole set of simple solutions (minus the excluded plan) was listed.
    bool exhausted = false;
    // Search stopped early on the deadline or the node limit; `plans` is a
    // valid prefix of the full enumeration.
    bool deadline_exceeded = false;
    bool node_limit_hit = false;

    bool truncated() const { return deadline_exceeded || node_limit_hit; }
};

// First k simple solution plans in order (metric cost, length, action-name
// sequence), skipping `exclude` when given.
AlternativeSet enumerate_plans(const PlanningTask &task, PlanLimit k,
                               std::span<const Cost> metric, const Plan *exclude = nullptr,
                               const EnumerationLimits &limits = {});

// Up to k simple solution plans other than `input_plan`.
AlternativeSet enumerate_alternatives(const PlanningTask &task, const Plan &input_plan,
                                      PlanLimit k, std::span<const Cost> metric,
                                      const EnumerationLimits &limits = {});

// Complete set of simple solution plans (unit-cost order); throws
// DeadlineExceeded.
std::vector<Plan> all_simple_plans(const PlanningTask &task,
                                   Deadline deadline = Deadline::never());

struct OptimalPlan {
    Cost cost = 0;
    Plan witness;
};

// Uniform-cost search. Throws Unsolvable or DeadlineExceeded.
OptimalPlan optimal_plan_cost(const PlanningTask &task, std::span<const Cost> costs,
                              Deadline deadline = Deadline::never());
OptimalPlan optimal_plan_cost(const PlanningTask &task, const CostFunction &costs,
                              Deadline deadline = Deadline::never());

// Number of distinct plans attaining the optimal cost, saturating at `cap`.
std::size_t count_optimal_plans(const PlanningTask &task, std::span<const Cost> costs,
                                std::size_t cap, Deadline deadline = Deadline::never());
std::size_t count_optimal_plans(const PlanningTask &task, const CostFunction &costs,
                                std::size_t cap, Deadline deadline = Deadline::never());

}  // namespace costforge
