#pragma once

// Validation of learned costs by re-planning from scratch.

#include "costforge/enumerate.hpp"
#include "costforge/formats.hpp"

#include <vector>

namespace costforge {

// plan_cost(plan) equals the optimal cost of the task.
bool is_optimal(const Plan &plan, const PlanningTask &task, std::span<const Cost> costs,
                Deadline deadline = Deadline::never());
bool is_optimal(const Plan &plan, const PlanningTask &task, const CostFunction &costs,
                Deadline deadline = Deadline::never());

// Optimal and no other plan reaches the optimal cost.
bool is_strictly_optimal(const Plan &plan, const PlanningTask &task, std::span<const Cost> costs,
                         Deadline deadline = Deadline::never());
bool is_strictly_optimal(const Plan &plan, const PlanningTask &task, const CostFunction &costs,
                         Deadline deadline = Deadline::never());

struct RatioReport {
    std::size_t optimal = 0;  // counted under the requested strictness
    std::size_t total = 0;
    std::vector<InstanceVerdict> verdicts;

    double ratio() const { return total == 0 ? 0.0 : static_cast<double>(optimal) / total; }
};

// Throws MissingCost when `costs` is not total, DeadlineExceeded on timeout.
RatioReport optimal_ratio(const CflTask &cfl, const CostFunction &costs, bool strict,
                          Deadline deadline = Deadline::never());

}  // namespace costforge
