#include "costforge/evaluate.hpp"

namespace costforge {

bool is_optimal(const Plan &plan, const PlanningTask &task, std::span<const Cost> costs,
                Deadline deadline) {
    return plan_cost(plan, costs) == optimal_plan_cost(task, costs, deadline).cost;
}

bool is_optimal(const Plan &plan, const PlanningTask &task, const CostFunction &costs,
                Deadline deadline) {
    return is_optimal(plan, task, costs.dense(*task.domain), deadline);
}

bool is_strictly_optimal(const Plan &plan, const PlanningTask &task, std::span<const Cost> costs,
                         Deadline deadline) {
    return is_optimal(plan, task, costs, deadline) &&
           count_optimal_plans(task, costs, 2, deadline) == 1;
}

bool is_strictly_optimal(const Plan &plan, const PlanningTask &task, const CostFunction &costs,
                         Deadline deadline) {
    return is_strictly_optimal(plan, task, costs.dense(*task.domain), deadline);
}

RatioReport optimal_ratio(const CflTask &cfl, const CostFunction &costs, bool strict,
                          Deadline deadline) {
    const ActionCosts dense = costs.dense(*cfl.domain);
    RatioReport report;
    report.total = cfl.size();
    for (std::size_t i = 0; i < cfl.size(); ++i) {
        const PlanningTask task = cfl.task(i);
        const Plan &plan = cfl.instances[i].plan;
        InstanceVerdict v;
        v.instance = i;
        v.optimal = is_optimal(plan, task, dense, deadline);
        v.strictly_optimal = v.optimal && count_optimal_plans(task, dense, 2, deadline) == 1;
        if (strict ? v.strictly_optimal : v.optimal)
            ++report.optimal;
        report.verdicts.push_back(v);
    }
    return report;
}

}  // namespace costforge
