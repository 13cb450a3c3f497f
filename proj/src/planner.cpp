// Uniform-cost search over states. Kept apart from the top-k enumerator so
// validation re-plans through an independent code path.

#include "costforge/enumerate.hpp"

#include "costforge/errors.hpp"
#include "state_space.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace costforge {

using detail::Edge;
using detail::StateId;
using detail::StateSpace;

namespace {

constexpr Cost kUnreached = std::numeric_limits<Cost>::max();

struct Dijkstra {
    std::vector<Cost> dist;
    std::vector<std::pair<StateId, ActionId>> parent;
    std::vector<StateId> settled;  // in nondecreasing distance order
    std::optional<StateId> best_goal;
};

// Settles every state whose distance does not exceed the optimal plan cost.
Dijkstra run(StateSpace &space, std::span<const Cost> costs, Deadline deadline) {
    Dijkstra d;
    auto ensure = [&](StateId s) {
        if (d.dist.size() <= s) {
            d.dist.resize(s + 1, kUnreached);
            d.parent.resize(s + 1, {0, 0});
        }
    };
    using Item = std::pair<Cost, StateId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    ensure(space.initial());
    d.dist[space.initial()] = 0;
    open.push({0, space.initial()});
    std::vector<bool> closed;
    std::size_t pops = 0;
    while (!open.empty()) {
        auto [g, s] = open.top();
        if (d.best_goal && g > d.dist[*d.best_goal])
            break;
        open.pop();
        if ((++pops & 1023) == 0 && deadline.expired())
            throw Error(ErrorKind::DeadlineExceeded, "uniform-cost search timed out");
        if (closed.size() <= s)
            closed.resize(s + 1, false);
        if (closed[s] || g > d.dist[s])
            continue;
        closed[s] = true;
        d.settled.push_back(s);
        if (!d.best_goal && space.is_goal(s))
            d.best_goal = s;
        const auto edges = space.successors(s);
        for (const Edge &e : edges) {
            ensure(e.target);
            const Cost ng = g + costs[e.action];
            if (ng < d.dist[e.target]) {
                d.dist[e.target] = ng;
                d.parent[e.target] = {s, e.action};
                open.push({ng, e.target});
            }
        }
    }
    return d;
}

}  // namespace

OptimalPlan optimal_plan_cost(const PlanningTask &task, std::span<const Cost> costs,
                              Deadline deadline) {
    StateSpace space(task);
    Dijkstra d = run(space, costs, deadline);
    if (!d.best_goal)
        throw Error(ErrorKind::Unsolvable, "task has no solution");
    OptimalPlan result;
    result.cost = d.dist[*d.best_goal];
    for (StateId s = *d.best_goal; s != space.initial(); s = d.parent[s].first)
        result.witness.steps.push_back(d.parent[s].second);
    std::reverse(result.witness.steps.begin(), result.witness.steps.end());
    return result;
}

OptimalPlan optimal_plan_cost(const PlanningTask &task, const CostFunction &costs,
                              Deadline deadline) {
    return optimal_plan_cost(task, costs.dense(*task.domain), deadline);
}

std::size_t count_optimal_plans(const PlanningTask &task, std::span<const Cost> costs,
                                std::size_t cap, Deadline deadline) {
    StateSpace space(task);
    Dijkstra d = run(space, costs, deadline);
    if (!d.best_goal)
        throw Error(ErrorKind::Unsolvable, "task has no solution");
    const Cost optimum = d.dist[*d.best_goal];

    // Costs are >= 1, so every tight edge strictly increases the distance and
    // the settle order is a topological order of the tight-edge DAG.
    std::vector<std::size_t> paths(space.size(), 0);
    std::vector<bool> is_settled(space.size(), false);
    for (StateId s : d.settled)
        is_settled[s] = true;
    paths[space.initial()] = 1;
    std::size_t total = 0;
    for (StateId s : d.settled) {
        if (paths[s] == 0)
            continue;
        if (d.dist[s] == optimum && space.is_goal(s))
            total = std::min(cap, total + paths[s]);
        for (const Edge &e : space.successors(s)) {
            if (e.target < is_settled.size() && is_settled[e.target] &&
                d.dist[s] + costs[e.action] == d.dist[e.target])
                paths[e.target] = std::min(cap, paths[e.target] + paths[s]);
        }
    }
    return total;
}

std::size_t count_optimal_plans(const PlanningTask &task, const CostFunction &costs,
                                std::size_t cap, Deadline deadline) {
    return count_optimal_plans(task, costs.dense(*task.domain), cap, deadline);
}

}  // namespace costforge
