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

constexpr Cost kInfinite = std::numeric_limits<Cost>::max();

// Exact goal distances over the fully explored state graph (backward
// Dijkstra). Consistent, so f = g + h never decreases along a path.
std::vector<Cost> goal_distances(StateSpace &space, std::span<const Cost> metric) {
    const std::size_t n = space.size();
    std::vector<std::vector<std::pair<StateId, Cost>>> reverse(n);
    for (StateId s = 0; s < n; ++s) {
        for (const Edge &e : space.successors(s))
            reverse[e.target].push_back({s, metric[e.action]});
    }
    std::vector<Cost> dist(n, kInfinite);
    using Item = std::pair<Cost, StateId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    for (StateId s = 0; s < n; ++s) {
        if (space.is_goal(s)) {
            dist[s] = 0;
            open.push({0, s});
        }
    }
    while (!open.empty()) {
        auto [d, s] = open.top();
        open.pop();
        if (d > dist[s])
            continue;
        for (auto [p, c] : reverse[s]) {
            if (d + c < dist[p]) {
                dist[p] = d + c;
                open.push({dist[p], p});
            }
        }
    }
    return dist;
}

struct SearchNode {
    std::int64_t parent;  // -1 for the root
    StateId state;
};

struct OpenEntry {
    Cost f;
    Cost g;
    std::vector<ActionId> steps;
    std::uint32_t node;
};

// Min-heap order on (f, length, step sequence). ActionIds follow name order,
// so the sequence comparison is the lexicographic name comparison.
struct LaterEntry {
    bool operator()(const OpenEntry &a, const OpenEntry &b) const {
        if (a.f != b.f)
            return a.f > b.f;
        if (a.steps.size() != b.steps.size())
            return a.steps.size() > b.steps.size();
        return a.steps > b.steps;
    }
};

}  // namespace

AlternativeSet enumerate_plans(const PlanningTask &task, PlanLimit k,
                               std::span<const Cost> metric, const Plan *exclude,
                               const EnumerationLimits &limits) {
    AlternativeSet result;
    if (k && *k == 0)
        return result;

    StateSpace space(task);
    std::vector<Cost> h;
    const bool informed = space.explore(limits.heuristic_state_limit);
    if (informed)
        h = goal_distances(space, metric);
    auto heuristic = [&](StateId s) -> Cost { return informed ? h[s] : 0; };

    if (heuristic(space.initial()) == kInfinite) {
        result.exhausted = true;
        return result;
    }

    std::vector<SearchNode> nodes;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, LaterEntry> open;
    nodes.push_back({-1, space.initial()});
    open.push({heuristic(space.initial()), 0, {}, 0});

    auto on_path = [&](std::uint32_t node, StateId s) {
        for (std::int64_t n = node; n >= 0; n = nodes[n].parent) {
            if (nodes[n].state == s)
                return true;
        }
        return false;
    };

    std::size_t pops = 0;
    while (!open.empty()) {
        if ((++pops & 255) == 0 && limits.deadline.expired()) {
            result.deadline_exceeded = true;
            return result;
        }
        OpenEntry entry = std::move(const_cast<OpenEntry &>(open.top()));
        open.pop();
        const StateId s = nodes[entry.node].state;

        if (space.is_goal(s) && !(exclude && exclude->steps == entry.steps)) {
            result.plans.push_back(Plan{entry.steps});
            if (k && result.plans.size() >= *k)
                return result;
        }

        const auto edges = space.successors(s);
        for (const Edge &e : edges) {
            const Cost ht = heuristic(e.target);
            if (ht == kInfinite || on_path(entry.node, e.target))
                continue;
            if (nodes.size() >= limits.node_limit) {
                result.node_limit_hit = true;
                return result;
            }
            nodes.push_back({entry.node, e.target});
            OpenEntry child{entry.g + metric[e.action] + ht, entry.g + metric[e.action],
                            entry.steps, static_cast<std::uint32_t>(nodes.size() - 1)};
            child.steps.push_back(e.action);
            open.push(std::move(child));
        }
    }
    result.exhausted = true;
    return result;
}

AlternativeSet enumerate_alternatives(const PlanningTask &task, const Plan &input_plan,
                                      PlanLimit k, std::span<const Cost> metric,
                                      const EnumerationLimits &limits) {
    return enumerate_plans(task, k, metric, &input_plan, limits);
}

std::vector<Plan> all_simple_plans(const PlanningTask &task, Deadline deadline) {
    const ActionCosts unit = unit_costs(*task.domain);
    EnumerationLimits limits;
    limits.deadline = deadline;
    AlternativeSet set = enumerate_plans(task, std::nullopt, unit, nullptr, limits);
    if (set.truncated())
        throw Error(ErrorKind::DeadlineExceeded, "simple-plan enumeration did not finish");
    return std::move(set.plans);
}

}  // namespace costforge
