#include "oracles.hpp"

#include "costforge/bench.hpp"

#include <algorithm>
#include <set>

namespace oracle {

using namespace costforge;

namespace {

void dfs(const PlanningTask &task, const State &state, std::set<State> &on_path, Plan &prefix,
         std::vector<Plan> &out) {
    if (task.is_goal(state)) {
        out.push_back(prefix);
        return;
    }
    const auto actions = task.domain->actions();
    for (ActionId a = 0; a < actions.size(); ++a) {
        if (!applicable(state, actions[a]))
            continue;
        State next = apply(state, actions[a]);
        if (on_path.contains(next))
            continue;
        on_path.insert(next);
        prefix.steps.push_back(a);
        dfs(task, next, on_path, prefix, out);
        prefix.steps.pop_back();
        on_path.erase(next);
    }
}

Cost cost_of(const Plan &plan, const std::vector<Cost> &dense) {
    Cost total = 0;
    for (ActionId a : plan.steps)
        total += dense[a];
    return total;
}

bool counts(const Plan &own, const std::vector<Plan> &all, const std::vector<Cost> &dense,
            bool strict) {
    const Cost c = cost_of(own, dense);
    for (const Plan &p : all) {
        if (p == own)
            continue;
        const Cost other = cost_of(p, dense);
        if (strict ? other <= c : other < c)
            return false;
    }
    return true;
}

}  // namespace

std::vector<Plan> simple_plans(const PlanningTask &task) {
    std::vector<Plan> out;
    std::set<State> on_path{task.init};
    Plan prefix;
    dfs(task, task.init, on_path, prefix, out);
    return out;
}

std::size_t count_optimal(const CflTask &cfl, const std::vector<Cost> &dense, bool strict) {
    std::size_t q = 0;
    for (std::size_t i = 0; i < cfl.size(); ++i) {
        const auto all = simple_plans(cfl.task(i));
        q += counts(cfl.instances[i].plan, all, dense, strict) ? 1 : 0;
    }
    return q;
}

SweepResult sweep(const CflTask &cfl, const std::vector<ActionId> &actions, Cost lo, Cost hi) {
    const Domain &domain = *cfl.domain;
    const bool strict = is_strict(cfl.solution_concept);
    const bool refinement = is_refinement(cfl.solution_concept);
    std::vector<Cost> dense =
        cfl.prior_costs.total_over(domain) ? cfl.prior_costs.dense(domain) : unit_costs(domain);
    const std::vector<Cost> prior = dense;

    std::vector<std::vector<Plan>> plans;
    for (std::size_t i = 0; i < cfl.size(); ++i)
        plans.push_back(simple_plans(cfl.task(i)));

    SweepResult result;
    bool any = false;
    std::vector<Cost> y(actions.size(), lo);
    while (true) {
        for (std::size_t s = 0; s < actions.size(); ++s)
            dense[actions[s]] = y[s];
        std::size_t q = 0;
        for (std::size_t i = 0; i < cfl.size(); ++i)
            q += counts(cfl.instances[i].plan, plans[i], dense, strict) ? 1 : 0;
        Cost secondary = 0;
        for (std::size_t s = 0; s < actions.size(); ++s)
            secondary += refinement ? std::abs(y[s] - prior[actions[s]]) : y[s];
        ++result.assignments;
        if (!any || q > result.best_q || (q == result.best_q && secondary < result.best_secondary)) {
            any = true;
            result.best_q = q;
            result.best_secondary = secondary;
            result.optima.clear();
        }
        if (q == result.best_q && secondary == result.best_secondary)
            result.optima.push_back(y);

        std::size_t s = 0;
        while (s < y.size() && y[s] == hi)
            y[s++] = lo;
        if (s == y.size())
            break;
        ++y[s];
    }
    return result;
}

CflTask random_grid_cfl(std::size_t side, std::size_t instances, SolutionConcept concept_,
                        std::mt19937_64 &rng) {
    CflTask cfl;
    cfl.domain = grid_domain(side);
    cfl.solution_concept = concept_;
    const std::size_t cells = side * side;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t init = uniform_below(rng, cells);
        std::size_t goal = uniform_below(rng, cells - 1);
        if (goal >= init)
            ++goal;
        PlanningTask task = grid_task(cfl.domain, side, init, goal);
        const auto all = simple_plans(task);
        const Plan plan = all[uniform_below(rng, all.size())];
        cfl.instances.push_back({task.init, task.goal, plan});
    }
    if (is_refinement(concept_)) {
        for (const auto &a : cfl.domain->actions())
            cfl.prior_costs.set(a.name, 1 + static_cast<Cost>(uniform_below(rng, 3)));
    }
    return cfl;
}

std::filesystem::path fixture(const std::string &name) {
    return std::filesystem::path(COSTFORGE_FIXTURE_DIR) / name;
}

}  // namespace oracle
