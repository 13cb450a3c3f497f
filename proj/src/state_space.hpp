#pragma once

// Lazily expanded explicit state graph shared by the enumerator and the
// uniform-cost planner.

#include "costforge/model.hpp"

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

namespace costforge::detail {

using StateId = std::uint32_t;

struct Edge {
    ActionId action;
    StateId target;
};

class StateSpace {
public:
    explicit StateSpace(const PlanningTask &task) : task_(task) { intern(task.init); }

    StateId initial() const { return 0; }
    std::size_t size() const { return states_.size(); }
    const State &state(StateId id) const { return states_[id]; }
    bool is_goal(StateId id) const { return task_.is_goal(states_[id]); }

    // Successors in ActionId order.
    const std::vector<Edge> &successors(StateId id) {
        if (!expanded_[id]) {
            std::vector<Edge> edges;
            const State s = states_[id];
            const auto actions = task_.domain->actions();
            for (ActionId a = 0; a < actions.size(); ++a) {
                if (applicable(s, actions[a]))
                    edges.push_back({a, intern(apply(s, actions[a]))});
            }
            successors_[id] = std::move(edges);
            expanded_[id] = true;
        }
        return successors_[id];
    }

    // Expands every reachable state; false when more than `limit` exist.
    bool explore(std::size_t limit) {
        for (StateId id = 0; id < states_.size(); ++id) {
            if (states_.size() > limit)
                return false;
            successors(id);
        }
        return states_.size() <= limit;
    }

private:
    StateId intern(const State &s) {
        auto [it, inserted] = index_.try_emplace(s, static_cast<StateId>(states_.size()));
        if (inserted) {
            states_.push_back(s);
            successors_.emplace_back();
            expanded_.push_back(false);
        }
        return it->second;
    }

    const PlanningTask &task_;
    std::vector<State> states_;
    std::unordered_map<State, StateId, StateHash> index_;
    std::vector<std::vector<Edge>> successors_;
    std::vector<bool> expanded_;
};

}  // namespace costforge::detail
