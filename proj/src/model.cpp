#include "costforge/model.hpp"

#include "costforge/errors.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_set>

namespace costforge {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::UnknownAction: return "UnknownAction";
    case ErrorKind::UnknownFluent: return "UnknownFluent";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InapplicableAt: return "InapplicableAt";
    case ErrorKind::MissingCost: return "MissingCost";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::MissingPrior: return "MissingPrior";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonPositiveCost: return "NonPositiveCost";
    case ErrorKind::DeadlineExceeded: return "DeadlineExceeded";
    case ErrorKind::Unsolvable: return "Unsolvable";
    case ErrorKind::NoSolution: return "NoSolution";
    }
    return "Unknown";
}

std::string_view to_string(ValidationReason reason) {
    switch (reason) {
    case ValidationReason::NotSolving: return "NotSolving";
    case ValidationReason::NotSimple: return "NotSimple";
    case ValidationReason::UnknownAction: return "UnknownAction";
    case ValidationReason::UnknownFluent: return "UnknownFluent";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &message, std::optional<std::size_t> index,
             std::optional<ValidationReason> reason)
    : std::runtime_error(message), kind_(kind), index_(index), reason_(reason) {}

void throw_error(ErrorKind kind, const std::string &message, std::optional<std::size_t> index) {
    throw Error(kind, message, index);
}

// ---------------------------------------------------------------------------
// State

State::State(std::size_t num_fluents) : words_((num_fluents + 63) / 64, 0) {}

State State::from_fluents(std::size_t num_fluents, std::span<const FluentId> fluents) {
    State s(num_fluents);
    for (FluentId f : fluents)
        s.insert(f);
    return s;
}

bool State::contains_all(std::span<const FluentId> fluents) const {
    return std::all_of(fluents.begin(), fluents.end(),
                       [this](FluentId f) { return contains(f); });
}

std::vector<FluentId> State::fluents() const {
    std::vector<FluentId> result;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            int bit = std::countr_zero(bits);
            result.push_back(static_cast<FluentId>(w * 64 + bit));
            bits &= bits - 1;
        }
    }
    return result;
}

std::size_t State::hash() const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Domain

namespace {

std::vector<FluentId> resolve(const Domain &domain, const std::vector<std::string> &names) {
    std::vector<FluentId> ids;
    ids.reserve(names.size());
    for (const auto &n : names)
        ids.push_back(domain.fluent_id(n));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

Domain::Domain(std::vector<std::string> fluents, std::vector<ActionSpec> actions) {
    std::sort(fluents.begin(), fluents.end());
    if (std::adjacent_find(fluents.begin(), fluents.end()) != fluents.end())
        throw Error(ErrorKind::ValidationError, "duplicate fluent name");
    fluent_names_ = std::move(fluents);
    for (FluentId i = 0; i < fluent_names_.size(); ++i)
        fluent_index_.emplace(fluent_names_[i], i);

    std::sort(actions.begin(), actions.end(),
              [](const ActionSpec &a, const ActionSpec &b) { return a.name < b.name; });
    actions_.reserve(actions.size());
    for (const auto &spec : actions) {
        if (!actions_.empty() && actions_.back().name == spec.name)
            throw Error(ErrorKind::ValidationError, "duplicate action name: " + spec.name);
        ActionDef def{spec.name, resolve(*this, spec.pre), resolve(*this, spec.add),
                      resolve(*this, spec.del)};
        std::vector<FluentId> both;
        std::set_intersection(def.add.begin(), def.add.end(), def.del.begin(), def.del.end(),
                              std::back_inserter(both));
        if (!both.empty())
            throw Error(ErrorKind::ValidationError,
                        "action " + spec.name + " adds and deletes " + fluent_names_[both[0]]);
        action_index_.emplace(def.name, static_cast<ActionId>(actions_.size()));
        actions_.push_back(std::move(def));
    }
}

std::optional<FluentId> Domain::find_fluent(std::string_view name) const {
    auto it = fluent_index_.find(name);
    if (it == fluent_index_.end())
        return std::nullopt;
    return it->second;
}

FluentId Domain::fluent_id(std::string_view name) const {
    if (auto id = find_fluent(name))
        return *id;
    throw Error(ErrorKind::UnknownFluent, "unknown fluent: " + std::string(name));
}

std::optional<ActionId> Domain::find_action(std::string_view name) const {
    auto it = action_index_.find(name);
    if (it == action_index_.end())
        return std::nullopt;
    return it->second;
}

ActionId Domain::action_id(std::string_view name) const {
    if (auto id = find_action(name))
        return *id;
    throw Error(ErrorKind::UnknownAction, "unknown action: " + std::string(name));
}

State Domain::make_state(std::span<const std::string> names) const {
    State s(num_fluents());
    for (const auto &n : names)
        s.insert(fluent_id(n));
    return s;
}

// ---------------------------------------------------------------------------
// CostFunction

CostFunction CostFunction::uniform(const Domain &domain, Cost cost) {
    CostFunction c;
    for (const auto &a : domain.actions())
        c.set(a.name, cost);
    return c;
}

CostFunction CostFunction::from_dense(const Domain &domain, std::span<const Cost> costs) {
    CostFunction c;
    for (ActionId a = 0; a < domain.num_actions(); ++a)
        c.set(domain.action(a).name, costs[a]);
    return c;
}

void CostFunction::set(std::string action, Cost cost) {
    if (cost < 1)
        throw Error(ErrorKind::NonPositiveCost,
                    "cost of " + action + " must be >= 1, got " + std::to_string(cost));
    entries_[std::move(action)] = cost;
}

std::optional<Cost> CostFunction::get(std::string_view action) const {
    auto it = entries_.find(action);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

bool CostFunction::total_over(const Domain &domain) const {
    return std::all_of(domain.actions().begin(), domain.actions().end(),
                       [this](const ActionDef &a) { return entries_.contains(a.name); });
}

ActionCosts CostFunction::dense(const Domain &domain) const {
    ActionCosts costs(domain.num_actions());
    for (ActionId a = 0; a < domain.num_actions(); ++a) {
        auto c = get(domain.action(a).name);
        if (!c)
            throw Error(ErrorKind::MissingCost, "no cost for action " + domain.action(a).name);
        costs[a] = *c;
    }
    return costs;
}

ActionCosts unit_costs(const Domain &domain) { return ActionCosts(domain.num_actions(), 1); }

// ---------------------------------------------------------------------------
// Plans

Plan plan_from_names(const Domain &domain, std::span<const std::string> names) {
    Plan plan;
    plan.steps.reserve(names.size());
    for (const auto &n : names)
        plan.steps.push_back(domain.action_id(n));
    return plan;
}

std::vector<std::string> plan_names(const Domain &domain, const Plan &plan) {
    std::vector<std::string> names;
    names.reserve(plan.size());
    for (ActionId a : plan.steps)
        names.push_back(domain.action(a).name);
    return names;
}

std::string format_plan(const Domain &domain, const Plan &plan) {
    std::string out = "[";
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i)
            out += ", ";
        out += domain.action(plan.steps[i]).name;
    }
    return out + "]";
}

bool applicable(const State &state, const ActionDef &action) {
    return state.contains_all(action.pre);
}

State apply(const State &state, const ActionDef &action) {
    if (!applicable(state, action))
        throw Error(ErrorKind::NotApplicable, "action " + action.name + " is not applicable");
    State next = state;
    for (FluentId f : action.del)
        next.erase(f);
    for (FluentId f : action.add)
        next.insert(f);
    return next;
}

Execution execute(const PlanningTask &task, const Plan &plan) {
    Execution ex;
    ex.trace.reserve(plan.size() + 1);
    ex.trace.push_back(task.init);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const ActionDef &a = task.domain->action(plan.steps[i]);
        if (!applicable(ex.trace.back(), a)) {
            ex.failed_step = i;
            return ex;
        }
        ex.trace.push_back(apply(ex.trace.back(), a));
    }
    return ex;
}

bool solves(const PlanningTask &task, const Plan &plan) {
    Execution ex = execute(task, plan);
    return ex.ok() && task.is_goal(ex.trace.back());
}

bool is_simple(const PlanningTask &task, const Plan &plan) {
    Execution ex = execute(task, plan);
    if (!ex.ok())
        throw Error(ErrorKind::InapplicableAt,
                    "step " + std::to_string(*ex.failed_step) + " is not applicable",
                    ex.failed_step);
    std::unordered_set<State, StateHash> seen;
    for (const State &s : ex.trace) {
        if (!seen.insert(s).second)
            return false;
    }
    return true;
}

Cost plan_cost(const Plan &plan, std::span<const Cost> costs) {
    Cost total = 0;
    for (ActionId a : plan.steps)
        total += costs[a];
    return total;
}

Cost plan_cost(const Plan &plan, const CostFunction &costs, const Domain &domain) {
    Cost total = 0;
    for (ActionId a : plan.steps) {
        auto c = costs.get(domain.action(a).name);
        if (!c)
            throw Error(ErrorKind::MissingCost, "no cost for action " + domain.action(a).name);
        total += *c;
    }
    return total;
}

bool is_subplan(const Plan &inner, const Plan &outer) {
    if (inner.size() >= outer.size())
        return false;
    std::size_t i = 0;
    for (ActionId a : outer.steps) {
        if (i < inner.size() && inner.steps[i] == a)
            ++i;
    }
    return i == inner.size();
}

}  // namespace costforge
