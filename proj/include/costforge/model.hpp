#pragma once

// Grounded STRIPS semantics: states, actions, plans and cost functions.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace costforge {

using FluentId = std::uint32_t;
using ActionId = std::uint32_t;
using Cost = std::int64_t;

// Dense per-action cost table indexed by ActionId.
using ActionCosts = std::vector<Cost>;

// A state is a set of fluents stored as a fixed-width bitset. Two states over
// the same domain compare equal iff they hold the same fluents, so the bitset
// is the canonical form used for hashing and duplicate detection.
class State {
public:
    State() = default;
    explicit State(std::size_t num_fluents);
    static State from_fluents(std::size_t num_fluents, std::span<const FluentId> fluents);

    bool contains(FluentId f) const {
        return (words_[f >> 6] >> (f & 63)) & 1u;
    }
    void insert(FluentId f) { words_[f >> 6] |= std::uint64_t{1} << (f & 63); }
    void erase(FluentId f) { words_[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }
    bool contains_all(std::span<const FluentId> fluents) const;

    // Sorted fluent ids.
    std::vector<FluentId> fluents() const;
    std::size_t hash() const;

    friend bool operator==(const State &, const State &) = default;
    friend auto operator<=>(const State &, const State &) = default;

private:
    std::vector<std::uint64_t> words_;
};

struct StateHash {
    std::size_t operator()(const State &s) const { return s.hash(); }
};

struct ActionDef {
    std::string name;
    std::vector<FluentId> pre;
    std::vector<FluentId> add;
    std::vector<FluentId> del;
};

// Name-level action description used to build a Domain.
struct ActionSpec {
    std::string name;
    std::vector<std::string> pre;
    std::vector<std::string> add;
    std::vector<std::string> del;
};

// Shared vocabulary (fluents and actions) of a task family. Fluents and actions
// are interned in lexicographic name order, so comparing ActionId sequences
// lexicographically is the same as comparing the name sequences.
class Domain {
public:
    Domain(std::vector<std::string> fluents, std::vector<ActionSpec> actions);

    std::size_t num_fluents() const { return fluent_names_.size(); }
    std::size_t num_actions() const { return actions_.size(); }

    const std::string &fluent_name(FluentId id) const { return fluent_names_.at(id); }
    std::optional<FluentId> find_fluent(std::string_view name) const;
    FluentId fluent_id(std::string_view name) const;  // throws UnknownFluent

    const ActionDef &action(ActionId id) const { return actions_.at(id); }
    std::span<const ActionDef> actions() const { return actions_; }
    std::optional<ActionId> find_action(std::string_view name) const;
    ActionId action_id(std::string_view name) const;  // throws UnknownAction

    std::span<const std::string> fluent_names() const { return fluent_names_; }

    State make_state(std::span<const std::string> fluent_names) const;

private:
    std::vector<std::string> fluent_names_;
    std::vector<ActionDef> actions_;
    std::map<std::string, FluentId, std::less<>> fluent_index_;
    std::map<std::string, ActionId, std::less<>> action_index_;
};

// Partial map from action name to a positive integer cost. An empty map is
// the distinguished Empty cost function.
class CostFunction {
public:
    using Entries = std::map<std::string, Cost, std::less<>>;

    CostFunction() = default;
    static CostFunction uniform(const Domain &domain, Cost cost = 1);
    static CostFunction from_dense(const Domain &domain, std::span<const Cost> costs);

    void set(std::string action, Cost cost);  // throws NonPositiveCost
    std::optional<Cost> get(std::string_view action) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    bool total_over(const Domain &domain) const;
    const Entries &entries() const { return entries_; }

    // Dense table over the domain; throws MissingCost naming the first action
    // without a cost.
    ActionCosts dense(const Domain &domain) const;

    friend bool operator==(const CostFunction &, const CostFunction &) = default;

private:
    Entries entries_;
};

ActionCosts unit_costs(const Domain &domain);

struct Plan {
    std::vector<ActionId> steps;

    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }

    friend bool operator==(const Plan &, const Plan &) = default;
    friend auto operator<=>(const Plan &, const Plan &) = default;
};

Plan plan_from_names(const Domain &domain, std::span<const std::string> names);
std::vector<std::string> plan_names(const Domain &domain, const Plan &plan);
std::string format_plan(const Domain &domain, const Plan &plan);

struct PlanningTask {
    std::shared_ptr<const Domain> domain;
    State init;
    std::vector<FluentId> goal;  // sorted
    CostFunction costs;

    bool is_goal(const State &state) const { return state.contains_all(goal); }
};

bool applicable(const State &state, const ActionDef &action);

// (state \ del) ∪ add; throws NotApplicable when pre ⊄ state.
State apply(const State &state, const ActionDef &action);

struct Execution {
    std::vector<State> trace;  // s0 = I, s1, ..., sn on success; prefix up to the failure otherwise
    std::optional<std::size_t> failed_step;

    bool ok() const { return !failed_step.has_value(); }
};

Execution execute(const PlanningTask &task, const Plan &plan);

bool solves(const PlanningTask &task, const Plan &plan);

// Pairwise-distinct trace states; throws InapplicableAt(index) when the plan
// cannot be executed.
bool is_simple(const PlanningTask &task, const Plan &plan);

Cost plan_cost(const Plan &plan, std::span<const Cost> costs);
Cost plan_cost(const Plan &plan, const CostFunction &costs, const Domain &domain);

// Order-preserving subsequence containment, excluding equality.
bool is_subplan(const Plan &inner, const Plan &outer);

}  // namespace costforge
