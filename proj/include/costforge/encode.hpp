#pragma once

// Integer-program encoding of a cost function learning task.
//
// Variables:
//   x_i   binary, input plan i is (strictly) cheaper than all its alternatives
//   z_ij  binary, input plan i is (strictly) cheaper than alternative j
//   y_a   integer in [1, y_max], cost of relevant action a
//   d_a   integer in [0, y_max + max prior], |y_a - prior(a)| (refinement only)
//
// Rows (all written as  sum(coeff * var) <= rhs):
//   plan vs alternative   sum_a (n_pi(a) - n_alt(a)) y_a + M z_ij <= M - delta
//                         with delta = 1 for strict concepts, 0 otherwise
//   plan optimality       -sum_j z_ij + |alts_i| x_i <= 0
//   deviation             -y_a - d_a <= -prior(a),  y_a - d_a <= prior(a)
//
// The objective is  w1 * sum x - w2 * sum(y or d), maximized.

#include "costforge/enumerate.hpp"
#include "costforge/formats.hpp"

#include <span>
#include <string>
#include <vector>

namespace costforge {

enum class VarKind { Binary, Integer };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Integer;
    Cost lower = 0;
    Cost upper = 0;
};

struct Term {
    std::size_t var;
    Cost coeff;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Cost rhs = 0;
};

struct IntegerProgram {
    std::vector<Variable> vars;
    std::vector<Constraint> constraints;

    SolutionConcept solution_concept = SolutionConcept::Mcf;
    Cost y_max = 0;
    std::vector<ActionId> relevant;           // A^M, sorted
    std::vector<std::size_t> x;               // one per instance
    std::vector<std::vector<std::size_t>> z;  // per instance, one per alternative
    std::vector<std::size_t> y;               // aligned with `relevant`
    std::vector<std::size_t> d;               // aligned with `relevant`, refinement only

    std::size_t num_vars() const { return vars.size(); }
    std::size_t num_z() const;

    // Dense objective  w1 * sum x - w2 * sum(y or d).
    std::vector<Cost> objective(Cost plan_weight, Cost cost_weight) const;

    // Appends  sum x <= q  and  -sum x <= -q.
    void add_plan_count_equality(std::size_t q);

    // Integer-exact check of bounds and rows.
    bool is_feasible(std::span<const Cost> assignment) const;
};

// Union of the actions used by the input plans and their alternatives (A^M).
std::vector<ActionId> relevant_actions(const CflTask &cfl,
                                       std::span<const AlternativeSet> alternatives);

// max(2 * longest plan, |A^M|), and at least the largest relevant prior cost
// for refinement concepts.
Cost default_y_max(const CflTask &cfl, std::span<const AlternativeSet> alternatives,
                   std::span<const ActionId> relevant, SolutionConcept concept_);

// Throws MissingPrior when a refinement concept lacks a prior for a relevant
// action.
IntegerProgram build_milp(const CflTask &cfl, std::span<const AlternativeSet> alternatives,
                          std::span<const ActionId> relevant, SolutionConcept concept_,
                          Cost y_max);

// CPLEX LP text (rows in construction order), for cross-checking with
// external solvers.
std::string to_lp_format(const IntegerProgram &ip, std::span<const Cost> objective);

}  // namespace costforge
