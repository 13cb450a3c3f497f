#include "costforge/branch_and_bound.hpp"

#include <cmath>
#include <memory>
#include <queue>

namespace costforge {

namespace {

constexpr double kIntegralityTol = 1e-6;

struct BoundChange {
    std::shared_ptr<const BoundChange> parent;
    std::size_t var;
    bool is_upper;
    Cost value;
};

struct Node {
    Rational bound;  // valid upper bound inherited from the parent
    std::size_t depth;
    std::size_t id;
    std::shared_ptr<const BoundChange> changes;
};

// Best bound first, then deeper, then older.
struct WorseNode {
    bool operator()(const Node &a, const Node &b) const {
        if (a.bound != b.bound)
            return a.bound < b.bound;
        if (a.depth != b.depth)
            return a.depth < b.depth;
        return a.id > b.id;
    }
};

Cost floor_of(const Rational &q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f.get_si();
}

Cost evaluate(std::span<const Cost> objective, std::span<const Cost> assignment) {
    Cost total = 0;
    for (std::size_t v = 0; v < objective.size(); ++v)
        total += objective[v] * assignment[v];
    return total;
}

}  // namespace

IpSolution solve_ip(const IntegerProgram &ip, std::span<const Cost> objective,
                    const SolveOptions &options) {
    IpSolution result;
    const std::size_t n = ip.vars.size();

    auto offer = [&](std::vector<Cost> candidate) {
        if (!ip.is_feasible(candidate))
            return false;
        const Cost value = evaluate(objective, candidate);
        if (!result.objective_value || value > *result.objective_value) {
            result.objective_value = value;
            result.assignment = std::move(candidate);
        }
        return true;
    };
    for (const auto &seed : options.seeds)
        offer(seed);

    std::vector<Cost> root_lower(n), root_upper(n);
    for (std::size_t v = 0; v < n; ++v) {
        root_lower[v] = ip.vars[v].lower;
        root_upper[v] = ip.vars[v].upper;
    }

    FloatDualSimplex lp(ip, objective);
    std::unique_ptr<DualSimplex> exact;
    std::priority_queue<Node, std::vector<Node>, WorseNode> open;
    std::size_t next_id = 0;
    open.push({Rational(0), 0, next_id++, nullptr});
    bool root = true;
    std::vector<Cost> lower, upper;

    auto prunable = [&](const Rational &bound) {
        return result.objective_value && floor_of(bound) <= *result.objective_value;
    };
    auto finish = [&](IpStatus status) {
        result.status = status;
        result.lp_iterations = lp.iterations() + (exact ? exact->iterations() : 0);
        return result;
    };
    auto branch = [&](const Node &node, std::size_t var, Cost down, const Rational &bound) {
        open.push({bound, node.depth + 1, next_id++,
                   std::make_shared<const BoundChange>(BoundChange{node.changes, var, false, down + 1})});
        open.push({bound, node.depth + 1, next_id++,
                   std::make_shared<const BoundChange>(BoundChange{node.changes, var, true, down})});
    };

    // Exact rational re-solve of a node; returns false on timeout.
    auto solve_exactly = [&](const Node &node) {
        ++result.exact_fallbacks;
        if (!exact)
            exact = std::make_unique<DualSimplex>(ip, objective);
        const LpStatus status = exact->solve(lower, upper, options.deadline);
        if (status == LpStatus::TimedOut)
            return false;
        if (status == LpStatus::Infeasible)
            return true;
        const Rational value = exact->objective_value();
        if (prunable(value))
            return true;
        const auto &x = exact->values();
        std::optional<std::size_t> var;
        Rational best_distance;
        for (std::size_t v = 0; v < n; ++v) {
            if (x[v].get_den() == 1)
                continue;
            const Rational frac = x[v] - floor_of(x[v]);
            const Rational distance = frac < Rational(1, 2) ? frac : Rational(1) - frac;
            if (!var || distance > best_distance) {
                var = v;
                best_distance = distance;
            }
        }
        if (!var) {
            std::vector<Cost> integral(n);
            for (std::size_t v = 0; v < n; ++v)
                integral[v] = x[v].get_num().get_si();
            offer(std::move(integral));
            return true;
        }
        if (options.heuristic) {
            std::vector<double> approx(n);
            for (std::size_t v = 0; v < n; ++v)
                approx[v] = x[v].get_d();
            if (auto candidate = options.heuristic(approx))
                offer(std::move(*candidate));
            if (prunable(value))
                return true;
        }
        branch(node, *var, floor_of(x[*var]), value);
        return true;
    };

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (!root && prunable(node.bound))
            continue;
        if (options.deadline.expired() ||
            (options.node_limit != 0 && result.nodes >= options.node_limit))
            return finish(IpStatus::TimedOut);
        ++result.nodes;
        root = false;

        lower = root_lower;
        upper = root_upper;
        // Walk root-ward; the deepest change on a variable is the tightest.
        std::vector<bool> seen_lo(n, false), seen_hi(n, false);
        for (auto c = node.changes; c; c = c->parent) {
            if (c->is_upper && !seen_hi[c->var]) {
                upper[c->var] = c->value;
                seen_hi[c->var] = true;
            } else if (!c->is_upper && !seen_lo[c->var]) {
                lower[c->var] = c->value;
                seen_lo[c->var] = true;
            }
        }

        const LpStatus status = lp.solve(lower, upper, options.deadline);
        if (status == LpStatus::TimedOut)
            return finish(IpStatus::TimedOut);
        if (status == LpStatus::Infeasible) {
            if (proves_infeasible(ip, lower, upper, lp.farkas()))
                continue;
            if (!solve_exactly(node))
                return finish(IpStatus::TimedOut);
            continue;
        }

        const Rational bound = safe_dual_bound(ip, objective, lower, upper, lp.duals());
        if (prunable(bound))
            continue;

        const auto &x = lp.values();
        std::optional<std::size_t> var;
        double best_distance = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            const double frac = x[v] - std::floor(x[v]);
            const double distance = std::min(frac, 1.0 - frac);
            if (distance <= kIntegralityTol)
                continue;
            if (!var || distance > best_distance + 1e-12) {
                var = v;
                best_distance = distance;
            }
        }
        if (!var) {
            std::vector<Cost> integral(n);
            for (std::size_t v = 0; v < n; ++v)
                integral[v] = static_cast<Cost>(std::llround(x[v]));
            const Cost value = evaluate(objective, integral);
            // The node is closed only when the rounded point is feasible and
            // meets the exact bound; otherwise the float solve was too loose.
            if (offer(std::move(integral)) && value >= floor_of(bound))
                continue;
            if (!solve_exactly(node))
                return finish(IpStatus::TimedOut);
            continue;
        }
        if (options.heuristic) {
            if (auto candidate = options.heuristic(x))
                offer(std::move(*candidate));
            if (prunable(bound))
                continue;
        }
        branch(node, *var, static_cast<Cost>(std::floor(x[*var])), bound);
    }
    return finish(result.objective_value ? IpStatus::Optimal : IpStatus::Infeasible);
}

}  // namespace costforge
