#include "costforge/solve.hpp"

#include "costforge/errors.hpp"
#include "costforge/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace costforge {

bool LearnDiagnostics::all_exhausted() const {
    return std::all_of(exhausted.begin(), exhausted.end(), [](bool b) { return b; });
}

namespace {

// Builds a full assignment from y values alone: z and x take the largest
// values the rows allow, d the exact deviation. With `q` set, surplus x are
// cleared so that sum x = q; nullopt if fewer than q plans can be optimal.
class Completion {
public:
    Completion(const CflTask &cfl, const IntegerProgram &ip,
               const std::vector<AlternativeSet> &alternatives, std::vector<Cost> prior,
               Cost y_max)
        : cfl_(cfl), ip_(ip), alternatives_(alternatives), prior_(std::move(prior)),
          y_max_(y_max), slot_(cfl.domain->num_actions(), kNone),
          by_slot_(ip.relevant.size()) {
        for (std::size_t i = 0; i < ip.relevant.size(); ++i)
            slot_[ip.relevant[i]] = i;
        for (std::size_t i = 0; i < cfl.size(); ++i) {
            for (const Plan &alt : alternatives[i].plans) {
                std::vector<Cost> net(ip.relevant.size(), 0);
                for (ActionId a : alt.steps)
                    ++net[slot_[a]];
                for (ActionId a : cfl.instances[i].plan.steps)
                    --net[slot_[a]];
                for (std::size_t s = 0; s < net.size(); ++s) {
                    if (net[s] != 0)
                        by_slot_[s].push_back({rows_.size(), net[s]});
                }
                rows_.push_back({i, std::move(net)});
            }
        }
    }

    // Completes y, then moves every cost towards its target (1, or the prior
    // under refinement) as far as the rows of the plans made optimal allow,
    // and completes again.
    std::optional<std::vector<Cost>> improved(std::vector<Cost> y,
                                              std::optional<std::size_t> q) const {
        auto first = (*this)(y, q);
        if (!first)
            return first;
        const Cost delta = is_strict(ip_.solution_concept) ? 1 : 0;
        std::vector<Cost> slack(rows_.size(), 0);
        std::vector<bool> active(rows_.size(), false);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            active[r] = (*first)[ip_.x[rows_[r].instance]] == 1;
            for (std::size_t s = 0; s < y.size(); ++s)
                slack[r] += rows_[r].net[s] * y[s];
            slack[r] -= delta;
        }
        for (bool moved = true; moved;) {
            moved = false;
            for (std::size_t s = 0; s < y.size(); ++s) {
                const Cost target = std::min(prior_[s], y_max_);
                if (y[s] == target)
                    continue;
                const Cost sign = y[s] > target ? -1 : 1;
                Cost step = sign < 0 ? y[s] - target : target - y[s];
                for (const auto &[r, net] : by_slot_[s]) {
                    const Cost rate = -sign * net;  // slack lost per unit step
                    if (active[r] && rate > 0)
                        step = std::min(step, slack[r] / rate);
                }
                if (step <= 0)
                    continue;
                y[s] += sign * step;
                for (const auto &[r, net] : by_slot_[s])
                    slack[r] += sign * step * net;
                moved = true;
            }
        }
        return (*this)(y, q);
    }

    std::optional<std::vector<Cost>> operator()(std::span<const Cost> y,
                                                std::optional<std::size_t> q) const {
        std::vector<Cost> a(ip_.num_vars(), 0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            a[ip_.y[i]] = y[i];
            if (!ip_.d.empty())
                a[ip_.d[i]] = y[i] > prior_[i] ? y[i] - prior_[i] : prior_[i] - y[i];
        }
        const Cost delta = is_strict(ip_.solution_concept) ? 1 : 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < cfl_.size(); ++i) {
            const Cost own = cost(cfl_.instances[i].plan, y);
            bool all = true;
            for (std::size_t j = 0; j < alternatives_[i].plans.size(); ++j) {
                const bool cheaper = own + delta <= cost(alternatives_[i].plans[j], y);
                a[ip_.z[i][j]] = cheaper ? 1 : 0;
                all = all && cheaper;
            }
            a[ip_.x[i]] = all ? 1 : 0;
            count += all ? 1 : 0;
        }
        if (q) {
            if (count < *q)
                return std::nullopt;
            for (std::size_t i = cfl_.size(); i-- > 0 && count > *q;) {
                if (a[ip_.x[i]] == 1) {
                    a[ip_.x[i]] = 0;
                    --count;
                }
            }
        }
        return a;
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    Cost cost(const Plan &plan, std::span<const Cost> y) const {
        Cost total = 0;
        for (ActionId a : plan.steps)
            total += y[slot_[a]];
        return total;
    }

    const CflTask &cfl_;
    struct Row {
        std::size_t instance;
        std::vector<Cost> net;  // alternative minus own plan, per slot
    };
    struct Entry {
        std::size_t row;
        Cost net;
    };

    const IntegerProgram &ip_;
    const std::vector<AlternativeSet> &alternatives_;
    std::vector<Cost> prior_;
    Cost y_max_;
    std::vector<std::size_t> slot_;
    std::vector<Row> rows_;
    std::vector<std::vector<Entry>> by_slot_;
};

constexpr std::size_t kFixedSolveNodes = 2000;

Cost round_to_range(double v, Cost lo, Cost hi) {
    if (!std::isfinite(v))
        return lo;
    return std::clamp<Cost>(static_cast<Cost>(std::floor(v + 0.5)), lo, hi);
}

std::size_t count_x(const IntegerProgram &ip, std::span<const Cost> assignment) {
    std::size_t q = 0;
    for (std::size_t v : ip.x)
        q += static_cast<std::size_t>(assignment[v]);
    return q;
}

}  // namespace

LearnResult lacfip(const CflTask &cfl, const LearnOptions &options) {
    Stopwatch total;
    const Domain &domain = *cfl.domain;
    const SolutionConcept concept_ = cfl.solution_concept;
    const bool refinement = is_refinement(concept_);
    if (refinement && !cfl.prior_costs.total_over(domain))
        throw Error(ErrorKind::MissingPrior, "refinement needs a prior cost for every action");

    LearnResult result;
    result.diagnostics.k_used = options.k;

    // Alternatives are ranked by the prior when one is given, else by length.
    const ActionCosts metric = cfl.prior_costs.total_over(domain)
                                   ? cfl.prior_costs.dense(domain)
                                   : unit_costs(domain);
    EnumerationLimits limits;
    limits.deadline = options.deadline;
    limits.node_limit = options.enumeration_node_limit;
    std::vector<AlternativeSet> alternatives;
    Stopwatch enumerate_clock;
    for (std::size_t i = 0; i < cfl.size(); ++i) {
        alternatives.push_back(enumerate_alternatives(cfl.task(i), cfl.instances[i].plan,
                                                      options.k, metric, limits));
        result.diagnostics.exhausted.push_back(alternatives.back().exhausted);
        result.diagnostics.alternatives.push_back(alternatives.back().plans.size());
    }
    result.diagnostics.enumerate_ms = enumerate_clock.elapsed_ms();
    bool timed_out = std::any_of(alternatives.begin(), alternatives.end(),
                                 [](const AlternativeSet &s) { return s.deadline_exceeded; });

    const std::vector<ActionId> relevant = relevant_actions(cfl, alternatives);
    const Cost y_max =
        options.y_max.value_or(default_y_max(cfl, alternatives, relevant, concept_));
    IntegerProgram ip = build_milp(cfl, alternatives, relevant, concept_, y_max);
    result.diagnostics.relevant = relevant;
    result.diagnostics.y_max = y_max;

    std::vector<Cost> prior(relevant.size(), 1);
    if (refinement) {
        for (std::size_t i = 0; i < relevant.size(); ++i)
            prior[i] = *cfl.prior_costs.get(domain.action(relevant[i]).name);
    }
    const Completion complete(cfl, ip, alternatives, prior, y_max);

    auto seeds_for = [&](std::optional<std::size_t> q) {
        std::vector<std::vector<Cost>> seeds;
        std::vector<Cost> ones(relevant.size(), 1);
        if (auto s = complete.improved(ones, q))
            seeds.push_back(std::move(*s));
        if (refinement) {
            std::vector<Cost> clipped(prior.size());
            for (std::size_t i = 0; i < prior.size(); ++i)
                clipped[i] = std::min(prior[i], y_max);
            if (auto s = complete.improved(clipped, q))
                seeds.push_back(std::move(*s));
        }
        return seeds;
    };
    auto rounding = [&](std::optional<std::size_t> q) -> RoundingHeuristic {
        return [&, q](std::span<const double> lp) {
            std::vector<Cost> y(relevant.size());
            for (std::size_t i = 0; i < relevant.size(); ++i)
                y[i] = round_to_range(lp[ip.y[i]], 1, y_max);
            return complete.improved(std::move(y), q);
        };
    };

    SolveOptions phase1;
    phase1.deadline = options.deadline;
    phase1.seeds = seeds_for(std::nullopt);
    phase1.heuristic = rounding(std::nullopt);
    phase1.node_limit = options.solver_node_limit;
    Stopwatch phase1_clock;
    const IpSolution first = solve_ip(ip, ip.objective(1, 0), phase1);
    result.diagnostics.phase1_ms = phase1_clock.elapsed_ms();
    result.diagnostics.phase1_nodes = first.nodes;
    if (first.assignment.empty())
        throw Error(ErrorKind::NoSolution, "no feasible cost assignment found before the deadline");
    timed_out = timed_out || first.status != IpStatus::Optimal;
    const std::size_t q = count_x(ip, first.assignment);

    ip.add_plan_count_equality(q);
    SolveOptions phase2;
    phase2.deadline = options.deadline;
    phase2.seeds = seeds_for(q);
    phase2.seeds.push_back(first.assignment);
    {
        std::vector<Cost> y(relevant.size());
        for (std::size_t i = 0; i < relevant.size(); ++i)
            y[i] = first.assignment[ip.y[i]];
        if (auto s = complete.improved(std::move(y), q)) {
            // Sub-problem with the optimal plan set fixed: no big-M row is
            // free, so its relaxation is tight and it yields a good incumbent.
            IntegerProgram fixed = ip;
            for (std::size_t i = 0; i < cfl.size(); ++i) {
                const Cost chosen = (*s)[ip.x[i]];
                fixed.vars[ip.x[i]].lower = fixed.vars[ip.x[i]].upper = chosen;
                for (std::size_t zv : ip.z[i]) {
                    fixed.vars[zv].lower = chosen;
                    fixed.vars[zv].upper = std::min(fixed.vars[zv].upper, chosen == 1 ? Cost{1} : Cost{0});
                }
            }
            // Bounded by the node limit alone, so that a phase 1 that used up
            // the budget still hands back a polished assignment.
            SolveOptions sub;
            sub.seeds.push_back(*s);
            sub.heuristic = rounding(q);
            sub.node_limit = kFixedSolveNodes;
            const IpSolution polished = solve_ip(fixed, ip.objective(0, 1), sub);
            phase2.seeds.push_back(std::move(*s));
            if (!polished.assignment.empty())
                phase2.seeds.push_back(polished.assignment);
        }
    }
    phase2.heuristic = rounding(q);
    phase2.node_limit = options.solver_node_limit;
    Stopwatch phase2_clock;
    const IpSolution second = solve_ip(ip, ip.objective(0, 1), phase2);
    result.diagnostics.phase2_ms = phase2_clock.elapsed_ms();
    result.diagnostics.phase2_nodes = second.nodes;
    timed_out = timed_out || second.status != IpStatus::Optimal;
    const std::vector<Cost> &best = second.assignment.empty() ? first.assignment : second.assignment;

    result.q = count_x(ip, best);
    for (std::size_t v : ip.x)
        result.x.push_back(static_cast<int>(best[v]));
    for (std::size_t v : (refinement ? ip.d : ip.y))
        result.secondary_value += best[v];

    std::vector<Cost> dense = refinement ? cfl.prior_costs.dense(domain) : unit_costs(domain);
    for (std::size_t i = 0; i < relevant.size(); ++i)
        dense[relevant[i]] = best[ip.y[i]];
    result.costs = CostFunction::from_dense(domain, dense);

    result.diagnostics.variables = ip.num_vars();
    result.diagnostics.constraints = ip.constraints.size();
    result.status = timed_out ? LearnStatus::TimedOut : LearnStatus::Optimal;
    result.diagnostics.total_ms = total.elapsed_ms();
    return result;
}

LearnResult baseline(const CflTask &cfl, Deadline deadline) {
    Stopwatch total;
    const Domain &domain = *cfl.domain;
    LearnResult result;
    if (is_refinement(cfl.solution_concept)) {
        if (!cfl.prior_costs.total_over(domain))
            throw Error(ErrorKind::MissingPrior, "refinement needs a prior cost for every action");
        result.costs = cfl.prior_costs;
    } else {
        result.costs = CostFunction::uniform(domain);
    }
    const RatioReport report =
        optimal_ratio(cfl, result.costs, is_strict(cfl.solution_concept), deadline);
    result.q = report.optimal;
    for (const auto &v : report.verdicts)
        result.x.push_back(is_strict(cfl.solution_concept) ? v.strictly_optimal : v.optimal);
    result.diagnostics.y_max = 0;
    result.diagnostics.total_ms = total.elapsed_ms();
    return result;
}

}  // namespace costforge
