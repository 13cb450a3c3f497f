// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Criterion numbers given as arguments restrict the run.

#include "oracles.hpp"

#include "costforge/bench.hpp"
#include "costforge/evaluate.hpp"
#include "costforge/solve.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace costforge;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string &what) {
        if (!condition) {
            ok = false;
            detail << " [" << what << "]";
        }
    }
};

CflTask fixture(const char *name, std::optional<SolutionConcept> concept_ = std::nullopt) {
    CflTask t = load_cfl(oracle::fixture(name));
    if (concept_)
        t.solution_concept = *concept_;
    return t;
}

Cost deviation(const CflTask &t, const CostFunction &c) {
    Cost total = 0;
    for (const auto &[name, prior] : t.prior_costs.entries())
        total += std::abs(*c.get(name) - prior);
    return total;
}

std::vector<Cost> relevant_costs(const CflTask &t, const LearnResult &r) {
    std::vector<Cost> y;
    for (ActionId a : r.diagnostics.relevant)
        y.push_back(*r.costs.get(t.domain->action(a).name));
    return y;
}

bool all_strict(const CflTask &t, const CostFunction &c) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!is_strictly_optimal(t.instances[i].plan, t.task(i), c))
            return false;
    }
    return true;
}

// Validation agrees with Q whenever every alternative set was exhausted.
bool consistent(const CflTask &t, const LearnResult &r) {
    if (!r.diagnostics.all_exhausted())
        return true;
    const RatioReport report = optimal_ratio(t, r.costs, is_strict(t.solution_concept));
    return report.ratio() == static_cast<double>(r.q) / static_cast<double>(t.size());
}

void criterion1(Outcome &o) {
    CflTask t = fixture("triangle.json");
    const LearnResult r = lacfip(t);
    o.expect(r.q == 1, "Q=" + std::to_string(r.q));
    o.expect(r.status == LearnStatus::Optimal, "not proven optimal");
    o.expect(r.diagnostics.relevant.size() == 4, "relevant actions");
    const auto sweep = oracle::sweep(t, r.diagnostics.relevant, 1, 3);
    o.expect(sweep.assignments == 81, "sweep size");
    o.expect(sweep.best_q == 1, "some assignment makes both plans optimal");
}

void criterion2(Outcome &o) {
    CflTask t = fixture("table1.json");
    const LearnResult r = lacfip(t);
    o.expect(r.q == 2, "Q=" + std::to_string(r.q));
    o.expect(r.secondary_value == 7, "secondary " + std::to_string(r.secondary_value));
    for (Cost c : relevant_costs(t, r))
        o.expect(c == 1, "cost " + std::to_string(c));
}

void criterion3(Outcome &o) {
    CflTask t = fixture("table1.json", SolutionConcept::Scf);
    const LearnResult r = lacfip(t);
    o.expect(r.q == 2, "Q=" + std::to_string(r.q));
    o.expect(r.secondary_value == 9, "secondary " + std::to_string(r.secondary_value));
    o.expect(all_strict(t, r.costs), "not strictly optimal");
    o.expect(r.costs.get("move(C,D)") == 2, "C-D");
    o.expect(r.costs.get("move(D,F)") == 2, "D-F");
}

void criterion4(Outcome &o) {
    CflTask t = fixture("table1_ref.json");
    const LearnResult r = lacfip(t);
    o.expect(r.q == 2, "Q=" + std::to_string(r.q));
    o.expect(deviation(t, r.costs) == 2, "deviation " + std::to_string(deviation(t, r.costs)));
    o.expect(r.secondary_value == 2, "secondary");
    // Every prior is at most 2, so {1..4} covers all deviations up to 2.
    const auto sweep = oracle::sweep(t, r.diagnostics.relevant, 1, 4);
    o.expect(sweep.best_q == 2 && sweep.best_secondary == 2, "sweep optimum");
    CostFunction named = t.prior_costs;
    named.set("move(A,C)", 1);
    named.set("move(E,F)", 1);
    std::vector<Cost> y;
    for (ActionId a : r.diagnostics.relevant)
        y.push_back(*named.get(t.domain->action(a).name));
    o.expect(std::find(sweep.optima.begin(), sweep.optima.end(), y) != sweep.optima.end(),
             "named assignment not among the optima");
    o.expect(std::find(sweep.optima.begin(), sweep.optima.end(), relevant_costs(t, r)) !=
                 sweep.optima.end(),
             "learned assignment not among the optima");
}

void criterion5(Outcome &o) {
    CflTask t = fixture("table1_ref.json", SolutionConcept::ScfRef);
    const LearnResult r = lacfip(t);
    o.expect(r.q == 2, "Q=" + std::to_string(r.q));
    o.expect(deviation(t, r.costs) == 3, "deviation " + std::to_string(deviation(t, r.costs)));
    o.expect(all_strict(t, r.costs), "not strictly optimal");
}

void criterion6(Outcome &o) {
    for (auto c : {SolutionConcept::Mcf, SolutionConcept::Scf, SolutionConcept::McfRef,
                   SolutionConcept::ScfRef}) {
        CflTask t = fixture("blocksworld.json", c);
        o.expect(t.size() == 1, "single instance");
        o.expect(lacfip(t).q == 0, std::string(to_string(c)));
    }
}

void criterion7(Outcome &o) {
    std::mt19937_64 rng(2024);
    const SolutionConcept concepts[] = {SolutionConcept::Mcf, SolutionConcept::Scf,
                                        SolutionConcept::McfRef, SolutionConcept::ScfRef};
    std::size_t samples = 0, largest = 0, points = 0;
    for (std::size_t trial = 0; samples < 40; ++trial) {
        const std::size_t side = 2 + trial % 2;
        CflTask t = oracle::random_grid_cfl(side, 1 + trial % 4, concepts[trial % 4], rng);
        LearnOptions options;
        options.y_max = 3;
        const LearnResult r = lacfip(t, options);
        if (r.diagnostics.relevant.size() > 10)
            continue;
        ++samples;
        largest = std::max(largest, r.diagnostics.relevant.size());
        const auto sweep = oracle::sweep(t, r.diagnostics.relevant, 1, 3);
        points += sweep.assignments;
        o.expect(r.q == sweep.best_q, "trial " + std::to_string(trial) + ": Q=" +
                                          std::to_string(r.q) + " oracle " +
                                          std::to_string(sweep.best_q));
    }
    o.detail << " samples=" << samples << " largest |A^M|=" << largest << " assignments=" << points;
}

void criterion8(Outcome &o) {
    const std::pair<const char *, SolutionConcept> cases[] = {
        {"triangle.json", SolutionConcept::Mcf},      {"triangle.json", SolutionConcept::Scf},
        {"table1.json", SolutionConcept::Mcf},        {"table1.json", SolutionConcept::Scf},
        {"table1_ref.json", SolutionConcept::McfRef}, {"table1_ref.json", SolutionConcept::ScfRef},
        {"table1_bidir.json", SolutionConcept::Mcf},  {"blocksworld.json", SolutionConcept::Scf},
    };
    for (const auto &[file, c] : cases) {
        CflTask t = fixture(file, c);
        o.expect(consistent(t, lacfip(t)), std::string(file) + " " + std::string(to_string(c)));
    }
    std::mt19937_64 rng(808);
    const SolutionConcept concepts[] = {SolutionConcept::Mcf, SolutionConcept::Scf,
                                        SolutionConcept::McfRef, SolutionConcept::ScfRef};
    for (int trial = 0; trial < 40; ++trial) {
        CflTask t = oracle::random_grid_cfl(2 + trial % 2, 1 + trial % 4, concepts[trial % 4], rng);
        o.expect(consistent(t, lacfip(t)), "random trial " + std::to_string(trial));
    }
}

void criterion9(Outcome &o) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        CflTask t = oracle::random_grid_cfl(3 + trial % 2, 1 + trial % 3, SolutionConcept::Mcf, rng);
        const std::string tag = "trial " + std::to_string(trial);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const PlanningTask task = t.task(i);
            const ActionCosts unit = unit_costs(*t.domain);
            const auto full = enumerate_alternatives(task, t.instances[i].plan, std::nullopt, unit);
            const auto again = enumerate_alternatives(task, t.instances[i].plan, std::nullopt, unit);
            o.expect(full.plans == again.plans, tag + " repeat");
            for (std::size_t k : {1u, 2u, 5u, 20u}) {
                const auto part = enumerate_alternatives(task, t.instances[i].plan, k, unit);
                o.expect(part.plans.size() == std::min(k, full.plans.size()) &&
                             std::equal(part.plans.begin(), part.plans.end(), full.plans.begin()),
                         tag + " prefix k=" + std::to_string(k));
            }
        }
        LearnOptions options;
        options.k = 3;
        const LearnResult a = lacfip(t, options);
        const LearnResult b = lacfip(t, options);
        o.expect(serialize_costs(a.costs) == serialize_costs(b.costs) && a.q == b.q && a.x == b.x,
                 tag + " learn repeat");
    }
}

const AggregateCell *find_cell(const std::vector<AggregateCell> &cells, const std::string &algorithm,
                               PlanLimit k, std::size_t size) {
    for (const auto &c : cells) {
        if (c.algorithm == algorithm && c.k == k && c.cfl_size == size)
            return &c;
    }
    return nullptr;
}

std::optional<ExperimentReport> bench_report;

const ExperimentReport &default_bench() {
    if (!bench_report) {
        bench_report = run_experiment(ExperimentConfig{});
        std::printf("%s", format_aggregate_table(bench_report->aggregates).c_str());
    }
    return *bench_report;
}

void criterion10(Outcome &o) {
    const ExperimentConfig config;
    const auto &cells = default_bench().aggregates;
    for (std::size_t size : config.cfl_sizes) {
        const AggregateCell *base = find_cell(cells, "baseline", std::nullopt, size);
        const AggregateCell *learned = find_cell(cells, "lacfip", 10, size);
        if (!base || !learned) {
            o.expect(false, "missing cell for size " + std::to_string(size));
            continue;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "size %zu: lacfip %.3f vs baseline %.3f", size,
                      learned->mean_ratio, base->mean_ratio);
        o.expect(learned->mean_ratio >= base->mean_ratio, buf);
        o.detail << " " << buf;
    }
}

void criterion11(Outcome &o) {
    const ExperimentConfig config;
    const auto &cells = default_bench().aggregates;
    double lo = 0.0, hi = 0.0;
    for (std::size_t size : config.cfl_sizes) {
        const AggregateCell *base = find_cell(cells, "baseline", std::nullopt, size);
        if (!base) {
            o.expect(false, "missing baseline cell");
            continue;
        }
        lo = lo == 0.0 ? base->mean_wall_ms : std::min(lo, base->mean_wall_ms);
        hi = std::max(hi, base->mean_wall_ms);
        // Learner wall time is nondecreasing in k.
        for (std::size_t i = 1; i < config.k_values.size(); ++i) {
            const AggregateCell *a = find_cell(cells, "lacfip", config.k_values[i - 1], size);
            const AggregateCell *b = find_cell(cells, "lacfip", config.k_values[i], size);
            if (!a || !b) {
                o.expect(false, "missing lacfip cell");
                continue;
            }
            char buf[96];
            std::snprintf(buf, sizeof buf, "size %zu: %.1f ms then %.1f ms", size, a->mean_wall_ms,
                          b->mean_wall_ms);
            o.expect(a->mean_wall_ms <= b->mean_wall_ms, buf);
            o.detail << " " << buf;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "baseline %.3f..%.3f ms", lo, hi);
    o.expect(lo > 0.0 && hi < 10.0 * lo, buf);
    o.detail << " " << buf;
}

struct Criterion {
    int number;
    const char *title;
    double budget_s;
    std::function<void(Outcome &)> run;
};

}  // namespace

int main(int argc, char **argv) {
    const std::vector<Criterion> criteria = {
        {1, "triangle admits no ideal cost function", 1, criterion1},
        {2, "Table 1 maximal cost function", 5, criterion2},
        {3, "Table 1 strict cost function", 5, criterion3},
        {4, "Table 1 refinement, deviation 2", 10, criterion4},
        {5, "Table 1 strict refinement, deviation 3", 10, criterion5},
        {6, "redundant plan is never optimal", 1, criterion6},
        {7, "optimum equals the exhaustive oracle", 600, criterion7},
        {8, "validation matches Q on exhausted alternatives", 600, criterion8},
        {9, "enumeration prefixes and repeatability", 600, criterion9},
        {10, "learner at least matches the baseline", 900, criterion10},
        {11, "baseline time flat, learner time grows with k", 900, criterion11},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const Criterion &c : criteria) {
        if (!selected.empty() && !selected.count(c.number))
            continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception &e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        // The benchmark is shared by criteria 10 and 11, so its time counts once.
        if (c.number != 11)
            o.expect(seconds < c.budget_s, "over the time budget");
        std::printf("%s criterion %d: %s (%.2f s)%s\n", o.ok ? "PASS" : "FAIL", c.number, c.title,
                    seconds, o.detail.str().c_str());
        std::fflush(stdout);
        failed += o.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
