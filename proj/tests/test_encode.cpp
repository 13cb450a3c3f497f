#include "oracles.hpp"

#include "costforge/bench.hpp"
#include "costforge/encode.hpp"
#include "costforge/errors.hpp"

#include <doctest.h>

#include <set>

using namespace costforge;

namespace {

CflTask fixture(const char *name) { return load_cfl(oracle::fixture(name)); }

std::vector<AlternativeSet> alternatives(const CflTask &cfl, PlanLimit k = std::nullopt) {
    std::vector<AlternativeSet> out;
    for (std::size_t i = 0; i < cfl.size(); ++i)
        out.push_back(enumerate_alternatives(cfl.task(i), cfl.instances[i].plan, k,
                                             unit_costs(*cfl.domain)));
    return out;
}

struct Encoded {
    std::vector<AlternativeSet> alts;
    std::vector<ActionId> relevant;
    IntegerProgram ip;
};

Encoded encode(const CflTask &cfl, PlanLimit k = std::nullopt) {
    Encoded e;
    e.alts = alternatives(cfl, k);
    e.relevant = relevant_actions(cfl, e.alts);
    e.ip = build_milp(cfl, e.alts, e.relevant, cfl.solution_concept,
                      default_y_max(cfl, e.alts, e.relevant, cfl.solution_concept));
    return e;
}

std::vector<std::string> action_names(const Domain &d, const std::vector<ActionId> &ids) {
    std::vector<std::string> out;
    for (ActionId a : ids)
        out.push_back(d.action(a).name);
    return out;
}

Cost row_lhs(const Constraint &row, const std::vector<Cost> &a) {
    Cost lhs = 0;
    for (const Term &t : row.terms)
        lhs += t.coeff * a[t.var];
    return lhs;
}

Cost cost_under_y(const Encoded &e, const Plan &p, const std::vector<Cost> &a) {
    Cost total = 0;
    for (ActionId act : p.steps) {
        const auto it = std::find(e.relevant.begin(), e.relevant.end(), act);
        total += a[e.ip.y[static_cast<std::size_t>(it - e.relevant.begin())]];
    }
    return total;
}

}  // namespace

TEST_CASE("triangle program shape") {
    CflTask t = fixture("triangle.json");
    const Encoded e = encode(t);
    CHECK(action_names(*t.domain, e.relevant) ==
          std::vector<std::string>{"move(A,B)", "move(A,C)", "move(B,C)", "move(C,B)"});
    CHECK(e.ip.x.size() == 2);
    CHECK(e.ip.num_z() == 2);
    CHECK(e.ip.y.size() == 4);
    CHECK(e.ip.d.empty());
    CHECK(e.ip.constraints.size() == 4);
    CHECK(e.ip.num_vars() == 8);
    for (std::size_t v : e.ip.x)
        CHECK(e.ip.vars[v].kind == VarKind::Binary);
    for (std::size_t v : e.ip.y) {
        CHECK(e.ip.vars[v].lower == 1);
        CHECK(e.ip.vars[v].upper == e.ip.y_max);
    }
}

TEST_CASE("relevant actions are the union over plans and alternatives") {
    CflTask bidir = fixture("table1_bidir.json");
    const Encoded e = encode(bidir);
    std::set<ActionId> expected;
    for (std::size_t i = 0; i < bidir.size(); ++i) {
        for (const Plan &p : oracle::simple_plans(bidir.task(i)))
            expected.insert(p.steps.begin(), p.steps.end());
    }
    CHECK(std::vector<ActionId>(expected.begin(), expected.end()) == e.relevant);

    CflTask empty = fixture("triangle.json");
    empty.instances.resize(1);
    empty.instances[0].goal = {empty.domain->fluent_id("at-A")};
    empty.instances[0].plan = Plan{};
    const Encoded none = encode(empty);
    CHECK(none.relevant.empty());
    CHECK(none.alts[0].plans.empty());
    // With no alternatives x may be 1 freely.
    std::vector<Cost> a(none.ip.num_vars(), 0);
    a[none.ip.x[0]] = 1;
    CHECK(none.ip.is_feasible(a));
}

TEST_CASE("refinement programs carry deviation variables and rows") {
    CflTask t = fixture("table1_ref.json");
    const Encoded e = encode(t);
    CHECK(e.ip.d.size() == e.relevant.size());
    std::size_t dev_rows = 0;
    for (const auto &row : e.ip.constraints)
        dev_rows += row.name.rfind("dev_", 0) == 0 ? 1 : 0;
    CHECK(dev_rows == 2 * e.relevant.size());
    for (std::size_t v : e.ip.d)
        CHECK(e.ip.vars[v].lower == 0);

    CflTask missing = t;
    missing.prior_costs = CostFunction{};
    missing.prior_costs.set("move(A,B)", 1);
    try {
        build_milp(missing, e.alts, e.relevant, SolutionConcept::McfRef, 5);
        FAIL("expected MissingPrior");
    } catch (const Error &err) {
        CHECK(err.kind() == ErrorKind::MissingPrior);
    }
}

TEST_CASE("default y_max") {
    CflTask t = fixture("table1.json");
    const Encoded e = encode(t);
    // Longest plan has 3 steps; 7 relevant actions.
    CHECK(default_y_max(t, e.alts, e.relevant, SolutionConcept::Mcf) == 7);
    CflTask r = fixture("table1_ref.json");
    r.prior_costs.set("move(C,D)", 40);
    CHECK(default_y_max(r, e.alts, e.relevant, SolutionConcept::McfRef) == 40);
}

TEST_CASE("program invariants on random grid tasks") {
    std::mt19937_64 rng(41);
    const SolutionConcept concepts[] = {SolutionConcept::Mcf, SolutionConcept::Scf,
                                        SolutionConcept::McfRef, SolutionConcept::ScfRef};
    for (int trial = 0; trial < 24; ++trial) {
        CflTask cfl = oracle::random_grid_cfl(3, 1 + trial % 3, concepts[trial % 4], rng);
        const Encoded e = encode(cfl, 6);
        const IntegerProgram &ip = e.ip;
        const bool refinement = is_refinement(cfl.solution_concept);
        std::size_t alts = 0;
        for (const auto &s : e.alts)
            alts += s.plans.size();
        CHECK(ip.x.size() == cfl.size());
        CHECK(ip.num_z() == alts);
        CHECK(ip.y.size() == e.relevant.size());
        CHECK(ip.d.size() == (refinement ? e.relevant.size() : 0));

        // All-ones y with x = z = 0 is feasible.
        std::vector<Cost> ones(ip.num_vars(), 0);
        for (std::size_t i = 0; i < ip.y.size(); ++i) {
            ones[ip.y[i]] = 1;
            if (refinement)
                ones[ip.d[i]] = std::abs(1 - *cfl.prior_costs.get(cfl.domain->action(e.relevant[i]).name));
        }
        CHECK(ip.is_feasible(ones));

        for (int sample = 0; sample < 30; ++sample) {
            std::vector<Cost> a(ip.num_vars(), 0);
            for (std::size_t v : ip.y)
                a[v] = 1 + static_cast<Cost>(uniform_below(rng, static_cast<std::uint64_t>(ip.y_max)));
            // Every alternative row holds with z = 0, every optimality row with x = 0.
            for (const auto &row : ip.constraints) {
                if (row.name.rfind("alt_", 0) == 0 || row.name.rfind("opt_", 0) == 0)
                    CHECK(row_lhs(row, a) <= row.rhs);
            }
            // With z set where the comparison holds, the strictness gap is respected.
            const Cost delta = is_strict(cfl.solution_concept) ? 1 : 0;
            for (std::size_t i = 0; i < cfl.size(); ++i) {
                for (std::size_t j = 0; j < e.alts[i].plans.size(); ++j) {
                    std::vector<Cost> b = a;
                    b[ip.z[i][j]] = 1;
                    const std::string name = "alt_" + std::to_string(i) + "_" + std::to_string(j);
                    const auto row = *std::find_if(ip.constraints.begin(), ip.constraints.end(),
                                                   [&](const Constraint &c) { return c.name == name; });
                    const bool holds = row_lhs(row, b) <= row.rhs;
                    const bool cheaper = cost_under_y(e, cfl.instances[i].plan, b) + delta <=
                                         cost_under_y(e, e.alts[i].plans[j], b);
                    CHECK(holds == cheaper);
                }
            }
        }
    }
}

TEST_CASE("alternatives cheaper under every cost fix their indicators to zero") {
    CflTask bw = fixture("blocksworld.json");
    const Encoded e = encode(bw);
    CHECK(e.ip.vars[e.ip.x[0]].upper == 0);
    CflTask t = fixture("table1.json");
    const Encoded t1 = encode(t);
    for (std::size_t v : t1.ip.x)
        CHECK(t1.ip.vars[v].upper == 1);
}

TEST_CASE("plan count equality and LP text") {
    CflTask t = fixture("triangle.json");
    Encoded e = encode(t);
    const std::string lp = to_lp_format(e.ip, e.ip.objective(1, 0));
    CHECK(lp.find("Maximize") != std::string::npos);
    CHECK(lp.find("alt_0_0:") != std::string::npos);
    CHECK(lp.find("opt_1:") != std::string::npos);
    CHECK(lp.find("y_move_A_B_") != std::string::npos);
    CHECK(lp.find("Binary\n x_0\n") != std::string::npos);
    CHECK(to_lp_format(e.ip, e.ip.objective(1, 0)) == lp);

    const auto objective = e.ip.objective(1, 1);
    CHECK(objective[e.ip.x[0]] == 1);
    CHECK(objective[e.ip.y[0]] == -1);

    e.ip.add_plan_count_equality(1);
    std::vector<Cost> a(e.ip.num_vars(), 0);
    for (std::size_t v : e.ip.y)
        a[v] = 1;
    CHECK_FALSE(e.ip.is_feasible(a));
}
