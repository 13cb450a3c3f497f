#include "oracles.hpp"

#include "costforge/branch_and_bound.hpp"
#include "costforge/simplex.hpp"
#include "costforge/bench.hpp"

#include <doctest.h>

#include <cmath>

using namespace costforge;

namespace {

IntegerProgram random_program(std::mt19937_64 &rng, std::size_t vars, std::size_t rows) {
    IntegerProgram ip;
    for (std::size_t v = 0; v < vars; ++v) {
        const Cost lo = static_cast<Cost>(uniform_below(rng, 2));
        ip.vars.push_back({"v" + std::to_string(v), VarKind::Integer, lo,
                           lo + static_cast<Cost>(uniform_below(rng, 4))});
    }
    for (std::size_t r = 0; r < rows; ++r) {
        Constraint row{"r" + std::to_string(r), {}, static_cast<Cost>(uniform_below(rng, 12)) - 3};
        for (std::size_t v = 0; v < vars; ++v) {
            const Cost c = static_cast<Cost>(uniform_below(rng, 7)) - 3;
            if (c != 0)
                row.terms.push_back({v, c});
        }
        ip.constraints.push_back(std::move(row));
    }
    return ip;
}

std::vector<Cost> random_objective(std::mt19937_64 &rng, std::size_t vars) {
    std::vector<Cost> c(vars);
    for (auto &v : c)
        v = static_cast<Cost>(uniform_below(rng, 11)) - 5;
    return c;
}

// Exhaustive optimum over the integer box.
std::optional<Cost> brute_force(const IntegerProgram &ip, const std::vector<Cost> &objective) {
    std::vector<Cost> a(ip.vars.size());
    for (std::size_t v = 0; v < a.size(); ++v)
        a[v] = ip.vars[v].lower;
    std::optional<Cost> best;
    while (true) {
        if (ip.is_feasible(a)) {
            Cost value = 0;
            for (std::size_t v = 0; v < a.size(); ++v)
                value += objective[v] * a[v];
            if (!best || value > *best)
                best = value;
        }
        std::size_t v = 0;
        while (v < a.size() && a[v] == ip.vars[v].upper) {
            a[v] = ip.vars[v].lower;
            ++v;
        }
        if (v == a.size())
            return best;
        ++a[v];
    }
}

std::vector<Cost> lower_of(const IntegerProgram &ip) {
    std::vector<Cost> out;
    for (const auto &v : ip.vars)
        out.push_back(v.lower);
    return out;
}

std::vector<Cost> upper_of(const IntegerProgram &ip) {
    std::vector<Cost> out;
    for (const auto &v : ip.vars)
        out.push_back(v.upper);
    return out;
}

}  // namespace

TEST_CASE("single bounded variable") {
    IntegerProgram ip;
    ip.vars.push_back({"y", VarKind::Integer, 1, 10});
    const std::vector<Cost> objective{-1};
    const IpSolution s = solve_ip(ip, objective);
    CHECK(s.status == IpStatus::Optimal);
    REQUIRE(s.assignment.size() == 1);
    CHECK(s.assignment[0] == 1);
    CHECK(s.objective_value == -1);
}

TEST_CASE("contradictory binary program is infeasible") {
    IntegerProgram ip;
    ip.vars.push_back({"x", VarKind::Binary, 0, 1});
    ip.constraints.push_back({"le", {{0, 1}}, 0});
    ip.constraints.push_back({"ge", {{0, -1}}, -1});
    const IpSolution s = solve_ip(ip, std::vector<Cost>{1});
    CHECK(s.status == IpStatus::Infeasible);
    CHECK(s.assignment.empty());
    CHECK_FALSE(s.objective_value.has_value());
}

TEST_CASE("branch and bound matches exhaustive search") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const IntegerProgram ip = random_program(rng, 2 + trial % 4, 1 + trial % 4);
        const auto objective = random_objective(rng, ip.vars.size());
        const auto expected = brute_force(ip, objective);
        const IpSolution s = solve_ip(ip, objective);
        if (!expected) {
            CHECK(s.status == IpStatus::Infeasible);
            continue;
        }
        REQUIRE(s.status == IpStatus::Optimal);
        CHECK(s.objective_value == *expected);
        CHECK(ip.is_feasible(s.assignment));
    }
}

TEST_CASE("float relaxation agrees with the exact one and its bound is safe") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const IntegerProgram ip = random_program(rng, 2 + trial % 5, 1 + trial % 5);
        const auto objective = random_objective(rng, ip.vars.size());
        const auto lo = lower_of(ip);
        const auto hi = upper_of(ip);
        DualSimplex exact(ip, objective);
        FloatDualSimplex fast(ip, objective);
        const LpStatus e = exact.solve(lo, hi, Deadline::never());
        const LpStatus f = fast.solve(lo, hi, Deadline::never());
        REQUIRE(e != LpStatus::TimedOut);
        REQUIRE(f == e);
        if (e == LpStatus::Infeasible) {
            CHECK(proves_infeasible(ip, lo, hi, fast.farkas()));
            continue;
        }
        CHECK(std::abs(fast.objective_value() - exact.objective_value().get_d()) < 1e-6);
        const Rational bound = safe_dual_bound(ip, objective, lo, hi, fast.duals());
        CHECK(bound >= exact.objective_value());
        CHECK(Rational(bound - exact.objective_value()).get_d() < 1e-6);
        // Any multipliers give a valid bound, including zero ones.
        const std::vector<double> zeros(ip.constraints.size(), 0.0);
        CHECK(safe_dual_bound(ip, objective, lo, hi, zeros) >= exact.objective_value());
        CHECK_FALSE(proves_infeasible(ip, lo, hi, fast.duals()));
    }
}

TEST_CASE("re-solving after bound changes reuses the tableau") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const IntegerProgram ip = random_program(rng, 4, 3);
        const auto objective = random_objective(rng, ip.vars.size());
        DualSimplex warm(ip, objective);
        FloatDualSimplex fwarm(ip, objective);
        auto lo = lower_of(ip);
        auto hi = upper_of(ip);
        for (int step = 0; step < 4; ++step) {
            const std::size_t v = uniform_below(rng, ip.vars.size());
            if (hi[v] > lo[v])
                (uniform_below(rng, 2) ? hi[v] : lo[v]) = lo[v] + static_cast<Cost>(uniform_below(rng, static_cast<std::uint64_t>(hi[v] - lo[v] + 1)));
            DualSimplex cold(ip, objective);
            const LpStatus a = warm.solve(lo, hi, Deadline::never());
            const LpStatus b = cold.solve(lo, hi, Deadline::never());
            const LpStatus c = fwarm.solve(lo, hi, Deadline::never());
            REQUIRE(a == b);
            CHECK(c == a);
            if (a == LpStatus::Optimal) {
                CHECK(warm.objective_value() == cold.objective_value());
                CHECK(std::abs(fwarm.objective_value() - cold.objective_value().get_d()) < 1e-6);
            }
        }
    }
}

TEST_CASE("seeds, node limits and deadlines") {
    std::mt19937_64 rng(31);
    const IntegerProgram ip = random_program(rng, 5, 2);
    const auto objective = random_objective(rng, ip.vars.size());
    SolveOptions expired;
    expired.deadline = Deadline::after(std::chrono::seconds(0));
    const auto feasible = lower_of(ip);
    if (ip.is_feasible(feasible))
        expired.seeds.push_back(feasible);
    const IpSolution s = solve_ip(ip, objective, expired);
    CHECK(s.status == IpStatus::TimedOut);
    CHECK(s.assignment.empty() == expired.seeds.empty());

    SolveOptions bad_seed;
    bad_seed.seeds.push_back(std::vector<Cost>(ip.vars.size(), 100));
    const IpSolution t = solve_ip(ip, objective, bad_seed);
    if (t.status == IpStatus::Optimal)
        CHECK(ip.is_feasible(t.assignment));
}

TEST_CASE("triangle phase one has optimum one") {
    CflTask t = load_cfl(oracle::fixture("triangle.json"));
    std::vector<AlternativeSet> alts;
    for (std::size_t i = 0; i < t.size(); ++i)
        alts.push_back(enumerate_alternatives(t.task(i), t.instances[i].plan, std::nullopt,
                                              unit_costs(*t.domain)));
    const auto relevant = relevant_actions(t, alts);
    const IntegerProgram ip = build_milp(t, alts, relevant, SolutionConcept::Mcf, 4);
    const IpSolution s = solve_ip(ip, ip.objective(1, 0));
    CHECK(s.status == IpStatus::Optimal);
    CHECK(s.objective_value == 1);
}
