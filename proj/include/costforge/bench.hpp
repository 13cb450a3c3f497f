#pragma once

// Grid benchmark: task generation, plan pools, CFL sampling and the
// baseline-versus-learner comparison.

#include "costforge/formats.hpp"
#include "costforge/solve.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace costforge {

struct ExperimentConfig {
    std::size_t grid_side = 6;
    std::size_t pool_tasks = 10;
    std::size_t plans_per_task = 20;
    std::vector<std::size_t> cfl_sizes{5, 20};
    std::size_t repeats = 3;
    std::vector<PlanLimit> k_values{1, 10};
    SolutionConcept solution_concept = SolutionConcept::Mcf;
    std::uint64_t seed = 1;
    double time_limit_s = 120.0;
    std::size_t jobs = 1;

    // Grid 10, 50 tasks x 100 plans, sizes 10/100/1000, 10 repeats, k up to
    // 10^4, 1800 s.
    static ExperimentConfig paper_scale();
};

nlohmann::json to_json(const ExperimentConfig &c);
// Missing keys keep their defaults. Throws ParseError.
ExperimentConfig experiment_config_from_json(const nlohmann::json &j);

// Uniform integer in [0, n), by rejection on the raw 64-bit stream so the
// sequence does not depend on the standard library.
std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t n);

// Fluent `at-X-Y` per cell, action `move-X1-Y1-X2-Y2` per directed adjacency.
std::shared_ptr<const Domain> grid_domain(std::size_t side);
PlanningTask grid_task(std::shared_ptr<const Domain> domain, std::size_t side,
                       std::size_t init_cell, std::size_t goal_cell);
// Random distinct init and goal cells.
PlanningTask generate_grid_task(std::size_t side, std::uint64_t seed);

struct PoolEntry {
    std::size_t task_index;
    PlanningTask task;
    Plan plan;
};

struct Pool {
    std::shared_ptr<const Domain> domain;
    std::vector<PoolEntry> entries;
    std::vector<std::size_t> shortfall;  // per task: plans_per_task - plans found
};

// pool_tasks distinct (init, goal) pairs, each with its first plans_per_task
// simple plans under unit costs.
Pool build_pool(const ExperimentConfig &config);

// `size` distinct pool entries; refinement concepts get a prior of 1 plus a
// random increment in {0, 1, 2} per action.
CflTask sample_cfl(const Pool &pool, std::size_t size, SolutionConcept concept_,
                   std::mt19937_64 &rng);

struct AggregateCell {
    std::string algorithm;
    PlanLimit k;
    std::size_t cfl_size = 0;
    std::size_t samples = 0;
    double mean_ratio = 0.0;
    double stddev_ratio = 0.0;  // population
    double mean_wall_ms = 0.0;
    std::size_t timeouts = 0;
};

struct ExperimentReport {
    std::vector<ReportRecord> records;
    std::vector<AggregateCell> aggregates;
};

// Records ordered by cfl size, repeat, then baseline followed by k_values.
ExperimentReport run_experiment(const ExperimentConfig &config);

std::vector<AggregateCell> aggregate(const std::vector<ReportRecord> &records);
std::string format_aggregate_table(const std::vector<AggregateCell> &cells);
std::string timing_csv(const std::vector<ReportRecord> &records);

}  // namespace costforge
