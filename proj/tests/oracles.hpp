#pragma once

// Brute-force reference implementations used as test oracles. They share no
// code with the library's search or solver.

#include "costforge/formats.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace oracle {

using costforge::ActionId;
using costforge::Cost;
using costforge::Plan;

// Every simple solution plan, by depth-first search over states.
std::vector<Plan> simple_plans(const costforge::PlanningTask &task);

struct SweepResult {
    std::size_t best_q = 0;
    Cost best_secondary = 0;                 // among assignments reaching best_q
    std::vector<std::vector<Cost>> optima;   // y vectors reaching both
    std::size_t assignments = 0;
};

// Tries every y in {lo..hi}^actions. Other actions cost their prior (or 1).
// An input plan counts when it is optimal (strictly, for strict concepts)
// among all simple plans of its instance. The secondary value is sum y, or
// sum |y - prior| for refinement concepts.
SweepResult sweep(const costforge::CflTask &cfl, const std::vector<ActionId> &actions, Cost lo,
                  Cost hi);

// Number of input plans that are (strictly) optimal under dense costs.
std::size_t count_optimal(const costforge::CflTask &cfl, const std::vector<Cost> &dense,
                          bool strict);

// Random grid CFL task: `instances` random (init, goal, simple plan) triples.
costforge::CflTask random_grid_cfl(std::size_t side, std::size_t instances,
                                   costforge::SolutionConcept concept_, std::mt19937_64 &rng);

std::filesystem::path fixture(const std::string &name);

}  // namespace oracle
