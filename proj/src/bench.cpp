#include "costforge/bench.hpp"

#include "costforge/errors.hpp"
#include "costforge/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

namespace costforge {

ExperimentConfig ExperimentConfig::paper_scale() {
    ExperimentConfig c;
    c.grid_side = 10;
    c.pool_tasks = 50;
    c.plans_per_task = 100;
    c.cfl_sizes = {10, 100, 1000};
    c.repeats = 10;
    c.k_values = {10, 100, 1000, 10000};
    c.time_limit_s = 1800.0;
    return c;
}

nlohmann::json to_json(const ExperimentConfig &c) {
    nlohmann::json ks = nlohmann::json::array();
    for (const auto &k : c.k_values)
        ks.push_back(k_to_json(k));
    return {{"grid_side", c.grid_side},
            {"pool_tasks", c.pool_tasks},
            {"plans_per_task", c.plans_per_task},
            {"cfl_sizes", c.cfl_sizes},
            {"repeats", c.repeats},
            {"k_values", ks},
            {"concept", to_string(c.solution_concept)},
            {"seed", c.seed},
            {"time_limit", c.time_limit_s},
            {"jobs", c.jobs}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json &j) {
    ExperimentConfig c;
    if (!j.is_object())
        throw Error(ErrorKind::ParseError, "bench config must be a JSON object");
    try {
        if (j.contains("grid_side"))
            c.grid_side = j.at("grid_side").get<std::size_t>();
        if (j.contains("pool_tasks"))
            c.pool_tasks = j.at("pool_tasks").get<std::size_t>();
        if (j.contains("plans_per_task"))
            c.plans_per_task = j.at("plans_per_task").get<std::size_t>();
        if (j.contains("cfl_sizes"))
            c.cfl_sizes = j.at("cfl_sizes").get<std::vector<std::size_t>>();
        if (j.contains("repeats"))
            c.repeats = j.at("repeats").get<std::size_t>();
        if (j.contains("k_values")) {
            c.k_values.clear();
            for (const auto &k : j.at("k_values"))
                c.k_values.push_back(k_from_json(k));
        }
        if (j.contains("concept"))
            c.solution_concept = parse_concept(j.at("concept").get<std::string>());
        if (j.contains("seed"))
            c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("time_limit"))
            c.time_limit_s = j.at("time_limit").get<double>();
        if (j.contains("jobs"))
            c.jobs = j.at("jobs").get<std::size_t>();
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::ParseError, std::string("bench config: ") + e.what());
    }
    return c;
}

std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t n) {
    if (n == 0)
        throw Error(ErrorKind::ValidationError, "empty sampling range");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold)
            return r % n;
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

std::string cell_name(std::size_t side, std::size_t cell) {
    return std::to_string(cell % side) + "-" + std::to_string(cell / side);
}

}  // namespace

std::shared_ptr<const Domain> grid_domain(std::size_t side) {
    if (side < 2)
        throw Error(ErrorKind::ValidationError, "grid side must be at least 2");
    if (side * side > 64 * 1024)
        throw Error(ErrorKind::ValidationError, "grid side too large");
    std::vector<std::string> fluents;
    for (std::size_t c = 0; c < side * side; ++c)
        fluents.push_back("at-" + cell_name(side, c));
    std::vector<ActionSpec> actions;
    auto link = [&](std::size_t from, std::size_t to) {
        const std::string f = "at-" + cell_name(side, from);
        const std::string t = "at-" + cell_name(side, to);
        actions.push_back({"move-" + cell_name(side, from) + "-" + cell_name(side, to), {f}, {t}, {f}});
    };
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            const std::size_t c = y * side + x;
            if (x + 1 < side) {
                link(c, c + 1);
                link(c + 1, c);
            }
            if (y + 1 < side) {
                link(c, c + side);
                link(c + side, c);
            }
        }
    }
    return std::make_shared<const Domain>(std::move(fluents), std::move(actions));
}

PlanningTask grid_task(std::shared_ptr<const Domain> domain, std::size_t side,
                       std::size_t init_cell, std::size_t goal_cell) {
    PlanningTask task;
    const std::vector<std::string> init{"at-" + cell_name(side, init_cell)};
    task.init = domain->make_state(init);
    task.goal = {domain->fluent_id("at-" + cell_name(side, goal_cell))};
    task.domain = std::move(domain);
    return task;
}

PlanningTask generate_grid_task(std::size_t side, std::uint64_t seed) {
    auto domain = grid_domain(side);
    std::mt19937_64 rng(seed);
    const std::uint64_t cells = side * side;
    const std::uint64_t init = uniform_below(rng, cells);
    std::uint64_t goal = uniform_below(rng, cells - 1);
    if (goal >= init)
        ++goal;
    return grid_task(std::move(domain), side, init, goal);
}

Pool build_pool(const ExperimentConfig &config) {
    Pool pool;
    pool.domain = grid_domain(config.grid_side);
    const std::size_t cells = config.grid_side * config.grid_side;
    // Ordered distinct pairs, sampled without replacement by a partial
    // Fisher-Yates shuffle over pair indices.
    const std::size_t pairs = cells * (cells - 1);
    const std::size_t wanted = std::min(config.pool_tasks, pairs);
    std::vector<std::size_t> order(pairs);
    for (std::size_t i = 0; i < pairs; ++i)
        order[i] = i;
    std::mt19937_64 rng(mix(config.seed, 0x706f6f6c, 0));
    for (std::size_t i = 0; i < wanted; ++i)
        std::swap(order[i], order[i + uniform_below(rng, pairs - i)]);

    const ActionCosts unit = unit_costs(*pool.domain);
    for (std::size_t t = 0; t < wanted; ++t) {
        const std::size_t init = order[t] / (cells - 1);
        std::size_t goal = order[t] % (cells - 1);
        if (goal >= init)
            ++goal;
        PlanningTask task = grid_task(pool.domain, config.grid_side, init, goal);
        AlternativeSet plans = enumerate_plans(task, config.plans_per_task, unit);
        pool.shortfall.push_back(config.plans_per_task - plans.plans.size());
        for (auto &p : plans.plans)
            pool.entries.push_back({t, task, std::move(p)});
    }
    return pool;
}

CflTask sample_cfl(const Pool &pool, std::size_t size, SolutionConcept concept_,
                   std::mt19937_64 &rng) {
    if (size > pool.entries.size())
        throw Error(ErrorKind::ValidationError,
                    "CFL size " + std::to_string(size) + " exceeds the pool of " +
                        std::to_string(pool.entries.size()));
    std::vector<std::size_t> order(pool.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    for (std::size_t i = 0; i < size; ++i)
        std::swap(order[i], order[i + uniform_below(rng, order.size() - i)]);

    CflTask cfl;
    cfl.domain = pool.domain;
    cfl.solution_concept = concept_;
    for (std::size_t i = 0; i < size; ++i) {
        const PoolEntry &e = pool.entries[order[i]];
        cfl.instances.push_back({e.task.init, e.task.goal, e.plan});
    }
    if (is_refinement(concept_)) {
        for (const auto &a : pool.domain->actions())
            cfl.prior_costs.set(a.name, 1 + static_cast<Cost>(uniform_below(rng, 3)));
    }
    return cfl;
}

ExperimentReport run_experiment(const ExperimentConfig &config) {
    ExperimentReport report;
    if (config.cfl_sizes.empty() || config.repeats == 0)
        return report;
    const Pool pool = build_pool(config);
    const bool strict = is_strict(config.solution_concept);

    struct Cell {
        const CflTask *cfl;
        std::size_t cfl_size;
        std::size_t repeat;
        std::optional<PlanLimit> k;  // nullopt for the baseline
    };
    std::vector<CflTask> tasks;
    tasks.reserve(config.cfl_sizes.size() * config.repeats);
    for (std::size_t size : config.cfl_sizes) {
        for (std::size_t r = 0; r < config.repeats; ++r) {
            std::mt19937_64 rng(mix(config.seed, size, r));
            tasks.push_back(sample_cfl(pool, size, config.solution_concept, rng));
        }
    }
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < config.cfl_sizes.size(); ++s) {
        for (std::size_t r = 0; r < config.repeats; ++r) {
            const CflTask *cfl = &tasks[s * config.repeats + r];
            cells.push_back({cfl, config.cfl_sizes[s], r, std::nullopt});
            for (const auto &k : config.k_values)
                cells.push_back({cfl, config.cfl_sizes[s], r, k});
        }
    }

    report.records.resize(cells.size());
    auto run_cell = [&](std::size_t index) {
        const Cell &cell = cells[index];
        ReportRecord rec;
        rec.solution_concept = config.solution_concept;
        rec.cfl_size = cell.cfl_size;
        rec.repeat = cell.repeat;
        const Deadline deadline = Deadline::after(std::chrono::duration<double>(config.time_limit_s));
        if (!cell.k) {
            rec.algorithm = "baseline";
            Stopwatch clock;
            try {
                const LearnResult res = baseline(*cell.cfl, deadline);
                rec.wall_ms = clock.elapsed_ms();
                rec.q = res.q;
                rec.ratio = static_cast<double>(res.q) / cell.cfl->size();
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::DeadlineExceeded)
                    throw;
                rec.wall_ms = clock.elapsed_ms();
                rec.timeout = true;
            }
        } else {
            rec.algorithm = "lacfip";
            rec.k = *cell.k;
            LearnOptions options;
            options.k = *cell.k;
            options.deadline = deadline;
            Stopwatch clock;
            try {
                const LearnResult res = lacfip(*cell.cfl, options);
                rec.wall_ms = clock.elapsed_ms();
                rec.q = res.q;
                rec.timeout = res.status == LearnStatus::TimedOut;
                rec.ratio = optimal_ratio(*cell.cfl, res.costs, strict).ratio();
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::NoSolution && e.kind() != ErrorKind::DeadlineExceeded)
                    throw;
                rec.wall_ms = clock.elapsed_ms();
                rec.timeout = true;
            }
        }
        report.records[index] = std::move(rec);
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, cells.size()));
    if (jobs == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
                    try {
                        run_cell(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
        for (auto &t : workers)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }
    report.aggregates = aggregate(report.records);
    return report;
}

std::vector<AggregateCell> aggregate(const std::vector<ReportRecord> &records) {
    // Row key (algorithm, k) in first-appearance order, then cfl size.
    std::vector<std::pair<std::string, PlanLimit>> rows;
    std::vector<std::size_t> sizes;
    for (const auto &r : records) {
        const std::pair<std::string, PlanLimit> row{r.algorithm, r.k};
        if (std::find(rows.begin(), rows.end(), row) == rows.end())
            rows.push_back(row);
        if (std::find(sizes.begin(), sizes.end(), r.cfl_size) == sizes.end())
            sizes.push_back(r.cfl_size);
    }
    std::vector<AggregateCell> cells;
    for (const auto &[algorithm, k] : rows) {
        for (std::size_t size : sizes) {
            AggregateCell cell{algorithm, k, size};
            double sum = 0.0, wall = 0.0;
            for (const auto &r : records) {
                if (r.algorithm != algorithm || r.k != k || r.cfl_size != size)
                    continue;
                ++cell.samples;
                sum += r.ratio;
                wall += r.wall_ms;
                cell.timeouts += r.timeout ? 1 : 0;
            }
            if (cell.samples == 0)
                continue;
            cell.mean_ratio = sum / cell.samples;
            cell.mean_wall_ms = wall / cell.samples;
            double var = 0.0;
            for (const auto &r : records) {
                if (r.algorithm == algorithm && r.k == k && r.cfl_size == size)
                    var += (r.ratio - cell.mean_ratio) * (r.ratio - cell.mean_ratio);
            }
            cell.stddev_ratio = std::sqrt(var / cell.samples);
            cells.push_back(cell);
        }
    }
    return cells;
}

namespace {

std::string row_label(const AggregateCell &c) {
    if (c.algorithm == "baseline")
        return "baseline";
    return c.algorithm + " k=" + (c.k ? std::to_string(*c.k) : std::string("inf"));
}

}  // namespace

std::string format_aggregate_table(const std::vector<AggregateCell> &cells) {
    std::vector<std::string> labels;
    std::vector<std::size_t> sizes;
    for (const auto &c : cells) {
        if (std::find(labels.begin(), labels.end(), row_label(c)) == labels.end())
            labels.push_back(row_label(c));
        if (std::find(sizes.begin(), sizes.end(), c.cfl_size) == sizes.end())
            sizes.push_back(c.cfl_size);
    }
    char buf[128];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-16s", "|cfl|");
    out += buf;
    for (std::size_t s : sizes) {
        std::snprintf(buf, sizeof buf, " | %-24zu", s);
        out += buf;
    }
    out += "\n";
    for (const auto &label : labels) {
        std::snprintf(buf, sizeof buf, "%-16s", label.c_str());
        out += buf;
        for (std::size_t s : sizes) {
            std::string text = "-";
            for (const auto &c : cells) {
                if (row_label(c) == label && c.cfl_size == s) {
                    std::snprintf(buf, sizeof buf, "%.2f +- %.2f (%.0f ms, %zu t/o)", c.mean_ratio,
                                  c.stddev_ratio, c.mean_wall_ms, c.timeouts);
                    text = buf;
                }
            }
            std::snprintf(buf, sizeof buf, " | %-24s", text.c_str());
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::string timing_csv(const std::vector<ReportRecord> &records) {
    std::string out = "algorithm,k,cfl_size,repeat,wall_ms,timeout\n";
    char buf[64];
    for (const auto &r : records) {
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        out += r.algorithm + "," +
               (r.algorithm == "baseline" ? std::string() : (r.k ? std::to_string(*r.k) : "inf")) +
               "," + std::to_string(r.cfl_size) + "," + std::to_string(r.repeat) + "," + buf + "," +
               (r.timeout ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace costforge
