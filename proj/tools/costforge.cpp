#include "costforge/bench.hpp"
#include "costforge/errors.hpp"
#include "costforge/evaluate.hpp"
#include "costforge/formats.hpp"
#include "costforge/solve.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

using namespace costforge;
using nlohmann::json;

namespace {

void print_error(ErrorKind kind, const std::string &message,
                 std::optional<std::size_t> index = std::nullopt,
                 std::optional<ValidationReason> reason = std::nullopt) {
    json j{{"error", std::string(to_string(kind))}, {"message", message}};
    if (index)
        j["index"] = *index;
    if (reason)
        j["reason"] = std::string(to_string(*reason));
    std::cerr << j.dump() << "\n";
}

Deadline deadline_from(std::optional<double> seconds) {
    if (!seconds) {
        if (const char *env = std::getenv("COSTFORGE_TIME_LIMIT")) {
            try {
                seconds = std::stod(env);
            } catch (const std::exception &) {
                throw Error(ErrorKind::ParseError,
                            std::string("COSTFORGE_TIME_LIMIT is not a number: ") + env);
            }
        }
    }
    if (!seconds)
        return Deadline::never();
    if (*seconds <= 0)
        throw Error(ErrorKind::ParseError, "time limit must be positive");
    return Deadline::after(std::chrono::duration<double>(*seconds));
}

PlanLimit parse_k(const std::string &text) {
    return k_from_json(text == "inf" || text == "infinity" ? json("inf") : json::parse(text, nullptr, false));
}

struct LearnArgs {
    std::string manifest;
    std::optional<std::string> concept_;
    std::string k = "inf";
    std::optional<double> time_limit;
    std::optional<Cost> y_max;
    std::optional<std::string> out;
    std::optional<std::string> report;
    std::optional<std::string> lp;
};

int cmd_learn(const LearnArgs &args) {
    const Deadline deadline = deadline_from(args.time_limit);
    CflTask cfl = load_cfl(args.manifest);
    if (args.concept_)
        cfl.solution_concept = parse_concept(*args.concept_);
    validate(cfl);

    LearnOptions options;
    options.k = parse_k(args.k);
    options.deadline = deadline;
    options.y_max = args.y_max;
    if (options.y_max && *options.y_max < 1)
        throw Error(ErrorKind::ParseError, "--y-max must be at least 1");
    const LearnResult result = lacfip(cfl, options);

    if (args.lp) {
        // Rebuilt without a deadline so the dump matches the solved program.
        std::vector<AlternativeSet> alternatives;
        const ActionCosts metric = cfl.prior_costs.total_over(*cfl.domain)
                                       ? cfl.prior_costs.dense(*cfl.domain)
                                       : unit_costs(*cfl.domain);
        for (std::size_t i = 0; i < cfl.size(); ++i)
            alternatives.push_back(
                enumerate_alternatives(cfl.task(i), cfl.instances[i].plan, options.k, metric));
        const auto relevant = relevant_actions(cfl, alternatives);
        const IntegerProgram ip =
            build_milp(cfl, alternatives, relevant, cfl.solution_concept, result.diagnostics.y_max);
        write_file(*args.lp, to_lp_format(ip, ip.objective(1, 0)));
    }
    if (args.out)
        save_costs(result.costs, *args.out);

    const bool strict = is_strict(cfl.solution_concept);
    const RatioReport validation = optimal_ratio(cfl, result.costs, strict);
    LearnSummary summary;
    summary.solution_concept = cfl.solution_concept;
    summary.k = options.k;
    summary.status = result.status == LearnStatus::Optimal ? "Optimal" : "TimedOut";
    summary.q = result.q;
    summary.instances = cfl.size();
    summary.secondary_value = result.secondary_value;
    summary.validated_ratio = validation.ratio();
    summary.y_max = result.diagnostics.y_max;
    for (std::size_t i = 0; i < cfl.size(); ++i) {
        InstanceVerdict v = validation.verdicts[i];
        v.x = result.x[i];
        v.alternatives = result.diagnostics.alternatives[i];
        v.exhausted = static_cast<bool>(result.diagnostics.exhausted[i]);
        summary.verdicts.push_back(v);
    }
    summary.enumerate_ms = result.diagnostics.enumerate_ms;
    summary.phase1_ms = result.diagnostics.phase1_ms;
    summary.phase2_ms = result.diagnostics.phase2_ms;
    summary.total_ms = result.diagnostics.total_ms;
    const std::string record = to_json(summary).dump();
    if (args.report)
        write_file(*args.report, record + "\n");
    std::cout << record << "\n";
    return result.status == LearnStatus::Optimal ? 0 : 2;
}

int cmd_validate(const std::string &manifest, const std::string &costs_path, bool strict) {
    const CflTask cfl = load_cfl(manifest);
    const CostFunction costs = load_costs(costs_path);
    const RatioReport report = optimal_ratio(cfl, costs, strict);
    ValidateSummary summary;
    summary.strict = strict;
    summary.optimal = report.optimal;
    summary.instances = report.total;
    summary.ratio = report.ratio();
    summary.verdicts = report.verdicts;
    std::cout << to_json(summary).dump() << "\n";
    return 0;
}

struct BenchArgs {
    std::optional<std::string> config;
    bool paper_scale = false;
    std::optional<std::size_t> grid_side, pool_tasks, plans_per_task, repeats, jobs;
    std::optional<std::vector<std::size_t>> cfl_sizes;
    std::optional<std::vector<std::string>> k_values;
    std::optional<std::string> concept_;
    std::optional<std::uint64_t> seed;
    std::optional<double> time_limit;
    std::string report = "report.jsonl";
    std::optional<std::string> csv;
};

int cmd_bench(const BenchArgs &args) {
    ExperimentConfig config = args.paper_scale ? ExperimentConfig::paper_scale() : ExperimentConfig{};
    config.jobs = std::max(1u, std::thread::hardware_concurrency());
    if (args.config) {
        const std::string text = read_file(*args.config);
        const json j = json::parse(text, nullptr, false);
        if (j.is_discarded())
            throw Error(ErrorKind::ParseError, "bench config is not valid JSON");
        const std::size_t jobs = config.jobs;
        config = experiment_config_from_json(j);
        if (!j.contains("jobs"))
            config.jobs = jobs;
    }
    if (args.grid_side) config.grid_side = *args.grid_side;
    if (args.pool_tasks) config.pool_tasks = *args.pool_tasks;
    if (args.plans_per_task) config.plans_per_task = *args.plans_per_task;
    if (args.repeats) config.repeats = *args.repeats;
    if (args.jobs) config.jobs = std::max<std::size_t>(1, *args.jobs);
    if (args.cfl_sizes) config.cfl_sizes = *args.cfl_sizes;
    if (args.k_values) {
        config.k_values.clear();
        for (const auto &k : *args.k_values)
            config.k_values.push_back(parse_k(k));
    }
    if (args.concept_) config.solution_concept = parse_concept(*args.concept_);
    if (args.seed) config.seed = *args.seed;
    if (!args.time_limit) {
        if (const char *env = std::getenv("COSTFORGE_TIME_LIMIT"))
            config.time_limit_s = std::stod(env);
    } else {
        config.time_limit_s = *args.time_limit;
    }

    const ExperimentReport report = run_experiment(config);
    write_file(args.report, serialize_report(report.records));
    if (args.csv)
        write_file(*args.csv, timing_csv(report.records));
    std::cout << format_aggregate_table(report.aggregates);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Learn action costs that make given plans optimal."};
    app.require_subcommand(1);

    LearnArgs learn;
    auto *learn_cmd = app.add_subcommand("learn", "Learn a cost function for a CFL manifest");
    learn_cmd->add_option("--manifest", learn.manifest, "CFL manifest (JSON)")->required();
    learn_cmd->add_option("--concept", learn.concept_, "mcf, scf, mcf-ref or scf-ref");
    learn_cmd->add_option("--k", learn.k, "alternatives per plan, or inf")->capture_default_str();
    learn_cmd->add_option("--time-limit", learn.time_limit, "seconds (default: COSTFORGE_TIME_LIMIT or none)");
    learn_cmd->add_option("--y-max", learn.y_max, "upper bound on learned costs");
    learn_cmd->add_option("--out", learn.out, "write learned costs here");
    learn_cmd->add_option("--report", learn.report, "also write the result record here");
    learn_cmd->add_option("--lp", learn.lp, "write the phase-one program in LP format");

    std::string manifest, costs;
    bool strict = false;
    auto *validate_cmd = app.add_subcommand("validate", "Re-plan to check which input plans are optimal");
    validate_cmd->add_option("--manifest", manifest, "CFL manifest (JSON)")->required();
    validate_cmd->add_option("--costs", costs, "cost file")->required();
    validate_cmd->add_flag("--strict", strict, "require unique optimality");

    BenchArgs bench;
    auto *bench_cmd = app.add_subcommand("bench", "Run the grid benchmark");
    bench_cmd->add_option("--config", bench.config, "JSON experiment config");
    bench_cmd->add_flag("--paper-scale", bench.paper_scale, "start from the full-scale settings");
    bench_cmd->add_option("--grid-side", bench.grid_side);
    bench_cmd->add_option("--pool-tasks", bench.pool_tasks);
    bench_cmd->add_option("--plans-per-task", bench.plans_per_task);
    bench_cmd->add_option("--cfl-sizes", bench.cfl_sizes);
    bench_cmd->add_option("--repeats", bench.repeats);
    bench_cmd->add_option("--k", bench.k_values, "k values (numbers or inf)");
    bench_cmd->add_option("--concept", bench.concept_);
    bench_cmd->add_option("--seed", bench.seed);
    bench_cmd->add_option("--time-limit", bench.time_limit, "seconds per cell");
    bench_cmd->add_option("--jobs", bench.jobs, "worker threads (default: logical cores)");
    bench_cmd->add_option("--report", bench.report, "JSON-lines report")->capture_default_str();
    bench_cmd->add_option("--csv", bench.csv, "timing points as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*learn_cmd)
            return cmd_learn(learn);
        if (*validate_cmd)
            return cmd_validate(manifest, costs, strict);
        return cmd_bench(bench);
    } catch (const Error &e) {
        print_error(e.kind(), e.what(), e.index(), e.reason());
    } catch (const std::exception &e) {
        print_error(ErrorKind::ValidationError, e.what());
    }
    return 1;
}
