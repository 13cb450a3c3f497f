#pragma once

// File formats: CFL manifests (JSON, `format: 1`), line-oriented plan text,
// learned cost files (`action: cost` per line) and JSON-lines report records.

#include "costforge/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace costforge {

enum class SolutionConcept { Mcf, Scf, McfRef, ScfRef };

std::string_view to_string(SolutionConcept c);
SolutionConcept parse_concept(std::string_view text);  // throws ParseError
inline bool is_refinement(SolutionConcept c) {
    return c == SolutionConcept::McfRef || c == SolutionConcept::ScfRef;
}
inline bool is_strict(SolutionConcept c) {
    return c == SolutionConcept::Scf || c == SolutionConcept::ScfRef;
}

struct CflInstance {
    State init;
    std::vector<FluentId> goal;  // sorted
    Plan plan;
};

// A cost function learning (or refinement) task: planning tasks sharing one
// domain, one input plan each, an optional prior cost function and the
// requested solution concept.
struct CflTask {
    std::shared_ptr<const Domain> domain;
    std::vector<CflInstance> instances;
    CostFunction prior_costs;
    SolutionConcept solution_concept = SolutionConcept::Mcf;

    std::size_t size() const { return instances.size(); }
    // Instance i as a planning task carrying the prior (possibly Empty) costs.
    PlanningTask task(std::size_t i) const;
};

// Checks every input plan solves its instance and is simple, and that
// refinement concepts carry a total prior. Throws ValidationError (index =
// instance) or MissingPrior.
void validate(const CflTask &cfl);

CflTask parse_cfl(std::string_view text,
                  const std::filesystem::path &base_dir = std::filesystem::path());
CflTask load_cfl(const std::filesystem::path &manifest_path);
std::string serialize_cfl(const CflTask &cfl);
void save_cfl(const CflTask &cfl, const std::filesystem::path &path);

// Plan text: one action name per line, `;` starts a comment. Lines of the form
// `(name)` are accepted when `name` is a known action.
Plan parse_plan_text(const Domain &domain, std::string_view text);
std::string serialize_plan_text(const Domain &domain, const Plan &plan);

CostFunction parse_costs(std::string_view text);
std::string serialize_costs(const CostFunction &costs);  // throws MissingCost if empty
CostFunction load_costs(const std::filesystem::path &path);
void save_costs(const CostFunction &costs, const std::filesystem::path &path);

std::string read_file(const std::filesystem::path &path);  // throws IoError
void write_file(const std::filesystem::path &path, std::string_view contents);

// `k` as printed in records: a number or "inf".
nlohmann::json k_to_json(std::optional<std::size_t> k);
std::optional<std::size_t> k_from_json(const nlohmann::json &j);

// One row of an experiment report.
struct ReportRecord {
    std::string algorithm;  // "baseline" or "lacfip"
    SolutionConcept solution_concept = SolutionConcept::Mcf;
    std::optional<std::size_t> k;  // nullopt = infinity (or not applicable for baseline)
    std::size_t cfl_size = 0;
    std::size_t repeat = 0;
    std::size_t q = 0;
    double ratio = 0.0;
    double wall_ms = 0.0;
    bool timeout = false;

    friend bool operator==(const ReportRecord &, const ReportRecord &) = default;
};

nlohmann::json to_json(const ReportRecord &r);
ReportRecord report_record_from_json(const nlohmann::json &j);
std::string serialize_report(const std::vector<ReportRecord> &records);  // JSON lines
std::vector<ReportRecord> parse_report(std::string_view text);

struct InstanceVerdict {
    std::size_t instance = 0;
    std::optional<int> x;  // MILP indicator, absent for validation-only output
    bool optimal = false;
    bool strictly_optimal = false;
    std::optional<std::size_t> alternatives;
    std::optional<bool> exhausted;

    friend bool operator==(const InstanceVerdict &, const InstanceVerdict &) = default;
};

// Record printed by `costforge learn`.
struct LearnSummary {
    SolutionConcept solution_concept = SolutionConcept::Mcf;
    std::optional<std::size_t> k;
    std::string status;
    std::size_t q = 0;
    std::size_t instances = 0;
    Cost secondary_value = 0;
    double validated_ratio = 0.0;
    Cost y_max = 0;
    std::vector<InstanceVerdict> verdicts;
    double enumerate_ms = 0.0;
    double phase1_ms = 0.0;
    double phase2_ms = 0.0;
    double total_ms = 0.0;

    friend bool operator==(const LearnSummary &, const LearnSummary &) = default;
};

nlohmann::json to_json(const LearnSummary &s);
LearnSummary learn_summary_from_json(const nlohmann::json &j);

// Record printed by `costforge validate`.
struct ValidateSummary {
    bool strict = false;
    std::size_t optimal = 0;
    std::size_t instances = 0;
    double ratio = 0.0;
    std::vector<InstanceVerdict> verdicts;

    friend bool operator==(const ValidateSummary &, const ValidateSummary &) = default;
};

nlohmann::json to_json(const ValidateSummary &s);
ValidateSummary validate_summary_from_json(const nlohmann::json &j);

}  // namespace costforge
