#include "costforge/formats.hpp"

#include "costforge/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace costforge {

using nlohmann::json;

std::string_view to_string(SolutionConcept c) {
    switch (c) {
    case SolutionConcept::Mcf: return "mcf";
    case SolutionConcept::Scf: return "scf";
    case SolutionConcept::McfRef: return "mcf-ref";
    case SolutionConcept::ScfRef: return "scf-ref";
    }
    return "mcf";
}

SolutionConcept parse_concept(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "mcf") return SolutionConcept::Mcf;
    if (lower == "scf") return SolutionConcept::Scf;
    if (lower == "mcf-ref") return SolutionConcept::McfRef;
    if (lower == "scf-ref") return SolutionConcept::ScfRef;
    throw Error(ErrorKind::ParseError, "unknown solution concept: " + std::string(text));
}

PlanningTask CflTask::task(std::size_t i) const {
    const CflInstance &inst = instances.at(i);
    return PlanningTask{domain, inst.init, inst.goal, prior_costs};
}

void validate(const CflTask &cfl) {
    for (std::size_t i = 0; i < cfl.instances.size(); ++i) {
        PlanningTask task = cfl.task(i);
        const Plan &plan = cfl.instances[i].plan;
        Execution ex = execute(task, plan);
        if (!ex.ok() || !task.is_goal(ex.trace.back()))
            throw Error(ErrorKind::ValidationError,
                        "instance " + std::to_string(i) + ": plan does not solve the task", i,
                        ValidationReason::NotSolving);
        if (!is_simple(task, plan))
            throw Error(ErrorKind::ValidationError,
                        "instance " + std::to_string(i) + ": plan revisits a state", i,
                        ValidationReason::NotSimple);
    }
    if (is_refinement(cfl.solution_concept) && !cfl.prior_costs.total_over(*cfl.domain))
        throw Error(ErrorKind::MissingPrior,
                    std::string("concept ") + std::string(to_string(cfl.solution_concept)) +
                        " needs a prior cost for every action");
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path &path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

[[noreturn]] void schema_error(const std::string &where, const std::string &what) {
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

const json &require(const json &obj, const char *key, const std::string &where) {
    auto it = obj.find(key);
    if (it == obj.end())
        schema_error(where, std::string("missing field '") + key + "'");
    return *it;
}

std::vector<std::string> string_list(const json &j, const std::string &where) {
    if (!j.is_array())
        schema_error(where, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto &e : j) {
        if (!e.is_string())
            schema_error(where, "expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

Cost cost_value(const json &j, const std::string &where) {
    if (!j.is_number_integer())
        schema_error(where, "costs must be integers");
    Cost c = j.get<Cost>();
    if (c < 1)
        throw Error(ErrorKind::NonPositiveCost, where + ": cost must be >= 1");
    return c;
}

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

CflTask parse_cfl(std::string_view text, const std::filesystem::path &base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = line_of_byte(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + e.what(),
                    line);
    }
    if (!doc.is_object())
        schema_error("manifest", "expected an object");
    const json &fmt = require(doc, "format", "manifest");
    if (!fmt.is_number_integer() || fmt.get<int>() != 1)
        schema_error("manifest", "unsupported format version (expected 1)");

    const json &dom = require(doc, "domain", "manifest");
    auto fluents = string_list(require(dom, "fluents", "domain"), "domain.fluents");
    const json &acts = require(dom, "actions", "domain");
    if (!acts.is_array())
        schema_error("domain.actions", "expected an array");
    std::vector<ActionSpec> specs;
    for (std::size_t i = 0; i < acts.size(); ++i) {
        std::string where = "domain.actions[" + std::to_string(i) + "]";
        const json &a = acts[i];
        const json &name = require(a, "name", where);
        if (!name.is_string())
            schema_error(where, "name must be a string");
        ActionSpec spec{name.get<std::string>(), {}, {}, {}};
        if (a.contains("pre")) spec.pre = string_list(a["pre"], where + ".pre");
        if (a.contains("add")) spec.add = string_list(a["add"], where + ".add");
        if (a.contains("del")) spec.del = string_list(a["del"], where + ".del");
        specs.push_back(std::move(spec));
    }

    CflTask cfl;
    try {
        cfl.domain = std::make_shared<Domain>(std::move(fluents), std::move(specs));
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::UnknownFluent)
            throw Error(ErrorKind::ValidationError, std::string("domain: ") + e.what(),
                        std::nullopt, ValidationReason::UnknownFluent);
        throw;
    }
    const Domain &domain = *cfl.domain;

    if (doc.contains("concept")) {
        const json &c = doc["concept"];
        if (!c.is_string())
            schema_error("manifest", "concept must be a string");
        cfl.solution_concept = parse_concept(c.get<std::string>());
    }

    if (doc.contains("prior_costs") && !doc["prior_costs"].is_null()) {
        const json &pc = doc["prior_costs"];
        if (!pc.is_object())
            schema_error("prior_costs", "expected an object");
        for (auto it = pc.begin(); it != pc.end(); ++it) {
            if (!domain.find_action(it.key()))
                throw Error(ErrorKind::UnknownAction, "prior_costs: unknown action " + it.key());
            cfl.prior_costs.set(it.key(), cost_value(it.value(), "prior_costs." + it.key()));
        }
    }

    const json &insts = require(doc, "instances", "manifest");
    if (!insts.is_array())
        schema_error("instances", "expected an array");
    for (std::size_t i = 0; i < insts.size(); ++i) {
        std::string where = "instances[" + std::to_string(i) + "]";
        const json &in = insts[i];
        auto fail = [&](ValidationReason reason, const std::string &msg) {
            throw Error(ErrorKind::ValidationError, where + ": " + msg, i, reason);
        };
        CflInstance inst;
        auto fluent_ids = [&](const char *key) {
            std::vector<FluentId> ids;
            for (const auto &n : string_list(require(in, key, where), where + "." + key)) {
                auto id = domain.find_fluent(n);
                if (!id)
                    fail(ValidationReason::UnknownFluent, "unknown fluent " + n);
                ids.push_back(*id);
            }
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            return ids;
        };
        inst.init = State::from_fluents(domain.num_fluents(), fluent_ids("init"));
        inst.goal = fluent_ids("goal");

        std::vector<std::string> steps;
        if (in.contains("plan")) {
            steps = string_list(in["plan"], where + ".plan");
        } else if (in.contains("plan_file")) {
            const json &pf = in["plan_file"];
            if (!pf.is_string())
                schema_error(where, "plan_file must be a string");
            std::string body = read_file(base_dir / pf.get<std::string>());
            try {
                inst.plan = parse_plan_text(domain, body);
            } catch (const Error &e) {
                if (e.kind() == ErrorKind::UnknownAction)
                    fail(ValidationReason::UnknownAction, e.what());
                throw;
            }
        } else {
            schema_error(where, "missing field 'plan' (or 'plan_file')");
        }
        for (const auto &s : steps) {
            auto id = domain.find_action(s);
            if (!id)
                fail(ValidationReason::UnknownAction, "unknown action " + s);
            inst.plan.steps.push_back(*id);
        }
        cfl.instances.push_back(std::move(inst));
    }

    validate(cfl);
    return cfl;
}

CflTask load_cfl(const std::filesystem::path &manifest_path) {
    return parse_cfl(read_file(manifest_path), manifest_path.parent_path());
}

std::string serialize_cfl(const CflTask &cfl) {
    const Domain &domain = *cfl.domain;
    json doc;
    doc["format"] = 1;
    doc["concept"] = std::string(to_string(cfl.solution_concept));
    json fluents = json::array();
    for (const auto &f : domain.fluent_names())
        fluents.push_back(f);
    auto names = [&](std::span<const FluentId> ids) {
        json arr = json::array();
        for (FluentId f : ids)
            arr.push_back(domain.fluent_name(f));
        return arr;
    };
    json actions = json::array();
    for (const auto &a : domain.actions()) {
        actions.push_back(json{{"name", a.name},
                               {"pre", names(a.pre)},
                               {"add", names(a.add)},
                               {"del", names(a.del)}});
    }
    doc["domain"] = json{{"fluents", fluents}, {"actions", actions}};
    json insts = json::array();
    for (const auto &inst : cfl.instances) {
        auto init = inst.init.fluents();
        insts.push_back(json{{"init", names(init)},
                             {"goal", names(inst.goal)},
                             {"plan", plan_names(domain, inst.plan)}});
    }
    doc["instances"] = insts;
    if (!cfl.prior_costs.empty()) {
        json pc = json::object();
        for (const auto &[name, c] : cfl.prior_costs.entries())
            pc[name] = c;
        doc["prior_costs"] = pc;
    }
    return doc.dump(2) + "\n";
}

void save_cfl(const CflTask &cfl, const std::filesystem::path &path) {
    write_file(path, serialize_cfl(cfl));
}

// ---------------------------------------------------------------------------
// Plan text

namespace {

std::string_view trim(std::string_view s) {
    const char *ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn &&fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        fn(line_no, line);
        if (nl == std::string_view::npos)
            break;
        text.remove_prefix(nl + 1);
    }
}

}  // namespace

Plan parse_plan_text(const Domain &domain, std::string_view text) {
    Plan plan;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto semi = line.find(';');
        if (semi != std::string_view::npos)
            line = line.substr(0, semi);
        line = trim(line);
        if (line.empty())
            return;
        auto id = domain.find_action(line);
        if (!id && line.size() >= 2 && line.front() == '(' && line.back() == ')')
            id = domain.find_action(trim(line.substr(1, line.size() - 2)));
        if (!id)
            throw Error(ErrorKind::UnknownAction,
                        "line " + std::to_string(line_no) + ": unknown action " +
                            std::string(line),
                        line_no);
        plan.steps.push_back(*id);
    });
    return plan;
}

std::string serialize_plan_text(const Domain &domain, const Plan &plan) {
    std::string out;
    for (ActionId a : plan.steps)
        out += domain.action(a).name + "\n";
    out += "; cost = " + std::to_string(plan.size()) + " (unit cost)\n";
    return out;
}

// ---------------------------------------------------------------------------
// Cost files

CostFunction parse_costs(std::string_view text) {
    CostFunction costs;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto semi = line.find(';');
        if (semi != std::string_view::npos)
            line = line.substr(0, semi);
        line = trim(line);
        if (line.empty())
            return;
        auto where = "line " + std::to_string(line_no);
        auto colon = line.rfind(':');
        if (colon == std::string_view::npos)
            throw Error(ErrorKind::ParseError, where + ": expected 'action: cost'", line_no);
        std::string_view name = trim(line.substr(0, colon));
        std::string_view value = trim(line.substr(colon + 1));
        if (name.empty())
            throw Error(ErrorKind::ParseError, where + ": empty action name", line_no);
        Cost c = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), c);
        if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
            throw Error(ErrorKind::ParseError,
                        where + ": cost must be an integer, got '" + std::string(value) + "'",
                        line_no);
        if (c < 1)
            throw Error(ErrorKind::NonPositiveCost,
                        where + ": cost must be >= 1, got " + std::to_string(c), line_no);
        if (costs.get(name))
            throw Error(ErrorKind::ParseError,
                        where + ": duplicate action " + std::string(name), line_no);
        costs.set(std::string(name), c);
    });
    return costs;
}

std::string serialize_costs(const CostFunction &costs) {
    if (costs.empty())
        throw Error(ErrorKind::MissingCost, "cannot save the empty cost function");
    std::string out;
    for (const auto &[name, c] : costs.entries())
        out += name + ": " + std::to_string(c) + "\n";
    return out;
}

CostFunction load_costs(const std::filesystem::path &path) { return parse_costs(read_file(path)); }

void save_costs(const CostFunction &costs, const std::filesystem::path &path) {
    write_file(path, serialize_costs(costs));
}

// ---------------------------------------------------------------------------
// Records

json k_to_json(std::optional<std::size_t> k) {
    if (k)
        return *k;
    return "inf";
}

std::optional<std::size_t> k_from_json(const json &j) {
    if (j.is_string() && j.get<std::string>() == "inf")
        return std::nullopt;
    if (j.is_number_integer() && j.get<std::int64_t>() > 0)
        return j.get<std::size_t>();
    throw Error(ErrorKind::ParseError, "k must be a positive integer or \"inf\"");
}

json to_json(const ReportRecord &r) {
    json j;
    j["algorithm"] = r.algorithm;
    j["concept"] = std::string(to_string(r.solution_concept));
    j["k"] = r.algorithm == "baseline" ? json(nullptr) : k_to_json(r.k);
    j["cfl_size"] = r.cfl_size;
    j["repeat"] = r.repeat;
    j["Q"] = r.q;
    j["ratio"] = r.ratio;
    j["wall_ms"] = r.wall_ms;
    j["timeout"] = r.timeout;
    return j;
}

ReportRecord report_record_from_json(const json &j) {
    try {
        ReportRecord r;
        r.algorithm = j.at("algorithm").get<std::string>();
        r.solution_concept = parse_concept(j.at("concept").get<std::string>());
        r.k = j.at("k").is_null() ? std::nullopt : k_from_json(j.at("k"));
        r.cfl_size = j.at("cfl_size").get<std::size_t>();
        r.repeat = j.at("repeat").get<std::size_t>();
        r.q = j.at("Q").get<std::size_t>();
        r.ratio = j.at("ratio").get<double>();
        r.wall_ms = j.at("wall_ms").get<double>();
        r.timeout = j.at("timeout").get<bool>();
        return r;
    } catch (const json::exception &e) {
        throw Error(ErrorKind::ParseError, std::string("report record: ") + e.what());
    }
}

std::string serialize_report(const std::vector<ReportRecord> &records) {
    std::string out;
    for (const auto &r : records)
        out += to_json(r).dump() + "\n";
    return out;
}

std::vector<ReportRecord> parse_report(std::string_view text) {
    std::vector<ReportRecord> records;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        line = trim(line);
        if (line.empty())
            return;
        try {
            records.push_back(report_record_from_json(json::parse(line)));
        } catch (const json::parse_error &e) {
            throw Error(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    });
    return records;
}

namespace {

json verdicts_to_json(const std::vector<InstanceVerdict> &verdicts) {
    json arr = json::array();
    for (const auto &v : verdicts) {
        json e;
        e["instance"] = v.instance;
        if (v.x) e["x"] = *v.x;
        e["optimal"] = v.optimal;
        e["strictly_optimal"] = v.strictly_optimal;
        if (v.alternatives) e["alternatives"] = *v.alternatives;
        if (v.exhausted) e["exhausted"] = *v.exhausted;
        arr.push_back(e);
    }
    return arr;
}

std::vector<InstanceVerdict> verdicts_from_json(const json &arr) {
    std::vector<InstanceVerdict> out;
    for (const auto &e : arr) {
        InstanceVerdict v;
        v.instance = e.at("instance").get<std::size_t>();
        if (e.contains("x")) v.x = e["x"].get<int>();
        v.optimal = e.at("optimal").get<bool>();
        v.strictly_optimal = e.at("strictly_optimal").get<bool>();
        if (e.contains("alternatives")) v.alternatives = e["alternatives"].get<std::size_t>();
        if (e.contains("exhausted")) v.exhausted = e["exhausted"].get<bool>();
        out.push_back(v);
    }
    return out;
}

}  // namespace

json to_json(const LearnSummary &s) {
    json j;
    j["concept"] = std::string(to_string(s.solution_concept));
    j["k"] = k_to_json(s.k);
    j["status"] = s.status;
    j["Q"] = s.q;
    j["instances"] = s.instances;
    j["secondary_value"] = s.secondary_value;
    j["validated_ratio"] = s.validated_ratio;
    j["y_max"] = s.y_max;
    j["verdicts"] = verdicts_to_json(s.verdicts);
    j["wall_ms"] = json{{"enumerate", s.enumerate_ms},
                        {"phase1", s.phase1_ms},
                        {"phase2", s.phase2_ms},
                        {"total", s.total_ms}};
    return j;
}

LearnSummary learn_summary_from_json(const json &j) {
    try {
        LearnSummary s;
        s.solution_concept = parse_concept(j.at("concept").get<std::string>());
        s.k = k_from_json(j.at("k"));
        s.status = j.at("status").get<std::string>();
        s.q = j.at("Q").get<std::size_t>();
        s.instances = j.at("instances").get<std::size_t>();
        s.secondary_value = j.at("secondary_value").get<Cost>();
        s.validated_ratio = j.at("validated_ratio").get<double>();
        s.y_max = j.at("y_max").get<Cost>();
        s.verdicts = verdicts_from_json(j.at("verdicts"));
        const json &w = j.at("wall_ms");
        s.enumerate_ms = w.at("enumerate").get<double>();
        s.phase1_ms = w.at("phase1").get<double>();
        s.phase2_ms = w.at("phase2").get<double>();
        s.total_ms = w.at("total").get<double>();
        return s;
    } catch (const json::exception &e) {
        throw Error(ErrorKind::ParseError, std::string("learn record: ") + e.what());
    }
}

json to_json(const ValidateSummary &s) {
    json j;
    j["strict"] = s.strict;
    j["optimal"] = s.optimal;
    j["instances"] = s.instances;
    j["ratio"] = s.ratio;
    j["verdicts"] = verdicts_to_json(s.verdicts);
    return j;
}

ValidateSummary validate_summary_from_json(const json &j) {
    try {
        ValidateSummary s;
        s.strict = j.at("strict").get<bool>();
        s.optimal = j.at("optimal").get<std::size_t>();
        s.instances = j.at("instances").get<std::size_t>();
        s.ratio = j.at("ratio").get<double>();
        s.verdicts = verdicts_from_json(j.at("verdicts"));
        return s;
    } catch (const json::exception &e) {
        throw Error(ErrorKind::ParseError, std::string("validate record: ") + e.what());
    }
}

}  // namespace costforge
