#include "costforge/encode.hpp"

#include "costforge/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace costforge {

std::size_t IntegerProgram::num_z() const {
    std::size_t n = 0;
    for (const auto &row : z)
        n += row.size();
    return n;
}

std::vector<Cost> IntegerProgram::objective(Cost plan_weight, Cost cost_weight) const {
    std::vector<Cost> c(vars.size(), 0);
    for (std::size_t v : x)
        c[v] += plan_weight;
    for (std::size_t v : (is_refinement(solution_concept) ? d : y))
        c[v] -= cost_weight;
    return c;
}

void IntegerProgram::add_plan_count_equality(std::size_t q) {
    Constraint upper{"count_le", {}, static_cast<Cost>(q)};
    Constraint lower{"count_ge", {}, -static_cast<Cost>(q)};
    for (std::size_t v : x) {
        upper.terms.push_back({v, 1});
        lower.terms.push_back({v, -1});
    }
    constraints.push_back(std::move(upper));
    constraints.push_back(std::move(lower));
}

bool IntegerProgram::is_feasible(std::span<const Cost> assignment) const {
    if (assignment.size() != vars.size())
        return false;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (assignment[v] < vars[v].lower || assignment[v] > vars[v].upper)
            return false;
    }
    for (const auto &row : constraints) {
        Cost lhs = 0;
        for (const Term &t : row.terms)
            lhs += t.coeff * assignment[t.var];
        if (lhs > row.rhs)
            return false;
    }
    return true;
}

std::vector<ActionId> relevant_actions(const CflTask &cfl,
                                       std::span<const AlternativeSet> alternatives) {
    std::set<ActionId> used;
    for (const auto &inst : cfl.instances)
        used.insert(inst.plan.steps.begin(), inst.plan.steps.end());
    for (const auto &set : alternatives) {
        for (const auto &p : set.plans)
            used.insert(p.steps.begin(), p.steps.end());
    }
    return {used.begin(), used.end()};
}

Cost default_y_max(const CflTask &cfl, std::span<const AlternativeSet> alternatives,
                   std::span<const ActionId> relevant, SolutionConcept concept_) {
    std::size_t longest = 0;
    for (const auto &inst : cfl.instances)
        longest = std::max(longest, inst.plan.size());
    for (const auto &set : alternatives) {
        for (const auto &p : set.plans)
            longest = std::max(longest, p.size());
    }
    Cost y_max = std::max<Cost>(2 * static_cast<Cost>(longest), static_cast<Cost>(relevant.size()));
    if (is_refinement(concept_)) {
        for (ActionId a : relevant) {
            if (auto c = cfl.prior_costs.get(cfl.domain->action(a).name))
                y_max = std::max(y_max, *c);
        }
    }
    return std::max<Cost>(y_max, 1);
}

namespace {

std::string lp_name(std::string_view raw) {
    std::string out;
    for (char ch : raw) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
        out += ok ? ch : '_';
    }
    return out;
}

}  // namespace

IntegerProgram build_milp(const CflTask &cfl, std::span<const AlternativeSet> alternatives,
                          std::span<const ActionId> relevant, SolutionConcept concept_,
                          Cost y_max) {
    if (alternatives.size() != cfl.instances.size())
        throw Error(ErrorKind::ValidationError, "alternative sets do not match the instances");
    const Domain &domain = *cfl.domain;
    const bool refinement = is_refinement(concept_);
    const Cost delta = is_strict(concept_) ? 1 : 0;

    IntegerProgram ip;
    ip.solution_concept = concept_;
    ip.y_max = y_max;
    ip.relevant.assign(relevant.begin(), relevant.end());

    std::vector<Cost> prior(relevant.size(), 0);
    Cost max_prior = 0;
    if (refinement) {
        for (std::size_t i = 0; i < relevant.size(); ++i) {
            auto c = cfl.prior_costs.get(domain.action(relevant[i]).name);
            if (!c)
                throw Error(ErrorKind::MissingPrior,
                            "no prior cost for relevant action " + domain.action(relevant[i]).name);
            prior[i] = *c;
            max_prior = std::max(max_prior, *c);
        }
    }

    auto add_var = [&](std::string name, VarKind kind, Cost lo, Cost hi) {
        ip.vars.push_back({std::move(name), kind, lo, hi});
        return ip.vars.size() - 1;
    };
    for (std::size_t i = 0; i < cfl.instances.size(); ++i)
        ip.x.push_back(add_var("x_" + std::to_string(i), VarKind::Binary, 0, 1));
    for (std::size_t i = 0; i < cfl.instances.size(); ++i) {
        ip.z.emplace_back();
        for (std::size_t j = 0; j < alternatives[i].plans.size(); ++j)
            ip.z[i].push_back(add_var("z_" + std::to_string(i) + "_" + std::to_string(j),
                                      VarKind::Binary, 0, 1));
    }
    std::map<ActionId, std::size_t> y_of;
    for (ActionId a : relevant) {
        y_of[a] = add_var("y_" + lp_name(domain.action(a).name), VarKind::Integer, 1, y_max);
        ip.y.push_back(y_of[a]);
    }
    if (refinement) {
        for (ActionId a : relevant)
            ip.d.push_back(add_var("d_" + lp_name(domain.action(a).name), VarKind::Integer, 0,
                                   y_max + max_prior));
    }

    for (std::size_t i = 0; i < cfl.instances.size(); ++i) {
        const Plan &plan = cfl.instances[i].plan;
        for (std::size_t j = 0; j < alternatives[i].plans.size(); ++j) {
            std::map<ActionId, Cost> net;
            for (ActionId a : plan.steps)
                net[a] += 1;
            for (ActionId a : alternatives[i].plans[j].steps)
                net[a] -= 1;
            Constraint row;
            row.name = "alt_" + std::to_string(i) + "_" + std::to_string(j);
            // Largest value the left-hand side (plus delta) can take over the
            // y box; with z = 0 the row must never bind.
            Cost big_m = delta;
            Cost least = delta;
            for (auto [a, coeff] : net) {
                if (coeff == 0)
                    continue;
                auto it = y_of.find(a);
                if (it == y_of.end())
                    throw Error(ErrorKind::ValidationError,
                                "action " + domain.action(a).name + " is not in the relevant set");
                row.terms.push_back({it->second, coeff});
                big_m += coeff > 0 ? coeff * y_max : coeff;
                least += coeff > 0 ? coeff : coeff * y_max;
            }
            // The alternative is cheaper under every y in the box.
            if (least > 0) {
                ip.vars[ip.z[i][j]].upper = 0;
                ip.vars[ip.x[i]].upper = 0;
            }
            big_m = std::max<Cost>(big_m, 0);
            row.terms.push_back({ip.z[i][j], big_m});
            row.rhs = big_m - delta;
            ip.constraints.push_back(std::move(row));
        }
    }
    for (std::size_t i = 0; i < cfl.instances.size(); ++i) {
        Constraint row;
        row.name = "opt_" + std::to_string(i);
        const Cost count = static_cast<Cost>(ip.z[i].size());
        for (std::size_t zv : ip.z[i])
            row.terms.push_back({zv, -1});
        if (count > 0)
            row.terms.push_back({ip.x[i], count});
        row.rhs = 0;
        ip.constraints.push_back(std::move(row));
    }
    if (refinement) {
        for (std::size_t i = 0; i < relevant.size(); ++i) {
            const std::string n = lp_name(domain.action(relevant[i]).name);
            ip.constraints.push_back({"dev_lo_" + n, {{ip.y[i], -1}, {ip.d[i], -1}}, -prior[i]});
            ip.constraints.push_back({"dev_hi_" + n, {{ip.y[i], 1}, {ip.d[i], -1}}, prior[i]});
        }
    }
    return ip;
}

std::string to_lp_format(const IntegerProgram &ip, std::span<const Cost> objective) {
    auto linear = [&](const std::vector<Term> &terms) {
        std::string s;
        for (const Term &t : terms) {
            s += t.coeff < 0 ? " - " : " + ";
            s += std::to_string(t.coeff < 0 ? -t.coeff : t.coeff) + " " + ip.vars[t.var].name;
        }
        return s.empty() ? std::string(" 0 ") + (ip.vars.empty() ? "" : ip.vars[0].name) : s;
    };
    std::vector<Term> obj;
    for (std::size_t v = 0; v < objective.size(); ++v) {
        if (objective[v] != 0)
            obj.push_back({v, objective[v]});
    }
    std::string out = "\\ costforge integer program (" +
                      std::string(to_string(ip.solution_concept)) + ")\nMaximize\n obj:" +
                      linear(obj) + "\nSubject To\n";
    for (const auto &row : ip.constraints)
        out += " " + row.name + ":" + linear(row.terms) + " <= " + std::to_string(row.rhs) + "\n";
    out += "Bounds\n";
    for (const auto &v : ip.vars)
        out += " " + std::to_string(v.lower) + " <= " + v.name + " <= " + std::to_string(v.upper) +
               "\n";
    out += "General\n";
    for (const auto &v : ip.vars) {
        if (v.kind == VarKind::Integer)
            out += " " + v.name + "\n";
    }
    out += "Binary\n";
    for (const auto &v : ip.vars) {
        if (v.kind == VarKind::Binary)
            out += " " + v.name + "\n";
    }
    out += "End\n";
    return out;
}

}  // namespace costforge
