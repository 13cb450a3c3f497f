#include "costforge/simplex.hpp"

#include "costforge/errors.hpp"

#include <optional>

namespace costforge {

namespace {

// Consecutive dual-degenerate pivots tolerated before falling back to
// Bland's rule for the rest of the solve.
constexpr std::size_t kDegenerateLimit = 50;

}  // namespace

DualSimplex::DualSimplex(const IntegerProgram &ip, std::span<const Cost> objective)
    : structurals_(ip.vars.size()),
      rows_(ip.constraints.size()),
      cols_(ip.vars.size() + ip.constraints.size()),
      tableau_(rows_ * cols_),
      beta_(rows_),
      reduced_(cols_),
      cost_(objective.begin(), objective.end()),
      basis_(rows_),
      row_of_(cols_, -1),
      at_upper_(cols_, false),
      basic_value_(rows_) {
    if (objective.size() != structurals_)
        throw Error(ErrorKind::ValidationError, "objective length does not match the program");
    for (std::size_t i = 0; i < rows_; ++i) {
        for (const Term &t : ip.constraints[i].terms)
            cell(i, t.var) += t.coeff;
        cell(i, structurals_ + i) = 1;
        beta_[i] = ip.constraints[i].rhs;
        basis_[i] = structurals_ + i;
        row_of_[structurals_ + i] = static_cast<std::int64_t>(i);
    }
    for (std::size_t j = 0; j < structurals_; ++j)
        reduced_[j] = cost_[j];
}

Rational DualSimplex::nonbasic_value(std::size_t col) const {
    if (col >= structurals_)
        return 0;
    return at_upper_[col] ? upper_[col] : lower_[col];
}

void DualSimplex::recompute_basic_values() {
    for (std::size_t i = 0; i < rows_; ++i)
        basic_value_[i] = beta_[i];
    for (std::size_t j = 0; j < structurals_; ++j) {
        if (row_of_[j] >= 0)
            continue;
        const Cost v = at_upper_[j] ? upper_[j] : lower_[j];
        if (v == 0)
            continue;
        for (std::size_t i = 0; i < rows_; ++i) {
            const Rational &a = cell(i, j);
            if (sgn(a) != 0)
                basic_value_[i] -= a * v;
        }
    }
}

void DualSimplex::pivot(std::size_t r, std::size_t j) {
    const Rational alpha = cell(r, j);
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < cols_; ++k) {
        Rational &v = cell(r, k);
        if (sgn(v) != 0) {
            v /= alpha;
            nz.push_back(k);
        }
    }
    beta_[r] /= alpha;
    Rational f, tmp;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r || sgn(cell(i, j)) == 0)
            continue;
        f = cell(i, j);
        for (std::size_t k : nz) {
            tmp = f * cell(r, k);
            cell(i, k) -= tmp;
        }
        tmp = f * beta_[r];
        beta_[i] -= tmp;
    }
    if (sgn(reduced_[j]) != 0) {
        f = reduced_[j];
        for (std::size_t k : nz) {
            tmp = f * cell(r, k);
            reduced_[k] -= tmp;
        }
    }
    const std::size_t leaving = basis_[r];
    row_of_[leaving] = -1;
    basis_[r] = j;
    row_of_[j] = static_cast<std::int64_t>(r);
}

LpStatus DualSimplex::solve(std::span<const Cost> lower, std::span<const Cost> upper,
                            Deadline deadline) {
    lower_.assign(lower.begin(), lower.end());
    upper_.assign(upper.begin(), upper.end());
    // Any basis is dual feasible once each nonbasic structural sits at the
    // bound its reduced cost points to.
    for (std::size_t j = 0; j < structurals_; ++j) {
        if (row_of_[j] >= 0)
            continue;
        const int s = sgn(reduced_[j]);
        if (s > 0)
            at_upper_[j] = true;
        else if (s < 0)
            at_upper_[j] = false;
    }
    recompute_basic_values();

    bool bland = false;
    std::size_t degenerate = 0;
    Rational violation, best_violation, ratio, best_ratio, delta;
    for (std::size_t step = 0;; ++step) {
        if ((step & 15) == 15 && deadline.expired())
            return LpStatus::TimedOut;

        // Leaving row.
        std::optional<std::size_t> leave;
        bool to_upper = false;
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t b = basis_[i];
            const Rational &v = basic_value_[i];
            const Cost lo = b < structurals_ ? lower_[b] : 0;
            bool above = false;
            if (v < lo) {
                violation = lo - v;
            } else if (b < structurals_ && v > upper_[b]) {
                violation = v - upper_[b];
                above = true;
            } else {
                continue;
            }
            bool take = false;
            if (!leave)
                take = true;
            else if (bland)
                take = b < basis_[*leave];
            else
                take = violation > best_violation ||
                       (violation == best_violation && b < basis_[*leave]);
            if (take) {
                leave = i;
                to_upper = above;
                best_violation = violation;
            }
        }
        if (!leave) {
            values_.assign(structurals_, Rational(0));
            objective_value_ = 0;
            for (std::size_t j = 0; j < structurals_; ++j) {
                values_[j] = row_of_[j] >= 0 ? basic_value_[row_of_[j]] : nonbasic_value(j);
                if (cost_[j] != 0)
                    objective_value_ += values_[j] * cost_[j];
            }
            return LpStatus::Optimal;
        }
        const std::size_t r = *leave;

        // Entering column by the dual ratio test, ties to the lowest index.
        std::optional<std::size_t> enter;
        for (std::size_t k = 0; k < cols_; ++k) {
            if (row_of_[k] >= 0)
                continue;
            const Rational &a = cell(r, k);
            const int sa = sgn(a);
            if (sa == 0)
                continue;
            if (k < structurals_ && lower_[k] == upper_[k])
                continue;
            const bool up = k < structurals_ && at_upper_[k];
            // Raising the leaving variable needs a > 0 at upper or a < 0 at
            // lower; lowering it needs the opposite.
            const bool eligible = to_upper ? (up ? sa < 0 : sa > 0) : (up ? sa > 0 : sa < 0);
            if (!eligible)
                continue;
            ratio = abs(reduced_[k]) / abs(a);
            if (!enter || ratio < best_ratio) {
                enter = k;
                best_ratio = ratio;
            }
        }
        if (!enter)
            return LpStatus::Infeasible;
        const std::size_t j = *enter;

        if (sgn(best_ratio) == 0) {
            if (++degenerate > kDegenerateLimit)
                bland = true;
        } else {
            degenerate = 0;
        }

        const std::size_t b = basis_[r];
        const Rational target = to_upper ? Rational(upper_[b]) : Rational(b < structurals_ ? lower_[b] : 0);
        delta = (basic_value_[r] - target) / cell(r, j);
        const Rational entering_value = nonbasic_value(j) + delta;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i != r && sgn(cell(i, j)) != 0)
                basic_value_[i] -= cell(i, j) * delta;
        }
        basic_value_[r] = entering_value;
        pivot(r, j);
        at_upper_[b] = to_upper;
        ++iterations_;
    }
}

}  // namespace costforge
