#include "costforge/simplex.hpp"

#include "costforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace costforge {

namespace {

constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr std::size_t kDegenerateLimit = 50;
constexpr std::size_t kRefactorEvery = 100;

// Multipliers are rounded onto a 2^-30 grid and capped so the exact checks
// below fit in 128-bit integers. Any nonnegative multipliers give a valid
// bound, so rounding only costs tightness.
constexpr double kScale = 1073741824.0;
constexpr double kMaxMultiplier = 1e6;

using Wide = __int128;

std::vector<std::int64_t> scaled(std::span<const double> lambda) {
    std::vector<std::int64_t> out(lambda.size(), 0);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const double v = lambda[i];
        if (!(v > 0) || !std::isfinite(v))
            continue;
        out[i] = static_cast<std::int64_t>(std::llround(std::min(v, kMaxMultiplier) * kScale));
    }
    return out;
}

Rational to_rational(Wide v) {
    const bool negative = v < 0;
    unsigned __int128 m = negative ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(m >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(m)));
    mpz_class z = (hi << 64) + lo;
    if (negative)
        z = -z;
    return Rational(z);
}

// lambda . A_j for every structural column, scaled.
std::vector<Wide> combine(const IntegerProgram &ip, const std::vector<std::int64_t> &lam) {
    std::vector<Wide> col(ip.vars.size(), 0);
    for (std::size_t i = 0; i < ip.constraints.size(); ++i) {
        if (lam[i] == 0)
            continue;
        for (const Term &t : ip.constraints[i].terms)
            col[t.var] += static_cast<Wide>(lam[i]) * t.coeff;
    }
    return col;
}

}  // namespace

Rational safe_dual_bound(const IntegerProgram &ip, std::span<const Cost> objective,
                         std::span<const Cost> lower, std::span<const Cost> upper,
                         std::span<const double> lambda) {
    const auto lam = scaled(lambda);
    const auto col = combine(ip, lam);
    const Wide scale = static_cast<Wide>(kScale);
    Wide total = 0;
    for (std::size_t i = 0; i < ip.constraints.size(); ++i)
        total += static_cast<Wide>(lam[i]) * ip.constraints[i].rhs;
    for (std::size_t j = 0; j < ip.vars.size(); ++j) {
        const Wide r = static_cast<Wide>(objective[j]) * scale - col[j];
        total += r * (r > 0 ? upper[j] : lower[j]);
    }
    return to_rational(total) / Rational(to_rational(scale));
}

bool proves_infeasible(const IntegerProgram &ip, std::span<const Cost> lower,
                       std::span<const Cost> upper, std::span<const double> lambda) {
    const auto lam = scaled(lambda);
    const auto col = combine(ip, lam);
    Wide rhs = 0;
    for (std::size_t i = 0; i < ip.constraints.size(); ++i)
        rhs += static_cast<Wide>(lam[i]) * ip.constraints[i].rhs;
    Wide least = 0;
    for (std::size_t j = 0; j < ip.vars.size(); ++j)
        least += col[j] * (col[j] > 0 ? lower[j] : upper[j]);
    return least > rhs;
}

FloatDualSimplex::FloatDualSimplex(const IntegerProgram &ip, std::span<const Cost> objective)
    : ip_(ip),
      structurals_(ip.vars.size()),
      rows_(ip.constraints.size()),
      cols_(ip.vars.size() + ip.constraints.size()),
      tableau_(rows_ * cols_, 0.0),
      beta_(rows_, 0.0),
      reduced_(cols_, 0.0),
      cost_(objective.begin(), objective.end()),
      basis_(rows_),
      row_of_(cols_, -1),
      at_upper_(cols_, false),
      basic_value_(rows_, 0.0) {
    if (objective.size() != structurals_)
        throw Error(ErrorKind::ValidationError, "objective length does not match the program");
    for (std::size_t i = 0; i < rows_; ++i) {
        basis_[i] = structurals_ + i;
        row_of_[structurals_ + i] = static_cast<std::int64_t>(i);
    }
    refactor();
}

// Rebuilds B^-1 [A I], B^-1 b and the reduced costs from the original rows
// for the current basis. A numerically singular basis falls back to the
// all-slack basis, which is always valid.
void FloatDualSimplex::refactor() {
    auto load = [&] {
        std::fill(tableau_.begin(), tableau_.end(), 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (const Term &t : ip_.constraints[i].terms)
                cell(i, t.var) += static_cast<double>(t.coeff);
            cell(i, structurals_ + i) = 1.0;
            beta_[i] = static_cast<double>(ip_.constraints[i].rhs);
        }
    };
    load();
    std::vector<std::size_t> wanted = basis_;
    std::vector<bool> assigned(rows_, false);
    std::vector<std::size_t> new_basis(rows_, 0);
    std::fill(row_of_.begin(), row_of_.end(), -1);
    bool ok = true;
    // Slack columns first: they are unit vectors and pivot trivially.
    std::stable_sort(wanted.begin(), wanted.end(), [&](std::size_t a, std::size_t b) {
        return (a >= structurals_) > (b >= structurals_);
    });
    for (std::size_t j : wanted) {
        std::optional<std::size_t> best;
        double best_abs = kPivotTol;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!assigned[i] && std::abs(cell(i, j)) > best_abs) {
                best = i;
                best_abs = std::abs(cell(i, j));
            }
        }
        if (!best) {
            ok = false;
            break;
        }
        assigned[*best] = true;
        new_basis[*best] = j;
        pivot(*best, j);
    }
    if (!ok) {
        load();
        for (std::size_t i = 0; i < rows_; ++i)
            new_basis[i] = structurals_ + i;
    }
    basis_ = new_basis;
    std::fill(row_of_.begin(), row_of_.end(), -1);
    for (std::size_t i = 0; i < rows_; ++i)
        row_of_[basis_[i]] = static_cast<std::int64_t>(i);
    for (std::size_t k = 0; k < cols_; ++k) {
        double r = k < structurals_ ? cost_[k] : 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t b = basis_[i];
            if (b < structurals_ && cost_[b] != 0.0)
                r -= cost_[b] * cell(i, k);
        }
        reduced_[k] = row_of_[k] >= 0 ? 0.0 : r;
    }
    since_refactor_ = 0;
}

double FloatDualSimplex::nonbasic_value(std::size_t col) const {
    if (col >= structurals_)
        return 0.0;
    return at_upper_[col] ? upper_[col] : lower_[col];
}

void FloatDualSimplex::place_nonbasics() {
    for (std::size_t j = 0; j < structurals_; ++j) {
        if (row_of_[j] >= 0)
            continue;
        if (reduced_[j] > kDualTol)
            at_upper_[j] = true;
        else if (reduced_[j] < -kDualTol)
            at_upper_[j] = false;
    }
    for (std::size_t j = structurals_; j < cols_; ++j) {
        if (row_of_[j] < 0 && reduced_[j] > 0.0)
            reduced_[j] = 0.0;
    }
}

void FloatDualSimplex::recompute_basic_values() {
    basic_value_ = beta_;
    for (std::size_t j = 0; j < structurals_; ++j) {
        if (row_of_[j] >= 0)
            continue;
        const double v = at_upper_[j] ? upper_[j] : lower_[j];
        if (v == 0.0)
            continue;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = cell(i, j);
            if (a != 0.0)
                basic_value_[i] -= a * v;
        }
    }
}

void FloatDualSimplex::pivot(std::size_t r, std::size_t j) {
    const double alpha = cell(r, j);
    std::vector<std::size_t> nz;
    double *row = &tableau_[r * cols_];
    for (std::size_t k = 0; k < cols_; ++k) {
        if (row[k] != 0.0) {
            row[k] /= alpha;
            if (std::abs(row[k]) < 1e-14)
                row[k] = 0.0;
            else
                nz.push_back(k);
        }
    }
    row[j] = 1.0;
    beta_[r] /= alpha;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r)
            continue;
        double *other = &tableau_[i * cols_];
        const double f = other[j];
        if (f == 0.0)
            continue;
        for (std::size_t k : nz) {
            double v = other[k] - f * row[k];
            other[k] = std::abs(v) < 1e-14 ? 0.0 : v;
        }
        other[j] = 0.0;
        beta_[i] -= f * beta_[r];
    }
    const double f = reduced_[j];
    if (f != 0.0) {
        for (std::size_t k : nz)
            reduced_[k] -= f * row[k];
    }
    reduced_[j] = 0.0;
    const std::size_t leaving = basis_[r];
    row_of_[leaving] = -1;
    basis_[r] = j;
    row_of_[j] = static_cast<std::int64_t>(r);
    ++since_refactor_;
}

std::vector<double> FloatDualSimplex::duals() const {
    std::vector<double> lambda(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        lambda[i] = std::max(0.0, -reduced_[structurals_ + i]);
    return lambda;
}

LpStatus FloatDualSimplex::solve(std::span<const Cost> lower, std::span<const Cost> upper,
                                 Deadline deadline) {
    lower_.assign(lower.begin(), lower.end());
    upper_.assign(upper.begin(), upper.end());
    if (since_refactor_ >= kRefactorEvery)
        refactor();
    place_nonbasics();
    recompute_basic_values();

    bool bland = false;
    std::size_t degenerate = 0;
    for (std::size_t step = 0;; ++step) {
        if ((step & 15) == 15 && deadline.expired())
            return LpStatus::TimedOut;
        if (since_refactor_ >= kRefactorEvery) {
            refactor();
            place_nonbasics();
            recompute_basic_values();
        }

        std::optional<std::size_t> leave;
        bool to_upper = false;
        double best_violation = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t b = basis_[i];
            const double v = basic_value_[i];
            const double lo = b < structurals_ ? lower_[b] : 0.0;
            const double hi = b < structurals_ ? upper_[b] : std::numeric_limits<double>::infinity();
            double violation;
            bool above = false;
            if (v < lo - kPrimalTol * (1.0 + std::abs(lo))) {
                violation = lo - v;
            } else if (v > hi + kPrimalTol * (1.0 + std::abs(hi))) {
                violation = v - hi;
                above = true;
            } else {
                continue;
            }
            const bool take = !leave || (bland ? b < basis_[*leave] : violation > best_violation);
            if (take) {
                leave = i;
                to_upper = above;
                best_violation = violation;
            }
        }
        if (!leave) {
            values_.assign(structurals_, 0.0);
            objective_value_ = 0.0;
            for (std::size_t j = 0; j < structurals_; ++j) {
                values_[j] = row_of_[j] >= 0 ? basic_value_[row_of_[j]] : nonbasic_value(j);
                objective_value_ += values_[j] * cost_[j];
            }
            return LpStatus::Optimal;
        }
        const std::size_t r = *leave;

        std::optional<std::size_t> enter;
        double best_ratio = 0.0;
        double best_alpha = 0.0;
        const double *row = &tableau_[r * cols_];
        for (std::size_t k = 0; k < cols_; ++k) {
            if (row_of_[k] >= 0)
                continue;
            const double a = row[k];
            if (std::abs(a) <= kPivotTol)
                continue;
            if (k < structurals_ && lower_[k] == upper_[k])
                continue;
            const bool up = k < structurals_ && at_upper_[k];
            const bool eligible = to_upper ? (up ? a < 0 : a > 0) : (up ? a > 0 : a < 0);
            if (!eligible)
                continue;
            const double ratio = std::abs(reduced_[k]) / std::abs(a);
            // Near-ties prefer the larger pivot for stability.
            if (!enter || ratio < best_ratio - kDualTol ||
                (ratio <= best_ratio + kDualTol && !bland && std::abs(a) > best_alpha)) {
                enter = k;
                best_ratio = ratio;
                best_alpha = std::abs(a);
            }
        }
        if (!enter) {
            const double sign = to_upper ? -1.0 : 1.0;
            double scale = 0.0;
            for (std::size_t i = 0; i < rows_; ++i)
                scale = std::max(scale, std::abs(row[structurals_ + i]));
            farkas_.assign(rows_, 0.0);
            for (std::size_t i = 0; i < rows_; ++i)
                farkas_[i] = std::max(0.0, sign * row[structurals_ + i] / (scale > 0 ? scale : 1.0));
            return LpStatus::Infeasible;
        }
        const std::size_t j = *enter;
        if (best_ratio <= kDualTol) {
            if (++degenerate > kDegenerateLimit)
                bland = true;
        } else {
            degenerate = 0;
        }

        const std::size_t b = basis_[r];
        const double target = to_upper ? upper_[b] : (b < structurals_ ? lower_[b] : 0.0);
        const double delta = (basic_value_[r] - target) / row[j];
        const double entering_value = nonbasic_value(j) + delta;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = cell(i, j);
            if (i != r && a != 0.0)
                basic_value_[i] -= a * delta;
        }
        basic_value_[r] = entering_value;
        pivot(r, j);
        at_upper_[b] = to_upper;
        ++iterations_;
    }
}

}  // namespace costforge
