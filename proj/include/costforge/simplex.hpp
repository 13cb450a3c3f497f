#pragma once

// Bounded dual simplex solvers for the LP relaxations of an IntegerProgram
// (rows  A x <= b, box bounds given per solve). Both keep their tableau
// between solves, so re-solving after bound changes starts from the previous
// basis.
//
// DualSimplex is exact over the rationals. FloatDualSimplex works in double
// precision and is paired with safe_dual_bound / proves_infeasible, which
// turn its (possibly inexact) dual information into exact statements.

#include "costforge/deadline.hpp"
#include "costforge/encode.hpp"

#include <gmpxx.h>

#include <optional>
#include <span>
#include <vector>

namespace costforge {

using Rational = mpq_class;

enum class LpStatus { Optimal, Infeasible, TimedOut };

class DualSimplex {
public:
    // Maximizes objective . x subject to the rows of `ip`.
    DualSimplex(const IntegerProgram &ip, std::span<const Cost> objective);

    LpStatus solve(std::span<const Cost> lower, std::span<const Cost> upper, Deadline deadline);

    // Structural values and objective of the last optimal solve.
    const std::vector<Rational> &values() const { return values_; }
    const Rational &objective_value() const { return objective_value_; }
    std::size_t iterations() const { return iterations_; }

private:
    Rational &cell(std::size_t row, std::size_t col) { return tableau_[row * cols_ + col]; }
    const Rational &cell(std::size_t row, std::size_t col) const {
        return tableau_[row * cols_ + col];
    }
    Rational nonbasic_value(std::size_t col) const;
    void recompute_basic_values();
    void pivot(std::size_t row, std::size_t col);

    std::size_t structurals_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> tableau_;  // B^-1 [A I]
    std::vector<Rational> beta_;     // B^-1 b
    std::vector<Rational> reduced_;  // c_j - c_B B^-1 a_j
    std::vector<Cost> cost_;
    std::vector<std::size_t> basis_;    // column basic in each row
    std::vector<std::int64_t> row_of_;  // -1 when nonbasic
    std::vector<bool> at_upper_;
    std::vector<Cost> lower_, upper_;
    std::vector<Rational> basic_value_;
    std::vector<Rational> values_;
    Rational objective_value_;
    std::size_t iterations_ = 0;
};

class FloatDualSimplex {
public:
    FloatDualSimplex(const IntegerProgram &ip, std::span<const Cost> objective);

    LpStatus solve(std::span<const Cost> lower, std::span<const Cost> upper, Deadline deadline);

    const std::vector<double> &values() const { return values_; }
    double objective_value() const { return objective_value_; }
    // Row multipliers (>= 0) of the last optimal solve.
    std::vector<double> duals() const;
    // Candidate infeasibility certificate (row multipliers) of the last
    // infeasible solve.
    const std::vector<double> &farkas() const { return farkas_; }
    std::size_t iterations() const { return iterations_; }

private:
    double &cell(std::size_t row, std::size_t col) { return tableau_[row * cols_ + col]; }
    double cell(std::size_t row, std::size_t col) const { return tableau_[row * cols_ + col]; }
    double nonbasic_value(std::size_t col) const;
    void recompute_basic_values();
    void pivot(std::size_t row, std::size_t col);
    void refactor();
    void place_nonbasics();

    const IntegerProgram &ip_;
    std::size_t structurals_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> tableau_;
    std::vector<double> beta_;
    std::vector<double> reduced_;
    std::vector<double> cost_;
    std::vector<std::size_t> basis_;
    std::vector<std::int64_t> row_of_;
    std::vector<bool> at_upper_;
    std::vector<double> lower_, upper_;
    std::vector<double> basic_value_;
    std::vector<double> values_;
    std::vector<double> farkas_;
    double objective_value_ = 0.0;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
};

// Exact upper bound on  max objective . x  over  {A x <= b, lower <= x <= upper}
// implied by any multipliers lambda >= 0 (negative entries are treated as 0):
//   lambda . b + sum_j max over [l_j, u_j] of (c_j - lambda . A_j) x_j
Rational safe_dual_bound(const IntegerProgram &ip, std::span<const Cost> objective,
                         std::span<const Cost> lower, std::span<const Cost> upper,
                         std::span<const double> lambda);

// True when the multipliers prove the box-constrained rows infeasible, i.e.
// min over the box of lambda . A x exceeds lambda . b (checked exactly).
bool proves_infeasible(const IntegerProgram &ip, std::span<const Cost> lower,
                       std::span<const Cost> upper, std::span<const double> lambda);

}  // namespace costforge
