#pragma once

// Internal: discrete operator shared by the Dirichlet, schedule and mixed solvers.

#include <vector>

#include "blowup/grid.hpp"
#include "blowup/problem.hpp"
#include "blowup/solver.hpp"

namespace blowup::detail {

struct Operator {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> b;
    std::vector<double> r;
    std::vector<double> d;
    std::vector<char> fixed;
    bool origin = false;
};

/// End nodes of the grid are Dirichlet rows, except the centre of a ball.
Operator build_operator(const ProblemSpec& spec, const Grid& grid);

double laplacian(const Operator& op, const std::vector<double>& u, std::size_t i);

struct RowResidual {
    double value = 0.0;
    double scale = 0.0;
};

RowResidual row_residual(const ProblemSpec& spec, const Operator& op, const std::vector<double>& u, std::size_t i,
                         double b_shift);

/// Solves the tridiagonal system in place (rhs becomes the solution).
void thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper, std::vector<double>& rhs);

struct NewtonOutcome {
    int iterations = 0;
    double residual = 0.0;
};

/// Newton on the free rows of `op`; fixed entries of u are left untouched.
NewtonOutcome newton(const ProblemSpec& spec, const Operator& op, std::vector<double>& u, const NewtonOptions& opts,
                     double b_shift);

DiscreteField make_field(const Grid& grid, std::vector<double> values, const Operator& op);

}  // namespace blowup::detail
