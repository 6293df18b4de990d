#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/solver.hpp"

using namespace blowup;

namespace {

constexpr double kPi = std::numbers::pi;

double manufactured(double x) { return 1.0 + x * (1.0 - x); }

// u* = 1 + x(1 - x) solves u'' = u^3 - r with r = u*^3 + 2.
ProblemSpec manufactured_spec() {
    ProblemSpec spec;
    spec.geometry = Geometry::interval(0.0, 1.0);
    spec.f = Nonlinearity::power(3.0);
    spec.source = [](double x) { return std::pow(manufactured(x), 3) + 2.0; };
    spec.boundary = {Dirichlet{1.0}, Dirichlet{1.0}};
    return spec;
}

double sup_norm_interior(const std::vector<double>& v) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        m = std::max(m, std::abs(v[i]));
    }
    return m;
}

// u* = 1 + sin(pi x): not reproduced exactly by the three-point stencil.
ProblemSpec sine_spec() {
    ProblemSpec spec;
    spec.geometry = Geometry::interval(0.0, 1.0);
    spec.f = Nonlinearity::power(3.0);
    spec.source = [](double x) {
        const double s = std::sin(kPi * x);
        return std::pow(1.0 + s, 3) + kPi * kPi * s;
    };
    spec.boundary = {Dirichlet{1.0}, Dirichlet{1.0}};
    return spec;
}

// u* = 1 + cos(pi r / 2) in the unit ball of R^3.
ProblemSpec ball_spec() {
    ProblemSpec spec;
    spec.geometry = Geometry::ball(3, 1.0);
    spec.f = Nonlinearity::power(3.0);
    spec.source = [](double r) {
        const double w = 0.5 * kPi;
        const double radial = r > 0.0 ? 2.0 * w * std::sin(w * r) / r : 2.0 * w * w;
        return std::pow(1.0 + std::cos(w * r), 3) + w * w * std::cos(w * r) + radial;
    };
    spec.boundary = {Dirichlet{1.0}};
    return spec;
}

double solve_error(const ProblemSpec& spec, int n_cells, double (*exact)(double)) {
    const Grid grid = Grid::uniform(spec.geometry.lo, spec.geometry.hi, n_cells);
    const DiscreteField u = solve_dirichlet(spec, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err = std::max(err, std::abs(u.values[i] - exact(grid[i])));
    }
    return err;
}

double sine_exact(double x) { return 1.0 + std::sin(kPi * x); }
double ball_exact(double r) { return 1.0 + std::cos(0.5 * kPi * r); }

ProblemSpec classical_spec() {
    ProblemSpec spec;
    spec.geometry = Geometry::interval(0.0, 1.0);
    spec.f = Nonlinearity::power(3.0);
    spec.boundary = {Blowup{}, Dirichlet{std::sqrt(2.0)}};
    return spec;
}

}  // namespace

TEST(Residual, ManufacturedQuadraticIsResolved) {
    const ProblemSpec spec = manufactured_spec();
    const Grid grid = Grid::uniform(0.0, 1.0, 255);
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = manufactured(grid[i]);
    }
    const std::vector<double> res = assemble_residual(spec, grid, u);
    EXPECT_LT(sup_norm_interior(res), 1e-3);
    EXPECT_DOUBLE_EQ(res.front(), 0.0);
    EXPECT_DOUBLE_EQ(res.back(), 0.0);
}

TEST(Residual, SecondOrderUnderRefinement) {
    const ProblemSpec spec = sine_spec();
    std::vector<double> norms;
    for (int n : {64, 128, 256}) {
        const Grid grid = Grid::uniform(0.0, 1.0, n);
        std::vector<double> u(grid.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = sine_exact(grid[i]);
        }
        norms.push_back(sup_norm_interior(assemble_residual(spec, grid, u)));
    }
    EXPECT_NEAR(norms[0] / norms[1], 4.0, 0.4);
    EXPECT_NEAR(norms[1] / norms[2], 4.0, 0.4);
}

TEST(Residual, ZeroFieldIsExact) {
    ProblemSpec spec;
    spec.boundary = {Dirichlet{0.0}, Dirichlet{0.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 32);
    const std::vector<double> res = assemble_residual(spec, grid, std::vector<double>(grid.size(), 0.0));
    for (double r : res) {
        EXPECT_EQ(r, 0.0);
    }
}

TEST(Residual, NegativeValueNamesTheNode) {
    const ProblemSpec spec = manufactured_spec();
    const Grid grid = Grid::uniform(0.0, 1.0, 16);
    std::vector<double> u(grid.size(), 1.0);
    u[5] = -0.1;
    try {
        (void)assemble_residual(spec, grid, u);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("u[5]"), std::string::npos) << e.what();
    }
}

TEST(Residual, RadialOriginRow) {
    // u = r^2 in R^N has Laplacian 2N everywhere, including the centre.
    ProblemSpec spec;
    spec.geometry = Geometry::ball(3, 1.0);
    spec.boundary = {Dirichlet{1.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 20);
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = grid[i] * grid[i];
    }
    const std::vector<double> res = assemble_residual(spec, grid, u);
    for (std::size_t i = 0; i + 1 < res.size(); ++i) {
        const double expected = 6.0 - std::pow(u[i], 3);
        EXPECT_NEAR(res[i], expected, 1e-9 * std::max(1.0, std::abs(expected))) << "i = " << i;
    }
}

TEST(Dirichlet, ManufacturedSolution) {
    const ProblemSpec spec = manufactured_spec();
    const Grid grid = Grid::uniform(0.0, 1.0, 511);
    const DiscreteField u = solve_dirichlet(spec, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err = std::max(err, std::abs(u.values[i] - manufactured(grid[i])));
    }
    EXPECT_LT(err, 1e-5);
    EXPECT_LT(u.residual_norm, 1e-10);
    EXPECT_GT(u.iterations, 0);
}

TEST(Dirichlet, SecondOrderOnInterval) {
    const ProblemSpec spec = sine_spec();
    const double e1 = solve_error(spec, 32, sine_exact);
    const double e2 = solve_error(spec, 64, sine_exact);
    const double e3 = solve_error(spec, 128, sine_exact);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
}

TEST(Dirichlet, SecondOrderInBall) {
    const ProblemSpec spec = ball_spec();
    const double e1 = solve_error(spec, 32, ball_exact);
    const double e2 = solve_error(spec, 64, ball_exact);
    const double e3 = solve_error(spec, 128, ball_exact);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
}

TEST(Dirichlet, ZeroDataGivesZero) {
    ProblemSpec spec;
    spec.boundary = {Dirichlet{0.0}, Dirichlet{0.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 40);
    const DiscreteField u = solve_dirichlet(spec, grid);
    for (double v : u.values) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Dirichlet, SymmetricData) {
    ProblemSpec spec;
    spec.geometry = Geometry::interval(-1.0, 1.0);
    spec.boundary = {Dirichlet{10.0}, Dirichlet{10.0}};
    const Grid grid = Grid::uniform(-1.0, 1.0, 400);
    const DiscreteField u = solve_dirichlet(spec, grid);
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(u.values[i], u.values[n - 1 - i], 1e-10);
    }
    EXPECT_GT(u.values[n / 2], 0.0);
}

TEST(Dirichlet, OverrideAndNegativeSublinearTerm) {
    ProblemSpec spec;
    spec.a = -5.0;
    spec.p = 0.5;
    spec.boundary = {Dirichlet{0.0}, Dirichlet{0.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 200);
    const DiscreteField u = solve_dirichlet(spec, grid, std::vector<double>{3.0, 2.0});
    EXPECT_DOUBLE_EQ(u.values.front(), 3.0);
    EXPECT_DOUBLE_EQ(u.values.back(), 2.0);
    for (double v : u.values) {
        EXPECT_GE(v, 0.0);
    }
    const std::vector<double> res = assemble_residual(spec, grid, u.values, std::vector<double>{3.0, 2.0});
    EXPECT_LT(sup_norm_interior(res), 1e-6);
}

TEST(Dirichlet, RejectsBlowupComponents) {
    const Grid grid = Grid::uniform(0.0, 1.0, 20);
    EXPECT_THROW((void)solve_dirichlet(classical_spec(), grid), DomainError);
}

TEST(Dirichlet, RejectsNegativeData) {
    const Grid grid = Grid::uniform(0.0, 1.0, 20);
    EXPECT_THROW((void)solve_dirichlet(manufactured_spec(), grid, std::vector<double>{-1.0, 1.0}), DomainError);
}

TEST(Monotone, ConvergesToNewtonSolution) {
    ProblemSpec spec;
    spec.a = 1.0;
    spec.p = 0.5;
    spec.source = [](double) { return 1.0; };
    spec.boundary = {Dirichlet{2.0}, Dirichlet{2.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 100);
    const DiscreteField newton = solve_dirichlet(spec, grid);

    // Constant 2 is a supersolution: 0 + 2^0.5 - 8 + 1 < 0.
    const std::vector<double> super(grid.size(), 2.0);
    const std::vector<double> sub(grid.size(), 0.0);
    const MonotoneResult m = monotone_iteration(spec, grid, sub, super);
    EXPECT_TRUE(m.super_is_supersolution);
    EXPECT_TRUE(m.sub_is_subsolution);
    EXPECT_GT(m.lambda, 0.0);
    EXPECT_LE(m.max_increase, 1e-12 * 2.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(m.field.values[i], newton.values[i], 1e-8);
    }
}

TEST(Monotone, NewtonSolutionAsSuperIsReproduced) {
    ProblemSpec spec;
    spec.boundary = {Dirichlet{3.0}, Dirichlet{1.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 80);
    const DiscreteField newton = solve_dirichlet(spec, grid);
    const MonotoneResult m = monotone_iteration(spec, grid, std::vector<double>(grid.size(), 0.0), newton.values);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(m.field.values[i], newton.values[i], 1e-9);
    }
}

TEST(Monotone, ExactBracketIsFixedPoint) {
    const ProblemSpec spec = manufactured_spec();
    const Grid grid = Grid::uniform(0.0, 1.0, 64);
    const DiscreteField exact = solve_dirichlet(spec, grid);
    const MonotoneResult m = monotone_iteration(spec, grid, exact.values, exact.values);
    EXPECT_EQ(m.field.iterations, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(m.field.values[i], exact.values[i], 1e-10);
    }
}

TEST(Monotone, IteratesAreNonincreasing) {
    ProblemSpec spec;
    spec.f = Nonlinearity::power(2.0);
    spec.boundary = {Dirichlet{1.0}, Dirichlet{1.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 60);
    const MonotoneResult m =
        monotone_iteration(spec, grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 1.0));
    EXPECT_LE(m.max_increase, 1e-12);
    EXPECT_FALSE(m.sup_changes.empty());
}

TEST(Monotone, ReportsInvalidBracket) {
    ProblemSpec spec;
    spec.source = [](double) { return 100.0; };
    spec.boundary = {Dirichlet{1.0}, Dirichlet{1.0}};
    const Grid grid = Grid::uniform(0.0, 1.0, 30);
    // Constant 1 is not a supersolution here (-1 + 100 > 0); the iterates rise and the bracket breaks.
    EXPECT_THROW((void)monotone_iteration(spec, grid, std::vector<double>(grid.size(), 0.0),
                                          std::vector<double>(grid.size(), 1.0)),
                 BracketError);
    std::vector<double> sub(grid.size(), 2.0);
    EXPECT_THROW((void)monotone_iteration(spec, grid, sub, std::vector<double>(grid.size(), 1.0)), BracketError);
}

TEST(Schedule, ClassicalOneSidedSolution) {
    const ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    const DiscreteField u = solve_blowup(spec, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 0.01 && grid[i] <= 0.1) {
            err = std::max(err, std::abs(u.values[i] * grid[i] / std::sqrt(2.0) - 1.0));
        }
    }
    EXPECT_LT(err, 0.02);
    ASSERT_TRUE(u.schedule_log.has_value());
    EXPECT_LT(u.schedule_log->back().core_gap, 1e-6);
    EXPECT_DOUBLE_EQ(u.values.back(), std::sqrt(2.0));
}

TEST(Schedule, StagesIncreaseNodewise) {
    const ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    ScheduleMode mode;
    mode.keep_stages = true;
    const DiscreteField u = solve_blowup(spec, grid, mode);
    ASSERT_GE(u.stage_values.size(), 2u);
    EXPECT_EQ(u.stage_values.size(), u.schedule_log->size());
    for (std::size_t j = 1; j < u.stage_values.size(); ++j) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EXPECT_LE(u.stage_values[j - 1][i], u.stage_values[j][i] + 1e-9 * std::max(1.0, u.stage_values[j][i]));
        }
    }
}

TEST(Schedule, CoreStableBetweenLargeBoundaryValues) {
    const ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    ScheduleMode mode;
    mode.m0 = 1e3;
    mode.growth = 10.0;
    mode.max_stages = 2;
    mode.require_stabilization = false;
    const DiscreteField u = solve_blowup(spec, grid, mode);
    ASSERT_EQ(u.schedule_log->size(), 2u);
    EXPECT_DOUBLE_EQ((*u.schedule_log)[1].boundary_value, 1e4);
    // u'' = u^3, u(0) = M is close to sqrt(2)/(x + s) with s = sqrt(2)/M, so the
    // relative change at the core edge d = 0.1 is (s_3 - s_4)/(0.1 + s_3).
    const double s3 = std::sqrt(2.0) / 1e3;
    const double s4 = std::sqrt(2.0) / 1e4;
    EXPECT_NEAR((*u.schedule_log)[1].core_gap, (s3 - s4) / (0.1 + s3), 0.03 * (s3 - s4) / (0.1 + s3));
}

TEST(Schedule, ExhaustionReportsGapTrace) {
    const ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    ScheduleMode mode;
    mode.max_stages = 4;
    try {
        (void)solve_blowup(spec, grid, mode);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_EQ(e.trace().size(), 3u);
    }
}

TEST(Schedule, ExactSolutionWithVanishingWeight) {
    // u'' = x^2 u^3 is solved by sqrt(6)/x^2.
    ProblemSpec spec;
    spec.potential.k = KWeight::power(1.0);
    spec.boundary = {Blowup{}, Dirichlet{std::sqrt(6.0)}};
    const Grid grid = make_grid(spec);
    const DiscreteField u = solve_blowup(spec, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 0.01 && grid[i] <= 0.1) {
            EXPECT_NEAR(u.values[i] * grid[i] * grid[i] / std::sqrt(6.0), 1.0, 0.02) << "x = " << grid[i];
        }
    }
}

TEST(Schedule, BallBlowsUpOnSphere) {
    ProblemSpec spec;
    spec.geometry = Geometry::ball(3, 1.0);
    spec.boundary = {Blowup{}};
    const Grid grid = make_grid(spec);
    const DiscreteField u = solve_blowup(spec, grid);
    EXPECT_GT(u.values.back(), 1e6);
    EXPECT_GT(u.values.front(), 0.0);
    EXPECT_TRUE(std::isfinite(u.values.front()));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        EXPECT_GE(u.values[i], u.values[i - 1] - 1e-12);
    }
}

TEST(Schedule, RejectsSublinearReaction) {
    ProblemSpec spec = classical_spec();
    spec.f = Nonlinearity::power(1.0);
    EXPECT_THROW((void)solve_blowup(spec, make_grid(spec)), KellerOssermanError);
}

TEST(Asymptotic, AgreesWithScheduleOnCore) {
    const ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    const DiscreteField s = solve_blowup(spec, grid);
    const DiscreteField a = solve_blowup(spec, grid, AsymptoticBcMode{});
    ASSERT_EQ(a.values.size(), grid.size());
    EXPECT_TRUE(std::isinf(a.values.front()));
    double diff = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (s.distance[i] >= 0.1) {
            diff = std::max(diff, std::abs(s.values[i] - a.values[i]));
            size = std::max(size, std::abs(s.values[i]));
        }
    }
    EXPECT_LT(diff / size, 1e-3);
}

TEST(Asymptotic, OffsetBelowTwoCellsIsRejected) {
    const ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    EXPECT_THROW((void)solve_blowup(spec, grid, AsymptoticBcMode{1.5 * grid.spacing(0)}), ResolutionError);
}

TEST(Majorant, BoundsEveryScheduleStage) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        ProblemSpec spec;
        spec.f = Nonlinearity::power(2.0 + 2.0 * unit(rng));
        spec.potential.k = KWeight::power(unit(rng) < 0.5 ? 0.0 : 0.5);
        spec.potential.c = 0.5 + 1.5 * unit(rng);
        spec.a = -2.0 + 4.0 * unit(rng);
        spec.p = 0.2 + 0.6 * unit(rng);
        spec.boundary = {Blowup{}, Dirichlet{1.0 + unit(rng)}};
        const Grid grid = make_grid(spec);
        ScheduleMode mode;
        mode.max_stages = 14;
        mode.min_stages = 14;
        mode.require_stabilization = false;
        mode.keep_stages = true;
        const DiscreteField u = solve_blowup(spec, grid, mode);
        const DiscreteField w = constant_majorant(spec, grid, mode);
        for (const auto& stage : u.stage_values) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                ASSERT_LE(stage[i], w.values[i] + 1e-8) << "trial " << trial << ", x = " << grid[i];
            }
        }
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            EXPECT_TRUE(std::isfinite(w.values[i]));
        }
    }
}

TEST(Majorant, ConstantPotentialDominatesSolution) {
    ProblemSpec spec = classical_spec();
    spec.potential.c = 2.0;
    const Grid grid = make_grid(spec);
    const ProblemSpec maj = majorant_spec(spec, grid);
    EXPECT_DOUBLE_EQ(maj.b(0.3), 2.0);
    EXPECT_DOUBLE_EQ(maj.r(0.3), 1.0);
    ScheduleMode mode;
    mode.max_stages = 20;
    mode.min_stages = 20;
    mode.require_stabilization = false;
    const DiscreteField u = solve_blowup(spec, grid, mode);
    const DiscreteField w = constant_majorant(spec, grid, mode);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LE(u.values[i], w.values[i] + 1e-8);
    }
}

TEST(Mixed, MinimalAndMaximalCoincide) {
    ProblemSpec spec;
    spec.geometry = Geometry::annulus(2, 1.0, 2.0);
    spec.boundary = {Blowup{}, Dirichlet{0.0}};
    const Grid grid = make_grid(spec);
    const MixedResult m = solve_mixed(spec, grid);
    EXPECT_LT(m.core_gap, 1e-3);
    EXPECT_TRUE(m.ordered);
    EXPECT_EQ(m.minimal.values.back(), 0.0);
    EXPECT_EQ(m.maximal.values.back(), 0.0);
    EXPECT_GT(m.maximal.grid[0], 1.0);
    ASSERT_FALSE(m.eps_trace.empty());
    EXPECT_EQ(m.shrink_gaps.size() + 1, m.eps_trace.size());
    EXPECT_LT(m.shrink_gaps.back(), 1e-5);
}

TEST(Mixed, RejectsWrongBoundaryData) {
    ProblemSpec spec;
    spec.geometry = Geometry::annulus(2, 1.0, 2.0);
    spec.boundary = {Blowup{}, Dirichlet{1.0}};
    EXPECT_THROW((void)solve_mixed(spec, make_grid(spec)), DomainError);
}

TEST(Interpolate, CubicsAreExact) {
    DiscreteField field{Grid::graded(0.0, 1.0, 20, 1e-3, 0.8, true, false), {}, {}, 0.0, 0, std::nullopt, {}};
    for (double x : field.grid.nodes()) {
        field.values.push_back(x * x * x - 2.0 * x + 0.5);
    }
    for (double x : {0.0, 0.0004, 0.013, 0.5, 0.77, 1.0}) {
        EXPECT_NEAR(interpolate(field, x), x * x * x - 2.0 * x + 0.5, 1e-12);
    }
    EXPECT_THROW((void)interpolate(field, 1.5), DomainError);
}

TEST(Output, FieldAndScheduleFormats) {
    ProblemSpec spec = classical_spec();
    const Grid grid = make_grid(spec);
    const DiscreteField u = solve_blowup(spec, grid);
    std::ostringstream field;
    write_field(field, u);
    std::istringstream in(field.str());
    double x = 0.0;
    double d = 0.0;
    double v = 0.0;
    std::size_t rows = 0;
    while (in >> x >> d >> v) {
        EXPECT_EQ(x, grid[rows]);
        EXPECT_EQ(v, u.values[rows]);
        ++rows;
    }
    EXPECT_EQ(rows, grid.size());

    std::ostringstream sched;
    write_schedule(sched, *u.schedule_log);
    const std::string text = sched.str();
    EXPECT_EQ(text.rfind("stage,boundary_value,core_gap,newton_iterations\n", 0), 0u);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), u.schedule_log->size() + 1);
}

TEST(Dirichlet, RandomInitialGuessesAgree) {
    ProblemSpec spec;
    spec.a = -2.0;
    spec.p = 0.5;
    spec.source = [](double x) { return 1.0 + x; };
    spec.boundary = {Dirichlet{4.0}, Dirichlet{0.5}};
    const Grid grid = Grid::uniform(0.0, 1.0, 150);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> log_value(-3.0, 3.0);
    std::vector<DiscreteField> fields;
    for (int k = 0; k < 5; ++k) {
        std::vector<double> init(grid.size());
        for (double& v : init) {
            v = std::exp(log_value(rng));
        }
        fields.push_back(solve_dirichlet(spec, grid, std::nullopt, init));
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EXPECT_NEAR(fields[k].values[i], fields[0].values[i], 1e-8);
        }
    }
}
