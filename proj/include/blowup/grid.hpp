#pragma once

#include <vector>

#include "blowup/problem.hpp"

namespace blowup {

enum class Grading { uniform, geometric };

/// Strictly increasing nodes covering the coordinate range of a geometry.
class Grid {
public:
    /// n_cells equal cells on [lo, hi].
    static Grid uniform(double lo, double hi, int n_cells);
    /// Cells grow by 1/ratio away from each graded end, starting at
    /// first_cell, until they reach (hi - lo)/n_cells; the rest is uniform.
    static Grid graded(double lo, double hi, int n_cells, double first_cell, double ratio, bool grade_lo,
                       bool grade_hi);
    /// Explicit nodes; must be strictly increasing with at least 10 entries.
    static Grid from_nodes(std::vector<double> nodes, Grading grading = Grading::uniform, double ratio = 1.0);

    [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
    [[nodiscard]] double operator[](std::size_t i) const { return nodes_[i]; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] Grading grading() const { return grading_; }
    [[nodiscard]] double ratio() const { return ratio_; }
    [[nodiscard]] double spacing(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
    [[nodiscard]] double min_spacing() const;
    /// Nodes first..last inclusive as a new grid.
    [[nodiscard]] Grid slice(std::size_t first, std::size_t last) const;

private:
    Grid(std::vector<double> nodes, Grading grading, double ratio);
    std::vector<double> nodes_;
    Grading grading_ = Grading::uniform;
    double ratio_ = 1.0;
};

struct GridOptions {
    int n_cells = 1000;
    /// geometric grading is applied toward every blow-up component.
    Grading grading = Grading::geometric;
    double ratio = 0.9;
    /// First cell at a blow-up boundary; 0 selects d_core / 1e5.
    double first_cell = 0.0;
};

/// Core distance used for interior comparisons: 10% of the coordinate extent.
double core_distance(const Geometry& geometry);

/// Grid for `spec`, graded toward its blow-up components.
Grid make_grid(const ProblemSpec& spec, const GridOptions& options = {});

}  // namespace blowup
