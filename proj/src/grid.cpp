#include "blowup/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr std::size_t kMinNodes = 10;

// Geometric cell sizes first, first/ratio, ... strictly below h_max.
std::vector<double> layer_cells(double first, double ratio, double h_max) {
    std::vector<double> cells;
    for (double h = first; h < h_max; h /= ratio) {
        cells.push_back(h);
    }
    return cells;
}

}  // namespace

Grid::Grid(std::vector<double> nodes, Grading grading, double ratio)
    : nodes_(std::move(nodes)), grading_(grading), ratio_(ratio) {
    if (nodes_.size() < kMinNodes) {
        throw ResolutionError("grid needs at least 8 interior nodes");
    }
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i + 1] > nodes_[i]) || !std::isfinite(nodes_[i + 1])) {
            std::ostringstream msg;
            msg << "grid nodes must be finite and strictly increasing (node " << i + 1 << ")";
            throw DomainError(msg.str());
        }
    }
}

Grid Grid::uniform(double lo, double hi, int n_cells) {
    if (n_cells < 9 || !(hi > lo)) {
        throw ResolutionError("uniform grid needs hi > lo and at least 9 cells");
    }
    std::vector<double> nodes(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        nodes[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / n_cells;
    }
    nodes.back() = hi;
    return Grid(std::move(nodes), Grading::uniform, 1.0);
}

Grid Grid::graded(double lo, double hi, int n_cells, double first_cell, double ratio, bool grade_lo,
                  bool grade_hi) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DomainError("graded grid: ratio must lie in (0, 1)");
    }
    if (!(first_cell > 0.0)) {
        throw DomainError("graded grid: first cell must be positive");
    }
    if (n_cells < 9 || !(hi > lo)) {
        throw ResolutionError("graded grid needs hi > lo and at least 9 base cells");
    }
    if (!grade_lo && !grade_hi) {
        return uniform(lo, hi, n_cells);
    }
    const double length = hi - lo;
    const double h_max = length / n_cells;
    std::vector<double> left = grade_lo ? layer_cells(first_cell, ratio, h_max) : std::vector<double>{};
    std::vector<double> right = grade_hi ? layer_cells(first_cell, ratio, h_max) : std::vector<double>{};
    auto sum = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double h : v) {
            s += h;
        }
        return s;
    };
    double middle = 0.0;
    int m = 0;
    // Shrink the layers until the uniform middle spacing is no smaller than
    // the outermost layer cell, which keeps the spacing monotone.
    for (;;) {
        middle = length - sum(left) - sum(right);
        if (middle <= 0.0) {
            throw ResolutionError("graded grid: boundary layers overlap; use more base cells");
        }
        m = std::max(1, static_cast<int>(std::ceil(middle / h_max - 1e-9)));
        const double h_mid = middle / m;
        const double edge = std::max(left.empty() ? 0.0 : left.back(), right.empty() ? 0.0 : right.back());
        if (h_mid >= edge) {
            break;
        }
        if (!left.empty() && left.back() == edge) {
            left.pop_back();
        }
        if (!right.empty() && right.back() == edge) {
            right.pop_back();
        }
    }
    std::vector<double> nodes;
    nodes.reserve(left.size() + right.size() + static_cast<std::size_t>(m) + 1);
    double x = lo;
    nodes.push_back(x);
    for (double h : left) {
        x += h;
        nodes.push_back(x);
    }
    const double start = x;
    const double end = hi - sum(right);
    for (int i = 1; i <= m; ++i) {
        nodes.push_back(i == m ? end : start + (end - start) * static_cast<double>(i) / m);
    }
    x = end;
    for (auto it = right.rbegin(); it != right.rend(); ++it) {
        x += *it;
        nodes.push_back(x);
    }
    nodes.back() = hi;
    return Grid(std::move(nodes), Grading::geometric, ratio);
}

Grid Grid::from_nodes(std::vector<double> nodes, Grading grading, double ratio) {
    return Grid(std::move(nodes), grading, ratio);
}

double Grid::min_spacing() const {
    double best = spacing(0);
    for (std::size_t i = 1; i + 1 < nodes_.size(); ++i) {
        best = std::min(best, spacing(i));
    }
    return best;
}

Grid Grid::slice(std::size_t first, std::size_t last) const {
    if (!(first < last) || last >= nodes_.size()) {
        throw DomainError("Grid::slice: need first < last < size");
    }
    return Grid(std::vector<double>(nodes_.begin() + static_cast<std::ptrdiff_t>(first),
                                    nodes_.begin() + static_cast<std::ptrdiff_t>(last) + 1),
                grading_, ratio_);
}

double core_distance(const Geometry& geometry) { return 0.1 * geometry.extent(); }

Grid make_grid(const ProblemSpec& spec, const GridOptions& options) {
    const Geometry& g = spec.geometry;
    if (options.grading == Grading::uniform || !spec.has_blowup()) {
        return Grid::uniform(g.lo, g.hi, options.n_cells);
    }
    const double first = options.first_cell > 0.0 ? options.first_cell : core_distance(g) / 1e5;
    bool grade_lo = false;
    bool grade_hi = false;
    for (int i = 0; i < g.boundary_components(); ++i) {
        if (!spec.is_blowup(i)) {
            continue;
        }
        if (g.boundary_coordinate(i) == g.hi && (g.kind == GeometryKind::ball || i == 1)) {
            grade_hi = true;
        } else {
            grade_lo = true;
        }
    }
    return Grid::graded(g.lo, g.hi, options.n_cells, first, options.ratio, grade_lo, grade_hi);
}

}  // namespace blowup
