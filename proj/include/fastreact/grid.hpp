#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fastreact {

/// Closed interval [lo, hi] along one axis.
struct Extent {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
    friend bool operator==(const Extent&, const Extent&) = default;
};

/// Uniform tensor-product grid in one or two dimensions.
///
/// Nodes are ordered lexicographically by axis index: the flat index of
/// node (i, j) is i * ny + j, so the last axis varies fastest.
class Grid {
public:
    static Grid make_1d(Extent x, std::size_t nx);
    static Grid make_2d(Extent x, std::size_t nx, Extent y, std::size_t ny);

    int dim() const { return dim_; }
    std::size_t points(int axis) const { return n_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    const Extent& extent(int axis) const { return ext_[axis]; }
    std::size_t size() const { return dim_ == 1 ? n_[0] : n_[0] * n_[1]; }

    /// Smallest spacing over all axes.
    double min_spacing() const;

    double coord(int axis, std::size_t i) const;
    std::size_t index(std::size_t i, std::size_t j = 0) const { return dim_ == 1 ? i : i * n_[1] + j; }
    std::array<std::size_t, 2> unflatten(std::size_t flat) const;
    std::array<double, 2> position(std::size_t flat) const;

    /// Trapezoidal quadrature weight of a node (half weight on each boundary face).
    double weight(std::size_t flat) const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dim_ == b.dim_ && a.n_ == b.n_ && a.ext_ == b.ext_;
    }

private:
    int dim_ = 1;
    std::array<std::size_t, 2> n_{1, 1};
    std::array<Extent, 2> ext_{};
    std::array<double, 2> h_{1.0, 1.0};
};

/// Build a grid from per-axis extents and point counts (1 or 2 axes).
Grid build_grid(std::span<const Extent> extents, std::span<const std::size_t> points);

/// Nodal values on a grid at one time.
struct Field {
    Grid grid;
    std::vector<double> values;
    double t = 0.0;

    Field() = default;
    Field(Grid g, double time = 0.0) : grid(std::move(g)), values(grid.size(), 0.0), t(time) {}
    Field(Grid g, std::vector<double> v, double time);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    double max() const;
    double min() const;
    /// Trapezoidal integral of the field over the grid.
    double mass() const;
    bool all_finite() const;
};

}  // namespace fastreact
