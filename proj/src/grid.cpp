#include "fastreact/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastreact/error.hpp"

namespace fastreact {

namespace {

void validate_axis(const Extent& e, std::size_t n, const char* name) {
    if (!std::isfinite(e.lo) || !std::isfinite(e.hi) || !(e.hi > e.lo))
        throw ConfigError(std::string("grid axis ") + name + ": degenerate extent");
    if (n < 3) throw ConfigError(std::string("grid axis ") + name + ": need at least 3 points, got " + std::to_string(n));
}

}  // namespace

Grid Grid::make_1d(Extent x, std::size_t nx) {
    validate_axis(x, nx, "x");
    Grid g;
    g.dim_ = 1;
    g.n_ = {nx, 1};
    g.ext_ = {x, Extent{0.0, 0.0}};
    g.h_ = {x.length() / static_cast<double>(nx - 1), 1.0};
    return g;
}

Grid Grid::make_2d(Extent x, std::size_t nx, Extent y, std::size_t ny) {
    validate_axis(x, nx, "x");
    validate_axis(y, ny, "y");
    Grid g;
    g.dim_ = 2;
    g.n_ = {nx, ny};
    g.ext_ = {x, y};
    g.h_ = {x.length() / static_cast<double>(nx - 1), y.length() / static_cast<double>(ny - 1)};
    return g;
}

Grid build_grid(std::span<const Extent> extents, std::span<const std::size_t> points) {
    if (extents.size() != points.size()) throw ConfigError("grid: extents and point counts differ in length");
    if (extents.size() == 1) return Grid::make_1d(extents[0], points[0]);
    if (extents.size() == 2) return Grid::make_2d(extents[0], points[0], extents[1], points[1]);
    throw ConfigError("grid: only 1 or 2 dimensions are supported");
}

double Grid::min_spacing() const { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }

double Grid::coord(int axis, std::size_t i) const {
    // Pin the last node to hi exactly so symmetric extents give symmetric nodes.
    if (i + 1 == n_[axis]) return ext_[axis].hi;
    return ext_[axis].lo + static_cast<double>(i) * h_[axis];
}

std::array<std::size_t, 2> Grid::unflatten(std::size_t flat) const {
    if (dim_ == 1) return {flat, 0};
    return {flat / n_[1], flat % n_[1]};
}

std::array<double, 2> Grid::position(std::size_t flat) const {
    const auto [i, j] = unflatten(flat);
    return {coord(0, i), dim_ == 2 ? coord(1, j) : 0.0};
}

double Grid::weight(std::size_t flat) const {
    const auto [i, j] = unflatten(flat);
    auto axis_weight = [&](int a, std::size_t k) {
        return (k == 0 || k + 1 == n_[a]) ? 0.5 * h_[a] : h_[a];
    };
    double w = axis_weight(0, i);
    if (dim_ == 2) w *= axis_weight(1, j);
    return w;
}

Field::Field(Grid g, std::vector<double> v, double time) : grid(std::move(g)), values(std::move(v)), t(time) {
    if (values.size() != grid.size())
        throw ConfigError("field: value count " + std::to_string(values.size()) + " does not match node count " +
                          std::to_string(grid.size()));
}

double Field::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

double Field::min() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

double Field::mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += grid.weight(i) * values[i];
    return m;
}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fastreact
