#pragma once

#include <array>
#include <variant>
#include <vector>

#include "fastreact/grid.hpp"

namespace fastreact {

/// supp v0 in one dimension: a finite union of disjoint closed intervals.
/// The leftmost and rightmost intervals must touch the domain ends so that
/// the complement (the gaps) sits strictly inside the domain.
struct IntervalSupport {
    std::vector<Extent> intervals;
    friend bool operator==(const IntervalSupport&, const IntervalSupport&) = default;
};

/// supp v0 in two dimensions: the domain minus an open disk.
struct DiskComplement {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.5;
    friend bool operator==(const DiskComplement&, const DiskComplement&) = default;
};

/// supp v0 in two dimensions: the domain minus an open axis-aligned rectangle
/// with rounded corners.
struct RoundedRectComplement {
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> half_widths{0.5, 0.5};
    double corner_radius = 0.1;
    friend bool operator==(const RoundedRectComplement&, const RoundedRectComplement&) = default;
};

/// Geometry of supp v0 inside a rectangular domain, with an exact signed
/// distance rho: positive in the complement of supp v0, negative inside it,
/// zero on the interface.
class SupportGeometry {
public:
    using Shape = std::variant<IntervalSupport, DiskComplement, RoundedRectComplement>;

    /// Validates the shape against the domain; throws ConfigError if the
    /// complement is empty or not compactly contained in the domain.
    SupportGeometry(Shape shape, std::vector<Extent> domain);

    int dim() const { return static_cast<int>(domain_.size()); }
    const Shape& shape() const { return shape_; }
    const std::vector<Extent>& domain() const { return domain_; }

    double signed_distance(double x, double y = 0.0) const;
    /// Unit gradient of rho (points into the complement); zero where undefined.
    std::array<double, 2> gradient(double x, double y = 0.0) const;
    /// Mirror image of a point across the interface along the normal.
    std::array<double, 2> reflect(double x, double y = 0.0) const;

    /// Largest enlargement d for which the d-neighbourhood of the complement
    /// stays inside the domain and rho stays smooth on |rho| < d.
    double reach() const;
    /// Bound on the Hessian of rho on the tube |rho| < d.
    double hessian_bound(double d) const;

    /// Interface points in 1-D, each with the side (+1 right, -1 left) on which the complement lies.
    struct BoundaryPoint {
        double x;
        int complement_side;
    };
    std::vector<BoundaryPoint> boundary_points() const;
    /// Number of connected interface components.
    std::size_t component_count() const;

    /// Tolerance below which a node counts as lying on the interface.
    static double on_interface_tolerance(const Grid& grid) { return 1e-9 * grid.min_spacing(); }

    friend bool operator==(const SupportGeometry& a, const SupportGeometry& b) {
        return a.shape_ == b.shape_ && a.domain_ == b.domain_;
    }

private:
    Shape shape_;
    std::vector<Extent> domain_;
};

/// rho at every node of a grid.
Field signed_distance_field(const SupportGeometry& geometry, const Grid& grid);

/// Nodes flagged inside-or-on supp v0 (rho <= tolerance).
std::vector<unsigned char> support_mask(const SupportGeometry& geometry, const Grid& grid);

}  // namespace fastreact
