#include "fastreact/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fastreact/error.hpp"

namespace fastreact {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Signed distance of a rounded box, positive outside the box.
double rounded_box_sdf(const RoundedRectComplement& r, double x, double y) {
    const double qx = std::abs(x - r.center[0]) - (r.half_widths[0] - r.corner_radius);
    const double qy = std::abs(y - r.center[1]) - (r.half_widths[1] - r.corner_radius);
    const double ox = std::max(qx, 0.0);
    const double oy = std::max(qy, 0.0);
    return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0) - r.corner_radius;
}

void validate_intervals(IntervalSupport& s, const Extent& dom) {
    if (s.intervals.empty()) throw ConfigError("support: no intervals given");
    std::sort(s.intervals.begin(), s.intervals.end(), [](const Extent& a, const Extent& b) { return a.lo < b.lo; });
    for (const auto& iv : s.intervals) {
        if (!(iv.hi >= iv.lo)) throw ConfigError("support: interval with hi < lo");
        if (iv.lo < dom.lo || iv.hi > dom.hi) throw ConfigError("support: interval leaves the domain");
    }
    for (std::size_t i = 1; i < s.intervals.size(); ++i) {
        if (!(s.intervals[i].lo > s.intervals[i - 1].hi))
            throw ConfigError("support: intervals must be disjoint and separated by a gap");
    }
    if (s.intervals.front().lo != dom.lo || s.intervals.back().hi != dom.hi)
        throw ConfigError("support: complement must be compactly contained in the domain "
                          "(outermost intervals have to touch the domain ends)");
    if (s.intervals.size() < 2) throw ConfigError("support: complement of supp v0 is empty");
}

}  // namespace

SupportGeometry::SupportGeometry(Shape shape, std::vector<Extent> domain)
    : shape_(std::move(shape)), domain_(std::move(domain)) {
    std::visit(overloaded{
                   [&](IntervalSupport& s) {
                       if (domain_.size() != 1) throw ConfigError("support: intervals require a 1-D domain");
                       validate_intervals(s, domain_[0]);
                   },
                   [&](DiskComplement& d) {
                       if (domain_.size() != 2) throw ConfigError("support: disk requires a 2-D domain");
                       if (!(d.radius > 0)) throw ConfigError("support: disk radius must be positive");
                       for (int a = 0; a < 2; ++a) {
                           if (!(d.center[a] - d.radius > domain_[a].lo && d.center[a] + d.radius < domain_[a].hi))
                               throw ConfigError("support: disk must lie strictly inside the domain");
                       }
                   },
                   [&](RoundedRectComplement& r) {
                       if (domain_.size() != 2) throw ConfigError("support: rounded_rect requires a 2-D domain");
                       if (!(r.corner_radius > 0) || r.corner_radius > std::min(r.half_widths[0], r.half_widths[1]))
                           throw ConfigError("support: corner radius must lie in (0, min half width]");
                       for (int a = 0; a < 2; ++a) {
                           if (!(r.center[a] - r.half_widths[a] > domain_[a].lo &&
                                 r.center[a] + r.half_widths[a] < domain_[a].hi))
                               throw ConfigError("support: rounded rectangle must lie strictly inside the domain");
                       }
                   },
               },
               shape_);
}

double SupportGeometry::signed_distance(double x, double y) const {
    return std::visit(overloaded{
                          [&](const IntervalSupport& s) {
                              // Inside a gap: distance to the nearer gap end.
                              for (std::size_t i = 0; i + 1 < s.intervals.size(); ++i) {
                                  const double a = s.intervals[i].hi;
                                  const double b = s.intervals[i + 1].lo;
                                  if (x > a && x < b) return std::min(x - a, b - x);
                              }
                              double best = kInf;
                              for (const auto& bp : boundary_points()) best = std::min(best, std::abs(x - bp.x));
                              return -best;
                          },
                          [&](const DiskComplement& d) {
                              return d.radius - std::hypot(x - d.center[0], y - d.center[1]);
                          },
                          [&](const RoundedRectComplement& r) { return -rounded_box_sdf(r, x, y); },
                      },
                      shape_);
}

std::array<double, 2> SupportGeometry::gradient(double x, double y) const {
    return std::visit(overloaded{
                          [&](const IntervalSupport& s) -> std::array<double, 2> {
                              for (std::size_t i = 0; i + 1 < s.intervals.size(); ++i) {
                                  const double a = s.intervals[i].hi;
                                  const double b = s.intervals[i + 1].lo;
                                  if (x > a && x < b) {
                                      if (x - a == b - x) return {0.0, 0.0};
                                      return {x - a < b - x ? 1.0 : -1.0, 0.0};
                                  }
                              }
                              double best = kInf;
                              double nearest = x;
                              for (const auto& bp : boundary_points()) {
                                  if (std::abs(x - bp.x) < best) {
                                      best = std::abs(x - bp.x);
                                      nearest = bp.x;
                                  }
                              }
                              if (x == nearest) return {0.0, 0.0};
                              return {x < nearest ? 1.0 : -1.0, 0.0};
                          },
                          [&](const DiskComplement& d) -> std::array<double, 2> {
                              const double dx = x - d.center[0];
                              const double dy = y - d.center[1];
                              const double r = std::hypot(dx, dy);
                              if (r == 0) return {0.0, 0.0};
                              return {-dx / r, -dy / r};
                          },
                          [&](const RoundedRectComplement& r) -> std::array<double, 2> {
                              const double px = x - r.center[0];
                              const double py = y - r.center[1];
                              const double qx = std::abs(px) - (r.half_widths[0] - r.corner_radius);
                              const double qy = std::abs(py) - (r.half_widths[1] - r.corner_radius);
                              const double sx = px >= 0 ? 1.0 : -1.0;
                              const double sy = py >= 0 ? 1.0 : -1.0;
                              std::array<double, 2> n{};
                              if (qx > 0 && qy > 0) {
                                  const double len = std::hypot(qx, qy);
                                  n = {sx * qx / len, sy * qy / len};
                              } else if (qx > qy) {
                                  n = {sx, 0.0};
                              } else {
                                  n = {0.0, sy};
                              }
                              // rho = -sdf, so grad rho = -outward normal
                              return {-n[0], -n[1]};
                          },
                      },
                      shape_);
}

std::array<double, 2> SupportGeometry::reflect(double x, double y) const {
    const double rho = signed_distance(x, y);
    const auto g = gradient(x, y);
    return {x - 2.0 * rho * g[0], y - 2.0 * rho * g[1]};
}

double SupportGeometry::reach() const {
    return std::visit(overloaded{
                          [&](const IntervalSupport& s) {
                              double r = kInf;
                              const std::size_t n = s.intervals.size();
                              for (std::size_t i = 0; i < n; ++i) {
                                  const double len = s.intervals[i].length();
                                  // Outer intervals only shrink from one side.
                                  r = std::min(r, (i == 0 || i + 1 == n) ? len : 0.5 * len);
                              }
                              return r;
                          },
                          [&](const DiskComplement& d) {
                              double r = d.radius;
                              for (int a = 0; a < 2; ++a) {
                                  r = std::min(r, d.center[a] - d.radius - domain_[a].lo);
                                  r = std::min(r, domain_[a].hi - d.center[a] - d.radius);
                              }
                              return r;
                          },
                          [&](const RoundedRectComplement& rr) {
                              double r = rr.corner_radius;
                              for (int a = 0; a < 2; ++a) {
                                  r = std::min(r, rr.center[a] - rr.half_widths[a] - domain_[a].lo);
                                  r = std::min(r, domain_[a].hi - rr.center[a] - rr.half_widths[a]);
                              }
                              return r;
                          },
                      },
                      shape_);
}

double SupportGeometry::hessian_bound(double d) const {
    if (!(d >= 0) || d >= reach()) throw PreconditionError("hessian_bound: d must lie in [0, reach)");
    return std::visit(overloaded{
                          [](const IntervalSupport&) { return 0.0; },
                          [&](const DiskComplement& disk) { return 1.0 / (disk.radius - d); },
                          [&](const RoundedRectComplement& r) { return 1.0 / (r.corner_radius - d); },
                      },
                      shape_);
}

std::vector<SupportGeometry::BoundaryPoint> SupportGeometry::boundary_points() const {
    std::vector<BoundaryPoint> pts;
    if (const auto* s = std::get_if<IntervalSupport>(&shape_)) {
        for (std::size_t i = 0; i + 1 < s->intervals.size(); ++i) {
            pts.push_back({s->intervals[i].hi, +1});
            pts.push_back({s->intervals[i + 1].lo, -1});
        }
    }
    return pts;
}

std::size_t SupportGeometry::component_count() const {
    if (std::holds_alternative<IntervalSupport>(shape_)) return boundary_points().size();
    return 1;
}

Field signed_distance_field(const SupportGeometry& geometry, const Grid& grid) {
    Field rho(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto p = grid.position(n);
        rho[n] = geometry.signed_distance(p[0], p[1]);
    }
    return rho;
}

std::vector<unsigned char> support_mask(const SupportGeometry& geometry, const Grid& grid) {
    const double tol = SupportGeometry::on_interface_tolerance(grid);
    std::vector<unsigned char> mask(grid.size(), 0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto p = grid.position(n);
        mask[n] = geometry.signed_distance(p[0], p[1]) <= tol ? 1 : 0;
    }
    return mask;
}

}  // namespace fastreact
