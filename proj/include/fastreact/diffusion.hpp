#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fastreact/geometry.hpp"
#include "fastreact/grid.hpp"
#include "fastreact/trajectory.hpp"

namespace fastreact {

/// Second-order central Laplacian with ghost-node reflection at the domain
/// boundary (homogeneous Neumann), optionally with a set of nodes held at
/// prescribed Dirichlet values.
///
/// The operator is symmetric with respect to the trapezoidal inner product
/// sum_i w_i f_i g_i, so the conserved discrete mass is the trapezoidal sum.
class LinearStencil {
public:
    static LinearStencil neumann(const Grid& grid);
    /// Nodes with mask[n] != 0 are fixed at values[n] (0 when values is empty).
    static LinearStencil dirichlet(const Grid& grid, std::vector<unsigned char> mask, std::vector<double> values = {});

    const Grid& grid() const { return grid_; }
    bool has_dirichlet() const { return !mask_.empty(); }
    bool is_fixed(std::size_t n) const { return !mask_.empty() && mask_[n] != 0; }
    double fixed_value(std::size_t n) const { return values_.empty() ? 0.0 : values_[n]; }

    /// Laplacian at every node; rows of fixed nodes are zero.
    Field apply(const Field& f) const;

private:
    Grid grid_;
    std::vector<unsigned char> mask_;
    std::vector<double> values_;
};

/// Neumann Laplacian of a field (no fixed nodes).
Field neumann_laplacian(const Field& f);

enum class DiffusionScheme { CrankNicolson, BackwardEuler };

/// Crank-Nicolson when the explicit half keeps nonnegative coefficients,
/// dt * sum_a 1/h_a^2 <= 1 (dt <= h^2 in one dimension); otherwise backward Euler.
DiffusionScheme monotone_scheme(const Grid& grid, double dt);
const char* scheme_name(DiffusionScheme s);

/// Prepared implicit step (I - theta dt L) u' = (I + (1 - theta) dt L) u for one dt.
/// 1-D systems are solved directly (tridiagonal elimination); 2-D systems by
/// Jacobi-preconditioned conjugate gradients on the weight-symmetrised system,
/// with relative residual <= 1e-12 or NumericalError.
class DiffusionSolver {
public:
    DiffusionSolver(const LinearStencil& stencil, double dt);
    DiffusionSolver(const LinearStencil& stencil, double dt, DiffusionScheme scheme);
    ~DiffusionSolver();
    DiffusionSolver(DiffusionSolver&&) noexcept;
    DiffusionSolver& operator=(DiffusionSolver&&) noexcept;

    double dt() const { return dt_; }
    DiffusionScheme scheme() const { return scheme_; }
    /// Advance in place.
    void step(std::vector<double>& u) const;

private:
    struct Impl;
    LinearStencil stencil_;
    double dt_;
    DiffusionScheme scheme_;
    std::unique_ptr<Impl> impl_;
};

/// One implicit diffusion step with the monotone scheme choice for dt.
Field implicit_diffusion_step(const Field& f, double dt, const LinearStencil& stencil);

/// Heat flow on the complement of supp v0 with zero Dirichlet data on the
/// nodes inside or on supp v0, extended by zero there. The step sequence is
/// make_step_schedule(output_times, dt). Throws PreconditionError if u0 is
/// positive on supp v0.
Trajectory heat_reference_solve(const Field& u0, const SupportGeometry& geometry,
                                std::span<const double> output_times, double dt);
Trajectory heat_reference_solve(const Field& u0, const SupportGeometry& geometry, double T, double dt,
                                std::size_t snapshots = 11);

/// Heat flow with an arbitrary set of fixed nodes (mask) and values.
Trajectory dirichlet_heat_solve(const Field& u0, const std::vector<unsigned char>& mask,
                                const std::vector<double>& values, std::span<const double> output_times, double dt);

}  // namespace fastreact
