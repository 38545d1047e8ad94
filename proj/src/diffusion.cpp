#include "fastreact/diffusion.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "fastreact/error.hpp"

namespace fastreact {

namespace {

struct Coupling {
    std::size_t node;
    double coef;
};

// Off-diagonal couplings of the reflected central stencil at one node; the
// diagonal is minus their sum. At a domain face the ghost node mirrors the
// interior neighbour, doubling its coefficient.
template <class Fn>
void for_each_coupling(const Grid& g, std::size_t n, Fn&& fn) {
    const auto idx = g.unflatten(n);
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t i = idx[a];
        const std::size_t last = g.points(a) - 1;
        const double c = 1.0 / (g.spacing(a) * g.spacing(a));
        auto shifted = [&](std::size_t to) {
            auto k = idx;
            k[a] = to;
            return g.index(k[0], k[1]);
        };
        if (i == 0) {
            fn(Coupling{shifted(1), 2 * c});
        } else if (i == last) {
            fn(Coupling{shifted(last - 1), 2 * c});
        } else {
            fn(Coupling{shifted(i - 1), c});
            fn(Coupling{shifted(i + 1), c});
        }
    }
}

double theta_of(DiffusionScheme s) { return s == DiffusionScheme::CrankNicolson ? 0.5 : 1.0; }

}  // namespace

LinearStencil LinearStencil::neumann(const Grid& grid) {
    LinearStencil s;
    s.grid_ = grid;
    return s;
}

LinearStencil LinearStencil::dirichlet(const Grid& grid, std::vector<unsigned char> mask, std::vector<double> values) {
    if (mask.size() != grid.size()) throw ConfigError("stencil: mask size does not match the grid");
    if (!values.empty() && values.size() != grid.size())
        throw ConfigError("stencil: Dirichlet value count does not match the grid");
    LinearStencil s;
    s.grid_ = grid;
    s.mask_ = std::move(mask);
    s.values_ = std::move(values);
    return s;
}

Field LinearStencil::apply(const Field& f) const {
    Field out(grid_, f.t);
    for (std::size_t n = 0; n < grid_.size(); ++n) {
        if (is_fixed(n)) continue;
        double acc = 0.0;
        for_each_coupling(grid_, n, [&](const Coupling& c) { acc += c.coef * (f[c.node] - f[n]); });
        out[n] = acc;
    }
    return out;
}

Field neumann_laplacian(const Field& f) { return LinearStencil::neumann(f.grid).apply(f); }

DiffusionScheme monotone_scheme(const Grid& grid, double dt) {
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += 1.0 / (grid.spacing(a) * grid.spacing(a));
    return dt * s <= 1.0 * (1 + 1e-12) ? DiffusionScheme::CrankNicolson : DiffusionScheme::BackwardEuler;
}

const char* scheme_name(DiffusionScheme s) {
    return s == DiffusionScheme::CrankNicolson ? "crank-nicolson" : "backward-euler";
}

struct DiffusionSolver::Impl {
    // 1-D: tridiagonal rows (lower, diag, upper) of I - theta dt L, fixed rows identity.
    std::vector<double> lower, diag, upper;
    // 2-D: system over free nodes, symmetrised by the trapezoidal weights.
    std::vector<std::size_t> free_nodes;
    std::vector<std::ptrdiff_t> free_index;
    std::vector<double> weights;
    Eigen::SparseMatrix<double> matrix;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
};

DiffusionSolver::DiffusionSolver(const LinearStencil& stencil, double dt)
    : DiffusionSolver(stencil, dt, monotone_scheme(stencil.grid(), dt)) {}

DiffusionSolver::DiffusionSolver(const LinearStencil& stencil, double dt, DiffusionScheme scheme)
    : stencil_(stencil), dt_(dt), scheme_(scheme), impl_(std::make_unique<Impl>()) {
    if (!(dt > 0) || !std::isfinite(dt)) throw PreconditionError("diffusion step: dt must be positive");
    const Grid& g = stencil_.grid();
    const double a = theta_of(scheme_) * dt_;
    if (g.dim() == 1) {
        const std::size_t n = g.size();
        impl_->lower.assign(n, 0.0);
        impl_->diag.assign(n, 1.0);
        impl_->upper.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (stencil_.is_fixed(i)) continue;
            for_each_coupling(g, i, [&](const Coupling& c) {
                impl_->diag[i] += a * c.coef;
                (c.node < i ? impl_->lower[i] : impl_->upper[i]) -= a * c.coef;
            });
        }
        return;
    }
    auto& im = *impl_;
    im.free_index.assign(g.size(), -1);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (stencil_.is_fixed(n)) continue;
        im.free_index[n] = static_cast<std::ptrdiff_t>(im.free_nodes.size());
        im.free_nodes.push_back(n);
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(im.free_nodes.size() * 5);
    im.weights.resize(im.free_nodes.size());
    for (std::size_t r = 0; r < im.free_nodes.size(); ++r) {
        const std::size_t n = im.free_nodes[r];
        const double w = g.weight(n);
        im.weights[r] = w;
        double d = 1.0;
        for_each_coupling(g, n, [&](const Coupling& c) {
            d += a * c.coef;
            const auto col = im.free_index[c.node];
            if (col >= 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(col), -w * a * c.coef);
        });
        trip.emplace_back(static_cast<int>(r), static_cast<int>(r), w * d);
    }
    const auto m = static_cast<int>(im.free_nodes.size());
    im.matrix.resize(m, m);
    im.matrix.setFromTriplets(trip.begin(), trip.end());
    im.cg.setTolerance(1e-14);
    im.cg.setMaxIterations(std::max(200, 20 * m));
    im.cg.compute(im.matrix);
}

DiffusionSolver::~DiffusionSolver() = default;
DiffusionSolver::DiffusionSolver(DiffusionSolver&&) noexcept = default;
DiffusionSolver& DiffusionSolver::operator=(DiffusionSolver&&) noexcept = default;

void DiffusionSolver::step(std::vector<double>& u) const {
    const Grid& g = stencil_.grid();
    if (u.size() != g.size()) throw ConfigError("diffusion step: field size does not match the stencil grid");
    const double theta = theta_of(scheme_);
    const double explicit_part = (1.0 - theta) * dt_;
    const double implicit_part = theta * dt_;
    const std::size_t n = g.size();

    for (std::size_t i = 0; i < n; ++i)
        if (stencil_.is_fixed(i)) u[i] = stencil_.fixed_value(i);

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (stencil_.is_fixed(i)) {
            rhs[i] = u[i];
            continue;
        }
        double lap = 0.0;
        if (explicit_part > 0)
            for_each_coupling(g, i, [&](const Coupling& c) { lap += c.coef * (u[c.node] - u[i]); });
        rhs[i] = u[i] + explicit_part * lap;
    }

    if (g.dim() == 1) {
        // Thomas elimination; the matrix is a diagonally dominant M-matrix.
        const auto& lo = impl_->lower;
        const auto& di = impl_->diag;
        const auto& up = impl_->upper;
        std::vector<double> c(n), d(n);
        c[0] = up[0] / di[0];
        d[0] = rhs[0] / di[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = di[i] - lo[i] * c[i - 1];
            c[i] = up[i] / m;
            d[i] = (rhs[i] - lo[i] * d[i - 1]) / m;
        }
        u[n - 1] = d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
        return;
    }

    const auto& im = *impl_;
    const auto m = static_cast<Eigen::Index>(im.free_nodes.size());
    Eigen::VectorXd b(m), x0(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t node = im.free_nodes[static_cast<std::size_t>(r)];
        double extra = 0.0;
        for_each_coupling(g, node, [&](const Coupling& c) {
            if (im.free_index[c.node] < 0) extra += implicit_part * c.coef * u[c.node];
        });
        b[r] = im.weights[static_cast<std::size_t>(r)] * (rhs[node] + extra);
        x0[r] = u[node];
    }
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    if (bnorm > 0) {
        x = im.cg.solveWithGuess(b, x0);
        const double rel = (b - im.matrix * x).norm() / bnorm;
        if (!(rel <= 1e-12))
            throw NumericalError("diffusion step: conjugate gradients stopped at relative residual " +
                                 std::to_string(rel) + " after " + std::to_string(im.cg.iterations()) +
                                 " iterations");
    }
    for (Eigen::Index r = 0; r < m; ++r) u[im.free_nodes[static_cast<std::size_t>(r)]] = x[r];
}

Field implicit_diffusion_step(const Field& f, double dt, const LinearStencil& stencil) {
    DiffusionSolver solver(stencil, dt);
    Field out = f;
    solver.step(out.values);
    out.t = f.t + dt;
    return out;
}

Trajectory dirichlet_heat_solve(const Field& u0, const std::vector<unsigned char>& mask,
                                const std::vector<double>& values, std::span<const double> output_times, double dt) {
    const auto start = std::chrono::steady_clock::now();
    const LinearStencil stencil = LinearStencil::dirichlet(u0.grid, mask, values);
    const StepSchedule schedule = make_step_schedule(output_times, dt);

    Trajectory traj;
    traj.grid = u0.grid;
    traj.meta.dt = dt;
    traj.meta.steps = schedule.steps.size();
    traj.meta.scheme = scheme_name(monotone_scheme(u0.grid, dt));

    std::vector<double> u = u0.values;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (stencil.is_fixed(i)) u[i] = stencil.fixed_value(i);
    traj.times.push_back(output_times.front());
    traj.u.emplace_back(u0.grid, u, output_times.front());

    // One prepared solver per distinct step length (full steps and landing steps).
    std::vector<DiffusionSolver> solvers;
    auto solver_for = [&](double h) -> const DiffusionSolver& {
        for (const auto& s : solvers)
            if (s.dt() == h) return s;
        solvers.emplace_back(stencil, h, monotone_scheme(u0.grid, h));
        return solvers.back();
    };
    std::size_t next_mark = 1;
    for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
        solver_for(schedule.steps[s]).step(u);
        while (next_mark < schedule.marks.size() && schedule.marks[next_mark] == s + 1) {
            traj.times.push_back(output_times[next_mark]);
            traj.u.emplace_back(u0.grid, u, output_times[next_mark]);
            ++next_mark;
        }
    }
    traj.meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return traj;
}

Trajectory heat_reference_solve(const Field& u0, const SupportGeometry& geometry,
                                std::span<const double> output_times, double dt) {
    const auto mask = support_mask(geometry, u0.grid);
    for (std::size_t n = 0; n < u0.size(); ++n) {
        if (mask[n] && u0[n] > 0) {
            const auto p = u0.grid.position(n);
            throw PreconditionError("heat reference: u0 > 0 inside supp v0 at x = " + std::to_string(p[0]));
        }
    }
    return dirichlet_heat_solve(u0, mask, {}, output_times, dt);
}

Trajectory heat_reference_solve(const Field& u0, const SupportGeometry& geometry, double T, double dt,
                                std::size_t snapshots) {
    const auto times = uniform_times(T, snapshots);
    return heat_reference_solve(u0, geometry, times, dt);
}

}  // namespace fastreact
