#include "fastreact/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "fastreact/error.hpp"
#include "fastreact/reaction.hpp"

namespace fastreact {

double policy_dt(const ProblemSpec& spec, double v0_max) {
    if (spec.solver.dt_override > 0) return spec.solver.dt_override;
    double inv = 0.0;
    for (int a = 0; a < spec.grid.dim(); ++a) inv += 1.0 / (spec.grid.spacing(a) * spec.grid.spacing(a));
    const double diffusive = 1.0 / inv;
    const double k_eff = spec.k * v0_max;
    if (!(k_eff > 0)) return diffusive;
    return std::min(diffusive, spec.solver.reaction_dt_factor / k_eff);
}

void react_in_place(std::vector<double>& u, std::vector<double>& v, const ReactionParams& p, double tau) {
    for (std::size_t n = 0; n < u.size(); ++n) {
        const ReactionState s = reaction_substep({u[n], v[n], 0.0}, p.k, p.m3, p.m4, tau);
        u[n] = s.u;
        v[n] = s.v;
    }
}

void strang_step(std::vector<double>& u, std::vector<double>& v, const DiffusionSolver& diffusion,
                 const ReactionParams& p) {
    const double half = 0.5 * diffusion.dt();
    react_in_place(u, v, p, half);
    diffusion.step(u);
    react_in_place(u, v, p, half);
}

std::pair<Field, Field> strang_step(const Field& u, const Field& v, double dt, const ReactionParams& p) {
    if (!(dt > 0)) throw PreconditionError("strang_step: dt must be positive");
    if (u.min() < 0 || v.min() < 0) throw PreconditionError("strang_step: fields must be nonnegative");
    const DiffusionSolver solver(LinearStencil::neumann(u.grid), dt);
    Field u1 = u, v1 = v;
    strang_step(u1.values, v1.values, solver, p);
    u1.t = v1.t = u.t + dt;
    return {std::move(u1), std::move(v1)};
}

Trajectory run_from(const Field& u0, const Field& v0, const ReactionParams& p, std::span<const double> output_times,
                    double dt, RunInvariants* invariants) {
    const auto start = std::chrono::steady_clock::now();
    if (!(u0.grid == v0.grid)) throw ConfigError("run: u0 and v0 live on different grids");
    if (!(p.k > 0) || !(p.m3 >= 1) || !(p.m4 >= 1)) throw ConfigError("run: need k > 0, m3 >= 1, m4 >= 1");
    if (output_times.empty()) throw PreconditionError("run: no output times");
    if (output_times.front() < 0) throw PreconditionError("run: output times must be nonnegative");
    if (u0.min() < 0 || v0.min() < 0) throw PreconditionError("run: initial fields must be nonnegative");

    std::vector<double> times;
    const bool record_start = output_times.front() == 0.0;
    if (!record_start) times.push_back(0.0);
    times.insert(times.end(), output_times.begin(), output_times.end());
    const StepSchedule schedule = make_step_schedule(times, dt);

    const Grid& g = u0.grid;
    const LinearStencil stencil = LinearStencil::neumann(g);
    std::vector<DiffusionSolver> solvers;
    auto solver_for = [&](double h) -> const DiffusionSolver& {
        for (const auto& s : solvers)
            if (s.dt() == h) return s;
        solvers.emplace_back(stencil, h, monotone_scheme(g, h));
        return solvers.back();
    };

    Trajectory traj;
    traj.grid = g;
    traj.meta.dt = dt;
    traj.meta.steps = schedule.steps.size();
    traj.meta.scheme = scheme_name(monotone_scheme(g, dt));

    std::vector<double> u = u0.values, v = v0.values;
    RunInvariants inv;
    auto track_bounds = [&] {
        for (std::size_t n = 0; n < u.size(); ++n) {
            inv.min_u = std::min(inv.min_u, u[n]);
            inv.max_u = std::max(inv.max_u, u[n]);
            inv.min_v = std::min(inv.min_v, v[n]);
            inv.max_v = std::max(inv.max_v, v[n]);
        }
    };
    auto mass = [&](const std::vector<double>& f) {
        double m = 0.0;
        for (std::size_t n = 0; n < f.size(); ++n) m += g.weight(n) * f[n];
        return m;
    };
    track_bounds();
    if (record_start) {
        traj.times.push_back(0.0);
        traj.u.emplace_back(g, u, 0.0);
        traj.v.emplace_back(g, v, 0.0);
    }

    std::vector<double> v_prev;
    std::size_t next_mark = 1;
    for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
        const double m_before = mass(u);
        v_prev = v;
        strang_step(u, v, solver_for(schedule.steps[s]), p);
        inv.max_mass_increase = std::max(inv.max_mass_increase, mass(u) - m_before);
        for (std::size_t n = 0; n < v.size(); ++n) inv.max_v_increase = std::max(inv.max_v_increase, v[n] - v_prev[n]);
        track_bounds();
        while (next_mark < schedule.marks.size() && schedule.marks[next_mark] == s + 1) {
            traj.times.push_back(times[next_mark]);
            traj.u.emplace_back(g, u, times[next_mark]);
            traj.v.emplace_back(g, v, times[next_mark]);
            ++next_mark;
        }
    }
    for (const auto& f : traj.u)
        if (!f.all_finite()) throw NumericalError("run: nonfinite values in u");
    traj.meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (invariants) *invariants = inv;
    return traj;
}

Trajectory run(const ProblemSpec& spec, std::span<const double> output_times, RunInvariants* invariants) {
    spec.validate();
    for (double t : output_times)
        if (t < 0 || t > spec.T * (1 + 1e-12)) throw PreconditionError("run: output time outside [0, T]");
    const auto [u0, v0] = eval_initial_data(spec);
    return run_from(u0, v0, {spec.k, spec.m3, spec.m4}, output_times, policy_dt(spec, v0.max()), invariants);
}

Trajectory run(const ProblemSpec& spec, RunInvariants* invariants) {
    const auto times = uniform_times(spec.T, spec.solver.snapshots);
    return run(spec, times, invariants);
}

}  // namespace fastreact
