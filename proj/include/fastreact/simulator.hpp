#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "fastreact/diffusion.hpp"
#include "fastreact/problem.hpp"
#include "fastreact/trajectory.hpp"

namespace fastreact {

struct ReactionParams {
    double k = 1.0;
    double m3 = 1.0;
    double m4 = 1.0;
};

/// Default step: min(h_*^2, c / (k max v0)) with h_*^2 = 1 / sum_a h_a^-2 the
/// largest step for which Crank-Nicolson stays monotone (h^2 in one
/// dimension). A positive solver.dt overrides the policy.
double policy_dt(const ProblemSpec& spec, double v0_max);

/// Reaction over tau at every node (see reaction_substep).
void react_in_place(std::vector<double>& u, std::vector<double>& v, const ReactionParams& p, double tau);

/// Half reaction, implicit diffusion of u over the solver's dt, half reaction.
void strang_step(std::vector<double>& u, std::vector<double>& v, const DiffusionSolver& diffusion,
                 const ReactionParams& p);
/// Convenience form on fields with a Neumann stencil and the monotone scheme for dt.
std::pair<Field, Field> strang_step(const Field& u, const Field& v, double dt, const ReactionParams& p);

/// Invariant bookkeeping accumulated during a run.
struct RunInvariants {
    /// max over steps of (mass after - mass before), trapezoidal mass of u
    double max_mass_increase = -INFINITY;
    /// max over steps and nodes of v_after - v_before
    double max_v_increase = -INFINITY;
    double min_u = INFINITY;
    double max_u = -INFINITY;
    double min_v = INFINITY;
    double max_v = -INFINITY;
};

/// Evolve an explicit initial pair. Output times must be strictly increasing
/// and nonnegative; t = 0 is used as the start whether or not it is listed.
/// Step sizes follow make_step_schedule with the given dt.
Trajectory run_from(const Field& u0, const Field& v0, const ReactionParams& p, std::span<const double> output_times,
                    double dt, RunInvariants* invariants = nullptr);

/// Evolve a problem with the policy step. Output times must lie in [0, T].
Trajectory run(const ProblemSpec& spec, std::span<const double> output_times, RunInvariants* invariants = nullptr);
/// Output times: uniform_times(T, spec.solver.snapshots).
Trajectory run(const ProblemSpec& spec, RunInvariants* invariants = nullptr);

}  // namespace fastreact
