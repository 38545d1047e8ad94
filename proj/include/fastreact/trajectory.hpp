#pragma once

#include <span>
#include <string>
#include <vector>

#include "fastreact/grid.hpp"

namespace fastreact {

/// Run bookkeeping recorded alongside every trajectory.
struct RunMetadata {
    double dt = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    /// "crank-nicolson" or "backward-euler".
    std::string scheme;
};

/// Time-stamped sequence of snapshots. `v` is empty for scalar problems
/// (the heat reference) and otherwise holds one field per time.
struct Trajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<Field> u;
    std::vector<Field> v;
    RunMetadata meta;

    std::size_t size() const { return times.size(); }
    bool has_v() const { return !v.empty(); }
};

/// Step sizes that advance from output_times.front() through every output
/// time: full steps of dt, with the last substep before each output time
/// shortened so that it lands exactly. Remainders below 1e-9 dt are absorbed
/// into the preceding step. `marks[i]` is the number of steps taken when
/// output_times[i] is reached. Throws PreconditionError unless the times are
/// strictly increasing and dt > 0.
struct StepSchedule {
    std::vector<double> steps;
    std::vector<std::size_t> marks;
};
StepSchedule make_step_schedule(std::span<const double> output_times, double dt);

/// Evenly spaced output times 0, T/(n-1), ..., T.
std::vector<double> uniform_times(double T, std::size_t n);

/// CSV export with header `t,x[,y],u,v` (v column omitted when absent),
/// one row per node per snapshot, values printed with %.17g.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
/// Reads a CSV written by write_trajectory_csv; the grid is reconstructed
/// from the node coordinates of the first snapshot.
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace fastreact
