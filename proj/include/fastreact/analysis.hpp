#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fastreact/barriers.hpp"
#include "fastreact/problem.hpp"
#include "fastreact/trajectory.hpp"

namespace fastreact {

/// A node at one snapshot.
struct NodeLocation {
    std::size_t node = 0;
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

// ---------------------------------------------------------------- comparison

/// Worst ordering margin min(u - u~, v~ - v) over nodes and snapshots.
struct ComparisonReport {
    bool pass = true;
    double tolerance = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    /// "u" or "v": the component holding the worst margin.
    std::string component;
    NodeLocation location;
};

/// Checks upper.u >= lower.u - tol and upper.v <= lower.v + tol everywhere.
/// Throws ConfigError on grid or time mismatch.
ComparisonReport comparison_check(const Trajectory& upper, const Trajectory& lower, double tol);

struct OrderedPairOptions {
    std::size_t pairs = 20;
    std::uint64_t seed = 20240611;
    double tolerance = 1e-10;
    std::size_t modes = 4;
};

struct OrderedPairSummary {
    std::uint64_t seed = 0;
    std::vector<ComparisonReport> reports;
    double worst_margin = std::numeric_limits<double>::infinity();
    bool pass = true;
};

/// Runs seeded random smooth ordered initial pairs (u >= u~, v <= v~) through
/// the simulator with a common step and checks that the order persists.
OrderedPairSummary random_ordered_pairs(const ProblemSpec& spec, const OrderedPairOptions& options = {});

// ---------------------------------------------------------------- interface

struct InterfaceCrossing {
    bool absorbed = false;
    /// 1-D: crossing coordinate; 2-D: mean signed distance of the crossings.
    double position = 0.0;
};

/// Linear-interpolated crossings of v = theta, one per interface component.
/// In 1-D each boundary point takes the nearest crossing between the midpoints
/// to its neighbouring boundary points; in 2-D crossings along grid edges are
/// averaged in signed distance. No crossing gives an absorbed verdict.
std::vector<InterfaceCrossing> interface_position(const Field& v, double theta, const SupportGeometry& geometry);

/// 0.5 * smallest positive v0 at the nodes.
double default_theta(const ProblemSpec& spec);

// ---------------------------------------------------------------- k sweep

struct SweepOptions {
    /// Compact subset of supp v0 for the v-deficit; empty uses spec.analysis.interior.
    std::vector<std::vector<Extent>> interior;
    /// <= 0 uses spec.analysis.theta, then default_theta.
    double theta = 0.0;
    double lower_tolerance = 1e-8;
    /// Run the k values concurrently.
    bool parallel = true;
};

struct SweepEntry {
    double k = 0.0;
    double sup_u_err = 0.0;
    NodeLocation sup_at;
    double v_deficit = 0.0;
    double interface_disp = 0.0;
    bool absorbed = false;
    /// min over nodes and snapshots of u_k - u_inf
    double min_u_minus_uinf = 0.0;
    /// max of u_k over supp v0 nodes (where u_inf = 0)
    double max_u_on_support = 0.0;
    double dt = 0.0;
    double h = 0.0;
    std::vector<double> sup_err_t, v_deficit_t, disp_t;
    RunMetadata meta;
};

struct ConvergenceReport {
    std::vector<double> times;
    double theta = 0.0;
    std::vector<SweepEntry> entries;
    std::vector<Check> checks;
    bool all_pass() const;
};

/// Simulates each k with one common step (the smallest policy step over the
/// list), computes u_inf once, and checks strict decrease of the sup error,
/// u_k >= u_inf - tol, successive v-deficit ratios in [5, 20] and an
/// interface displacement of at most 2h at the largest k.
ConvergenceReport k_sweep(const ProblemSpec& spec, const std::vector<double>& ks, const SweepOptions& options = {});

/// CSV `k,sup_u_err,v_deficit,interface_disp,dt,h`.
void write_convergence_csv(const ConvergenceReport& report, const std::string& path);
std::string convergence_json(const ConvergenceReport& report, int indent = 2);

// ---------------------------------------------------------------- dominance

struct DominanceReport {
    bool pass = true;
    double tolerance = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string component;
    NodeLocation location;
    std::size_t checked = 0;
};

/// Checks u <= U + tol and v >= V - tol at nodes with region != 0.
/// Throws ConfigError on grid, time or size mismatch.
DominanceReport dominance_check(const Trajectory& traj, const std::vector<double>& times, const std::vector<Field>& U,
                                const std::vector<Field>& V, const std::vector<std::vector<unsigned char>>& region,
                                double tol);
DominanceReport dominance_check(const Trajectory& traj, const GlobalBarrier& barrier, double tol);

/// Fresh simulation on the barrier's time levels with the step h_*^2
/// (the policy cap without the reaction restriction).
Trajectory simulate_for_dominance(const ProblemSpec& spec, const GlobalBarrier& barrier);

}  // namespace fastreact
