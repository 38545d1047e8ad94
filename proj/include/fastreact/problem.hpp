#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastreact/expression.hpp"
#include "fastreact/geometry.hpp"
#include "fastreact/grid.hpp"

namespace fastreact {

/// Piecewise closed-form initial data. Each component has one expression on
/// supp v0 ("inside") and one on its complement ("outside").
struct InitialData {
    Expression u0_outside;
    Expression u0_inside = Expression::constant(0.0);
    Expression v0_inside = Expression::constant(1.0);
    Expression v0_outside = Expression::constant(0.0);
    friend bool operator==(const InitialData&, const InitialData&) = default;
};

/// Time-step policy and reproducibility knobs.
struct SolverSettings {
    /// dt = min(h^2, reaction_dt_factor / (k * max v0)) unless dt_override > 0.
    double reaction_dt_factor = 0.5;
    double dt_override = 0.0;
    std::uint64_t seed = 20240611;
    /// Number of evenly spaced output times in [0, T] (including both ends).
    std::size_t snapshots = 11;
    friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

/// Interior compact set and interface threshold used by convergence studies.
struct AnalysisSettings {
    /// Axis-aligned boxes; in 1-D each entry is an interval.
    std::vector<std::vector<Extent>> interior;
    /// Level used for interface tracking; <= 0 selects half the smallest positive v0.
    double theta = 0.0;
    friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

struct ProblemSpec {
    Grid grid;
    SupportGeometry geometry;
    InitialData initial;
    double k = 1.0;
    double m3 = 1.0;
    double m4 = 1.0;
    double T = 0.1;
    SolverSettings solver;
    AnalysisSettings analysis;

    /// True when (m3, m4) is in the range covered by the convergence theorem.
    bool exponents_admit_convergence() const { return m3 > 1.0 || m4 >= 2.0; }
    /// Throws ConfigError on out-of-range parameters.
    void validate() const;

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Nodal initial data with the segregation and nonnegativity checks applied.
/// u0 must be somewhere positive unless allow_zero_u0 is set (linear
/// constructions that accept trivial data).
std::pair<Field, Field> eval_initial_data(const ProblemSpec& spec, bool allow_zero_u0 = false);

/// Parse a problem description in TOML form. `overrides` are `section.key=value`
/// pairs applied before validation; unknown sections or keys are rejected.
ProblemSpec parse_problem(const std::string& toml_text, const std::vector<std::string>& overrides = {});
ProblemSpec load_problem(const std::string& path, const std::vector<std::string>& overrides = {});

/// Serialize a problem back into the TOML form accepted by parse_problem.
std::string to_toml(const ProblemSpec& spec);

/// Canonical test problem: domain (-1, 1), supp v0 = [-1, -0.3] u [0.3, 1],
/// v0 = 1 on it, u0 = cos(pi x / 0.6) on the gap.
ProblemSpec canonical_problem(std::size_t points = 801, double k = 1e4, double m3 = 2.0, double m4 = 1.0,
                              double T = 0.1);

}  // namespace fastreact
