"""Fast-reaction limit solver with barrier certification and convergence analysis."""

from ._core import (
    AssumptionError,
    ConfigError,
    DomainError,
    Error,
    NumericalError,
    PreconditionError,
    ProblemSpec,
    SegregationError,
    canonical_problem,
    cosh_barrier,
    initial_data,
    k_sweep,
    load_problem,
    ode_barrier,
    parse_problem,
    point_ode_oracle,
    policy_dt,
    random_ordered_pairs,
    reaction_substep,
    run,
    traveling_supersolution,
    v_exact_update,
)

__all__ = [
    "AssumptionError",
    "ConfigError",
    "DomainError",
    "Error",
    "NumericalError",
    "PreconditionError",
    "ProblemSpec",
    "SegregationError",
    "canonical_problem",
    "cosh_barrier",
    "initial_data",
    "k_sweep",
    "load_problem",
    "ode_barrier",
    "parse_problem",
    "point_ode_oracle",
    "policy_dt",
    "random_ordered_pairs",
    "reaction_substep",
    "run",
    "traveling_supersolution",
    "v_exact_update",
]
