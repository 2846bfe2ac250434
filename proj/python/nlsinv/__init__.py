"""Python bindings for the nlsinv reconstruction library."""

from ._core import (
    FormatError,
    ParameterError,
    SolverError,
    cli,
    default_config,
    dirichlet_eigenvalues,
    grid_points,
    make_zeta,
    pie_terms,
    plan_frequencies,
    polarize,
    reconstruct,
    solve_helmholtz,
    solve_nonlinear,
)

__all__ = [
    "FormatError",
    "ParameterError",
    "SolverError",
    "cli",
    "default_config",
    "dirichlet_eigenvalues",
    "grid_points",
    "make_zeta",
    "pie_terms",
    "plan_frequencies",
    "polarize",
    "reconstruct",
    "solve_helmholtz",
    "solve_nonlinear",
]
