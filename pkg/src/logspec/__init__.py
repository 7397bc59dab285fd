"""Spectral approximation with generalized log orthogonal functions (GLOFs)
and Galerkin solvers for fractional differential equations."""

from __future__ import annotations

from logspec.approx import (
    ErrorBound,
    SingularMonomial,
    WeightSpec,
    interpolate,
    project,
    projection_error_bound,
    singular_coeffs,
    singular_projection_error,
)
from logspec.errors import ConvergenceError, DomainError, SingularSystemError
from logspec.fracops import (
    caputo_bilinear,
    caputo_power_oracle,
    caputo_stiffness,
    mittag_leffler,
    rl_bilinear_bvp,
)
from logspec.laguerre import (
    Measure,
    QuadratureRule,
    jacobi_gauss,
    laguerre_eval_all,
    laguerre_gauss,
)
from logspec.logbasis import (
    BasisParams,
    Expansion,
    boundary_basis_eval,
    gauss_glof,
    glof_eval,
    glof_eval_all,
)
from logspec.solvers import (
    BvpProblem,
    IvpProblem,
    SolverConfig,
    solve_bvp,
    solve_ivp,
)
from logspec.spacetime import (
    DiffusionProblem,
    legendre_galerkin_1d,
    solve_diffusion,
)

__all__ = [
    "BasisParams",
    "BvpProblem",
    "ConvergenceError",
    "DiffusionProblem",
    "DomainError",
    "ErrorBound",
    "Expansion",
    "IvpProblem",
    "Measure",
    "QuadratureRule",
    "SingularMonomial",
    "SingularSystemError",
    "SolverConfig",
    "WeightSpec",
    "boundary_basis_eval",
    "caputo_bilinear",
    "caputo_power_oracle",
    "caputo_stiffness",
    "gauss_glof",
    "glof_eval",
    "glof_eval_all",
    "interpolate",
    "jacobi_gauss",
    "laguerre_eval_all",
    "laguerre_gauss",
    "legendre_galerkin_1d",
    "mittag_leffler",
    "project",
    "projection_error_bound",
    "rl_bilinear_bvp",
    "singular_coeffs",
    "singular_projection_error",
    "solve_bvp",
    "solve_diffusion",
    "solve_ivp",
]
