"""GLOF-Galerkin solvers for Caputo initial value and Riemann-Liouville
boundary value problems.

The IVP :math:`{}^C D^\\nu u + q u = g`, :math:`u(0) = u_0` is solved for
:math:`v = u - u_0` in the span of :math:`S_0, \\dots, S_N` (which vanish at
0 when :math:`\\beta > \\lambda`). The BVP :math:`-D^\\mu u + q u = g`,
:math:`u(0) = u(1) = 0` uses the boundary basis :math:`\\phi_1, \\dots, \\phi_N`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np
import scipy.linalg as sla

from logspec.approx import interpolate, project
from logspec.errors import DomainError, SingularSystemError
from logspec.fracops import caputo_rules, caputo_stiffness, rl_bvp_stiffness
from logspec.laguerre import QuadratureRule
from logspec.logbasis import (
    BasisParams,
    Expansion,
    boundary_stencil,
    gauss_glof,
    gauss_lof_power,
    lof_eval_log,
)

Array = np.ndarray
Function = Callable[[Array], Array]

#: Pivots below this multiple of their row norm are treated as zero.
PIVOT_RTOL = 1.0e-13


# {{{ problem and configuration


@dataclass(frozen=True)
class IvpProblem:
    nu: float
    q: Function | None
    g: Function
    u0: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.nu < 1:
            raise DomainError(f"IVP order must be in (0, 1): {self.nu}")


@dataclass(frozen=True)
class BvpProblem:
    mu: float
    q: Function | None
    g: Function

    def __post_init__(self) -> None:
        if not 1 < self.mu < 2:
            raise DomainError(f"BVP order must be in (1, 2): {self.mu}")


RhsMode = Literal["interpolate", "project"]


@dataclass(frozen=True)
class SolverConfig:
    params: BasisParams = field(default_factory=lambda: BasisParams(0.0, 5.0, 0.0))
    N: int = 16
    inner_rule_size: int | None = None
    """Index of the inner rules (``inner_rule_size + 1`` points), ``2 N + 16``
    by default. Also used for the mass matrix."""
    rhs_mode: RhsMode = "interpolate"

    def __post_init__(self) -> None:
        if not self.params.beta > self.params.lam:
            raise DomainError(f"trial spaces need beta > lambda: {self.params}")
        if self.N < 1:
            raise ValueError(f"N must be at least 1: {self.N}")
        if self.inner_rule_size is not None and self.inner_rule_size < self.N:
            raise ValueError(
                f"inner rule size must be >= N: {self.inner_rule_size} < {self.N}"
            )
        if self.rhs_mode not in ("interpolate", "project"):
            raise ValueError(f"unknown rhs mode: '{self.rhs_mode}'")

    @property
    def n_inner(self) -> int:
        return 2 * self.N + 16 if self.inner_rule_size is None else self.inner_rule_size

    def refined(self, extra: int = 8) -> SolverConfig:
        """Configuration with ``N + extra`` and doubled inner rules."""
        return replace(self, N=self.N + extra, inner_rule_size=2 * (2 * (self.N + extra) + 16))


# }}}


# {{{ assembly


@dataclass(frozen=True)
class GalerkinSystem:
    stiffness: Array
    mass: Array
    rhs: Array
    params: BasisParams
    kind: Literal["plain", "boundary"] = "plain"

    def __post_init__(self) -> None:
        n = self.rhs.shape[0]
        if self.stiffness.shape != (n, n) or self.mass.shape != (n, n):
            raise ValueError(
                f"inconsistent system sizes: {self.stiffness.shape}, "
                f"{self.mass.shape}, {self.rhs.shape}"
            )
        for name in ("stiffness", "mass", "rhs"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ArithmeticError(f"non-finite entries in the {name}")

    @property
    def matrix(self) -> Array:
        return self.stiffness + self.mass


def _sample(f: Function, t: Array, name: str) -> Array:
    fx = np.broadcast_to(np.asarray(f(t), dtype=float), t.shape)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ArithmeticError(f"{name} is not finite at t = {t[j]!r}")
    return fx


def _mass_rule(c: SolverConfig) -> QuadratureRule:
    # S_j S_k = t^{beta - lambda} L_j L_k, so fold the power into the weight
    p = c.params
    return gauss_lof_power(p.beta - p.lam, c.n_inner, warn=False)


def mass_matrix(q: Function | None, c: SolverConfig) -> Array:
    """:math:`M_{kj} = \\int_0^1 q S_j S_k dt`."""
    N = c.N
    if q is None:
        return np.zeros((N + 1, N + 1))

    rule = _mass_rule(c)
    logt = rule.log_nodes
    L = lof_eval_log(c.params, N, logt)
    qx = _sample(q, rule.nodes, "q")
    return (L * (qx * rule.weights)) @ L.T


def gram_matrix(params: BasisParams, N: int) -> Array:
    """Plain :math:`L^2` Gram matrix :math:`G_{kn} = (S_n, S_k)` (exact)."""
    rule = gauss_lof_power(params.beta - params.lam, N, warn=False)
    L = lof_eval_log(params, N, rule.log_nodes)
    return (L * rule.weights) @ L.T


def load_vector(Q: Function, c: SolverConfig) -> tuple[Array, Expansion]:
    """Vector :math:`f_k = (I_N Q, S_k)` (or with the projection) and the
    approximation of *Q* it is built from."""
    if c.rhs_mode == "interpolate":
        approx = interpolate(c.params, c.N, Q)
    else:
        approx = project(c.params, c.N, Q)

    return gram_matrix(c.params, c.N) @ approx.coeffs, approx


def _ivp_forcing(p: IvpProblem) -> Function:
    if p.q is None or p.u0 == 0:
        return p.g

    q, g, u0 = p.q, p.g, p.u0
    return lambda t: np.asarray(g(t), dtype=float) - u0 * np.asarray(q(t), dtype=float)


def assemble_ivp(p: IvpProblem, c: SolverConfig) -> GalerkinSystem:
    rules = caputo_rules(c.params, p.nu, c.N, c.n_inner)
    S = caputo_stiffness(c.params, c.N, p.nu, rules)
    M = mass_matrix(p.q, c)
    f, _ = load_vector(_ivp_forcing(p), c)

    return GalerkinSystem(S, M, f, c.params, "plain")


def assemble_bvp(p: BvpProblem, c: SolverConfig) -> GalerkinSystem:
    rules = caputo_rules(c.params, p.mu - 1, c.N, c.n_inner, test="derivative")
    P = boundary_stencil(c.params, c.N)

    S = P.T @ rl_bvp_stiffness(c.params, c.N, p.mu, rules) @ P
    M = P.T @ mass_matrix(p.q, c) @ P
    f, _ = load_vector(p.g, c)

    return GalerkinSystem(S, M, P.T @ f, c.params, "boundary")


# }}}


# {{{ solve


@dataclass(frozen=True)
class LinearSolve:
    x: Array
    cond: float


def _equilibration(K: Array) -> Array:
    # high modes have exponentially growing energy, so scale both sides by
    # |K_ii|^{-1/2} and fall back to the row maximum for zero diagonals
    d = np.abs(np.diag(K))
    rows = np.max(np.abs(K), axis=1)
    d = np.where(d > PIVOT_RTOL * rows, d, rows)
    return 1.0 / np.sqrt(d)


def solve_system(K: Array, f: Array) -> LinearSolve:
    """Dense LU solve with partial pivoting of the symmetrically equilibrated
    system and a 1-norm condition estimate of that system."""
    row_norms = np.max(np.abs(K), axis=1)
    if np.any(row_norms == 0):
        i = int(np.argmin(row_norms))
        raise SingularSystemError(f"row {i} of the system matrix is zero", math.inf)

    D = _equilibration(K)
    Ks = D[:, None] * K * D[None, :]
    row_norms = np.max(np.abs(Ks), axis=1)

    lu, piv, info = sla.lapack.dgetrf(Ks)
    if info < 0:
        raise ValueError(f"invalid argument {-info} to the LU factorization")
    if info > 0:
        raise SingularSystemError(f"pivot {info - 1} is exactly zero", math.inf)

    rcond, info = sla.lapack.dgecon(lu, np.linalg.norm(Ks, 1), norm="1")
    cond = math.inf if rcond == 0 or info != 0 else 1.0 / rcond

    # pivots are compared with the norm of the row they were taken from
    perm = np.arange(Ks.shape[0])
    for i, j in enumerate(piv):
        perm[i], perm[j] = perm[j], perm[i]
    pivots = np.abs(np.diag(lu))
    small = pivots < PIVOT_RTOL * row_norms[perm]
    if np.any(small):
        i = int(np.argmax(small))
        raise SingularSystemError(
            f"system is singular to working precision: pivot {i} is "
            f"{pivots[i]:.3e} (condition estimate {cond:.3e})",
            cond,
        )

    x, info = sla.lapack.dgetrs(lu, piv, D * f)
    return LinearSolve(D * x, cond)


@dataclass(frozen=True)
class IvpSolution:
    v: Expansion
    u0: float
    cond: float

    def __call__(self, t: float | Array) -> Array:
        return self.v(t) + self.u0


@dataclass(frozen=True)
class BvpSolution:
    u: Expansion
    cond: float

    def __call__(self, t: float | Array) -> Array:
        return self.u(t)


def solve_ivp(p: IvpProblem, c: SolverConfig) -> IvpSolution:
    system = assemble_ivp(p, c)
    sol = solve_system(system.matrix, system.rhs)
    return IvpSolution(Expansion(c.params, sol.x), p.u0, sol.cond)


def solve_bvp(p: BvpProblem, c: SolverConfig) -> BvpSolution:
    system = assemble_bvp(p, c)
    sol = solve_system(system.matrix, system.rhs)
    return BvpSolution(Expansion(c.params, sol.x, "boundary"), sol.cond)


# }}}


# {{{ errors


@dataclass(frozen=True)
class ErrorRecord:
    l2: float
    linf: float


#: Number of uniform sample points used for maximum errors.
LINF_POINTS = 1000
#: Index of the Gauss rule used for L^2 errors on (0, 1).
L2_RULE_INDEX = 200


def error_norms(
    u: Function, ref: Function, *, npoints: int = LINF_POINTS, rule_index: int = L2_RULE_INDEX
) -> ErrorRecord:
    """Maximum error on *npoints* uniform points of :math:`[0, 1]` and
    :math:`L^2(0, 1)` error by a mapped Gauss rule."""
    t = np.linspace(0.0, 1.0, npoints)
    linf = float(np.max(np.abs(u(t) - ref(t))))

    # unit weight, mapped with beta = 1 so nodes cluster at 0 where the
    # solutions are singular without underflowing
    rule = gauss_glof(BasisParams(0.0, 1.0, 0.0), rule_index)
    d = u(rule.nodes) - ref(rule.nodes)
    l2 = math.sqrt(float(d**2 @ rule.weights))

    return ErrorRecord(l2, linf)


# }}}
