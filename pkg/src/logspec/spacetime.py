"""Time-fractional diffusion on :math:`(-1, 1)^2` with GLOFs in time.

Solves

.. math::

    {}^C D^\\nu_t u - \\Delta u = f, \\quad u = 0 \\text{ on } \\partial\\Omega,
    \\quad u(x, 0) = 0,

on :math:`(0, T)`. Space uses the Legendre-Galerkin basis
:math:`\\psi_k = P_k - P_{k + 2}`, which is decoupled by the generalized
eigendecomposition of the 1D stiffness and mass matrices. Every spatial
eigenmode pair then gives a scalar Caputo IVP in time, solved with the GLOF
Galerkin scheme on :math:`(0, 1)` after rescaling :math:`t = T \\hat{t}`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import numpy.polynomial.legendre as npleg
import scipy.linalg as sla

from logspec.errors import DomainError, SingularSystemError
from logspec.fracops import caputo_rules, caputo_stiffness
from logspec.logbasis import (
    BasisParams,
    Expansion,
    gamma_norm,
    gauss_glof,
    glof_eval_all,
)
from logspec.solvers import SolverConfig, gram_matrix, solve_system

Array = np.ndarray
SpaceTimeFunction = Callable[[Array, Array, Array], Array]


# {{{ problem


@dataclass(frozen=True)
class DiffusionProblem:
    """Homogeneous Dirichlet data on the square and zero initial data."""

    nu: float
    f: SpaceTimeFunction
    T: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.nu < 1:
            raise DomainError(f"time order must be in (0, 1): {self.nu}")
        if not self.T > 0:
            raise DomainError(f"final time must be positive: {self.T}")


# }}}


# {{{ Legendre-Galerkin in space


@dataclass(frozen=True)
class SpaceOperator1D:
    """Stiffness :math:`A`, mass :math:`B` and the generalized eigenpairs
    :math:`A E = B E \\Lambda` with :math:`E^T B E = I`."""

    stiffness: Array
    mass: Array
    eigvecs: Array
    eigvals: Array

    @property
    def size(self) -> int:
        return self.eigvals.size

    def basis(self, x: Array) -> Array:
        """Values :math:`\\psi_k(x)` with shape ``(size, *x.shape)``."""
        return legendre_difference_eval(self.size - 1, x)


def legendre_difference_eval(K: int, x: float | Array) -> Array:
    """Evaluate :math:`\\psi_k = P_k - P_{k + 2}` for :math:`k = 0, \\dots, K`."""
    x = np.asarray(x, dtype=float)
    V = npleg.legvander(x, K + 2)
    V = np.moveaxis(V, -1, 0)
    return V[:-2] - V[2:]


def legendre_galerkin_1d(N_x: int) -> SpaceOperator1D:
    """Matrices of :math:`\\psi_0, \\dots, \\psi_{N_x - 2}` on :math:`(-1, 1)`.

    .. math::

        A_{kk} = 4 k + 6, \\qquad
        B_{kk} = \\frac{2}{2k + 1} + \\frac{2}{2k + 5}, \\qquad
        B_{k, k + 2} = B_{k + 2, k} = -\\frac{2}{2k + 5}.
    """
    if N_x < 2:
        raise ValueError(f"spatial degree must be at least 2: {N_x}")

    k = np.arange(N_x - 1, dtype=float)
    A = np.diag(4 * k + 6)
    B = np.diag(2 / (2 * k + 1) + 2 / (2 * k + 5))
    off = -2 / (2 * k[:-2] + 5)
    i = np.arange(off.size)
    B[i, i + 2] = B[i + 2, i] = off

    try:
        lam, E = sla.eigh(A, B)
    except sla.LinAlgError as exc:
        raise ArithmeticError(f"generalized eigensolve failed: {exc}") from exc

    return SpaceOperator1D(A, B, E, lam)


def _space_quadrature(N_x: int, nq: int | None = None) -> tuple[Array, Array]:
    return npleg.leggauss(N_x + 32 if nq is None else nq)


# }}}


# {{{ assembly


@dataclass(frozen=True)
class DiffusionSystem:
    """Everything the decoupled solves need.

    *load* holds the spatially tested forcing :math:`(f(\\cdot, T \\hat{t}),
    \\psi_k \\otimes \\psi_l)` interpolated in time, with shape
    ``(K, K, N_t + 1)`` (modal in time). The time matrices are those of the
    scalar IVP on :math:`(0, 1)`.
    """

    problem: DiffusionProblem
    space: SpaceOperator1D
    params: BasisParams
    stiffness: Array
    gram: Array
    load: Array

    @property
    def scale(self) -> float:
        return self.problem.T**self.problem.nu


def _time_transform(params: BasisParams, N: int) -> tuple[Array, Array]:
    # discrete transform from values at the N + 1 Gauss nodes to coefficients
    rule = gauss_glof(params, N)
    S = glof_eval_all(params, N, rule.nodes)
    Tm = S * rule.weights / gamma_norm(np.arange(N + 1), params.alpha, params.beta)[:, None]
    return rule.nodes, Tm


def spatial_load(
    f: SpaceTimeFunction, space: SpaceOperator1D, t: Array, *, nq: int | None = None
) -> Array:
    """Tested forcing :math:`\\int\\int f(x_1, x_2, t) \\psi_k(x_1) \\psi_l(x_2) dx`
    at every time in *t*, shape ``(K, K, t.size)``."""
    x, w = _space_quadrature(space.size + 1, nq)
    Psi = space.basis(x) * w

    X1, X2, TT = np.meshgrid(x, x, t, indexing="ij")
    fx = np.broadcast_to(np.asarray(f(X1, X2, TT), dtype=float), X1.shape)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        i, j, n = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise ArithmeticError(
            f"forcing is not finite at x = ({x[i]!r}, {x[j]!r}), t = {t[n]!r}"
        )

    return np.einsum("ka,lb,abn->kln", Psi, Psi, fx, optimize=True)


def assemble_diffusion(p: DiffusionProblem, N_x: int, c: SolverConfig) -> DiffusionSystem:
    space = legendre_galerkin_1d(N_x)

    rules = caputo_rules(c.params, p.nu, c.N, c.n_inner)
    S = caputo_stiffness(c.params, c.N, p.nu, rules)
    G = gram_matrix(c.params, c.N)

    that, Tm = _time_transform(c.params, c.N)
    F = spatial_load(p.f, space, p.T * that)
    load = F @ Tm.T

    return DiffusionSystem(p, space, c.params, S, G, load)


# }}}


# {{{ solve


@dataclass(frozen=True)
class SpaceTimeSolution:
    """Time expansions of the spatial eigenmodes.

    *coeffs* has shape ``(K, K, N_t + 1)``: entry ``(i, j, n)`` is the
    coefficient of :math:`S_n(t / T)` for the eigenmode pair :math:`(i, j)`.
    """

    space: SpaceOperator1D
    params: BasisParams
    T: float
    coeffs: Array
    cond: float

    def __post_init__(self) -> None:
        self.coeffs.setflags(write=False)

    def mode(self, i: int, j: int) -> Expansion:
        """Time expansion (on the rescaled interval) of the mode pair (i, j)."""
        return Expansion(self.params, self.coeffs[i, j].copy())

    def modal(self) -> Array:
        """Coefficients in the :math:`\\psi_k \\otimes \\psi_l \\otimes S_n` basis."""
        E = self.space.eigvecs
        return np.einsum("ki,ijn,lj->kln", E, self.coeffs, E, optimize=True)

    def grid(self, x1: Array, x2: Array, t: Array) -> Array:
        """Values on the tensor grid ``x1 x x2 x t``."""
        P1 = self.space.basis(np.asarray(x1, dtype=float))
        P2 = self.space.basis(np.asarray(x2, dtype=float))
        St = glof_eval_all(self.params, self.coeffs.shape[-1] - 1, np.asarray(t) / self.T)
        return np.einsum("kln,ka,lb,nc->abc", self.modal(), P1, P2, St, optimize=True)

    def __call__(self, x1: Array, x2: Array, t: Array) -> Array:
        x1, x2, t = np.broadcast_arrays(
            np.asarray(x1, dtype=float), np.asarray(x2, dtype=float), np.asarray(t, dtype=float)
        )
        P1 = self.space.basis(x1)
        P2 = self.space.basis(x2)
        St = glof_eval_all(self.params, self.coeffs.shape[-1] - 1, t / self.T)
        return np.einsum("kln,k...,l...,n...->...", self.modal(), P1, P2, St, optimize=True)


def solve_diffusion(p: DiffusionProblem, N_x: int, c: SolverConfig) -> SpaceTimeSolution:
    """Decouple in space and solve one scalar IVP per eigenmode pair.

    The pair :math:`(i, j)` solves :math:`(S + T^\\nu (\\Lambda_i + \\Lambda_j) G)
    v_{ij} = T^\\nu G \\tilde{f}_{ij}`, where :math:`\\tilde{f} = E^T F E` is the
    load in eigenspace.
    """
    system = assemble_diffusion(p, N_x, c)
    return solve_diffusion_system(system)


def solve_diffusion_system(system: DiffusionSystem) -> SpaceTimeSolution:
    E, lam = system.space.eigvecs, system.space.eigvals
    S, G, scale = system.stiffness, system.gram, system.scale

    ftilde = np.einsum("ki,kln,lj->ijn", E, system.load, E, optimize=True)
    rhs = scale * ftilde @ G.T

    K = lam.size
    coeffs = np.empty_like(rhs)
    cond = 0.0
    for i in range(K):
        for j in range(K):
            try:
                sol = solve_system(S + scale * (lam[i] + lam[j]) * G, rhs[i, j])
            except SingularSystemError as exc:
                raise SingularSystemError(f"mode ({i}, {j}): {exc}", exc.cond) from exc
            coeffs[i, j] = sol.x
            cond = max(cond, sol.cond)

    return SpaceTimeSolution(system.space, system.params, system.problem.T, coeffs, cond)


def decoupling_residual(system: DiffusionSystem, sol: SpaceTimeSolution) -> float:
    """Relative residual of the coupled space-time Galerkin equations

    .. math::

        \\sum_n S_{mn} B U_n B + T^\\nu G_{mn} (A U_n B + B U_n A)
            = T^\\nu \\sum_n G_{mn} F_n,

    rebuilt from the modal coefficients :math:`U_n` without the eigenbasis.
    """
    A, B = system.space.stiffness, system.space.mass
    S, G, scale = system.stiffness, system.gram, system.scale
    U = sol.modal()

    BUB = np.einsum("ka,abn,bl->kln", B, U, B, optimize=True)
    AUB = np.einsum("ka,abn,bl->kln", A, U, B, optimize=True)
    BUA = np.einsum("ka,abn,bl->kln", B, U, A, optimize=True)
    lhs = BUB @ S.T + scale * (AUB + BUA) @ G.T
    rhs = scale * system.load @ G.T

    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), np.finfo(float).tiny))


# }}}


# {{{ errors


def l2_error(
    sol: SpaceTimeSolution,
    ref: SpaceTimeSolution | SpaceTimeFunction,
    *,
    nq: int = 48,
    nt: int = 120,
) -> float:
    """:math:`L^2(\\Omega \\times (0, T))` error by Gauss-Legendre in space and
    a mapped Gauss rule (unit weight) in time."""
    x, w = npleg.leggauss(nq)
    rule = gauss_glof(BasisParams(0.0, 1.0, 0.0), nt)
    t = sol.T * rule.nodes

    u = sol.grid(x, x, t)
    if isinstance(ref, SpaceTimeSolution):
        r = ref.grid(x, x, t)
    else:
        X1, X2, TT = np.meshgrid(x, x, t, indexing="ij")
        r = np.broadcast_to(np.asarray(ref(X1, X2, TT), dtype=float), u.shape)

    d2 = np.einsum("abc,a,b,c->", (u - r) ** 2, w, w, rule.weights, optimize=True)
    return math.sqrt(sol.T * float(d2))


# }}}
